//! Subcommand bodies: thin wiring from parsed flags to the library calls,
//! plus the error-to-exit-code policy and the run-metadata artifact.

use crate::args::{
    CompareArgs, DemodulateArgs, DesignArgs, SimulateArgs, SnrArgs, SpectrumArgs, StepSource,
};
use phasestep_core::{
    demodulate, linear_lspsa, mc_snr_gain, pca_demodulate, phase_error, read_design, read_stack,
    sample_spectrum, simulate_stack, snr_gain, solve_coefficients, synth_phase_map, write_design,
    write_grid_csv, write_spectrum_csv, write_stack, write_stats_json, add_awgn, default_zero_set,
    AnalysisError, CoefficientSet, DemodError, DesignError, DesignSpec, FringeProfile, Harmonic,
    IoError, PcaError, PhaseSteps, SceneError, SceneKind,
};
use serde_json::json;
use std::fs;
use std::path::Path;

/// Anything a subcommand can fail with, carrying its process exit code:
/// 2 for misuse of the flag surface, 3 for domain failures (singular,
/// degenerate, mismatched), 4 for filesystem trouble.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Demod(#[from] DemodError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    File(#[from] IoError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_)
            | CliError::Design(_)
            | CliError::Analysis(_)
            | CliError::Scene(_)
            | CliError::Demod(_)
            | CliError::Pca(_) => 3,
            // A file that parses but violates a domain rule is a domain
            // failure, not an I/O one.
            CliError::File(IoError::Design(_)) | CliError::File(IoError::Scene(_)) => 3,
            CliError::File(_) => 4,
        }
    }
}

fn file_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::File(IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn resolve_steps(source: &StepSource) -> Result<PhaseSteps, CliError> {
    match (&source.steps, source.uniform) {
        (Some(values), None) => Ok(PhaseSteps::new(values.clone())?),
        (None, Some(n)) => Ok(PhaseSteps::uniform(n)?),
        _ => unreachable!("the flag group admits exactly one source"),
    }
}

/// "order:amplitude" pairs, comma-separated, e.g. "1:1.0,3:0.5".
fn parse_harmonics(text: &str) -> Result<Vec<Harmonic>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let (order, amplitude) = part.split_once(':').ok_or_else(|| {
            CliError::Usage(format!(
                "harmonic {part:?} must be an order:amplitude pair, e.g. 1:1.0"
            ))
        })?;
        let order: u32 = order.trim().parse().map_err(|_| {
            CliError::Usage(format!("harmonic order {order:?} must be a positive integer"))
        })?;
        let amplitude: f64 = amplitude.trim().parse().map_err(|_| {
            CliError::Usage(format!("harmonic amplitude {amplitude:?} must be a real number"))
        })?;
        out.push(Harmonic { order, amplitude });
    }
    Ok(out)
}

/// Every directory-producing run records what produced it. The config holds
/// the subcommand's own parameters only; the global thread count is an
/// execution detail that must not show up in artifacts, because outputs are
/// required to be byte-identical at any thread count.
fn write_run_metadata(
    dir: &Path,
    command: &str,
    config: serde_json::Value,
) -> Result<(), CliError> {
    let record = json!({
        "command": command,
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let text =
        serde_json::to_string_pretty(&record).expect("metadata serialization cannot fail");
    let path = dir.join("run-metadata.json");
    fs::write(&path, text + "\n").map_err(|source| file_error(&path, source))
}

fn print_coefficients(coeffs: &CoefficientSet) {
    println!("  n     theta_n                      c_n");
    for (n, (c, &theta)) in coeffs
        .values()
        .iter()
        .zip(coeffs.steps().values())
        .enumerate()
    {
        println!("{n:>3}  {theta:>10.6}  {:>12.6} {:>+.6}i", c.re, c.im);
    }
    println!("condition: {:.3e}", coeffs.condition_estimate());
}

pub fn cmd_design(args: &DesignArgs) -> Result<(), CliError> {
    let coeffs = match (&args.zeros, args.source.uniform) {
        // Bare uniform lattice: the closed-form filter, no solve.
        (None, Some(n)) => linear_lspsa(n)?,
        (None, None) => {
            let steps = resolve_steps(&args.source)?;
            let spec = default_zero_set(steps.len())?;
            solve_coefficients(&steps, &spec)?
        }
        (Some(zeros), _) => {
            let steps = resolve_steps(&args.source)?;
            if zeros.len() + 1 != steps.len() {
                return Err(CliError::Usage(format!(
                    "{} steps need exactly {} zeros (one constraint per step), got {}",
                    steps.len(),
                    steps.len() - 1,
                    zeros.len()
                )));
            }
            let spec = DesignSpec::quadrature(args.pass_omega.unwrap_or(1.0), zeros)?;
            solve_coefficients(&steps, &spec)?
        }
    };
    print_coefficients(&coeffs);
    if let Some(out) = &args.out {
        write_design(out, &coeffs)?;
    }
    Ok(())
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    if args.range.len() != 2 {
        return Err(CliError::Usage(format!(
            "--range takes exactly two values min,max, got {}",
            args.range.len()
        )));
    }
    let coeffs = read_design(&args.design)?;
    let samples = sample_spectrum(&coeffs, args.range[0], args.range[1], args.count)?;
    write_spectrum_csv(&args.out, &samples)?;
    Ok(())
}

pub fn cmd_snr(args: &SnrArgs) -> Result<(), CliError> {
    let coeffs = match (&args.design, args.uniform) {
        (Some(path), None) => read_design(path)?,
        (None, Some(n)) => linear_lspsa(n)?,
        _ => unreachable!("the flag group admits exactly one source"),
    };
    let gain = snr_gain(&coeffs, coeffs.pass_omega())?;
    println!("{gain:.3}");
    if let Some(mc) = &args.mc {
        let trials: u64 = mc[0].parse().map_err(|_| {
            CliError::Usage(format!("--mc TRIALS must be an unsigned integer, got {:?}", mc[0]))
        })?;
        let sigma: f64 = mc[1].parse().map_err(|_| {
            CliError::Usage(format!("--mc SIGMA must be a real number, got {:?}", mc[1]))
        })?;
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(CliError::Usage(format!(
                "--mc SIGMA must be finite and positive, got {sigma}"
            )));
        }
        let seed: u64 = mc[2].parse().map_err(|_| {
            CliError::Usage(format!("--mc SEED must be an unsigned integer, got {:?}", mc[2]))
        })?;
        let estimate = mc_snr_gain(&coeffs, sigma, trials, seed)?;
        println!("mc {estimate:.3}");
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let steps = resolve_steps(&args.source)?;
    let kind: SceneKind = args
        .scene
        .parse()
        .map_err(|e: SceneError| CliError::Usage(e.to_string()))?;
    let harmonics = parse_harmonics(&args.harmonics)?;
    if !args.sigma.is_finite() || args.sigma < 0.0 {
        return Err(CliError::Usage(format!(
            "--sigma must be finite and nonnegative, got {}",
            args.sigma
        )));
    }
    // Default background: half of (fundamental amplitude + total amplitude),
    // which keeps a two-term fringe nonnegative and scales with distortion.
    let background = args.background.unwrap_or_else(|| {
        let fundamental = harmonics
            .iter()
            .find(|h| h.order == 1)
            .map_or(0.0, |h| h.amplitude);
        let total: f64 = harmonics.iter().map(|h| h.amplitude).sum();
        0.5 * (fundamental + total)
    });
    if let Some(b) = args.background {
        if !b.is_finite() {
            return Err(CliError::Usage(format!(
                "--background must be finite, got {b}"
            )));
        }
    }
    let width = args.width.get();
    let height = args.height.get();
    let truth = synth_phase_map(kind, &args.params, width, height)?;
    let profile = FringeProfile::new(background, harmonics.clone(), args.sigma, args.seed)?;
    let clean = simulate_stack(&truth, &steps, &profile);
    let stack = if args.sigma > 0.0 {
        add_awgn(&clean, args.sigma, args.seed)
    } else {
        clean
    };
    write_stack(&args.out, &stack)?;
    let harmonics_json: Vec<serde_json::Value> = harmonics
        .iter()
        .map(|h| json!({ "order": h.order, "amplitude": h.amplitude }))
        .collect();
    write_run_metadata(
        &args.out,
        "simulate",
        json!({
            "steps": steps.values(),
            "scene": args.scene,
            "params": args.params,
            "width": width,
            "height": height,
            "harmonics": harmonics_json,
            "background": background,
            "sigma": args.sigma,
            "seed": args.seed,
            "out": args.out.display().to_string(),
        }),
    )?;
    println!(
        "wrote {} frames of {}x{} to {}",
        stack.frames().len(),
        width,
        height,
        args.out.display()
    );
    Ok(())
}

pub fn cmd_demodulate(args: &DemodulateArgs) -> Result<(), CliError> {
    let stack = read_stack(&args.stack)?;
    let coeffs = read_design(&args.design)?;
    let result = demodulate(&stack, &coeffs)?;
    phasestep_core::write_demod_result(&args.out, &result)?;
    if let Some(truth) = stack.truth() {
        let stats = phase_error(result.phase(), truth, args.remove_piston)?;
        write_stats_json(&args.out.join("stats.json"), &stats, None)?;
        println!("rms {:.6e}", stats.rms);
        println!("max {:.6e}", stats.max_abs);
    }
    write_run_metadata(
        &args.out,
        "demodulate",
        json!({
            "stack": args.stack.display().to_string(),
            "design": args.design.display().to_string(),
            "out": args.out.display().to_string(),
            "remove_piston": args.remove_piston,
        }),
    )?;
    Ok(())
}

/// How many times larger the baseline's error must be before the report
/// flags the two methods as clearly separated.
const SEPARATION_FLAG_RATIO: f64 = 1e3;

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let stack = read_stack(&args.stack)?;
    let coeffs = read_design(&args.design)?;
    let truth = stack
        .truth()
        .ok_or_else(|| {
            CliError::Data(
                "stack carries no ground truth; comparison needs truth.csv".to_string(),
            )
        })?
        .clone();
    fs::create_dir_all(&args.out).map_err(|source| file_error(&args.out, source))?;
    let (w, h) = (stack.width(), stack.height());

    let nl = demodulate(&stack, &coeffs)?;
    // Both methods are scored with the constant offset removed: the
    // baseline cannot see absolute phase, so that is the fair metric.
    let nl_stats = phase_error(nl.phase(), &truth, true)?;
    write_grid_csv(&args.out.join("nl_phase.csv"), w, h, nl.phase().values())?;
    write_grid_csv(&args.out.join("nl_amplitude.csv"), w, h, nl.amplitude())?;
    write_stats_json(&args.out.join("nl_stats.json"), &nl_stats, None)?;
    println!("nl  rms {:.6e}  max {:.6e}", nl_stats.rms, nl_stats.max_abs);

    // The baseline failing on a degenerate stack is a finding worth
    // recording, not a process failure.
    let pca_column = match pca_demodulate(&stack) {
        Ok(pca) => {
            let pca_stats = phase_error(pca.phase(), &truth, true)?;
            write_grid_csv(&args.out.join("pca_phase.csv"), w, h, pca.phase().values())?;
            write_stats_json(
                &args.out.join("pca_stats.json"),
                &pca_stats,
                Some(pca.sign_aligned()),
            )?;
            println!(
                "pca rms {:.6e}  max {:.6e}",
                pca_stats.rms, pca_stats.max_abs
            );
            Ok((pca, pca_stats))
        }
        Err(e @ PcaError::DegenerateStack { .. }) => {
            println!("pca error: {e}");
            Err(e.to_string())
        }
    };

    let (pca_json, separation, well_separated) = match &pca_column {
        Ok((pca, stats)) => {
            let separation = if nl_stats.rms > 0.0 {
                Some(stats.rms / nl_stats.rms)
            } else {
                None
            };
            let well_separated = match separation {
                Some(ratio) => ratio >= SEPARATION_FLAG_RATIO,
                None => stats.rms > 0.0,
            };
            (
                json!({
                    "rms": stats.rms,
                    "max_abs": stats.max_abs,
                    "sign_aligned": pca.sign_aligned(),
                }),
                separation,
                well_separated,
            )
        }
        Err(message) => (json!({ "error": message }), None, false),
    };
    let report = json!({
        "nl": { "rms": nl_stats.rms, "max_abs": nl_stats.max_abs },
        "pca": pca_json,
        "separation": separation,
        "well_separated": well_separated,
    });
    let report_path = args.out.join("compare.json");
    let text = serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
    fs::write(&report_path, text + "\n").map_err(|source| file_error(&report_path, source))?;
    match separation {
        Some(ratio) if well_separated => println!("separation {ratio:.3e} (well separated)"),
        Some(ratio) => println!("separation {ratio:.3e}"),
        None => {}
    }

    write_run_metadata(
        &args.out,
        "compare",
        json!({
            "stack": args.stack.display().to_string(),
            "design": args.design.display().to_string(),
            "out": args.out.display().to_string(),
        }),
    )?;
    Ok(())
}
