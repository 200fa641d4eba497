//! File formats: design documents (JSON), spectrum and grid CSVs, and
//! fringe-stack directories. All float text is written with 17 significant
//! digits, enough to reproduce every f64 bit-exactly on read.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::SpectrumSamples;
use crate::demod::{DemodResult, PhaseErrorStats};
use crate::design::{CoefficientSet, Constraint, DesignError, DesignSpec};
use crate::fringe::{FringeProfile, FringeStack, Harmonic, PhaseMap, SceneError};
use crate::steps::PhaseSteps;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn malformed(path: &Path, reason: impl Into<String>) -> IoError {
    IoError::Malformed {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// 17 significant digits: lossless for f64 and stable across runs.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------- designs

#[derive(Deserialize)]
struct DesignFile {
    steps: Vec<f64>,
    constraints: Vec<ConstraintRecord>,
    coefficients: Vec<ComplexRecord>,
    condition: f64,
}

#[derive(Deserialize)]
struct ConstraintRecord {
    omega: f64,
    re: f64,
    im: f64,
}

#[derive(Deserialize)]
struct ComplexRecord {
    re: f64,
    im: f64,
}

/// Writes a design document: steps, the constraint system, the solved
/// coefficients, and the condition estimate.
pub fn write_design(path: &Path, coeffs: &CoefficientSet) -> Result<(), IoError> {
    let mut out = String::new();
    out.push_str("{\n  \"steps\": [");
    for (i, &s) in coeffs.steps().values().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_float(s));
    }
    out.push_str("],\n  \"constraints\": [\n");
    for (i, c) in coeffs.spec().constraints().iter().enumerate() {
        let _ = write!(
            out,
            "    {{\"omega\": {}, \"re\": {}, \"im\": {}}}{}\n",
            fmt_float(c.omega),
            fmt_float(c.target.re),
            fmt_float(c.target.im),
            if i + 1 < coeffs.spec().len() { "," } else { "" }
        );
    }
    out.push_str("  ],\n  \"coefficients\": [\n");
    for (i, c) in coeffs.values().iter().enumerate() {
        let _ = write!(
            out,
            "    {{\"re\": {}, \"im\": {}}}{}\n",
            fmt_float(c.re),
            fmt_float(c.im),
            if i + 1 < coeffs.values().len() { "," } else { "" }
        );
    }
    let _ = write!(
        out,
        "  ],\n  \"condition\": {}\n}}\n",
        fmt_float(coeffs.condition_estimate())
    );
    fs::write(path, out).map_err(io_err(path))
}

/// Reads a design document back into a coefficient set. Constraint targets
/// must be exactly 0 or 1; anything else cannot have come from this writer.
pub fn read_design(path: &Path) -> Result<CoefficientSet, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let file: DesignFile =
        serde_json::from_str(&text).map_err(|e| malformed(path, e.to_string()))?;
    let steps = PhaseSteps::new(file.steps)?;
    let mut constraints = Vec::with_capacity(file.constraints.len());
    for (i, c) in file.constraints.iter().enumerate() {
        if c.re == 1.0 && c.im == 0.0 {
            constraints.push(Constraint::unit(c.omega));
        } else if c.re == 0.0 && c.im == 0.0 {
            constraints.push(Constraint::zero(c.omega));
        } else {
            return Err(malformed(
                path,
                format!("constraint {i} target must be 0 or 1, got {}+{}i", c.re, c.im),
            ));
        }
    }
    let spec = DesignSpec::new(constraints)?;
    let values = file
        .coefficients
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect();
    if !file.condition.is_finite() || file.condition < 1.0 {
        return Err(malformed(
            path,
            format!("condition estimate must be finite and at least 1, got {}", file.condition),
        ));
    }
    Ok(CoefficientSet::assemble(values, steps, spec, file.condition)?)
}

// ---------------------------------------------------------------- spectra

/// Writes sampled spectrum values as `omega,re,im,mag` rows.
pub fn write_spectrum_csv(path: &Path, samples: &SpectrumSamples) -> Result<(), IoError> {
    let mut out = String::from("omega,re,im,mag\n");
    for (&omega, value) in samples.omegas().iter().zip(samples.values()) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_float(omega),
            fmt_float(value.re),
            fmt_float(value.im),
            fmt_float(value.norm())
        );
    }
    fs::write(path, out).map_err(io_err(path))
}

// ------------------------------------------------------------------ grids

/// Writes a row-major grid, one image row per line.
pub fn write_grid_csv(
    path: &Path,
    width: usize,
    height: usize,
    values: &[f64],
) -> Result<(), IoError> {
    assert_eq!(values.len(), width * height, "grid shape mismatch");
    let mut out = String::new();
    for row in values.chunks(width) {
        for (i, &v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_float(v));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Reads a rectangular grid of finite values; returns (width, height, data).
pub fn read_grid_csv(path: &Path) -> Result<(usize, usize, Vec<f64>), IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut width = 0;
    let mut values = Vec::new();
    let mut height = 0;
    for (r, line) in text.lines().enumerate() {
        let row: Vec<&str> = line.split(',').collect();
        if r == 0 {
            width = row.len();
        } else if row.len() != width {
            return Err(malformed(
                path,
                format!("row {r} has {} values, row 0 has {width}", row.len()),
            ));
        }
        for (c, cell) in row.iter().enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| malformed(path, format!("row {r}, column {c}: {cell:?}")))?;
            if !v.is_finite() {
                return Err(malformed(path, format!("row {r}, column {c}: non-finite value")));
            }
            values.push(v);
        }
        height += 1;
    }
    if height == 0 || width == 0 {
        return Err(malformed(path, "empty grid"));
    }
    Ok((width, height, values))
}

// ----------------------------------------------------------------- stacks

#[derive(Serialize, Deserialize)]
struct HarmonicRecord {
    order: u32,
    amplitude: f64,
}

#[derive(Serialize, Deserialize)]
struct ProfileRecord {
    background: f64,
    harmonics: Vec<HarmonicRecord>,
    noise_sigma: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct StackManifest {
    steps: Vec<f64>,
    width: usize,
    height: usize,
    profile: ProfileRecord,
    frames: Vec<String>,
    truth: Option<String>,
}

/// Writes a stack directory: manifest.json, frame_000.csv…, and truth.csv
/// when ground truth is attached.
pub fn write_stack(dir: &Path, stack: &FringeStack) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let frame_names: Vec<String> = (0..stack.frames().len())
        .map(|n| format!("frame_{n:03}.csv"))
        .collect();
    for (name, frame) in frame_names.iter().zip(stack.frames()) {
        write_grid_csv(&dir.join(name), stack.width(), stack.height(), frame)?;
    }
    let truth_name = stack.truth().map(|truth| {
        let name = "truth.csv".to_string();
        (name, truth)
    });
    if let Some((name, truth)) = &truth_name {
        write_grid_csv(&dir.join(name), stack.width(), stack.height(), truth.values())?;
    }
    let manifest = StackManifest {
        steps: stack.steps().values().to_vec(),
        width: stack.width(),
        height: stack.height(),
        profile: ProfileRecord {
            background: stack.profile().background,
            harmonics: stack
                .profile()
                .harmonics
                .iter()
                .map(|h| HarmonicRecord {
                    order: h.order,
                    amplitude: h.amplitude,
                })
                .collect(),
            noise_sigma: stack.profile().noise_sigma,
            seed: stack.profile().seed,
        },
        frames: frame_names,
        truth: truth_name.map(|(name, _)| name),
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .expect("manifest serialization cannot fail");
    fs::write(&path, text + "\n").map_err(io_err(&path))
}

/// Reads a stack directory written by `write_stack`.
pub fn read_stack(dir: &Path) -> Result<FringeStack, IoError> {
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: StackManifest =
        serde_json::from_str(&text).map_err(|e| malformed(&manifest_path, e.to_string()))?;

    let steps = PhaseSteps::new(manifest.steps)?;
    let profile = FringeProfile::new(
        manifest.profile.background,
        manifest
            .profile
            .harmonics
            .iter()
            .map(|h| Harmonic {
                order: h.order,
                amplitude: h.amplitude,
            })
            .collect(),
        manifest.profile.noise_sigma,
        manifest.profile.seed,
    )?;

    let mut frames = Vec::with_capacity(manifest.frames.len());
    for name in &manifest.frames {
        let path = dir.join(name);
        let (w, h, data) = read_grid_csv(&path)?;
        if w != manifest.width || h != manifest.height {
            return Err(malformed(
                &path,
                format!("frame is {w}x{h}, manifest says {}x{}", manifest.width, manifest.height),
            ));
        }
        frames.push(data);
    }

    let truth = match &manifest.truth {
        Some(name) => {
            let path = dir.join(name);
            let (w, h, data) = read_grid_csv(&path)?;
            Some(PhaseMap::new(w, h, data)?)
        }
        None => None,
    };

    Ok(FringeStack::from_parts(
        steps,
        manifest.width,
        manifest.height,
        frames,
        profile,
        truth,
    )?)
}

// ------------------------------------------------------- results and stats

/// Writes phase.csv and amplitude.csv for a demodulation result.
pub fn write_demod_result(dir: &Path, result: &DemodResult) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let (w, h) = (result.phase().width(), result.phase().height());
    write_grid_csv(&dir.join("phase.csv"), w, h, result.phase().values())?;
    write_grid_csv(&dir.join("amplitude.csv"), w, h, result.amplitude())
}

#[derive(Serialize)]
struct StatsRecord {
    rms: f64,
    max_abs: f64,
    piston_removed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign_aligned: Option<bool>,
}

/// Writes error statistics as stats.json; `sign_aligned` is present only
/// for methods with a sign ambiguity.
pub fn write_stats_json(
    path: &Path,
    stats: &PhaseErrorStats,
    sign_aligned: Option<bool>,
) -> Result<(), IoError> {
    let record = StatsRecord {
        rms: stats.rms,
        max_abs: stats.max_abs,
        piston_removed: stats.piston_removed,
        sign_aligned,
    };
    let text = serde_json::to_string_pretty(&record).expect("stats serialization cannot fail");
    fs::write(path, text + "\n").map_err(io_err(path))
}
