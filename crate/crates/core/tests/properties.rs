//! Cross-module properties: constraint satisfaction and the gain bound on
//! random step sets, exact end-to-end recovery, shift covariance, rejection
//! classes versus observed errors, and the output noise floor.

use proptest::prelude::*;
use std::f64::consts::TAU;

use phasestep_core::{
    add_awgn, default_zero_set, demodulate, evaluate_ftf, harmonic_rejection_report,
    linear_lspsa, phase_error, read_design, simulate_stack, snr_gain, solve_coefficients,
    synth_phase_map, wrap_angle, write_design, CoefficientSet, Complex64, DesignSpec,
    FringeProfile, FringeStack, Harmonic, HarmonicClass, PhaseSteps, SceneKind,
};

fn reference_design() -> CoefficientSet {
    let steps = PhaseSteps::new(vec![0.0, 0.78, 1.81, 3.11, 4.54, 5.93, 7.24]).unwrap();
    let spec = DesignSpec::quadrature(1.0, &[-2.0, -1.0, 0.0, 2.0, 3.0, 4.0]).unwrap();
    solve_coefficients(&steps, &spec).unwrap()
}

/// 3 to 9 steps: uniform spacing with each non-anchor step jittered by up
/// to ±45% of the uniform gap. The family stays well conditioned (studied
/// numerically: condition below 10², coefficient mass below 5), which the
/// floating-point error bounds asserted here rely on; steps crowded into a
/// fraction of a turn have huge coefficients and genuinely lose these
/// digits to rounding.
fn arb_steps() -> impl Strategy<Value = PhaseSteps> {
    (3usize..=9)
        .prop_flat_map(|n| {
            let gap = TAU / n as f64;
            proptest::collection::vec(-0.45 * gap..0.45 * gap, n - 1)
                .prop_map(move |jitter| (n, jitter))
        })
        .prop_filter_map("steps must be distinct modulo a full turn", |(n, jitter)| {
            let gap = TAU / n as f64;
            let mut steps = vec![0.0];
            for (k, j) in jitter.iter().enumerate() {
                steps.push((k + 1) as f64 * gap + j);
            }
            PhaseSteps::new(steps).ok()
        })
}

fn pure_fringe(background: f64, amplitude: f64) -> FringeProfile {
    FringeProfile::new(
        background,
        vec![Harmonic { order: 1, amplitude }],
        0.0,
        0,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn random_designs_meet_constraints_and_gain_bound(steps in arb_steps()) {
        let spec = default_zero_set(steps.len()).unwrap();
        let coeffs = solve_coefficients(&steps, &spec).unwrap();
        for c in coeffs.spec().constraints() {
            let miss = (evaluate_ftf(&coeffs, c.omega) - c.target).norm();
            prop_assert!(miss < 1e-10, "constraint at {} missed by {miss}", c.omega);
        }
        let g = snr_gain(&coeffs, coeffs.pass_omega()).unwrap();
        prop_assert!(g <= steps.len() as f64 + 1e-9, "gain {g} above bound");
    }

    #[test]
    fn noiseless_pure_fringes_recover_exactly(
        steps in arb_steps(),
        phi in -3.1f64..3.1,
        b in 0.5f64..3.0,
        a in 0.0f64..2.0,
        bowl in 0.5f64..9.0,
    ) {
        let spec = default_zero_set(steps.len()).unwrap();
        let coeffs = solve_coefficients(&steps, &spec).unwrap();
        for truth in [
            synth_phase_map(SceneKind::Constant, &[phi], 5, 4).unwrap(),
            synth_phase_map(SceneKind::Quadratic, &[bowl], 5, 4).unwrap(),
        ] {
            let stack = simulate_stack(&truth, &steps, &pure_fringe(a, b));
            let result = demodulate(&stack, &coeffs).unwrap();
            let stats = phase_error(result.phase(), &truth, false).unwrap();
            prop_assert!(stats.rms < 1e-10, "rms {}", stats.rms);
            for &amp in result.amplitude() {
                prop_assert!((amp - b / 2.0).abs() < 1e-10, "amplitude {amp}");
            }
        }
    }

    #[test]
    fn frame_offsets_are_invisible(steps in arb_steps(), offset in -50.0f64..50.0) {
        let spec = default_zero_set(steps.len()).unwrap();
        let coeffs = solve_coefficients(&steps, &spec).unwrap();
        let truth = synth_phase_map(SceneKind::Quadratic, &[2.0], 6, 5).unwrap();
        let stack = simulate_stack(&truth, &steps, &pure_fringe(1.0, 1.0));
        let shifted = FringeStack::from_parts(
            stack.steps().clone(),
            stack.width(),
            stack.height(),
            stack
                .frames()
                .iter()
                .map(|f| f.iter().map(|v| v + offset).collect())
                .collect(),
            stack.profile().clone(),
            None,
        )
        .unwrap();
        let base = demodulate(&stack, &coeffs).unwrap();
        let moved = demodulate(&shifted, &coeffs).unwrap();
        for (x, y) in base.phase().values().iter().zip(moved.phase().values()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in base.amplitude().iter().zip(moved.amplitude()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn shifting_all_steps_shifts_recovered_phase_oppositely(
        steps in arb_steps(),
        delta in -3.0f64..3.0,
        phi in -1.5f64..1.5,
    ) {
        // a rigid shift preserves pairwise differences, so validity carries over
        let shifted = PhaseSteps::new(
            steps.values().iter().map(|t| t + delta).collect(),
        ).unwrap();
        let spec = default_zero_set(steps.len()).unwrap();
        let design_base = solve_coefficients(&steps, &spec).unwrap();
        let design_shifted = solve_coefficients(&shifted, &spec).unwrap();

        let truth = synth_phase_map(SceneKind::Constant, &[phi], 4, 4).unwrap();
        let stack_shifted = simulate_stack(&truth, &shifted, &pure_fringe(1.0, 1.5));
        // identical frames, relabeled with the unshifted steps
        let stack_base = FringeStack::from_parts(
            steps.clone(),
            stack_shifted.width(),
            stack_shifted.height(),
            stack_shifted.frames().to_vec(),
            stack_shifted.profile().clone(),
            None,
        )
        .unwrap();

        let on_shifted = demodulate(&stack_shifted, &design_shifted).unwrap();
        let on_base = demodulate(&stack_base, &design_base).unwrap();
        for (&p_base, &p_shifted) in on_base
            .phase()
            .values()
            .iter()
            .zip(on_shifted.phase().values())
        {
            let gap = wrap_angle(p_base - p_shifted - delta);
            prop_assert!(gap.abs() < 1e-9, "phase moved by {gap} beyond the shift");
        }
    }

    #[test]
    fn design_documents_round_trip_for_random_designs(steps in arb_steps()) {
        let spec = default_zero_set(steps.len()).unwrap();
        let coeffs = solve_coefficients(&steps, &spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("design.json");
        write_design(&path, &coeffs).unwrap();
        let back = read_design(&path).unwrap();
        prop_assert_eq!(back.values(), coeffs.values());
        prop_assert_eq!(back.steps().values(), coeffs.steps().values());
        prop_assert_eq!(back.condition_estimate(), coeffs.condition_estimate());
    }
}

#[test]
fn gain_reaches_the_bound_only_on_uniform_steps() {
    for n in 3..=9 {
        let uniform = linear_lspsa(n).unwrap();
        let g = snr_gain(&uniform, 1.0).unwrap();
        assert!((g - n as f64).abs() < 1e-9, "uniform {n}: gain {g}");

        for trial in 0..3u64 {
            let jittered: Vec<f64> = PhaseSteps::uniform(n)
                .unwrap()
                .values()
                .iter()
                .enumerate()
                .map(|(k, &t)| {
                    if k == 0 {
                        t
                    } else {
                        // deterministic jitter in ±[0.02, 0.1]
                        let u = phasestep_core::rng::uniform_at(40 + trial, (n * 10 + k) as u64);
                        let sign = if u < 0.5 { -1.0 } else { 1.0 };
                        t + sign * (0.02 + 0.08 * u)
                    }
                })
                .collect();
            let steps = PhaseSteps::new(jittered).unwrap();
            let spec = default_zero_set(n).unwrap();
            let coeffs = solve_coefficients(&steps, &spec).unwrap();
            let g = snr_gain(&coeffs, 1.0).unwrap();
            assert!(
                g < n as f64 - 1e-9,
                "jittered {n}-step design reached gain {g}"
            );
        }
    }
}

#[test]
fn rejection_classes_predict_recovery_error() {
    let truth = synth_phase_map(SceneKind::Quadratic, &[2.0], 12, 12).unwrap();
    for coeffs in [reference_design(), linear_lspsa(7).unwrap()] {
        let report = harmonic_rejection_report(&coeffs, 4).unwrap();
        for order in 2..=4u32 {
            let profile = FringeProfile::new(
                1.0,
                vec![
                    Harmonic { order: 1, amplitude: 1.0 },
                    Harmonic { order, amplitude: 0.4 },
                ],
                0.0,
                0,
            )
            .unwrap();
            let stack = simulate_stack(&truth, coeffs.steps(), &profile);
            let result = demodulate(&stack, &coeffs).unwrap();
            let stats = phase_error(result.phase(), &truth, false).unwrap();
            let class = report.entries[order as usize - 1].class;
            let rejected = class == HarmonicClass::FullyRejected;
            assert_eq!(
                stats.rms < 1e-10,
                rejected,
                "order {order}: rms {} with class {class:?}",
                stats.rms
            );
        }
    }
}

#[test]
fn output_noise_variance_matches_coefficient_power() {
    let coeffs = reference_design();
    let truth = synth_phase_map(SceneKind::Constant, &[0.4], 320, 320).unwrap();
    let sigma = 0.05;
    let clean = simulate_stack(&truth, coeffs.steps(), &pure_fringe(1.0, 1.0));
    let noisy = add_awgn(&clean, sigma, 2024);
    let result = demodulate(&noisy, &coeffs).unwrap();

    let z: Vec<Complex64> = result
        .phase()
        .values()
        .iter()
        .zip(result.amplitude())
        .map(|(&ph, &amp)| Complex64::from_polar(amp, ph))
        .collect();
    let mean = z.iter().sum::<Complex64>() / z.len() as f64;
    let var = z.iter().map(|w| (w - mean).norm_sqr()).sum::<f64>() / z.len() as f64;

    let power: f64 = coeffs.values().iter().map(|c| c.norm_sqr()).sum();
    let expected = sigma * sigma * power;
    assert!(
        (var / expected - 1.0).abs() < 0.03,
        "variance {var}, expected {expected}"
    );
}
