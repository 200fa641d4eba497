//! Per-pixel demodulation of fringe stacks, circular phase-error
//! statistics, and a Monte-Carlo estimate of the noise gain.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::analysis::evaluate_ftf;
use crate::design::CoefficientSet;
use crate::fringe::{FringeStack, PhaseMap};
use crate::rng;
use crate::steps::wrap_angle;

/// Stack steps and design steps must agree to this absolute tolerance.
pub(crate) const STEP_MATCH_TOLERANCE: f64 = 1e-9;
/// Fraction of the peak frame magnitude below which a pixel is flagged
/// invalid; only guards against arg of an exactly vanishing sum.
const AMPLITUDE_FLOOR_FACTOR: f64 = 1e-12;
const MIN_TRIALS: u64 = 1000;
/// The demodulated signal is complex, so half the filtered noise power lands
/// in each quadrature; the raw output/input SNR ratio is half the closed-form
/// gain. Calibrated on uniform steps, where the gain must equal the step
/// count exactly.
const MC_NORMALIZATION: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DemodError {
    #[error("step {index} is {stack} in the stack but {design} in the design")]
    StepMismatch {
        index: usize,
        stack: f64,
        design: f64,
    },
    #[error("design has {design} coefficients but stack has {frames} frames")]
    FrameCountMismatch { design: usize, frames: usize },
    #[error("phase maps have different dimensions: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("need at least {min} Monte-Carlo trials, got {got}")]
    BadTrialCount { got: u64, min: u64 },
}

/// Wrapped phase, amplitude, and validity mask recovered from one stack.
#[derive(Debug, Clone, PartialEq)]
pub struct DemodResult {
    phase: PhaseMap,
    amplitude: Vec<f64>,
    valid: Vec<bool>,
}

impl DemodResult {
    pub fn phase(&self) -> &PhaseMap {
        &self.phase
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }
}

/// Circular error statistics between two phase maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseErrorStats {
    pub rms: f64,
    pub max_abs: f64,
    pub piston_removed: bool,
}

/// arg of a complex value mapped onto (−π, π]; atan2 alone returns −π for
/// some inputs on the negative real axis.
pub(crate) fn arg_half_open(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Applies the coefficients per pixel: z_p = Σ_n conj(c_n)·I_n(p), then
/// amplitude |z|, phase arg(z) ∈ (−π, π], valid where the amplitude clears
/// the floor. Pixels are independent, so thread count cannot change values.
pub fn demodulate(
    stack: &FringeStack,
    coeffs: &CoefficientSet,
) -> Result<DemodResult, DemodError> {
    if coeffs.values().len() != stack.frames().len() {
        return Err(DemodError::FrameCountMismatch {
            design: coeffs.values().len(),
            frames: stack.frames().len(),
        });
    }
    for (index, (&s, &d)) in stack
        .steps()
        .values()
        .iter()
        .zip(coeffs.steps().values())
        .enumerate()
    {
        if (s - d).abs() > STEP_MATCH_TOLERANCE {
            return Err(DemodError::StepMismatch {
                index,
                stack: s,
                design: d,
            });
        }
    }

    let conj: Vec<Complex64> = coeffs.values().iter().map(|c| c.conj()).collect();
    let frames = stack.frames();
    let peak = frames
        .iter()
        .flat_map(|f| f.iter())
        .fold(0.0_f64, |m, &v| m.max(v.abs()));
    let floor = AMPLITUDE_FLOOR_FACTOR * peak;

    let pixels = stack.width() * stack.height();
    let z: Vec<Complex64> = (0..pixels)
        .into_par_iter()
        .map(|p| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, frame) in conj.iter().zip(frames) {
                acc += c * frame[p];
            }
            acc
        })
        .collect();

    let amplitude: Vec<f64> = z.iter().map(|z| z.norm()).collect();
    let valid: Vec<bool> = amplitude.iter().map(|&a| a >= floor).collect();
    let phase = PhaseMap::new(
        stack.width(),
        stack.height(),
        z.iter().map(|&z| arg_half_open(z)).collect(),
    )
    .expect("arg of a finite sum is finite");
    Ok(DemodResult {
        phase,
        amplitude,
        valid,
    })
}

/// Circular difference statistics: Δ_p = wrap(est_p − truth_p), optionally
/// with the circular mean (piston) removed before the statistics.
pub fn phase_error(
    estimate: &PhaseMap,
    truth: &PhaseMap,
    remove_piston: bool,
) -> Result<PhaseErrorStats, DemodError> {
    if estimate.width() != truth.width() || estimate.height() != truth.height() {
        return Err(DemodError::DimensionMismatch(
            estimate.width(),
            estimate.height(),
            truth.width(),
            truth.height(),
        ));
    }
    let mut deltas: Vec<f64> = estimate
        .values()
        .iter()
        .zip(truth.values())
        .map(|(&e, &t)| wrap_angle(e - t))
        .collect();
    if remove_piston {
        let (sin_sum, cos_sum) = deltas
            .iter()
            .fold((0.0, 0.0), |(s, c), &d| (s + d.sin(), c + d.cos()));
        let piston = sin_sum.atan2(cos_sum);
        for d in &mut deltas {
            *d = wrap_angle(*d - piston);
        }
    }
    let rms = (deltas.iter().map(|d| d * d).sum::<f64>() / deltas.len() as f64).sqrt();
    let max_abs = deltas.iter().fold(0.0_f64, |m, &d| m.max(d.abs()));
    Ok(PhaseErrorStats {
        rms,
        max_abs,
        piston_removed: remove_piston,
    })
}

/// Monte-Carlo output/input SNR ratio on scalar fringes b·cos(φ + ω₀θ_n)
/// with AWGN of deviation sigma. Trial t draws its phase and noise at fixed
/// counter offsets, so any execution order gives identical results.
pub fn mc_snr_gain(
    coeffs: &CoefficientSet,
    sigma: f64,
    trials: u64,
    seed: u64,
) -> Result<f64, DemodError> {
    assert!(
        sigma.is_finite() && sigma > 0.0,
        "noise deviation must be positive"
    );
    if trials < MIN_TRIALS {
        return Err(DemodError::BadTrialCount {
            got: trials,
            min: MIN_TRIALS,
        });
    }
    let omega0 = coeffs.pass_omega();
    // the noiseless demodulation of the pass component is conj(H(ω₀))(b/2)e^{iφ}
    let h0 = evaluate_ftf(coeffs, omega0).conj();
    let b = 2.0;
    let n = coeffs.values().len() as u64;
    // Trial t owns uniform counters [2t(n+1), 2(t+1)(n+1)): the phase draw
    // takes the first, and each normal draw at index t(n+1)+1+j the next two.
    let mut noise_power = 0.0;
    for t in 0..trials {
        let phi = TAU * rng::uniform_at(seed, 2 * t * (n + 1));
        let mut z = Complex64::new(0.0, 0.0);
        for (j, (c, &theta)) in coeffs
            .values()
            .iter()
            .zip(coeffs.steps().values())
            .enumerate()
        {
            let clean = b * (phi + omega0 * theta).cos();
            let sample = clean + sigma * rng::normal_at(seed, t * (n + 1) + 1 + j as u64);
            z += c.conj() * sample;
        }
        let target = h0 * (b / 2.0) * Complex64::from_polar(1.0, phi);
        noise_power += (z - target).norm_sqr();
    }
    noise_power /= trials as f64;
    let signal_power = (h0 * (b / 2.0)).norm_sqr();
    let input_snr = (b * b / 2.0) / (sigma * sigma);
    Ok(MC_NORMALIZATION * (signal_power / noise_power) / input_snr)
}
