//! Frequency-response analysis of a coefficient set: spectrum sampling,
//! noise gain, and harmonic-rejection classification.

use num_complex::Complex64;

use crate::design::{default_zero_set, CoefficientSet, DesignError};
use crate::steps::PhaseSteps;

/// Response magnitudes at or below this count as a spectral zero.
pub const ZERO_MAGNITUDE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("invalid range: {reason}")]
    InvalidRange { reason: String },
    #[error("all coefficients are zero")]
    ZeroCoefficients,
}

/// H(ω) = Σ_n c_n e^{−iθ_n ω}.
pub fn evaluate_ftf(coeffs: &CoefficientSet, omega: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, &theta) in coeffs.values().iter().zip(coeffs.steps().values()) {
        acc += c * Complex64::from_polar(1.0, -theta * omega);
    }
    acc
}

/// The response sampled on an inclusive uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSamples {
    omegas: Vec<f64>,
    values: Vec<Complex64>,
}

impl SpectrumSamples {
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Frequencies of local magnitude minima at or below `threshold`;
    /// grid-resolution zero detection.
    pub fn zero_candidates(&self, threshold: f64) -> Vec<f64> {
        let mag = self.magnitudes();
        let mut out = Vec::new();
        for i in 0..mag.len() {
            if mag[i] > threshold {
                continue;
            }
            let left_ok = i == 0 || mag[i] <= mag[i - 1];
            let right_ok = i + 1 == mag.len() || mag[i] <= mag[i + 1];
            if left_ok && right_ok {
                out.push(self.omegas[i]);
            }
        }
        out
    }
}

/// Samples H on `count` evenly spaced points covering [omega_min, omega_max].
pub fn sample_spectrum(
    coeffs: &CoefficientSet,
    omega_min: f64,
    omega_max: f64,
    count: usize,
) -> Result<SpectrumSamples, AnalysisError> {
    if !(omega_min < omega_max) || !omega_min.is_finite() || !omega_max.is_finite() {
        return Err(AnalysisError::InvalidRange {
            reason: format!("need omega_min < omega_max, got [{omega_min}, {omega_max}]"),
        });
    }
    if count < 2 {
        return Err(AnalysisError::InvalidRange {
            reason: format!("need at least 2 samples, got {count}"),
        });
    }
    let step = (omega_max - omega_min) / (count - 1) as f64;
    let omegas: Vec<f64> = (0..count)
        .map(|i| {
            if i + 1 == count {
                omega_max // keep the grid inclusive despite rounding
            } else {
                omega_min + step * i as f64
            }
        })
        .collect();
    let values = omegas.iter().map(|&w| evaluate_ftf(coeffs, w)).collect();
    Ok(SpectrumSamples { omegas, values })
}

/// |H(pass)|² / Σ|c_n|²: the output/input noise-power gain of the filter.
/// Bounded by the number of steps; the bound is attained exactly on
/// uniform steps with the default constraint window.
pub fn snr_gain(coeffs: &CoefficientSet, pass_omega: f64) -> Result<f64, AnalysisError> {
    let power: f64 = coeffs.values().iter().map(|c| c.norm_sqr()).sum();
    if power == 0.0 {
        return Err(AnalysisError::ZeroCoefficients);
    }
    Ok(evaluate_ftf(coeffs, pass_omega).norm_sqr() / power)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicClass {
    /// Both H(k) and H(−k) vanish: the harmonic cannot reach the output.
    FullyRejected,
    /// Exactly one side vanishes: the harmonic leaks through the other.
    PartiallyRejected,
    /// Neither side vanishes.
    Passed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicEntry {
    pub order: u32,
    pub magnitude_pos: f64,
    pub magnitude_neg: f64,
    pub class: HarmonicClass,
}

/// Per-harmonic rejection classes plus the background (ω = 0) magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionReport {
    pub entries: Vec<HarmonicEntry>,
    pub background_magnitude: f64,
}

/// Classifies harmonics 1..=k_max by whether the response vanishes at ±k.
/// The fundamental (k = 1) is never counted as fully rejected: its positive
/// side is the signal.
pub fn harmonic_rejection_report(
    coeffs: &CoefficientSet,
    k_max: u32,
) -> Result<RejectionReport, AnalysisError> {
    if k_max < 1 {
        return Err(AnalysisError::InvalidRange {
            reason: "k_max must be at least 1".to_string(),
        });
    }
    let entries = (1..=k_max)
        .map(|k| {
            let magnitude_pos = evaluate_ftf(coeffs, k as f64).norm();
            let magnitude_neg = evaluate_ftf(coeffs, -(k as f64)).norm();
            let pos_zero = magnitude_pos <= ZERO_MAGNITUDE_TOLERANCE;
            let neg_zero = magnitude_neg <= ZERO_MAGNITUDE_TOLERANCE;
            let class = if pos_zero && neg_zero && k != 1 {
                HarmonicClass::FullyRejected
            } else if pos_zero != neg_zero {
                HarmonicClass::PartiallyRejected
            } else {
                HarmonicClass::Passed
            };
            HarmonicEntry {
                order: k,
                magnitude_pos,
                magnitude_neg,
                class,
            }
        })
        .collect();
    Ok(RejectionReport {
        entries,
        background_magnitude: evaluate_ftf(coeffs, 0.0).norm(),
    })
}

/// The closed-form uniform-step baseline: θ_k = 2πk/n, c_k = e^{iθ_k}/n.
/// Satisfies the default constraint window exactly and has unit response
/// at ω = 1.
pub fn linear_lspsa(n: usize) -> Result<CoefficientSet, DesignError> {
    let steps = PhaseSteps::uniform(n)?;
    let spec = default_zero_set(n)?;
    let values = steps
        .values()
        .iter()
        .map(|&theta| Complex64::from_polar(1.0 / n as f64, theta))
        .collect();
    let m = crate::design::constraint_matrix(&steps, &spec);
    let condition = match crate::linalg::factor(m.clone(), n) {
        Some(lu) => crate::linalg::norm1(&m, n) * lu.inverse_norm1(),
        None => f64::INFINITY,
    };
    CoefficientSet::assemble(values, steps, spec, condition)
}
