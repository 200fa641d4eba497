//! Phase-step sequences and angle helpers.

use std::f64::consts::{PI, TAU};

use crate::design::DesignError;

/// Minimum usable sequence length: quadrature needs three samples.
pub const MIN_STEPS: usize = 3;

/// Steps closer than this modulo 2π count as duplicates; they would make
/// every integer-frequency design matrix singular.
pub const DUPLICATE_STEP_TOLERANCE: f64 = 1e-9;

/// Wraps an angle to (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// A validated sequence of phase steps, in radians.
///
/// Values are kept exactly as given (they may exceed 2π and need not be
/// sorted); validation only requires finite values, at least [`MIN_STEPS`]
/// of them, pairwise distinct modulo 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSteps(Vec<f64>);

impl PhaseSteps {
    pub fn new(values: Vec<f64>) -> Result<Self, DesignError> {
        if values.len() < MIN_STEPS {
            return Err(DesignError::TooFewSteps {
                got: values.len(),
                min: MIN_STEPS,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(DesignError::NonFiniteStep { index });
        }
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                if wrap_angle(values[i] - values[j]).abs() <= DUPLICATE_STEP_TOLERANCE {
                    return Err(DesignError::SingularDesign {
                        reason: format!("steps {i} and {j} coincide modulo 2\u{3c0}"),
                    });
                }
            }
        }
        Ok(Self(values))
    }

    /// The uniform sequence θ_k = 2πk/n.
    pub fn uniform(n: usize) -> Result<Self, DesignError> {
        if n < MIN_STEPS {
            return Err(DesignError::TooFewSteps {
                got: n,
                min: MIN_STEPS,
            });
        }
        Self::new((0..n).map(|k| TAU * k as f64 / n as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor requires MIN_STEPS entries
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}
