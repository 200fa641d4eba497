//! Demodulation-filter design: solve for complex coefficients whose
//! frequency response meets prescribed constraints at known phase steps.
//!
//! The response of a coefficient set c over steps θ is
//! H(ω) = Σ_n c_n e^{−iθ_n ω}. A design pins H to 1 at one pass frequency
//! and to 0 at a chosen set of rejection frequencies, which yields one
//! linear equation per constraint in the unknown coefficients.

use num_complex::Complex64;

use crate::linalg;
use crate::steps::PhaseSteps;

/// Accepted ∞-norm residual of the solved constraint system.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Condition estimates above this are a hard error.
pub const CONDITION_HARD_LIMIT: f64 = 1e12;

/// Condition estimates above this deserve a warning to the user.
pub const CONDITION_WARN_LIMIT: f64 = 1e8;

/// Constraint frequencies closer than this count as duplicates.
pub const FREQUENCY_DISTINCT_TOLERANCE: f64 = 1e-9;

const TARGET_MATCH_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DesignError {
    #[error("need at least {min} phase steps, got {got}")]
    TooFewSteps { got: usize, min: usize },
    #[error("phase step {index} is not finite")]
    NonFiniteStep { index: usize },
    #[error("constraint frequency {index} is not finite")]
    NonFiniteFrequency { index: usize },
    #[error("constraint frequencies {first} and {second} coincide")]
    DuplicateFrequency { first: usize, second: usize },
    #[error("a design needs exactly one unit-target constraint, found {count}")]
    UnitTargetCount { count: usize },
    #[error("constraint {index} target must be exactly 0 or 1")]
    InvalidTarget { index: usize },
    #[error("singular design: {reason}")]
    SingularDesign { reason: String },
    #[error("dimension mismatch: {constraints} constraints for {steps} steps")]
    DimensionMismatch { constraints: usize, steps: usize },
}

/// One response constraint: H(omega) must equal target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub omega: f64,
    pub target: Complex64,
}

impl Constraint {
    pub fn zero(omega: f64) -> Self {
        Self {
            omega,
            target: Complex64::new(0.0, 0.0),
        }
    }

    pub fn unit(omega: f64) -> Self {
        Self {
            omega,
            target: Complex64::new(1.0, 0.0),
        }
    }
}

/// A validated set of response constraints: pairwise distinct finite
/// frequencies, exactly one unit target, all other targets zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    constraints: Vec<Constraint>,
    pass_index: usize,
}

impl DesignSpec {
    pub fn new(constraints: Vec<Constraint>) -> Result<Self, DesignError> {
        if let Some(index) = constraints.iter().position(|c| !c.omega.is_finite()) {
            return Err(DesignError::NonFiniteFrequency { index });
        }
        for i in 0..constraints.len() {
            for j in i + 1..constraints.len() {
                if (constraints[i].omega - constraints[j].omega).abs()
                    <= FREQUENCY_DISTINCT_TOLERANCE
                {
                    return Err(DesignError::DuplicateFrequency { first: i, second: j });
                }
            }
        }
        let mut pass_index = None;
        for (index, c) in constraints.iter().enumerate() {
            let unit = (c.target - Complex64::new(1.0, 0.0)).norm() <= TARGET_MATCH_TOLERANCE;
            let zero = c.target.norm() <= TARGET_MATCH_TOLERANCE;
            if unit {
                if pass_index.replace(index).is_some() {
                    return Err(DesignError::UnitTargetCount { count: 2 });
                }
            } else if !zero {
                return Err(DesignError::InvalidTarget { index });
            }
        }
        match pass_index {
            Some(pass_index) => Ok(Self {
                constraints,
                pass_index,
            }),
            None => Err(DesignError::UnitTargetCount { count: 0 }),
        }
    }

    /// Unit response at `pass_omega`, zero response at each of `zero_omegas`.
    pub fn quadrature(pass_omega: f64, zero_omegas: &[f64]) -> Result<Self, DesignError> {
        let mut constraints: Vec<Constraint> = zero_omegas.iter().copied().map(Constraint::zero).collect();
        constraints.push(Constraint::unit(pass_omega));
        Self::new(constraints)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Frequency carrying the unit target.
    pub fn pass_omega(&self) -> f64 {
        self.constraints[self.pass_index].omega
    }
}

/// The default constraint set for an n-coefficient design: a contiguous
/// window of n integer frequencies containing the pass frequency +1, with
/// the unit target at +1 and zeroes elsewhere. The window starts at
/// −⌈(n−1)/3⌉ so that roughly a third of the zeroes cancel the negative
/// (conjugate) orders and the rest suppress low positive harmonics; for
/// n = 3, 5, 7 this reproduces the windows {−1..1}, {−2..2}, {−2..4}.
pub fn default_zero_set(n: usize) -> Result<DesignSpec, DesignError> {
    if n < crate::steps::MIN_STEPS {
        return Err(DesignError::TooFewSteps {
            got: n,
            min: crate::steps::MIN_STEPS,
        });
    }
    let lo = -((n as i64 + 1) / 3);
    let constraints = (lo..lo + n as i64)
        .map(|w| {
            if w == 1 {
                Constraint::unit(1.0)
            } else {
                Constraint::zero(w as f64)
            }
        })
        .collect();
    DesignSpec::new(constraints)
}

/// A solved (or otherwise assembled) coefficient set together with the
/// steps and constraints it was designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    values: Vec<Complex64>,
    steps: PhaseSteps,
    spec: DesignSpec,
    condition_estimate: f64,
}

impl CoefficientSet {
    /// Assembles a set from parts, checking only the shape. Used when
    /// loading a stored design and when deriving filters by hand; the
    /// constraint residual is guaranteed only for solver output.
    pub fn assemble(
        values: Vec<Complex64>,
        steps: PhaseSteps,
        spec: DesignSpec,
        condition_estimate: f64,
    ) -> Result<Self, DesignError> {
        if values.len() != steps.len() || spec.len() != steps.len() {
            return Err(DesignError::DimensionMismatch {
                constraints: spec.len(),
                steps: steps.len(),
            });
        }
        Ok(Self {
            values,
            steps,
            spec,
            condition_estimate,
        })
    }

    /// Same steps and provenance, different values; for scaled or linearly
    /// combined filters.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self, DesignError> {
        Self::assemble(values, self.steps.clone(), self.spec.clone(), self.condition_estimate)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn steps(&self) -> &PhaseSteps {
        &self.steps
    }

    pub fn spec(&self) -> &DesignSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn pass_omega(&self) -> f64 {
        self.spec.pass_omega()
    }

    /// 1-norm condition estimate of the design matrix this set came from.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.condition_estimate > CONDITION_WARN_LIMIT
    }
}

/// Builds the row-major constraint matrix M[k][n] = e^{−iθ_n ω_k}.
pub(crate) fn constraint_matrix(steps: &PhaseSteps, spec: &DesignSpec) -> Vec<Complex64> {
    let n = steps.len();
    let mut m = Vec::with_capacity(n * n);
    for c in spec.constraints() {
        for &theta in steps.values() {
            m.push(Complex64::from_polar(1.0, -theta * c.omega));
        }
    }
    m
}

/// Solves the constraint system for the demodulation coefficients.
///
/// Requires exactly as many constraints as steps. Fails as singular when
/// the matrix has a zero pivot, when the 1-norm condition estimate exceeds
/// [`CONDITION_HARD_LIMIT`], or when the solution's residual misses
/// [`RESIDUAL_TOLERANCE`].
pub fn solve_coefficients(
    steps: &PhaseSteps,
    spec: &DesignSpec,
) -> Result<CoefficientSet, DesignError> {
    let n = steps.len();
    if spec.len() != n {
        return Err(DesignError::DimensionMismatch {
            constraints: spec.len(),
            steps: n,
        });
    }
    let m = constraint_matrix(steps, spec);
    let lu = linalg::factor(m.clone(), n).ok_or_else(|| DesignError::SingularDesign {
        reason: "zero pivot in the constraint matrix".to_string(),
    })?;
    let condition = linalg::norm1(&m, n) * lu.inverse_norm1();
    if !condition.is_finite() || condition > CONDITION_HARD_LIMIT {
        return Err(DesignError::SingularDesign {
            reason: format!("condition estimate {condition:.3e} exceeds {CONDITION_HARD_LIMIT:e}"),
        });
    }
    let rhs: Vec<Complex64> = spec.constraints().iter().map(|c| c.target).collect();
    let values = lu.solve(&rhs);
    let mut residual: f64 = 0.0;
    for row in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..n {
            acc += m[row * n + col] * values[col];
        }
        residual = residual.max((acc - rhs[row]).norm());
    }
    if residual > RESIDUAL_TOLERANCE {
        return Err(DesignError::SingularDesign {
            reason: format!("solution residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:e}"),
        });
    }
    CoefficientSet::assemble(values, steps.clone(), spec.clone(), condition)
}
