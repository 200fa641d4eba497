//! Principal-component demodulation baseline: recovers phase from the top
//! two principal components of the mean-removed frame stack, up to a global
//! sign and piston.

use num_complex::Complex64;

use crate::demod::{arg_half_open, phase_error};
use crate::eigen::symmetric_eigen;
use crate::fringe::{FringeStack, PhaseMap};
use crate::steps::wrap_angle;

/// Below this ratio of second to leading eigenvalue the stack has no
/// quadrature pair to project onto.
const DEGENERACY_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PcaError {
    #[error("no quadrature pair in stack: leading eigenvalues {leading} and {second}")]
    DegenerateStack { leading: f64, second: f64 },
}

/// Phase recovered by principal components. The sign is intrinsic ambiguity:
/// `phase` and `alternate_phase()` are equally valid unless ground truth was
/// available to pick one.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    phase: PhaseMap,
    eigenvalues: (f64, f64),
    sign_aligned: bool,
}

impl PcaResult {
    pub fn phase(&self) -> &PhaseMap {
        &self.phase
    }

    /// Leading two eigenvalues of the frame covariance, descending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        self.eigenvalues
    }

    /// True when ground truth was available and the sign candidate with the
    /// smaller aligned error was chosen.
    pub fn sign_aligned(&self) -> bool {
        self.sign_aligned
    }

    /// The globally negated candidate, the other of the two phases the
    /// method cannot distinguish on its own.
    pub fn alternate_phase(&self) -> PhaseMap {
        PhaseMap::new(
            self.phase.width(),
            self.phase.height(),
            self.phase.values().iter().map(|&v| wrap_angle(-v)).collect(),
        )
        .expect("negated wrapped phase stays finite")
    }
}

/// Frames with the temporal mean removed at every pixel.
pub(crate) fn mean_removed_frames(stack: &FringeStack) -> Vec<Vec<f64>> {
    let n = stack.frames().len();
    let pixels = stack.width() * stack.height();
    let mut mean = vec![0.0; pixels];
    for frame in stack.frames() {
        for (m, &v) in mean.iter_mut().zip(frame) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    stack
        .frames()
        .iter()
        .map(|frame| frame.iter().zip(&mean).map(|(&v, &m)| v - m).collect())
        .collect()
}

/// N×N matrix of inner products over all pixels, row-major. Accumulation is
/// sequential in pixel order, so the result is run-to-run identical.
pub(crate) fn covariance(frames: &[Vec<f64>]) -> Vec<f64> {
    let n = frames.len();
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let dot: f64 = frames[i].iter().zip(&frames[j]).map(|(a, b)| a * b).sum();
            c[i * n + j] = dot;
            c[j * n + i] = dot;
        }
    }
    c
}

/// Projects the mean-removed stack onto its top two principal components to
/// get quadrature images (u, v) and returns arg(u + iv) per pixel. When the
/// stack carries ground truth the global sign is chosen by the smaller
/// piston-aligned error; otherwise the caller gets both candidates via
/// `alternate_phase`.
pub fn pca_demodulate(stack: &FringeStack) -> Result<PcaResult, PcaError> {
    let n = stack.frames().len();
    let removed = mean_removed_frames(stack);
    let cov = covariance(&removed);
    let (values, vectors) = symmetric_eigen(&cov, n);
    if values[0] <= 0.0 || values[1] <= DEGENERACY_RATIO * values[0] {
        return Err(PcaError::DegenerateStack {
            leading: values[0],
            second: values[1],
        });
    }

    let pixels = stack.width() * stack.height();
    let (e1, e2) = (&vectors[0], &vectors[1]);
    let phase_values: Vec<f64> = (0..pixels)
        .map(|p| {
            let mut u = 0.0;
            let mut v = 0.0;
            for (frame, (&a, &b)) in removed.iter().zip(e1.iter().zip(e2)) {
                u += a * frame[p];
                v += b * frame[p];
            }
            arg_half_open(Complex64::new(u, v))
        })
        .collect();
    let phase = PhaseMap::new(stack.width(), stack.height(), phase_values)
        .expect("arg of finite projections is finite");

    let mut result = PcaResult {
        phase,
        eigenvalues: (values[0], values[1]),
        sign_aligned: false,
    };
    if let Some(truth) = stack.truth() {
        let direct = phase_error(&result.phase, truth, true)
            .expect("truth dimensions match the stack");
        let negated = result.alternate_phase();
        let flipped = phase_error(&negated, truth, true)
            .expect("truth dimensions match the stack");
        if flipped.rms < direct.rms {
            result.phase = negated;
        }
        result.sign_aligned = true;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fringe::{simulate_stack, synth_phase_map, FringeProfile, Harmonic, SceneKind};
    use crate::steps::PhaseSteps;
    use std::f64::consts::PI;

    fn quadratic_stack(steps: &PhaseSteps) -> FringeStack {
        let truth = synth_phase_map(SceneKind::Quadratic, &[3.0 * PI], 64, 64).unwrap();
        let profile =
            FringeProfile::new(0.5, vec![Harmonic { order: 1, amplitude: 1.0 }], 0.0, 0).unwrap();
        simulate_stack(&truth, steps, &profile)
    }

    #[test]
    fn uniform_steps_recover_a_multi_fringe_scene() {
        let stack = quadratic_stack(&PhaseSteps::uniform(7).unwrap());
        let result = pca_demodulate(&stack).unwrap();
        assert!(result.sign_aligned());
        let stats = phase_error(result.phase(), stack.truth().unwrap(), true).unwrap();
        assert!(stats.rms < 0.05, "rms {}", stats.rms);
        let (l1, l2) = result.eigenvalues();
        assert!(l1 >= l2 && l2 > 0.0);
    }

    #[test]
    fn nonuniform_steps_leave_structural_error() {
        let steps = PhaseSteps::new(vec![0.0, 0.78, 1.81, 3.11, 4.54, 5.93, 7.24]).unwrap();
        let stack = quadratic_stack(&steps);
        let result = pca_demodulate(&stack).unwrap();
        let stats = phase_error(result.phase(), stack.truth().unwrap(), true).unwrap();
        // structural error of the method on these steps, well above noise yet
        // far below a failed demodulation
        assert!(stats.rms > 1e-4, "rms {}", stats.rms);
        assert!(stats.rms < 0.1, "rms {}", stats.rms);
    }

    #[test]
    fn constant_scene_has_no_quadrature_pair() {
        let truth = synth_phase_map(SceneKind::Constant, &[0.7], 16, 16).unwrap();
        let profile =
            FringeProfile::new(0.5, vec![Harmonic { order: 1, amplitude: 1.0 }], 0.0, 0).unwrap();
        let steps = PhaseSteps::new(vec![0.0, 0.78, 1.81, 3.11, 4.54, 5.93, 7.24]).unwrap();
        let stack = simulate_stack(&truth, &steps, &profile);
        assert!(matches!(
            pca_demodulate(&stack),
            Err(PcaError::DegenerateStack { .. })
        ));
    }

    #[test]
    fn alternate_candidate_is_the_global_negation() {
        let stack = quadratic_stack(&PhaseSteps::uniform(5).unwrap());
        let result = pca_demodulate(&stack).unwrap();
        let alt = result.alternate_phase();
        for (&a, &b) in result.phase().values().iter().zip(alt.values()) {
            assert_eq!(b, wrap_angle(-a));
        }
    }

    #[test]
    fn truthless_stacks_report_both_candidates_unaligned() {
        let with_truth = quadratic_stack(&PhaseSteps::uniform(5).unwrap());
        let stack = FringeStack::from_parts(
            with_truth.steps().clone(),
            with_truth.width(),
            with_truth.height(),
            with_truth.frames().to_vec(),
            with_truth.profile().clone(),
            None,
        )
        .unwrap();
        let result = pca_demodulate(&stack).unwrap();
        assert!(!result.sign_aligned());
    }

    #[test]
    fn reported_eigenpairs_satisfy_the_eigen_equation() {
        let stack = quadratic_stack(&PhaseSteps::uniform(6).unwrap());
        let removed = mean_removed_frames(&stack);
        let cov = covariance(&removed);
        let n = removed.len();
        let (values, vectors) = symmetric_eigen(&cov, n);
        for k in 0..2 {
            let worst = (0..n)
                .map(|i| {
                    let cx: f64 = (0..n).map(|j| cov[i * n + j] * vectors[k][j]).sum();
                    (cx - values[k] * vectors[k][i]).abs()
                })
                .fold(0.0_f64, f64::max);
            assert!(worst <= 1e-9 * values[0], "residual {worst}");
        }
    }
}
