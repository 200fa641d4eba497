//! Synthetic phase-stepped fringe stacks: scene phase maps, the harmonic
//! fringe model, and deterministic additive Gaussian noise.

use rayon::prelude::*;

use crate::rng;
use crate::steps::PhaseSteps;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("bad scene parameters: {0}")]
    BadParams(String),
}

/// A width×height grid of phase values in radians, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl PhaseMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, SceneError> {
        if width == 0 || height == 0 {
            return Err(SceneError::BadParams(format!(
                "grid must be at least 1x1, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(SceneError::BadParams(format!(
                "{}x{} grid needs {} values, got {}",
                width,
                height,
                width * height,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SceneError::BadParams("non-finite phase value".to_string()));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One intensity harmonic: amplitude of cos(k(φ + θ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub order: u32,
    pub amplitude: f64,
}

/// The intensity model of a stack: I(θ; φ) = a + Σ_k b_k cos(k(φ + θ)),
/// plus the noise applied to it (σ = 0 means noiseless).
#[derive(Debug, Clone, PartialEq)]
pub struct FringeProfile {
    pub background: f64,
    pub harmonics: Vec<Harmonic>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl FringeProfile {
    pub fn new(
        background: f64,
        harmonics: Vec<Harmonic>,
        noise_sigma: f64,
        seed: u64,
    ) -> Result<Self, SceneError> {
        if !background.is_finite() {
            return Err(SceneError::BadParams("background must be finite".to_string()));
        }
        if harmonics.is_empty() {
            return Err(SceneError::BadParams(
                "need at least one harmonic".to_string(),
            ));
        }
        for (i, h) in harmonics.iter().enumerate() {
            if h.order == 0 {
                return Err(SceneError::BadParams(format!(
                    "harmonic {i} has order 0; orders start at 1"
                )));
            }
            if !h.amplitude.is_finite() {
                return Err(SceneError::BadParams(format!(
                    "harmonic {i} amplitude is not finite"
                )));
            }
            if harmonics[..i].iter().any(|p| p.order == h.order) {
                return Err(SceneError::BadParams(format!(
                    "harmonic order {} appears twice",
                    h.order
                )));
            }
        }
        if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
            return Err(SceneError::BadParams(format!(
                "noise sigma must be finite and nonnegative, got {noise_sigma}"
            )));
        }
        Ok(Self {
            background,
            harmonics,
            noise_sigma,
            seed,
        })
    }

    /// Amplitude of the given order, zero when absent.
    pub fn amplitude_of(&self, order: u32) -> f64 {
        self.harmonics
            .iter()
            .find(|h| h.order == order)
            .map_or(0.0, |h| h.amplitude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    Constant,
    Quadratic,
    Gaussians,
}

impl std::str::FromStr for SceneKind {
    type Err = SceneError;

    fn from_str(s: &str) -> Result<Self, SceneError> {
        match s {
            "constant" => Ok(Self::Constant),
            "quadratic" => Ok(Self::Quadratic),
            "gaussians" => Ok(Self::Gaussians),
            other => Err(SceneError::BadParams(format!(
                "unknown scene kind {other:?}; expected constant, quadratic, or gaussians"
            ))),
        }
    }
}

/// Builds a synthetic phase map.
///
/// * `constant`: one parameter, the phase everywhere.
/// * `quadratic`: one parameter p0; a centered bowl
///   p0·((2x/W−1)² + (2y/H−1)²)/2, normalized so the corner (0,0) peaks at
///   exactly p0.
/// * `gaussians`: parameter triples (amplitude, center, width); each triple
///   adds amplitude·exp(−((u−center)² + (v−center)²)/(2·width²)) where
///   (u, v) are pixel centers mapped into the unit square.
pub fn synth_phase_map(
    kind: SceneKind,
    params: &[f64],
    width: usize,
    height: usize,
) -> Result<PhaseMap, SceneError> {
    if params.iter().any(|p| !p.is_finite()) {
        return Err(SceneError::BadParams("non-finite parameter".to_string()));
    }
    match kind {
        SceneKind::Constant => {
            if params.len() != 1 {
                return Err(SceneError::BadParams(format!(
                    "constant scene takes 1 parameter, got {}",
                    params.len()
                )));
            }
            PhaseMap::new(width, height, vec![params[0]; width * height])
        }
        SceneKind::Quadratic => {
            if params.len() != 1 {
                return Err(SceneError::BadParams(format!(
                    "quadratic scene takes 1 parameter, got {}",
                    params.len()
                )));
            }
            let p0 = params[0];
            let mut values = Vec::with_capacity(width * height);
            for y in 0..height {
                let ny = 2.0 * y as f64 / height as f64 - 1.0;
                for x in 0..width {
                    let nx = 2.0 * x as f64 / width as f64 - 1.0;
                    values.push(p0 * (nx * nx + ny * ny) / 2.0);
                }
            }
            PhaseMap::new(width, height, values)
        }
        SceneKind::Gaussians => {
            if params.is_empty() || params.len() % 3 != 0 {
                return Err(SceneError::BadParams(format!(
                    "gaussians scene takes (amplitude, center, width) triples, got {} values",
                    params.len()
                )));
            }
            for triple in params.chunks(3) {
                if triple[2] <= 0.0 {
                    return Err(SceneError::BadParams(format!(
                        "gaussian width must be positive, got {}",
                        triple[2]
                    )));
                }
            }
            let mut values = Vec::with_capacity(width * height);
            for y in 0..height {
                let v = (y as f64 + 0.5) / height as f64;
                for x in 0..width {
                    let u = (x as f64 + 0.5) / width as f64;
                    let mut phi = 0.0;
                    for triple in params.chunks(3) {
                        let (a, c, w) = (triple[0], triple[1], triple[2]);
                        let d2 = (u - c) * (u - c) + (v - c) * (v - c);
                        phi += a * (-d2 / (2.0 * w * w)).exp();
                    }
                    values.push(phi);
                }
            }
            PhaseMap::new(width, height, values)
        }
    }
}

/// N frames of one scene under the steps of a profile, with the metadata
/// needed to interpret them.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeStack {
    steps: PhaseSteps,
    width: usize,
    height: usize,
    frames: Vec<Vec<f64>>,
    profile: FringeProfile,
    truth: Option<PhaseMap>,
}

impl FringeStack {
    /// Assembles a stack from parts, checking shape consistency.
    pub fn from_parts(
        steps: PhaseSteps,
        width: usize,
        height: usize,
        frames: Vec<Vec<f64>>,
        profile: FringeProfile,
        truth: Option<PhaseMap>,
    ) -> Result<Self, SceneError> {
        if width == 0 || height == 0 {
            return Err(SceneError::BadParams(format!(
                "grid must be at least 1x1, got {width}x{height}"
            )));
        }
        if frames.len() != steps.len() {
            return Err(SceneError::BadParams(format!(
                "{} steps but {} frames",
                steps.len(),
                frames.len()
            )));
        }
        for (n, frame) in frames.iter().enumerate() {
            if frame.len() != width * height {
                return Err(SceneError::BadParams(format!(
                    "frame {n} has {} values, expected {}",
                    frame.len(),
                    width * height
                )));
            }
            if frame.iter().any(|v| !v.is_finite()) {
                return Err(SceneError::BadParams(format!(
                    "frame {n} contains a non-finite value"
                )));
            }
        }
        if let Some(t) = &truth {
            if t.width() != width || t.height() != height {
                return Err(SceneError::BadParams(format!(
                    "truth map is {}x{}, stack is {width}x{height}",
                    t.width(),
                    t.height()
                )));
            }
        }
        Ok(Self {
            steps,
            width,
            height,
            frames,
            profile,
            truth,
        })
    }

    pub fn steps(&self) -> &PhaseSteps {
        &self.steps
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn profile(&self) -> &FringeProfile {
        &self.profile
    }

    pub fn truth(&self) -> Option<&PhaseMap> {
        self.truth.as_ref()
    }
}

/// Renders the noiseless frames I_n(p) = a + Σ_k b_k cos(k(φ_p + θ_n)).
/// The stack records its noiseless state (σ = 0) regardless of the profile
/// passed in; noise is a separate pass.
pub fn simulate_stack(truth: &PhaseMap, steps: &PhaseSteps, profile: &FringeProfile) -> FringeStack {
    let frames: Vec<Vec<f64>> = steps
        .values()
        .iter()
        .map(|&theta| {
            truth
                .values()
                .par_iter()
                .map(|&phi| {
                    let mut v = profile.background;
                    for h in &profile.harmonics {
                        v += h.amplitude * (h.order as f64 * (phi + theta)).cos();
                    }
                    v
                })
                .collect()
        })
        .collect();
    FringeStack {
        steps: steps.clone(),
        width: truth.width(),
        height: truth.height(),
        frames,
        profile: FringeProfile {
            noise_sigma: 0.0,
            seed: 0,
            ..profile.clone()
        },
        truth: Some(truth.clone()),
    }
}

/// Adds white Gaussian noise of deviation `sigma`. The draw for frame n,
/// pixel p depends only on (seed, n, p), so any evaluation order and any
/// thread count produce identical output.
pub fn add_awgn(stack: &FringeStack, sigma: f64, seed: u64) -> FringeStack {
    assert!(
        sigma.is_finite() && sigma >= 0.0,
        "noise sigma must be finite and nonnegative"
    );
    let pixels = stack.width * stack.height;
    let frames: Vec<Vec<f64>> = if sigma == 0.0 {
        stack.frames.clone()
    } else {
        stack
            .frames
            .iter()
            .enumerate()
            .map(|(n, frame)| {
                frame
                    .par_iter()
                    .enumerate()
                    .map(|(p, &v)| v + sigma * rng::normal_at(seed, (n * pixels + p) as u64))
                    .collect()
            })
            .collect()
    };
    FringeStack {
        steps: stack.steps.clone(),
        width: stack.width,
        height: stack.height,
        frames,
        profile: FringeProfile {
            noise_sigma: sigma,
            seed,
            ..stack.profile.clone()
        },
        truth: stack.truth.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_profile() -> FringeProfile {
        FringeProfile::new(0.5, vec![Harmonic { order: 1, amplitude: 1.0 }], 0.0, 0).unwrap()
    }

    #[test]
    fn quadratic_scene_spans_the_requested_range() {
        let p0 = 3.0 * PI;
        let map = synth_phase_map(SceneKind::Quadratic, &[p0], 64, 64).unwrap();
        let min = map.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let max = map.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(min, 0.0); // the 64-grid contains the exact center
        assert!((max - p0).abs() < 1e-12, "peak {max}, expected {p0}");
    }

    #[test]
    fn constant_scene_is_flat() {
        let map = synth_phase_map(SceneKind::Constant, &[0.8], 5, 3).unwrap();
        assert!(map.values().iter().all(|&v| v == 0.8));
    }

    #[test]
    fn zero_amplitude_gaussians_give_a_zero_map() {
        let map =
            synth_phase_map(SceneKind::Gaussians, &[0.0, 0.5, 0.2, 0.0, 0.3, 0.1], 8, 8).unwrap();
        assert!(map.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bad_scene_parameters_are_rejected() {
        assert!(synth_phase_map(SceneKind::Quadratic, &[], 4, 4).is_err());
        assert!(synth_phase_map(SceneKind::Quadratic, &[1.0, 2.0], 4, 4).is_err());
        assert!(synth_phase_map(SceneKind::Gaussians, &[1.0, 0.5], 4, 4).is_err());
        assert!(synth_phase_map(SceneKind::Gaussians, &[1.0, 0.5, 0.0], 4, 4).is_err());
        assert!(synth_phase_map(SceneKind::Constant, &[f64::NAN], 4, 4).is_err());
        assert!(synth_phase_map(SceneKind::Constant, &[1.0], 0, 4).is_err());
    }

    #[test]
    fn frame_values_follow_the_harmonic_model() {
        // direct scalar cross-check: a=0.5, b1=1, b2=0.3, φ=0.7, θ=1.81
        // 0.5 + cos(2.51) + 0.3·cos(5.02) at 50-digit precision
        const EXPECTED: f64 = -0.21625338183504886;
        let truth = PhaseMap::new(1, 1, vec![0.7]).unwrap();
        let steps = PhaseSteps::new(vec![0.0, 1.81, 3.0]).unwrap();
        let profile = FringeProfile::new(
            0.5,
            vec![
                Harmonic { order: 1, amplitude: 1.0 },
                Harmonic { order: 2, amplitude: 0.3 },
            ],
            0.0,
            0,
        )
        .unwrap();
        let stack = simulate_stack(&truth, &steps, &profile);
        assert!((stack.frames()[1][0] - EXPECTED).abs() < 1e-14);
    }

    #[test]
    fn noise_is_deterministic_and_schedule_independent() {
        let truth = synth_phase_map(SceneKind::Quadratic, &[2.0], 16, 9).unwrap();
        let steps = PhaseSteps::uniform(4).unwrap();
        let clean = simulate_stack(&truth, &steps, &unit_profile());
        let a = add_awgn(&clean, 0.2, 77);
        let b = add_awgn(&clean, 0.2, 77);
        assert_eq!(a.frames(), b.frames());
        assert_ne!(a.frames(), clean.frames());
        // every sample must match an independent direct evaluation
        let pixels = 16 * 9;
        for (n, frame) in a.frames().iter().enumerate() {
            for (p, &v) in frame.iter().enumerate() {
                let want =
                    clean.frames()[n][p] + 0.2 * crate::rng::normal_at(77, (n * pixels + p) as u64);
                assert_eq!(v, want);
            }
        }
        let c = add_awgn(&clean, 0.2, 78);
        assert_ne!(a.frames(), c.frames());
    }

    #[test]
    fn zero_sigma_noise_is_bitwise_identity() {
        let truth = synth_phase_map(SceneKind::Quadratic, &[2.0], 7, 5).unwrap();
        let steps = PhaseSteps::uniform(3).unwrap();
        let clean = simulate_stack(&truth, &steps, &unit_profile());
        let same = add_awgn(&clean, 0.0, 123);
        assert_eq!(clean.frames(), same.frames());
        assert_eq!(same.profile().noise_sigma, 0.0);
    }

    #[test]
    fn noise_sample_statistics_are_plausible() {
        let truth = synth_phase_map(SceneKind::Constant, &[0.0], 100, 100).unwrap();
        let steps = PhaseSteps::uniform(4).unwrap();
        let profile = FringeProfile::new(
            0.0,
            vec![Harmonic { order: 1, amplitude: 0.0 }],
            0.0,
            0,
        )
        .unwrap();
        let clean = simulate_stack(&truth, &steps, &profile);
        let noisy = add_awgn(&clean, 0.5, 9);
        let all: Vec<f64> = noisy.frames().iter().flatten().copied().collect();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let var = all.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / all.len() as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 0.25).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn profile_validation_rejects_bad_harmonics() {
        assert!(FringeProfile::new(0.0, vec![], 0.0, 0).is_err());
        assert!(
            FringeProfile::new(0.0, vec![Harmonic { order: 0, amplitude: 1.0 }], 0.0, 0).is_err()
        );
        let dup = vec![
            Harmonic { order: 1, amplitude: 1.0 },
            Harmonic { order: 1, amplitude: 0.5 },
        ];
        assert!(FringeProfile::new(0.0, dup, 0.0, 0).is_err());
        assert!(
            FringeProfile::new(0.0, vec![Harmonic { order: 1, amplitude: 1.0 }], -0.1, 0).is_err()
        );
    }
}
