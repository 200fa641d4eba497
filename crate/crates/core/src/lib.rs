//! Phase-stepping demodulation filters for nonuniformly spaced step
//! sequences, designed directly from frequency response constraints.
//!
//! The crate covers the full loop: solve a constraint system for complex
//! demodulation coefficients ([`solve_coefficients`]), inspect the
//! resulting frequency response and noise gain ([`sample_spectrum`],
//! [`snr_gain`], [`harmonic_rejection_report`]), render synthetic fringe
//! stacks ([`simulate_stack`], [`add_awgn`]), recover wrapped phase
//! ([`demodulate`], [`mc_snr_gain`]), and benchmark against a
//! principal-component baseline ([`pca_demodulate`]). File formats for all
//! artifacts live in the same crate ([`write_design`], [`write_stack`] and
//! friends) so every producer and consumer agrees bit-for-bit.

pub use num_complex::Complex64;

mod analysis;
mod demod;
mod design;
mod eigen;
mod fringe;
mod io;
mod linalg;
mod pca;
pub mod rng;
mod steps;

pub use analysis::{
    evaluate_ftf, harmonic_rejection_report, linear_lspsa, sample_spectrum, snr_gain,
    AnalysisError, HarmonicClass, HarmonicEntry, RejectionReport, SpectrumSamples,
};
pub use demod::{
    demodulate, mc_snr_gain, phase_error, DemodError, DemodResult, PhaseErrorStats,
};
pub use design::{
    default_zero_set, solve_coefficients, CoefficientSet, Constraint, DesignError, DesignSpec,
};
pub use fringe::{
    add_awgn, simulate_stack, synth_phase_map, FringeProfile, FringeStack, Harmonic, PhaseMap,
    SceneError, SceneKind,
};
pub use io::{
    read_design, read_grid_csv, read_stack, write_demod_result, write_design, write_grid_csv,
    write_spectrum_csv, write_stack, write_stats_json, IoError,
};
pub use pca::{pca_demodulate, PcaError, PcaResult};
pub use steps::{wrap_angle, PhaseSteps};
