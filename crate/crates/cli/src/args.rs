//! Argument surface: six subcommands, comma-separated reals, all angles in
//! radians.

use clap::{ArgGroup, Args, Parser, Subcommand};
use std::num::NonZeroUsize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "phasestep",
    version,
    about = "Design and apply phase-stepping demodulation filters"
)]
pub struct Cli {
    /// Worker threads for per-pixel work; results never depend on this
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<NonZeroUsize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve demodulation coefficients from steps and response constraints
    Design(DesignArgs),
    /// Sample a design's frequency response into a CSV
    Spectrum(SpectrumArgs),
    /// Print a design's noise gain, optionally Monte-Carlo checked
    Snr(SnrArgs),
    /// Render a synthetic fringe stack into a directory
    Simulate(SimulateArgs),
    /// Recover phase and amplitude from a stack
    Demodulate(DemodulateArgs),
    /// Demodulate with the design and the PCA baseline side by side
    Compare(CompareArgs),
}

/// Where the steps come from: an explicit list or the uniform lattice.
#[derive(Args)]
#[group(required = true, multiple = false)]
pub struct StepSource {
    /// Step angles in radians, comma-separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LIST")]
    pub steps: Option<Vec<f64>>,

    /// N uniform steps 2πk/N
    #[arg(long, value_name = "N")]
    pub uniform: Option<usize>,
}

#[derive(Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub source: StepSource,

    /// Frequencies forced to zero response, comma-separated;
    /// defaults to the built-in window for the step count
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LIST")]
    pub zeros: Option<Vec<f64>>,

    /// Frequency with unit response (needs --zeros) [default: 1]
    #[arg(long, requires = "zeros", allow_hyphen_values = true, value_name = "OMEGA")]
    pub pass_omega: Option<f64>,

    /// Write the design document here
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Design document to sample
    #[arg(long, value_name = "FILE")]
    pub design: PathBuf,

    /// Frequency range as min,max
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-10,10",
        value_name = "MIN,MAX"
    )]
    pub range: Vec<f64>,

    /// Number of samples across the range
    #[arg(long, default_value_t = 2001, value_name = "N")]
    pub count: usize,

    /// Output CSV path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).multiple(false).args(["design", "uniform"])))]
pub struct SnrArgs {
    /// Design document
    #[arg(long, value_name = "FILE")]
    pub design: Option<PathBuf>,

    /// Uniform design of N steps instead of a file
    #[arg(long, value_name = "N")]
    pub uniform: Option<usize>,

    /// Monte-Carlo check: trial count, noise deviation, seed
    #[arg(long, num_args = 3, value_names = ["TRIALS", "SIGMA", "SEED"], allow_hyphen_values = true)]
    pub mc: Option<Vec<String>>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: StepSource,

    /// Scene kind: constant, quadratic, or gaussians
    #[arg(long, value_name = "KIND")]
    pub scene: String,

    /// Scene parameters, comma-separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LIST")]
    pub params: Vec<f64>,

    /// Grid width in pixels
    #[arg(long, value_name = "W")]
    pub width: NonZeroUsize,

    /// Grid height in pixels
    #[arg(long, value_name = "H")]
    pub height: NonZeroUsize,

    /// Harmonic content as order:amplitude pairs, e.g. 1:1.0,3:0.5
    #[arg(long, default_value = "1:1.0", value_name = "PAIRS")]
    pub harmonics: String,

    /// Background level; defaults to 0.5·(b₁ + Σ b_k)
    #[arg(long, allow_hyphen_values = true, value_name = "A")]
    pub background: Option<f64>,

    /// Additive Gaussian noise deviation
    #[arg(long, default_value_t = 0.0, value_name = "SIGMA")]
    pub sigma: f64,

    /// Noise seed
    #[arg(long, default_value_t = 0, value_name = "SEED")]
    pub seed: u64,

    /// Output stack directory
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DemodulateArgs {
    /// Stack directory to demodulate
    #[arg(long, value_name = "DIR")]
    pub stack: PathBuf,

    /// Design document to apply
    #[arg(long, value_name = "FILE")]
    pub design: PathBuf,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Remove the circular-mean offset before error statistics
    #[arg(long)]
    pub remove_piston: bool,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Stack directory; must carry ground truth
    #[arg(long, value_name = "DIR")]
    pub stack: PathBuf,

    /// Design document for the direct method
    #[arg(long, value_name = "FILE")]
    pub design: PathBuf,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}
