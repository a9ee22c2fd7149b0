use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csaudio::{BasisKind, SolverConfig, SynthKind};

#[derive(Debug, Parser)]
#[command(
    name = "csaudio",
    version,
    about = "Compressive-sensing reconstruction of audio frames"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Observe a fraction of one frame's samples and reconstruct the rest.
    Reconstruct(ReconstructArgs),
    /// MSE over a grid of percentages, trials and bases.
    Sweep(SweepArgs),
    /// Write a synthetic test frame as 16-bit WAV.
    Synth(SynthArgs),
    /// Print the largest coefficients of a frame in one basis.
    Transform(TransformArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Dct,
    Dft,
}

impl From<BasisArg> for BasisKind {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Dct => BasisKind::Dct,
            BasisArg::Dft => BasisKind::Dft,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKindArg {
    Sparse,
    Harmonic,
    VowelProxy,
}

impl From<SynthKindArg> for SynthKind {
    fn from(k: SynthKindArg) -> Self {
        match k {
            SynthKindArg::Sparse => SynthKind::Sparse,
            SynthKindArg::Harmonic => SynthKind::Harmonic,
            SynthKindArg::VowelProxy => SynthKind::VowelProxy,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthParams {
    /// Synthetic frame length [default: --frame-len].
    #[arg(long)]
    pub synth_n: Option<usize>,
    /// Nonzero coefficients for `sparse`.
    #[arg(long, default_value_t = 10)]
    pub synth_k: usize,
    /// Coefficient index of the fundamental.
    #[arg(long, default_value_t = 8)]
    pub fundamental: usize,
    #[arg(long, default_value_t = 10)]
    pub harmonics: usize,
    /// Amplitude ratio between consecutive harmonics.
    #[arg(long, default_value_t = 0.7)]
    pub decay: f64,
}

/// Where the frame comes from: a WAV window or a synthetic generator.
#[derive(Debug, Args)]
pub struct SourceArgs {
    /// 16-bit PCM WAV file; channel 0 is used.
    #[arg(long, conflicts_with = "synth_kind", required_unless_present = "synth_kind")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub frame_start: usize,
    #[arg(long, default_value_t = 3000, value_parser = clap::value_parser!(u64).range(1..))]
    pub frame_len: u64,
    #[arg(long, value_enum)]
    pub synth_kind: Option<SynthKindArg>,
    #[command(flatten)]
    pub synth: SynthParams,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub residual_tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            residual_tol: self.residual_tol,
            admm_rho: self.rho,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value = "dct")]
    pub basis: BasisArg,
    /// Percentage of samples observed.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..=100))]
    pub percent: u32,
    /// Seeds both the sampling pattern and any synthetic frame.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reconstructed frame as 16-bit WAV.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Restrict the sweep to one basis [default: both].
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..=100))]
    pub percent_min: u32,
    #[arg(long, default_value_t = 90, value_parser = clap::value_parser!(u32).range(1..=100))]
    pub percent_max: u32,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=100))]
    pub percent_step: u32,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Base seed; trial seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-trial results.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub synth_kind: SynthKindArg,
    /// Basis in which the frame is sparse.
    #[arg(long, value_enum, default_value = "dct")]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub synth: SynthParams,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value = "dct")]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// How many of the largest coefficients to print.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
}
