//! Command-line surface. Every argument struct is serialized into the report and hashed.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "statesynth", version, about = "Seeded experiments for oracle-driven state synthesis")]
pub struct Cli {
    /// Master seed; trial `i` draws from stream `i`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Number of independent trials.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..=10_000_000))]
    pub trials: u64,

    /// Directory for `<subcommand>.csv` and `<subcommand>.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// O(n)-query baseline with finite-precision rotations.
    SynthAdaptive(AdaptiveArgs),
    /// One-query synthesis followed by swap-test distillation.
    SynthOne(OneQueryArgs),
    /// Two-query synthesis by sorted-amplitude matching.
    SynthTwo(TwoQueryArgs),
    /// Swap-test distillation on prepared registers.
    Distill(DistillArgs),
    /// One-query witness search for a local Hamiltonian.
    Qma(QmaArgs),
    /// Abort-free witness search with overlap diagnostics.
    QmaExp(QmaExpArgs),
    /// Witness extraction for a DIMACS CNF formula.
    Extract(ExtractArgs),
    /// Second and fourth moments of a random-unitary ensemble.
    EnsemblesCheck(EnsemblesArgs),
    /// Empirical W2 distance of amplitude moduli to the Rayleigh law.
    WassersteinCheck(WassersteinArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SynthAdaptive(_) => "synth-adaptive",
            Command::SynthOne(_) => "synth-one",
            Command::SynthTwo(_) => "synth-two",
            Command::Distill(_) => "distill",
            Command::Qma(_) => "qma",
            Command::QmaExp(_) => "qma-exp",
            Command::Extract(_) => "extract",
            Command::EnsemblesCheck(_) => "ensembles-check",
            Command::WassersteinCheck(_) => "wasserstein-check",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct AdaptiveArgs {
    /// Target qubits.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 24)]
    pub prob_bits: u32,
    #[arg(long, default_value_t = 24)]
    pub phase_bits: u32,
    /// Ignore the bit counts and use infinite precision.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    Dense,
    Implicit,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Sampled,
    Exact,
}

#[derive(Debug, Args, Serialize)]
pub struct OneQueryArgs {
    /// Target qubits.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Register qubits; defaults to `n + 4`.
    #[arg(long)]
    pub n_expanded: Option<usize>,
    /// Registers prepared per trial.
    #[arg(long, default_value_t = 96)]
    pub m: usize,
    /// Distillation rounds; automatic when omitted.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, value_enum, default_value_t = Sampling::Implicit)]
    pub sampling: Sampling,
    #[arg(long, value_enum, default_value_t = Mode::Sampled)]
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoMode {
    Auto,
    Dense,
    Implicit,
}

#[derive(Debug, Args, Serialize)]
pub struct TwoQueryArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Register qubits; defaults to `n + 4`.
    #[arg(long)]
    pub n_expanded: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub phase_bits: u32,
    #[arg(long, value_enum, default_value_t = TwoMode::Auto)]
    pub mode: TwoMode,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Pure registers `sqrt(a)|tau> + sqrt(1-a)|e>` with independent Haar noise.
    Dense,
    /// Registers with mutually orthogonal noise, tracked by their overlap alone.
    Scalar,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    First,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Odd {
    Drop,
    PassThrough,
}

#[derive(Debug, Args, Serialize)]
pub struct DistillArgs {
    /// Register count.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// Qubits per register.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Initial overlap of every register with the target.
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, value_enum, default_value_t = Backend::Dense)]
    pub backend: Backend,
    #[arg(long, value_enum, default_value_t = Mode::Sampled)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Selection::First)]
    pub selection: Selection,
    #[arg(long, value_enum, default_value_t = Odd::Drop)]
    pub odd: Odd,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Clifford,
    Haar,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    Squaring,
    Spectral,
}

#[derive(Debug, Args, Serialize)]
pub struct HamiltonianArgs {
    /// Hamiltonian in the `n k a b` / `qubits : entries` text format.
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[arg(long, value_enum, default_value_t = Ensemble::Clifford)]
    pub twirl: Ensemble,
    #[arg(long, value_enum, default_value_t = Filter::Squaring)]
    pub filter: Filter,
    /// Filter exponent `p`; derived from the gap when omitted.
    #[arg(long)]
    pub exponent: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct QmaArgs {
    #[command(flatten)]
    pub h: HamiltonianArgs,
    /// Energy-register bits; derived from the gap when omitted.
    #[arg(long)]
    pub m_bits: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct QmaExpArgs {
    #[command(flatten)]
    pub h: HamiltonianArgs,
    /// Overlap threshold counted as a success.
    #[arg(long, default_value_t = 0.125)]
    pub gamma: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractArgs {
    /// Formula in DIMACS CNF.
    #[arg(long)]
    pub cnf: PathBuf,
    /// Query the base formula without the random hash.
    #[arg(long)]
    pub no_isolate: bool,
    /// Amplify to failure probability `2^-t`.
    #[arg(long)]
    pub amplify_t: Option<u32>,
    /// Repetition constant `c` in `ceil(c (m + t))`.
    #[arg(long, default_value_t = 2.0)]
    pub amplify_c: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EnsemblesArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Ensemble::Clifford)]
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Independent Rayleigh draws.
    Iid,
    /// `sqrt(d) |u_x|` of one Haar-random state.
    Haar,
}

#[derive(Debug, Args, Serialize)]
pub struct WassersteinArgs {
    /// `log2` of the sample size.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Source::Iid)]
    pub source: Source,
}
