use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Condensate-model calculations for hydrogen-bonded crystals.
///
/// Data goes to --out (or standard output); human-readable summaries go to
/// standard output when --out is given and to standard error otherwise.
#[derive(Debug, Clone, Parser, Serialize, Deserialize, PartialEq)]
#[command(name = "qcrystal", version, about, long_about = None)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct Common {
    /// Master seed for stochastic subcommands.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Output file; a `<out>.manifest.json` sidecar records the run.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Lowest levels of a 1-D double well and its two-level reduction.
    Spectrum(SpectrumArgs),
    /// Mean |Φ|² of random-phase superpositions against the number of terms.
    Condensate(CondensateArgs),
    /// Heat capacity of an ice-like or KDP-like crystal model.
    HeatCapacity(HeatCapacityArgs),
    /// Q-temperature table, or transition temperature from two-level frequencies.
    QTemperature(QTemperatureArgs),
    /// Sample random states on an energy shell and score their Boltzmann fit.
    SampleEvents(SampleEventsArgs),
    /// Fit the condensate linear law and/or the Debye model to C_P data.
    Fit(FitArgs),
    /// Rank candidate models on one or more C_P series.
    Compare(CompareArgs),
    /// Re-execute the run recorded in a manifest.
    Rerun(RerunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Condensate(_) => "condensate",
            Command::HeatCapacity(_) => "heat-capacity",
            Command::QTemperature(_) => "q-temperature",
            Command::SampleEvents(_) => "sample-events",
            Command::Fit(_) => "fit",
            Command::Compare(_) => "compare",
            Command::Rerun(_) => "rerun",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SpectrumArgs {
    /// Key-value file with barrier_height, well_separation, asymmetry_bias,
    /// particle_mass, grid_min, grid_max, grid_points. Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Barrier height with unit (J, cm-1, K, meV) [default: 4000 cm-1].
    #[arg(long, allow_hyphen_values = true)]
    pub barrier: Option<String>,
    /// Distance between the well minima, Å [default: 0.7].
    #[arg(long)]
    pub separation: Option<String>,
    /// Right-minus-left well offset with unit [default: 0 cm-1].
    #[arg(long, allow_hyphen_values = true)]
    pub bias: Option<String>,
    /// Particle mass (kg, u or Da) [default: proton].
    #[arg(long)]
    pub mass: Option<String>,
    /// Left wall of the grid, Å [default: -1.0].
    #[arg(long, allow_hyphen_values = true)]
    pub grid_min: Option<String>,
    /// Right wall of the grid, Å [default: 1.0].
    #[arg(long, allow_hyphen_values = true)]
    pub grid_max: Option<String>,
    /// Interior grid points [default: 4096].
    #[arg(long)]
    pub points: Option<usize>,
    /// Number of levels to compute.
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeArg {
    Uniform,
    Normalized,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseArg {
    Random,
    Coherent,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct CondensateArgs {
    /// Comma-separated term counts (at least 3 distinct values).
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Trials per term count (at least 100).
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = AmplitudeArg::Uniform)]
    pub amplitudes: AmplitudeArg,
    #[arg(long, value_enum, default_value_t = PhaseArg::Random)]
    pub phases: PhaseArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct HeatCapacityArgs {
    /// `ice`, `kdp`, or a model config file.
    #[arg(long, default_value = "ice")]
    pub model: String,
    /// Single temperature, K.
    #[arg(long, conflicts_with_all = ["from", "to"])]
    pub at: Option<f64>,
    /// First temperature, K [default: ℵT_t for ice-like, 1 K for kdp-like].
    #[arg(long)]
    pub from: Option<f64>,
    /// Last temperature, K; always included [default: the model's validity limit].
    #[arg(long)]
    pub to: Option<f64>,
    /// Temperature step, K.
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct QTemperatureArgs {
    /// `ice`, `kdp`, or a model config file.
    #[arg(long, default_value = "ice")]
    pub model: String,
    /// Single temperature, K.
    #[arg(long, conflicts_with_all = ["from", "to", "nu1", "transition_temperature"])]
    pub at: Option<f64>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// Asymmetry ν₁ (Hz, J, cm-1, K or meV); prints the transition temperature.
    #[arg(long, requires = "nut", conflicts_with_all = ["from", "to", "transition_temperature"])]
    pub nu1: Option<String>,
    /// Tunnelling splitting ν_t (same units as --nu1).
    #[arg(long)]
    pub nut: Option<String>,
    /// Transition temperature, K; prints the ν₁ that produces it.
    #[arg(long, requires = "nut", conflicts_with_all = ["from", "to"])]
    pub transition_temperature: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SampleEventsArgs {
    /// Level scheme CSV with header `energy_J[,degeneracy]`.
    #[arg(long)]
    pub levels: PathBuf,
    /// Target mean energy with unit (J or K; a bare number is J).
    #[arg(long)]
    pub v_target: String,
    /// Θ for the Boltzmann fit, K [default: canonical Θ of the target energy].
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Shell half-width with unit [default: 1e-3 of the spectral span].
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long, default_value_t = qcrystal::events::DEFAULT_CHAINS)]
    pub chains: usize,
    /// Burn-in sweeps per chain (one sweep = one proposal per component).
    #[arg(long, default_value_t = qcrystal::events::DEFAULT_BURN_IN_SWEEPS)]
    pub burn_in: usize,
    /// Sweeps between retained samples.
    #[arg(long, default_value_t = qcrystal::events::DEFAULT_THIN_SWEEPS)]
    pub thin: usize,
    /// Keep only the lowest levels of the scheme.
    #[arg(long)]
    pub truncate: Option<usize>,
    /// JSON fit report path [default: `<out>.fit.json` with --out, else standard error].
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FitModelArg {
    Condensate,
    Debye,
    Both,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ModelOptions {
    /// Fix the x-intercept ℵT_t of the linear law, K.
    #[arg(long)]
    pub fix_aleph_tt: Option<f64>,
    /// Equipartition prefactor ν; the linear law tops out at (ν/2)ℛ.
    #[arg(long, default_value_t = 9.0)]
    pub dof: f64,
    /// Fix the Debye amplitude (atoms per formula unit) instead of fitting it.
    #[arg(long)]
    pub n_atoms: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct FitArgs {
    /// C_P table with header `T_K,Cp_J_per_molK[,sigma]`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FitModelArg::Condensate)]
    pub model: FitModelArg,
    #[command(flatten)]
    pub options: ModelOptions,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct CompareArgs {
    /// One or more C_P tables; each is compared independently.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub options: ModelOptions,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct RerunArgs {
    /// A `*.manifest.json` written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
}
