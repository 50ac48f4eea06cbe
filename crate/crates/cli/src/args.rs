use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use eos_core::quad::QuadratureConfig;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "eos",
    version,
    about = "Quantum noise budgets for electro-optic sampling"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Preset parameter set (1 or 2) that the config file overrides
    #[arg(long, global = true)]
    pub set: Option<u8>,
    /// TOML parameter file
    #[arg(long, global = true, env = "EOS_CONFIG")]
    pub config: Option<PathBuf>,
    /// Relative quadrature tolerance
    #[arg(long, global = true, default_value = "1e-9")]
    pub rel_tol: f64,
    /// Absolute quadrature tolerance
    #[arg(long, global = true, default_value = "1e-300")]
    pub abs_tol: f64,
    /// Subdivision budget per integral
    #[arg(long = "max-subdiv", global = true, default_value_t = 4000)]
    pub max_subdiv: usize,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Fail when any integral misses its tolerance
    #[arg(long, global = true)]
    pub strict: bool,
    /// Output file; a manifest is written next to it. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_subdivisions: self.max_subdiv,
            ..QuadratureConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Noise contributions per photon against N (Fig. 2)
    SweepN(SweepN),
    /// Crossover N_min and noise at N_min against beam waist (Fig. S1)
    WaistSweep(WaistSweep),
    /// Gating response, phase matching and absorption against ν (Figs. S6/S7)
    Gating(Gating),
    /// Two-channel correlation trace against delay (Fig. 3)
    Correlate(Correlate),
    /// χ⁽³⁾ noise variance against N
    Chi3(Chi3),
    /// Three-mode Fock-space check of the perturbative variance formulas
    Oracle(Oracle),
    /// Run the identity and symmetry checks
    Selftest,
}

#[derive(Debug, Args)]
pub struct SweepN {
    #[arg(long, default_value_t = 1e6)]
    pub n_from: f64,
    #[arg(long, default_value_t = 1e13)]
    pub n_to: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    /// Linear instead of logarithmic N spacing
    #[arg(long)]
    pub linear: bool,
    /// χ⁽³⁾ strength X in m²/V²
    #[arg(long)]
    pub chi3_x: Option<f64>,
}

#[derive(Debug, Args)]
pub struct WaistSweep {
    /// Smallest waist in µm (default: a quarter of the configured waist)
    #[arg(long)]
    pub w0_from: Option<f64>,
    /// Largest waist in µm (default: four times the configured waist)
    #[arg(long)]
    pub w0_to: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct Gating {
    /// Lowest frequency in THz (default: lower edge of the MIR band)
    #[arg(long)]
    pub nu_from: Option<f64>,
    /// Highest frequency in THz (default: upper edge of the MIR band)
    #[arg(long)]
    pub nu_to: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct Correlate {
    /// Photons per pulse
    #[arg(long, default_value_t = 1e11)]
    pub photons: f64,
    #[arg(long, default_value_t = 2000.0)]
    pub tau_max_fs: f64,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Include crystal absorption
    #[arg(long)]
    pub absorption: bool,
    /// Treat --photons as the number before the beam splitter
    #[arg(long)]
    pub pre_splitter: bool,
    /// Comma-separated subset of terms (main2, cross2, v22a, ... v04c)
    #[arg(long, value_delimiter = ',')]
    pub terms: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct Chi3 {
    #[arg(long, default_value_t = 1e6)]
    pub n_from: f64,
    #[arg(long, default_value_t = 1e13)]
    pub n_to: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    #[arg(long)]
    pub linear: bool,
    /// χ⁽³⁾ strength X in m²/V²
    #[arg(long)]
    pub x: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Oracle {
    /// Coherent amplitude(s), one per channel
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.0")]
    pub alpha_im: Vec<f64>,
    #[arg(long = "A-re", value_delimiter = ',', default_value = "0.05")]
    pub a_re: Vec<f64>,
    #[arg(long = "A-im", value_delimiter = ',', default_value = "0.0")]
    pub a_im: Vec<f64>,
    #[arg(long = "C-re", value_delimiter = ',', default_value = "0.0")]
    pub c_re: Vec<f64>,
    #[arg(long = "C-im", value_delimiter = ',', default_value = "0.0")]
    pub c_im: Vec<f64>,
    /// Fock cutoffs as probe,mir,nir
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub channels: u8,
    /// Also evolve with the full exponential
    #[arg(long)]
    pub exact: bool,
}
