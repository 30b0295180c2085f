mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::run::Failure;

#[derive(Parser, Debug)]
#[command(name = "dixmier", version, about = "Dixmier traces, zeta residues and quantum limits from spectral data")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

/// Config file plus one flag per config field.
#[derive(Args, Debug, Default, Clone)]
pub struct Global {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for JSON and CSV outputs.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Exit with status 1 on band or inconclusive verdicts.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long = "n-min", global = true)]
    pub n_min: Option<u64>,
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<u64>,
    #[arg(long, global = true)]
    pub ratio: Option<f64>,
    #[arg(long = "cesaro-order", global = true)]
    pub cesaro_order: Option<u32>,
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long = "point-tolerance", global = true)]
    pub point_tolerance: Option<f64>,
    #[arg(long = "data-tolerance", global = true)]
    pub data_tolerance: Option<f64>,
    #[arg(long = "zeta-tolerance", global = true)]
    pub zeta_tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub agreement: Option<f64>,
    #[arg(long = "extrapolation-order", global = true)]
    pub extrapolation_order: Option<usize>,
}

impl Global {
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = run::read_input("config", path)?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f.clone() { cfg.$f = v; })* };
        }
        set!(n_min, n_max, ratio, cesaro_order, threshold, point_tolerance, data_tolerance, zeta_tolerance, agreement, extrapolation_order, seed);
        if self.output.is_some() {
            cfg.output = self.output.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Base operator.
#[derive(Args, Debug, Clone)]
pub struct OperatorSpec {
    /// Model name (see `model list`).
    #[arg(long, default_value = "harmonic")]
    pub model: String,
    /// Truncation size for data-backed models (torus modes, lattice radius).
    #[arg(long)]
    pub size: Option<u64>,
    /// JSON array of eigenvalues; replaces --model.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
}

/// Diagonal observable; at most one source.
#[derive(Args, Debug, Clone)]
pub struct ObservableSpec {
    /// Named observable (one, zero, blocks, convergent).
    #[arg(long, default_value = "one")]
    pub observable: String,
    /// Rotation-algebra element JSON.
    #[arg(long, conflicts_with_all = ["function", "diagonal"])]
    pub element: Option<PathBuf>,
    /// Overrides the deformation parameter of --element.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Torus multiplier JSON with Fourier coefficients.
    #[arg(long, conflicts_with = "diagonal")]
    pub function: Option<PathBuf>,
    /// JSON array of diagonal values, zero beyond.
    #[arg(long)]
    pub diagonal: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Residue,
    LogAverage,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate ζ_{A,T}(s).
    Zeta {
        #[command(flatten)]
        operator: OperatorSpec,
        #[command(flatten)]
        observable: ObservableSpec,
        /// Comma-separated values of s > 1.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        s: Vec<f64>,
    },
    /// Dixmier trace of AT by the chosen route(s).
    Dixmier {
        #[command(flatten)]
        operator: OperatorSpec,
        #[command(flatten)]
        observable: ObservableSpec,
        #[arg(long, value_enum, default_value = "both")]
        route: Route,
    },
    /// Both routes with a measurability verdict.
    Measurable {
        #[command(flatten)]
        operator: OperatorSpec,
        #[command(flatten)]
        observable: ObservableSpec,
    },
    /// Normalized integral against the limit of the diagonal.
    Structure {
        #[command(flatten)]
        operator: OperatorSpec,
        #[command(flatten)]
        observable: ObservableSpec,
    },
    /// Domination witness and monotone-chain check for a model.
    Normality {
        /// torus or nctorus.
        #[arg(long, default_value = "torus")]
        model: String,
        #[arg(long)]
        theta: Option<f64>,
        /// Eigenvectors tested against the dominating vector.
        #[arg(long, default_value_t = 256)]
        count: u64,
        /// Truncation size of the base operator.
        #[arg(long)]
        size: Option<u64>,
    },
    /// Run a named property suite.
    Proptest {
        /// lemmas, algebra or routes.
        suite: String,
    },
    /// Model registry.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ModelAction {
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run::execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
