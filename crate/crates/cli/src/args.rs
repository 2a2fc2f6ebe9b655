use std::path::PathBuf;

use antpath_core::mmas::MmasConfig;
use antpath_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "antpath",
    version,
    about = "Max-Min Ant System with exponential pheromone deposition on roadmap shortest-path problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random roadmap and write it in the roadmap text format.
    Generate(GenerateArgs),
    /// Run the colony once on a roadmap and compare with the exact optimum.
    Solve(SolveArgs),
    /// Emit the discrete and closed-form trail dynamics as CSV.
    Dynamics(DynamicsArgs),
    /// Sweep an (alpha, beta) grid over several seeds.
    Sweep(SweepArgs),
    /// Paired comparison of constant and exponential deposition.
    Compare(CompareArgs),
    /// Sweep a corpus of generated roadmaps and tabulate features against the best (alpha, beta).
    Corpus(CorpusArgs),
    /// Predict (alpha, beta) from roadmap features with the fitted models.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Constant,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeIndexArg {
    Hop,
    Iteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XSourceArg {
    /// x = cities per 200 square units
    Density,
    /// x = city count
    Count,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub cities: usize,
    #[arg(long, default_value_t = 100.0)]
    pub width: f64,
    #[arg(long, default_value_t = 100.0)]
    pub height: f64,
    #[arg(long = "connect-radius", default_value_t = 10.0)]
    pub connect_radius: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Colony parameters. Values given here override `--config`.
#[derive(Debug, Args)]
pub struct MmasArgs {
    /// key=value file with MmasConfig field names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub q0: Option<f64>,
    #[arg(long = "num-ants")]
    pub num_ants: Option<usize>,
    #[arg(long, value_enum)]
    pub deposition: Option<RuleArg>,
    /// Time constant of the exponential rule.
    #[arg(long = "T")]
    pub time_constant: Option<f64>,
    #[arg(long = "time-index", value_enum)]
    pub time_index: Option<TimeIndexArg>,
    /// Number or `auto`.
    #[arg(long = "tau-min")]
    pub tau_min: Option<String>,
    /// Number or `auto`.
    #[arg(long = "tau-max")]
    pub tau_max: Option<String>,
    #[arg(long = "use-best-so-far-every")]
    pub use_best_so_far_every: Option<usize>,
    #[arg(long = "stagnation-window")]
    pub stagnation_window: Option<usize>,
    #[arg(long = "max-iterations")]
    pub max_iterations: Option<usize>,
}

impl MmasArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self) -> Result<MmasConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => MmasConfig::load(path)?,
            None => MmasConfig::default(),
        };
        let mut pairs: Vec<(&str, String)> = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                pairs.push((k, v));
            }
        };
        push("alpha", self.alpha.map(|v| v.to_string()));
        push("beta", self.beta.map(|v| v.to_string()));
        push("rho", self.rho.map(|v| v.to_string()));
        push("q0", self.q0.map(|v| v.to_string()));
        push("num_ants", self.num_ants.map(|v| v.to_string()));
        push(
            "deposition",
            self.deposition.map(|d| match d {
                RuleArg::Constant => "constant".to_string(),
                RuleArg::Exponential => "exponential".to_string(),
            }),
        );
        push("T", self.time_constant.map(|v| v.to_string()));
        push(
            "time_index",
            self.time_index.map(|t| match t {
                TimeIndexArg::Hop => "hop".to_string(),
                TimeIndexArg::Iteration => "iteration".to_string(),
            }),
        );
        push("tau_min", self.tau_min.clone());
        push("tau_max", self.tau_max.clone());
        push(
            "use_best_so_far_every",
            self.use_best_so_far_every.map(|v| v.to_string()),
        );
        push(
            "stagnation_window",
            self.stagnation_window.map(|v| v.to_string()),
        );
        push("max_iterations", self.max_iterations.map(|v| v.to_string()));
        cfg.apply_pairs(pairs.iter().map(|(k, v)| (*k, v.as_str())))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Seeds and execution settings for multi-run commands.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// First seed; runs use seed, seed+1, ...
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of seeds per configuration.
    #[arg(long, default_value_t = 10)]
    pub runs: u64,
    /// Relative tolerance against the exact optimum for convergence time.
    #[arg(long = "tol", default_value_t = 0.0)]
    pub tolerance: f64,
    /// Worker threads. Output does not depend on this value.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl RunArgs {
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.runs).map(|i| self.seed.wrapping_add(i)).collect()
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub roadmap: PathBuf,
    #[command(flatten)]
    pub mmas: MmasArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Relative tolerance for the reported convergence iteration.
    #[arg(long = "tol", default_value_t = 0.0)]
    pub tolerance: f64,
    /// Write the per-iteration trace CSV here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Summary output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long, default_value_t = 0.0)]
    pub tau0: f64,
    #[arg(long)]
    pub rho: f64,
    /// Time constant; selects the exponential rule unless --rule says otherwise.
    #[arg(long = "T")]
    pub time_constant: Option<f64>,
    /// Per-ant deposit constants, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub deposits: Vec<f64>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub roadmap: PathBuf,
    #[command(flatten)]
    pub mmas: MmasArgs,
    #[command(flatten)]
    pub runs: RunArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1.0")]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1.0,1.5,2.0,2.5,3.0,3.5")]
    pub betas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub roadmap: PathBuf,
    /// Parameters of the exponential run; the constant run differs only in rule.
    #[command(flatten)]
    pub mmas: MmasArgs,
    #[command(flatten)]
    pub runs: RunArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the summary statistics as JSON here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "250,265,280,295,310,325,350"
    )]
    pub cities: Vec<usize>,
    /// Roadmaps per city count.
    #[arg(long, default_value_t = 7)]
    pub distributions: usize,
    #[arg(long, default_value_t = 20.0)]
    pub width: f64,
    #[arg(long, default_value_t = 10.0)]
    pub height: f64,
    #[arg(long = "connect-radius", default_value_t = 0.8)]
    pub connect_radius: f64,
    #[arg(long = "roadmap-seed", default_value_t = DEFAULT_SEED)]
    pub roadmap_seed: u64,
    #[command(flatten)]
    pub mmas: MmasArgs,
    #[command(flatten)]
    pub runs: RunArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2.5,2.6,2.7,2.8,2.9,3.0")]
    pub betas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Take features from this roadmap.
    #[arg(long, conflicts_with_all = ["x", "y"])]
    pub roadmap: Option<PathBuf>,
    /// Raw x (nodes per 200 square units).
    #[arg(long, requires = "y", allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Raw y (min-arc standard deviation).
    #[arg(long, requires = "x", allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// How x is derived from a roadmap's features.
    #[arg(long = "x-source", value_enum, default_value_t = XSourceArg::Density)]
    pub x_source: XSourceArg,
    /// Override the x scaling domain: lo,hi
    #[arg(long = "x-range", value_delimiter = ',', num_args = 2)]
    pub x_range: Option<Vec<f64>>,
    /// Override the y scaling domain: lo,hi
    #[arg(long = "y-range", value_delimiter = ',', num_args = 2)]
    pub y_range: Option<Vec<f64>>,
    /// name=value coefficient file for the alpha model.
    #[arg(long = "alpha-model")]
    pub alpha_model: Option<PathBuf>,
    /// name=value coefficient file for the beta model.
    #[arg(long = "beta-model")]
    pub beta_model: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
