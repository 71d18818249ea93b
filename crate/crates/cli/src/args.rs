use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use logvol::ingest::DEFAULT_ECB_URL;

#[derive(Parser, Debug)]
#[command(name = "logvol", version, about = "AS-Log-GARCH and EGARCH(1,1) estimation, specification tests and forecasts")]
pub struct Cli {
    /// JSON config file (flags override it; it overrides LOGVOL_* variables)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit a model by Gaussian QML and print a JSON report
    Fit(FitArgs),
    /// Fit a model (or load a fit) and run a specification test over a range of lags
    Test(TestArgs),
    /// Size/power experiment: rejection frequencies at 1/5/10% as CSV
    Montecarlo(MonteCarloArgs),
    /// Fit two models on a training window and compare holdout forecasts
    ForecastEval(ForecastArgs),
    /// News impact curve of an AS-Log-GARCH(1,1) as CSV
    Nic(NicArgs),
    /// Simulate a path as `t,eps,log_sigma2` CSV
    Simulate(SimulateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Aslog,
    Egarch,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestChoice {
    Lm,
    Portmanteau,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// CSV input: ECB history (with --currency), `date,value` rows or one value per row
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Fetch the ECB reference-rate history (default URL when no value is given)
    #[arg(long, num_args = 0..=1, default_missing_value = DEFAULT_ECB_URL)]
    pub ecb: Option<String>,

    /// Currency column of an ECB history file
    #[arg(long)]
    pub currency: Option<String>,

    /// Value column of a headered CSV (a `date` column is picked up if present)
    #[arg(long)]
    pub column: Option<String>,

    /// Input values are already returns, not price levels
    #[arg(long)]
    pub returns: bool,

    /// First date kept (YYYY-MM-DD), applied to levels
    #[arg(long)]
    pub from: Option<NaiveDate>,

    /// Last date kept (YYYY-MM-DD)
    #[arg(long)]
    pub to: Option<NaiveDate>,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "aslog")]
    pub model: Family,

    /// Log-volatility lags (AS-Log-GARCH only)
    #[arg(long, default_value_t = 1)]
    pub p: usize,

    /// Return lags (AS-Log-GARCH only)
    #[arg(long, default_value_t = 1)]
    pub q: usize,

    /// Impose alpha+ = alpha- at every lag
    #[arg(long)]
    pub restrict_alpha: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OptimArgs {
    #[arg(long)]
    pub seed: Option<u64>,

    /// Random optimizer restarts besides the deterministic start
    #[arg(long)]
    pub restarts: Option<usize>,

    #[arg(long)]
    pub max_iters: Option<usize>,

    #[arg(long)]
    pub tol: Option<f64>,

    /// Ridge added to a singular information matrix (0 = fail instead)
    #[arg(long)]
    pub ridge: Option<f64>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub optim: OptimArgs,

    /// Write `t,date,eps,log_sigma2,residual` rows here
    #[arg(long)]
    pub residuals_csv: Option<PathBuf>,

    /// Report destination (default stdout)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub optim: OptimArgs,

    /// Evaluate at the parameters of a saved fit report instead of fitting
    #[arg(long)]
    pub fit: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "lm")]
    pub test: TestChoice,

    /// Lags: `3`, `1..12` or `1,2,5`
    #[arg(long, default_value = "1..12")]
    pub lags: String,

    /// LM variance estimator: uncentered (consistent) or centered
    #[arg(long, default_value = "uncentered")]
    pub info: String,

    /// Ridge singular test matrices instead of failing
    #[arg(long)]
    pub ridge_tests: bool,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,

    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MonteCarloArgs {
    #[arg(long, value_enum)]
    pub dgp: Family,

    #[arg(long, value_enum)]
    pub null: Family,

    #[arg(long, value_enum, default_value = "lm")]
    pub test: TestChoice,

    #[arg(long, default_value_t = 4000)]
    pub n: usize,

    #[arg(long, default_value_t = 200)]
    pub reps: usize,

    #[arg(long, default_value = "1")]
    pub lags: String,

    /// DGP parameters, comma separated; defaults to the reference values
    /// (0.01,0.02,0.04,0.05,0.95) or (-0.15,-0.08,0.12,0.95)
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,

    #[arg(long, default_value_t = logvol::simulate::DEFAULT_BURN)]
    pub burn: usize,

    #[arg(long)]
    pub restrict_alpha: bool,

    #[arg(long, default_value = "uncentered")]
    pub info: String,

    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,

    #[command(flatten)]
    pub optim: OptimArgs,

    /// Also write every replication's p-values as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,

    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub optim: OptimArgs,

    /// Last training observation: a return count or a date
    #[arg(long)]
    pub train_end: String,

    /// Benchmark model (DM alternative: model b is less accurate)
    #[arg(long, value_enum, default_value = "aslog")]
    pub model_a: Family,

    #[arg(long, value_enum, default_value = "egarch")]
    pub model_b: Family,

    #[arg(long)]
    pub restrict_alpha: bool,

    /// Bartlett HAC lag for the DM variance (default: plain variance)
    #[arg(long)]
    pub hac_lag: Option<usize>,

    /// Directory for per-loss CSV tables `<loss>.csv`
    #[arg(long)]
    pub losses_dir: Option<PathBuf>,

    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NicArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub omega_minus: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_plus: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_minus: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -5.0)]
    pub min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub max: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "aslog")]
    pub model: Family,
    /// Parameters, comma separated (defaults as for `montecarlo`)
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = logvol::simulate::DEFAULT_BURN)]
    pub burn: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
