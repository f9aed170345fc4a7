mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Evaluate, bound, compare and search mixed qualitative-quantitative designs.
#[derive(Debug, Parser)]
#[command(name = "qqd", version)]
pub struct Cli {
    /// Emit JSON with full precision instead of text tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Absolute tolerance for reference comparisons and cross-checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a criterion on a design file.
    Eval(EvalArgs),
    /// Lower bounds for a design class.
    Bounds(SpecArgs),
    /// Balance pattern of a U-type lattice design.
    Balance { file: String },
    /// Rank designs of one class by squared QQD.
    Compare {
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Threshold-accepting search for a low-QQD design.
    Search(SearchArgs),
    /// Recompute every bundled reference value.
    Reproduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Criterion {
    Qqd,
    Wd,
    Dd,
    Swd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SwdModeArg {
    Wd,
    WdSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SwdScaleArg {
    Stored,
    LevelEndpoints,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub file: String,
    #[arg(long, value_enum, default_value = "qqd")]
    pub criterion: Criterion,
    /// Qualitative kernel value for equal levels.
    #[arg(long, default_value_t = 1.5)]
    pub a: f64,
    /// Qualitative kernel value for different levels.
    #[arg(long, default_value_t = 1.25)]
    pub b: f64,
    #[arg(long, value_enum, default_value = "wd")]
    pub swd_mode: SwdModeArg,
    #[arg(long, value_enum, default_value = "level-endpoints")]
    pub swd_scale: SwdScaleArg,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    /// Level counts, comma separated; `SxK` repeats `S` K times.
    #[arg(long)]
    pub levels: String,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// Independent restarts, run in parallel.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep searching after the lower bound is reached.
    #[arg(long)]
    pub no_stop_at_bound: bool,
    /// Where to write the best design (text format).
    #[arg(long)]
    pub out: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
