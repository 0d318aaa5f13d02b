mod commands;
mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "csdual", version, about = "Chern-Simons dual variational toolkit on a box grid")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Difference scheme: auto, sbp21 or sbp42.
    #[arg(long, global = true, default_value = "auto")]
    pub scheme: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the su(2) basis identities and structure constants; JSON report.
    AlgebraVerify,
    /// Action and flatness residual of a snapshot; JSON report.
    CsEval {
        #[arg(long)]
        field: PathBuf,
    },
    /// Action along t·φ·(E1,E2,E3) for a smooth bump φ and a cubic fit.
    ///
    /// Stdout is CSV with columns `t,action`, followed by `#`-prefixed lines
    /// `cubic_coefficient`, `predicted`, `relative_error`; `--json` prints
    /// the JSON report instead.
    CsCubicDemo {
        #[arg(long, default_value_t = 33)]
        n: usize,
        /// Comma-separated sample points (at least four distinct).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,-1,1,2")]
        t: Vec<f64>,
        /// Allowed relative error of the t³ coefficient.
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Flatness residual of a snapshot or of a pure-gauge field; JSON report.
    Flatness(FlatnessArgs),
    /// Quadratic dual functional at a multiplier field; JSON report.
    DualEval {
        #[arg(long)]
        lambda: PathBuf,
        /// Base field (default zero).
        #[arg(long)]
        abar: Option<PathBuf>,
        /// Field whose boundary trace is the boundary datum (default zero).
        #[arg(long)]
        ab: Option<PathBuf>,
        /// Penalty constant (default: chosen from the multiplier field).
        #[arg(long)]
        k: Option<f64>,
    },
    /// Finite-difference check of a functional's gradient; JSON report.
    DualGradcheck {
        #[arg(long, value_enum, default_value = "dual")]
        functional: Functional,
        #[arg(long, default_value_t = 9)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        directions: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Exponent of the auxiliary potential (sup-form functional only).
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
    },
    /// Pointwise value function g(λ, μ); JSON report.
    GEval {
        /// Nine reals, row-major (Lie index outer).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<f64>,
        /// Nine reals, row-major (Lie index outer).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        mu: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Default: the value the lower bound is certified for.
        #[arg(long)]
        ell: Option<f64>,
    },
    /// Sampled certification of the pointwise lower bound; JSON report.
    ///
    /// `--csv` writes columns `lambda_norm,mu_norm,g,bound,slack`.
    GScan {
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Use the sharper constants of the dedicated α = 4 analysis.
        #[arg(long)]
        quartic: bool,
    },
    /// Minimize the sup-form dual functional from a TOML config.
    ///
    /// Writes `lambda.csdf`, `astar.csdf`, `report.json` and `history.csv`
    /// (columns `iter,value,grad_linf`) to the output directory.
    DualMinimize(MinimizeArgs),
    /// Header and norms of a snapshot; JSON.
    FieldInfo { file: PathBuf },
    /// Snapshot as CSV with columns `x1,x2,x3,Z,p,value` (Z, p 1-based).
    FieldExport {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct FlatnessArgs {
    #[arg(long, conflicts_with = "gauge", required_unless_present = "gauge")]
    pub field: Option<PathBuf>,
    /// Pure-gauge map `axis:generator:rate,...` (1-based indices).
    #[arg(long, allow_hyphen_values = true)]
    pub gauge: Option<String>,
    /// Nodes per axis for `--gauge` (unit box).
    #[arg(long, default_value_t = 17)]
    pub n: usize,
    /// Fail (exit 1) if the interior residual exceeds this.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Save the residual field as a snapshot.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Save the evaluated field as a snapshot.
    #[arg(long)]
    pub save_field: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Functional {
    /// Chern-Simons action (interior directions).
    Cs,
    /// Quadratic dual functional.
    Dual,
    /// Sup-form dual functional.
    Tilde,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::error_code(&e))
        }
    }
}
