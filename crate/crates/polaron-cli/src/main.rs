//! Command-line front end: config ingestion, parameter sweeps, and emission
//! of plot-ready CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 2 config/flag parse error, 3 validation error,
//! 4 convergence failure (1 for I/O and other unexpected errors).

mod output;
mod run;
mod sweep;

use clap::{Parser, Subcommand, ValueEnum};
use polaron::spectrum::Branch;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "polaron",
    version,
    about = "Impurity diffusion in a coherently coupled two-component 1D BEC"
)]
struct Cli {
    /// Flat `key = value` config file, SI units; built-in reference
    /// parameters when omitted. Unknown keys are hard errors.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV file (diagnostics) or directory (msd, stability).
    /// Diagnostics print to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Density,
    Spin,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::Density => Branch::Density,
            BranchArg::Spin => Branch::Spin,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Bogoliubov dispersions on a wavenumber grid (CSV: k, E_minus, E_plus)
    Spectrum {
        /// Number of grid points.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Largest dimensionless wavenumber.
        #[arg(long, default_value_t = 5.0)]
        kmax: f64,
    },
    /// Bath spectral densities (CSV: omega, J_minus_full, J_minus_cubic,
    /// J_plus_full, J_plus_gapped)
    Sdensity {
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Memory and noise kernels with the Green functions
    /// (CSV: t, gamma, nu, g2_numeric, g2_analytic)
    Kernels {
        #[arg(long, value_enum, default_value_t = BranchArg::Spin)]
        branch: BranchArg,
        /// Largest dimensionless time.
        #[arg(long, default_value_t = 50.0)]
        tmax: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Force the zero-temperature noise closed forms.
        #[arg(long)]
        low_temp: bool,
    },
    /// Laplace-inversion diagnostics against a named analytic pair
    /// (CSV: t, f_numeric, f_analytic, abs_err)
    Invert {
        /// zakian, stehfest, or fourier.
        #[arg(long, default_value = "zakian")]
        method: String,
        /// one_over_z, one_over_z2, exp_decay, one_minus_exp, or sine.
        #[arg(long, default_value = "one_over_z2")]
        pair: String,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Sub-gap pole scan (CSV of condition values + JSON verdict)
    Stability {
        #[arg(long, default_value_t = 2048)]
        points: usize,
    },
    /// Mean-square displacement over an optional parameter sweep
    /// (per-point CSV: t, msd, alpha, regime_label; plus summary JSON)
    Msd {
        #[arg(long, value_enum, default_value_t = BranchArg::Spin)]
        branch: BranchArg,
        /// AXIS=lo:hi:count:log|lin with AXIS one of OMEGA, GIB, TAU_PLUS,
        /// TEMPERATURE; single point at the base config when omitted.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, default_value_t = 100.0)]
        tmax: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Downgrade validity-gate failures to manifest warnings.
        #[arg(long)]
        soft_fail: bool,
        /// Treat the bath at zero temperature regardless of the configured
        /// temperature (the dynamics pipeline is zero-temperature only).
        #[arg(long)]
        low_temp: bool,
    },
}

/// A CLI failure carrying the process exit code mandated for its class.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<polaron::Error> for Failure {
    fn from(e: polaron::Error) -> Failure {
        let code = match &e {
            polaron::Error::Config(_) => 2,
            polaron::Error::Validation(_)
            | polaron::Error::Domain(_)
            | polaron::Error::Unstable(_) => 3,
            polaron::Error::SpecFun { .. }
            | polaron::Error::Quadrature { .. }
            | polaron::Error::Convergence(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure {
            code: 1,
            message: format!("io: {e}"),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let result = polaron::exec::with_thread_cap(|| run::dispatch(cli));
    if let Err(f) = result {
        eprintln!("error: {}", f.message);
        std::process::exit(f.code);
    }
}
