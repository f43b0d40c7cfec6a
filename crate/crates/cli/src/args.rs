use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "kramers",
    version,
    about = "Tables and checks for the Kramers slip problem of a Fermi gas"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format; tables default to csv, reports to json (oracle) or text (verify).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Significant digits of every printed number.
    #[arg(long, global = true, default_value_t = 10, value_parser = clap::value_parser!(u8).range(4..=17))]
    pub precision: u8,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true, value_parser = positive_f64)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long, global = true, value_parser = positive_f64)]
    pub abs_tol: Option<f64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Integral,
    Recurrence,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispersion function on the cut (-1, 1).
    DispersionTable {
        #[arg(long, default_value_t = 199, value_parser = clap::value_parser!(u32).range(1..))]
        points: u32,
    },
    /// Boundary values of the X-function on (0, 1).
    XfunctionTable {
        #[arg(long, default_value_t = 199, value_parser = clap::value_parser!(u32).range(1..))]
        points: u32,
    },
    /// Expansion coefficients V_n, X_n and X*_n.
    Moments {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=20))]
        order: u32,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
    },
    /// Mass-velocity profile in the Knudsen layer.
    Profile {
        #[arg(long, default_value_t = 10.0, value_parser = non_negative_f64)]
        xmax: f64,
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(2..))]
        points: u32,
    },
    /// Distribution function h(x, mu)/(2 G_v) across mu in (-1, 1).
    Distribution {
        #[arg(long, default_value_t = 0.0, value_parser = non_negative_f64)]
        x: f64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
        points: u32,
    },
    /// Fermi integrals l0, l1, g4, g5 on an alpha grid.
    FermiTable {
        #[command(flatten)]
        grid: AlphaGrid,
    },
    /// Slip coefficient K_v(alpha) on an alpha grid.
    KvTable {
        #[command(flatten)]
        grid: AlphaGrid,
    },
    /// Discrete-ordinates solution compared with the analytic profile.
    Oracle {
        #[arg(long, default_value_t = 64)]
        ordinates: usize,
        #[arg(long, default_value_t = 2000)]
        cells: usize,
        #[arg(long, default_value_t = 20.0)]
        xmax: f64,
    },
    /// Identity suite; exits with status 1 if any check fails.
    Verify {
        /// Tighten tolerances tenfold.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Debug, Args)]
pub struct AlphaGrid {
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true, value_parser = finite_f64)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true, value_parser = finite_f64)]
    pub alpha_max: f64,
    /// Number of grid points, both ends included.
    #[arg(long, default_value_t = 51, value_parser = clap::value_parser!(u32).range(1..))]
    pub steps: u32,
}

fn finite_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

fn non_negative_f64(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err("must be non-negative".into())
    }
}
