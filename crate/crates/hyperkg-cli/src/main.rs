//! `hyperkg`: kernels, decay reports and exponent arithmetic from the command line.
//!
//! Exit codes: 0 ok, 1 computation or I/O error, 2 usage, 3 golden table mismatch,
//! 4 power outside the covered range, 5 acceptance failure.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

/// Thread count for internal sweeps.
const THREADS_ENV: &str = "HYPERKG_THREADS";

#[derive(Parser, Debug)]
#[command(name = "hyperkg", version, about = "Klein-Gordon kernels and Strichartz exponents on hyperbolic space")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    /// Run the full acceptance suite and exit.
    #[arg(long, global = true)]
    pub seed_check: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Dimension of the hyperbolic space.
    #[arg(long, global = true, default_value_t = 3)]
    pub n: u32,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub kappa: f64,
    /// Defaults to rho + 1.
    #[arg(long, global = true)]
    pub kappa_tilde: Option<f64>,
    /// Series and quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Defaults to csv for tables and json for reports.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spherical function, phi_0 and the envelope (1+r)e^{-rho r} on a radial grid.
    Spherical {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        lambda_im: f64,
        /// `a:b:h` or a comma list.
        #[arg(long, default_value = "0:5:0.25", value_parser = parse_grid)]
        r: Grid,
    },
    /// Dispersive kernel samples at fixed t.
    Kernel {
        #[arg(long, value_enum, default_value_t = Part::Sum)]
        part: Part,
        /// Defaults to (n+1)/2 + 1.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        sigma_im: f64,
        /// Use the analytic family normalization.
        #[arg(long)]
        analytic: bool,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value = "0:4:0.5", value_parser = parse_grid)]
        r: Grid,
    },
    /// Fitted decay rates against the predicted ones.
    Decay {
        #[arg(long, value_enum)]
        regime: Regime,
        #[arg(long, default_value_t = 4.0)]
        q: f64,
        /// Defaults to (n+1)/2 + 1.
        #[arg(long)]
        sigma: Option<f64>,
        /// Defaults to 8,16,32,64 (large) or 2,1,0.5,0.25,0.125 (small).
        #[arg(long, value_parser = parse_grid)]
        t: Option<Grid>,
    },
    /// Critical powers per dimension.
    Exponents {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
        ns: Vec<usize>,
        /// Compare n = 3..6 against the embedded golden table.
        #[arg(long)]
        check_table: bool,
    },
    /// Minimal Sobolev regularity for small-data global existence.
    Regularity {
        #[arg(long)]
        gamma: f64,
        /// Cross-check against the brute-force grid search.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1.0 / 400.0)]
        resolution: f64,
    },
    /// Admissibility of (1/p, 1/q) and the required order sigma(p, q).
    Admissible {
        #[arg(long)]
        inv_p: f64,
        #[arg(long)]
        inv_q: f64,
    },
    /// Geometry behind the figures, for external plotting.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Part {
    W0,
    Winf,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Admissible triangle for the chosen n.
    Admissibility,
    /// Curves sigma_1, sigma_2, sigma_3 only (display-only).
    Lwp,
    /// Minimal regularity ladder.
    Gwp,
}

#[derive(Debug, Clone)]
pub struct Grid(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let bad = |e: std::num::ParseFloatError| format!("{s}: {e}");
    let parts: Vec<&str> = s.split(':').collect();
    let v = match parts.as_slice() {
        [a, b, h] => {
            let (a, b, h): (f64, f64, f64) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?, h.trim().parse().map_err(bad)?);
            if !(h > 0.0) || !(b >= a) {
                return Err(format!("{s}: need a <= b and h > 0"));
            }
            let m = ((b - a) / h + 1e-9).floor() as usize;
            (0..=m).map(|k| a + h * k as f64).collect()
        }
        [_] => s.split(',').map(|x| x.trim().parse().map_err(bad)).collect::<Result<Vec<f64>, String>>()?,
        _ => return Err(format!("{s}: expected a:b:h or a comma list")),
    };
    if v.is_empty() {
        return Err("empty grid".into());
    }
    Ok(Grid(v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hyperkg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
