use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dimcurse_cli::commands::{
    cmd_adversary, cmd_bounds, cmd_gscan, cmd_quad, cmd_t0, t_grid, BoundsConfig, EpsSpec, Outcome,
    QuadConfig, QuadMethod,
};
use dimcurse_cli::verify::cmd_verify;
use dimcurse_cli::{emit, parse_points, Class, ExperimentConfig, Format, HarnessError, Result};
use serde::Serialize;

/// Curse-of-dimensionality adversaries, bound calculators and baseline
/// quadrature for monotone and convex integrands on the unit cube.
#[derive(Parser, Debug)]
#[command(name = "dimcurse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Output file; defaults to $DIMCURSE_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an algorithm against the adversary and report its error lower bound.
    Adversary {
        #[arg(long, value_enum, default_value = "monotone")]
        class: Class,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        budget: usize,
        #[arg(long, default_value = "lattice")]
        algorithm: String,
        /// Query points for `--algorithm fixed`, e.g. "0.1,0.2;0.5,0.5".
        #[arg(long, default_value = "")]
        points: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        mc_samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Minimal number of function values for accuracy eps, per dimension.
    Bounds {
        #[arg(long, value_enum)]
        class: Class,
        /// A number in (0, 1/2), or `eps0` for the convex class.
        #[arg(long)]
        eps: EpsSpec,
        /// First dimension.
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        dmax: Option<usize>,
        /// Flag dimensions where the bound exceeds this many values.
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Minimise g(s, alpha) over a grid of t, with s = (1+t)/4.
    Gscan {
        #[arg(long, default_value_t = 0.0)]
        tmin: f64,
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.05)]
        tstep: f64,
        /// Explicit comma-separated t values (overrides the grid).
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Compute t0 and eps0 = t0/2.
    T0 {
        #[command(flatten)]
        common: Common,
    },
    /// Staircase and Monte Carlo quadrature on the built-in integrands.
    Quad {
        #[arg(long, value_enum, default_value = "both")]
        method: QuadMethod,
        /// threshold, product, affine or all.
        #[arg(long, default_value = "all")]
        oracle: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in property checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// Writes or prints the report; passes a gate failure on to `main`.
fn finish<C: Serialize>(
    outcome: Outcome,
    common: &Common,
    config: &C,
    seed: Option<u64>,
) -> Result<Option<String>> {
    emit(&outcome.report, common.out.as_deref(), config, seed)?;
    Ok(outcome.gate_failure)
}

fn run(cli: Cli) -> Result<Option<String>> {
    match cli.command {
        Command::Adversary {
            class,
            d,
            budget,
            algorithm,
            points,
            eps,
            seed,
            mc_samples,
            common,
        } => {
            let cfg = ExperimentConfig {
                class,
                d,
                budget,
                eps,
                seed,
                mc_samples,
                out: common.out.clone(),
                algorithm,
                points: parse_points(&points)?,
            };
            let outcome = cmd_adversary(&cfg, common.format.unwrap_or(Format::Json))?;
            finish(outcome, &common, &cfg, Some(seed))
        }
        Command::Bounds {
            class,
            eps,
            d,
            dmax,
            budget,
            common,
        } => {
            let cfg = BoundsConfig {
                class,
                eps,
                dmin: d,
                dmax: dmax.unwrap_or(d),
                budget,
            };
            let report = cmd_bounds(&cfg, common.format.unwrap_or(Format::Csv))?;
            finish(report.into(), &common, &cfg, None)
        }
        Command::Gscan {
            tmin,
            tmax,
            tstep,
            t,
            common,
        } => {
            let ts = if t.is_empty() {
                t_grid(tmin, tmax, tstep)?
            } else {
                t
            };
            let report = cmd_gscan(&ts, common.format.unwrap_or(Format::Csv))?;
            finish(report.into(), &common, &ts, None)
        }
        Command::T0 { common } => {
            let report = cmd_t0(common.format.unwrap_or(Format::Json))?;
            finish(report.into(), &common, &(), None)
        }
        Command::Quad {
            method,
            oracle,
            d,
            m,
            mc_samples,
            seed,
            common,
        } => {
            let cfg = QuadConfig {
                method,
                oracle: Some(oracle),
                d,
                m,
                n: mc_samples,
                seed,
            };
            let report = cmd_quad(&cfg, common.format.unwrap_or(Format::Csv))?;
            finish(report.into(), &common, &cfg, Some(seed))
        }
        Command::Verify { seed, common } => {
            let outcome = cmd_verify(seed, common.format.unwrap_or(Format::Csv))?;
            finish(outcome, &common, &seed, Some(seed))
        }
    }
}

fn main() -> ExitCode {
    let err = match run(Cli::parse()) {
        Ok(None) => return ExitCode::SUCCESS,
        Ok(Some(gate)) => HarnessError::Gate(gate),
        Err(e) => e,
    };
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}
