//! Command-line front end: validate / sample / verify / decompose.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 input error,
//! 3 inconclusive (a quadrature or contour did not converge).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mesodefect_core::math::Vec2;
use mesodefect_core::model::Window;

use mesodefect::config::{inflated_bbox, RunConfig};
use mesodefect::grid::{decompose_grid, GridField};
use mesodefect::sample::{sample_csv, SampleWhat};
use mesodefect::verify::{run_validate, run_verify};

#[derive(Parser)]
#[command(
    name = "mesodefect",
    about = "Singular elastic fields of 2D defect ensembles and their distributional identities",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural invariants of the configured ensemble.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Sample a field on a grid and emit CSV.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Rectangular window x0,y0,x1,y1 (inflated line bbox when omitted).
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Nodes per axis (inclusive grid).
        #[arg(long, default_value_t = 33)]
        res: usize,
        /// Field: strain, frank, solenoidal, or remainder.
        #[arg(long, default_value = "strain")]
        what: String,
    },
    /// Run the full verification battery and emit a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Relative tolerance for the quadrature pairings.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Spectral compatible/solenoidal split of the sampled strain.
    Decompose {
        #[command(flatten)]
        common: Common,
        /// Square periodic window x0,y0,x1,y1 (inflated line bbox when omitted).
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Grid size per axis (power of two).
        #[arg(long, default_value_t = 128)]
        grid: usize,
        /// Pass threshold on the spectral gauge residual.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_window(spec: Option<&str>, cfg: &RunConfig) -> Result<Window, String> {
    match spec {
        None => {
            let (lo, hi) = inflated_bbox(&cfg.ensemble());
            Ok(Window::new(lo, hi))
        }
        Some(s) => {
            let parts: Vec<f64> = s
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("bad window '{s}': {e}"))?;
            if parts.len() != 4 {
                return Err(format!("bad window '{s}': need x0,y0,x1,y1"));
            }
            Ok(Window::new(
                Vec2::new(parts[0], parts[1]),
                Vec2::new(parts[2], parts[3]),
            ))
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), std::io::Error> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { common } => {
            let cfg = match RunConfig::from_path(&common.config) {
                Ok(c) => c,
                Err(e) => return input_error(e),
            };
            let report = run_validate(&cfg);
            if let Err(e) = emit(common.out.as_ref(), &report.to_json()) {
                return input_error(e);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Sample {
            common,
            window,
            res,
            what,
        } => {
            let cfg = match RunConfig::from_path(&common.config) {
                Ok(c) => c,
                Err(e) => return input_error(e),
            };
            let Some(what) = SampleWhat::parse(&what) else {
                return input_error(format!("unknown field '{what}'"));
            };
            let w = match parse_window(window.as_deref(), &cfg) {
                Ok(w) => w,
                Err(e) => return input_error(e),
            };
            if (w.max - w.min).x <= 0.0 || (w.max - w.min).y <= 0.0 {
                // zero-area window is a failed check, not a malformed input
                eprintln!("error: sample window has zero area");
                return ExitCode::from(1);
            }
            match sample_csv(&cfg.ensemble(), w, res, what) {
                Ok(csv) => match emit(common.out.as_ref(), &csv) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => input_error(e),
                },
                Err(e) => input_error(e),
            }
        }
        Command::Verify { common, tol } => {
            let cfg = match RunConfig::from_path(&common.config) {
                Ok(c) => c,
                Err(e) => return input_error(e),
            };
            let report = run_verify(&cfg, tol);
            if let Err(e) = emit(common.out.as_ref(), &report.to_json()) {
                return input_error(e);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Decompose {
            common,
            window,
            grid,
            tol,
        } => {
            let cfg = match RunConfig::from_path(&common.config) {
                Ok(c) => c,
                Err(e) => return input_error(e),
            };
            let w = match parse_window(window.as_deref(), &cfg) {
                Ok(w) => w,
                Err(e) => return input_error(e),
            };
            let span = w.max - w.min;
            if (span.x - span.y).abs() > 1e-12 * span.x.abs().max(span.y.abs()) {
                return input_error("decompose window must be square");
            }
            let e = cfg.ensemble();
            // node values; singular nodes contribute zero
            let field = GridField::from_fn(grid, span.x, |x, y| {
                mesodefect_core::fields::ensemble_strain(
                    &e,
                    Vec2::new(w.min.x + x, w.min.y + y),
                )
                .unwrap_or(mesodefect_core::math::SymTensor3::ZERO)
            });
            let d = match decompose_grid(&field) {
                Ok(d) => d,
                Err(err) => return input_error(err),
            };
            if let Some(prefix) = common.out.as_ref() {
                let base = prefix.to_string_lossy();
                for (suffix, g) in [("F", &d.f), ("Es", &d.e_s), ("Ec", &d.e_c)] {
                    let path = PathBuf::from(format!("{base}_{suffix}.csv"));
                    if let Err(e) = std::fs::write(&path, g.to_csv()) {
                        return input_error(e);
                    }
                }
            }
            println!(
                "{{\"gauge_residual\": {}, \"pass\": {}}}",
                d.gauge_residual,
                d.gauge_residual <= tol
            );
            if d.gauge_residual <= tol {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
