//! `needlecast`: exemplar-based shape from shading from the command line.
//!
//! Subcommands cover every pipeline stage: `gen` samples a surface to a
//! depth file, `render` shades it, `build-db` extracts the example
//! database, `reconstruct` recovers a needle map, `integrate` turns the
//! needle map into depth, `evaluate` reports the error measures, and
//! `pipeline` runs a whole experiment from one config file.

mod commands;
mod error;
mod pipeline;
mod sources;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{EvaluateArgs, IntegrateArgs, ReconstructArgs};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "needlecast",
    version,
    about = "Exemplar-based shape from shading"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a surface into a depth-matrix file
    Gen {
        /// f1, f2, f3 (analytic) or vase, bumps, relief, hemisphere (bundled)
        surface: String,
        /// Sampling domain x_min,x_max,y_min,y_max (analytic surfaces only)
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
        /// Grid resolution WxH
        #[arg(long, default_value = "64x64")]
        res: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shade a depth file into a PGM image
    Render {
        #[arg(long)]
        depth: PathBuf,
        /// Light direction x,y,z (default frontal 0,0,1)
        #[arg(long, allow_hyphen_values = true)]
        light: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract an example database from depth sources
    #[command(name = "build-db")]
    BuildDb {
        /// Depth files or built-in surface names
        #[arg(required = true)]
        depths: Vec<PathBuf>,
        /// overlapping or disjoint stencil placement
        #[arg(long, default_value = "overlapping")]
        mode: String,
        /// Sampling resolution for built-in surface names
        #[arg(long, default_value = "64x64")]
        res: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a needle map for a test image
    Reconstruct {
        #[arg(long)]
        db: PathBuf,
        /// Depth source: rendered in memory, ground truth available
        #[arg(long)]
        depth: Option<PathBuf>,
        /// Image source (PGM), e.g. a photograph
        #[arg(long)]
        image: Option<PathBuf>,
        /// truth or silhouette
        #[arg(long, default_value = "truth")]
        boundary: String,
        /// Foreground threshold for silhouette boundaries
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        /// Drop the center gray level from the match distance
        #[arg(long)]
        exclude_center_gray: bool,
        /// Sampling resolution for built-in surface names
        #[arg(long, default_value = "64x64")]
        res: String,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate a needle map into a depth map
    Integrate {
        #[arg(long)]
        nm: PathBuf,
        /// Depth file supplying Dirichlet border values (and delta)
        #[arg(long)]
        boundary_z: Option<PathBuf>,
        /// Grid spacing; defaults to the boundary file's spacing, else 1
        #[arg(long)]
        delta: Option<f64>,
        /// Scheme constant
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        /// Convergence threshold on the per-sweep depth change
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the evaluation report for a needle map
    Evaluate {
        #[arg(long)]
        nm: PathBuf,
        /// Ground-truth depth for slant/depth errors
        #[arg(long)]
        truth_depth: Option<PathBuf>,
        /// Reconstructed depth to score against the truth
        #[arg(long)]
        depth: Option<PathBuf>,
        /// Report file
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a whole experiment from a key=value config file and/or flags
    Pipeline {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override or supply config entries, e.g. --set res=32x32
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Run directory
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Gen {
            surface,
            domain,
            res,
            out,
        } => commands::cmd_gen(surface, domain.as_deref(), res, out),
        Cmd::Render { depth, light, out } => commands::cmd_render(depth, light.as_deref(), out),
        Cmd::BuildDb {
            depths,
            mode,
            res,
            out,
        } => commands::cmd_build_db(depths, mode, res, out),
        Cmd::Reconstruct {
            db,
            depth,
            image,
            boundary,
            threshold,
            exclude_center_gray,
            res,
            out,
        } => commands::cmd_reconstruct(&ReconstructArgs {
            db,
            depth: depth.as_deref(),
            image: image.as_deref(),
            boundary,
            threshold: *threshold,
            exclude_center_gray: *exclude_center_gray,
            res,
            out,
        }),
        Cmd::Integrate {
            nm,
            boundary_z,
            delta,
            g,
            tol,
            max_iter,
            out,
        } => commands::cmd_integrate(&IntegrateArgs {
            nm,
            boundary_z: boundary_z.as_deref(),
            delta: *delta,
            g: *g,
            tol: *tol,
            max_iter: *max_iter,
            out,
        }),
        Cmd::Evaluate {
            nm,
            truth_depth,
            depth,
            out,
        } => commands::cmd_evaluate(&EvaluateArgs {
            nm,
            truth_depth: truth_depth.as_deref(),
            depth: depth.as_deref(),
            out,
        }),
        Cmd::Pipeline { config, set, out } => pipeline::cmd_pipeline(config.as_deref(), set, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
