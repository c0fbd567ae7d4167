//! `srvf`: square root velocity transforms, elastic distances and shape matrices
//! from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use srvf::io::Format;

use crate::config::{CliConfig, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "srvf",
    version,
    about = "Square root velocity framework for open curves"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command. Precedence: flag, then config file, then default.
#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML file with any of the keys grid_n, dp_w, axis_moves, tol, output_dir, format
    #[arg(long, global = true, env = "SRVF_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,

    /// Cells per axis of the DP lattice used by quotient distances [default: 1024]
    #[arg(long, global = true, value_name = "N")]
    grid_n: Option<usize>,

    /// Largest DP step along either axis [default: 4]
    #[arg(long, global = true, value_name = "W")]
    dp_w: Option<usize>,

    /// Allow the horizontal and vertical DP steps [default: true]
    #[arg(long, global = true, value_name = "BOOL")]
    axis_moves: Option<bool>,

    /// Tolerance for equivalence and symmetry checks [default: 1e-6]
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,

    /// Directory for generated files [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Format of generated curve, SRVF and alignment files [default: csv]
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

impl GlobalArgs {
    fn resolve(&self) -> srvf::Result<CliConfig> {
        let file = self.config.as_deref().map(Overrides::read).transpose()?;
        let flags = Overrides {
            grid_n: self.grid_n,
            dp_w: self.dp_w,
            axis_moves: self.axis_moves,
            tol: self.tol,
            output_dir: self.output_dir.clone(),
            format: self.format.map(Format::from),
        };
        CliConfig::resolve(&flags, file.as_ref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Curve to SRVF
    Forward,
    /// SRVF to curve
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceMode {
    /// L² distance of the SRVFs as parametrised
    Param,
    /// Distance of the reparametrisation orbits, by DP alignment
    Quotient,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply the square root velocity transform or its inverse to a file
    Transform {
        /// Curve file (forward) or SRVF file (inverse); `.json` or CSV
        input: PathBuf,
        #[arg(long, value_enum, default_value = "forward")]
        direction: Direction,
        /// Output file [default: OUTPUT_DIR/<stem>_srvf or <stem>_curve]
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the distance between two curves
    Distance {
        b: PathBuf,
        c: PathBuf,
        #[arg(long, value_enum, default_value = "param")]
        mode: DistanceMode,
        /// Where quotient mode writes the alignment [default: OUTPUT_DIR/alignment]
        #[arg(long)]
        alignment: Option<PathBuf>,
    },
    /// Sample the geodesic between two curves
    Geodesic {
        b: PathBuf,
        c: PathBuf,
        /// Number of segments; writes steps + 1 curves
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Reproduce the non-attainment counterexample
    Counterexample {
        /// Level k of the fat Cantor set
        #[arg(long, default_value_t = 10)]
        level: u32,
        /// Rotation rate of the first direction, as a decimal or `p/q`; needs 0 < ε < 1/6
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        /// Uniform cells of the partition carrying p and q
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        /// Levels k' of the explicit maximising sequence
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
        kprime_list: Vec<u32>,
        /// DP lattice sizes N
        #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024,4096")]
        n_list: Vec<usize>,
    },
    /// Pairwise quotient distances of a JSON corpus
    Matrix {
        corpus: PathBuf,
        /// Leave out shapes that fail to load instead of aborting
        #[arg(long)]
        skip_bad: bool,
        /// Output CSV [default: OUTPUT_DIR/matrix.csv]
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the constant-speed representative of a curve
    Canonical {
        input: PathBuf,
        /// Output file [default: OUTPUT_DIR/<stem>_canonical]
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Difference quotients of the transform at a curve with a flat stretch
    Probe {
        /// Base curve; with H omitted, a built-in pair is used
        #[arg(requires = "h")]
        c: Option<PathBuf>,
        /// Perturbation, supported where c' = 0
        h: Option<PathBuf>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6"
        )]
        eps_list: Vec<f64>,
    },
}

fn run(cli: Cli) -> srvf::Result<()> {
    let cfg = cli.global.resolve()?;
    match cli.command {
        Command::Transform {
            input,
            direction,
            output,
        } => commands::transform(&cfg, &input, direction, output.as_deref()),
        Command::Distance {
            b,
            c,
            mode,
            alignment,
        } => commands::distance(&cfg, &b, &c, mode, alignment.as_deref()),
        Command::Geodesic { b, c, steps } => commands::geodesic(&cfg, &b, &c, steps),
        Command::Counterexample {
            level,
            epsilon,
            grid,
            kprime_list,
            n_list,
        } => commands::counterexample(&cfg, level, &epsilon, grid, &kprime_list, &n_list),
        Command::Matrix {
            corpus,
            skip_bad,
            output,
        } => commands::matrix(&cfg, &corpus, skip_bad, output.as_deref()),
        Command::Canonical { input, output } => {
            commands::canonical(&cfg, &input, output.as_deref())
        }
        Command::Probe { c, h, eps_list } => {
            commands::probe(c.as_deref().zip(h.as_deref()), &eps_list)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
