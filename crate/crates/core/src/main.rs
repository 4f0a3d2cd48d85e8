use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lensgrid::atlas::{Atlas, AtlasRecord, PutOutcome, ATLAS_DIR_ENV};
use lensgrid::complex::Coefficients;
use lensgrid::grid::GridDiagram;
use lensgrid::report::{compute_report, Caps, ReportOptions};
use lensgrid::scan::{batch_scan, SamplePolicy, ScanConfig};

#[derive(Parser)]
#[command(name = "lensgrid", version, about = "Grid homology of knots in lens spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute hat (and optionally tilde) homology of one grid.
    Compute(ComputeArgs),
    /// Survey a family of grids for torsion in integral homology.
    Scan(ScanArgs),
    /// Read or write the atlas of computed reports.
    Atlas {
        #[command(subcommand)]
        action: AtlasAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Coeff {
    Z,
    F2,
}

#[derive(Args)]
struct GridArgs {
    /// Grid dimension and lens space parameters as `n,p,q`.
    #[arg(long, value_delimiter = ',', required = true)]
    params: Vec<usize>,
    /// Columns of the X markings, bottom row first.
    #[arg(long = "x", value_delimiter = ',', required = true)]
    xs: Vec<usize>,
    /// Columns of the O markings, bottom row first.
    #[arg(long = "o", value_delimiter = ',', required = true)]
    os: Vec<usize>,
}

impl GridArgs {
    fn grid(&self) -> Result<GridDiagram, String> {
        let [n, p, q] = self.params[..] else {
            return Err("--params expects three values n,p,q".into());
        };
        GridDiagram::new(n, p, q, &self.xs, &self.os).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct CapArgs {
    /// Largest grid dimension for integer coefficients.
    #[arg(long, default_value_t = Caps::default().z_max_n)]
    z_max_n: usize,
    /// Largest grid dimension for F2 coefficients.
    #[arg(long, default_value_t = Caps::default().f2_max_n)]
    f2_max_n: usize,
    /// Largest number of generators.
    #[arg(long, default_value_t = Caps::default().max_generators)]
    max_generators: u128,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps { z_max_n: self.z_max_n, f2_max_n: self.f2_max_n, max_generators: self.max_generators }
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value = "z")]
    coeff: Coeff,
    /// Include tilde homology.
    #[arg(long)]
    tilde: bool,
    /// Include every generator with its gradings.
    #[arg(long)]
    generators: bool,
    /// Include an ASCII drawing of the grid.
    #[arg(long)]
    ascii: bool,
    /// Record the computation time in the report.
    #[arg(long)]
    timing: bool,
    /// Write the JSON report here and print a table instead.
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    p_min: usize,
    #[arg(long)]
    p_max: usize,
    /// Every knot diagram up to translation.
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Random diagrams per (p, q).
    #[arg(long, requires = "seed")]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Subcommand)]
enum AtlasAction {
    /// Print the stored report of a grid (looked up by canonical form).
    Get {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, env = ATLAS_DIR_ENV)]
        dir: PathBuf,
    },
    /// Compute the report of a grid's canonical form and store it.
    Put {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, env = ATLAS_DIR_ENV)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "z")]
        coeff: Coeff,
    },
}

fn coefficients(c: Coeff) -> Coefficients {
    match c {
        Coeff::Z => Coefficients::Integer,
        Coeff::F2 => Coefficients::F2,
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Compute(args) => {
            let grid = args.grid.grid()?;
            let options = ReportOptions {
                coefficients: coefficients(args.coeff),
                include_tilde: args.tilde,
                include_generators: args.generators,
                include_ascii: args.ascii,
                timing: args.timing,
                caps: args.caps.caps(),
            };
            let report = compute_report(&grid, &options).map_err(|e| e.to_string())?;
            match args.json {
                Some(path) => {
                    std::fs::write(&path, report.to_json() + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
                    print!("{}", report.table());
                }
                None => println!("{}", report.to_json()),
            }
        }
        Command::Scan(args) => {
            let policy = match (args.exhaustive, args.samples, args.seed) {
                (true, _, _) => SamplePolicy::Exhaustive,
                (false, Some(samples), Some(seed)) => SamplePolicy::Sampled { samples, seed },
                _ => return Err("choose --exhaustive or --samples K --seed S".into()),
            };
            let config = ScanConfig { n: args.n, p_min: args.p_min, p_max: args.p_max, policy };
            let survey = batch_scan(&config, &args.caps.caps()).map_err(|e| e.to_string())?;
            let out = serde_json::json!({ "config": config, "survey": survey });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
        }
        Command::Atlas { action } => match action {
            AtlasAction::Get { grid, dir } => {
                let grid = grid.grid()?;
                let atlas = Atlas::open(dir).map_err(|e| e.to_string())?;
                match atlas.get_grid(&grid).map_err(|e| e.to_string())? {
                    Some(hit) => {
                        if let Some(note) = hit.version_mismatch {
                            eprintln!("warning: {note}");
                        }
                        println!("{}", serde_json::to_string_pretty(&hit.record).expect("serializes"));
                    }
                    None => return Err(format!("no atlas record for {}", grid.canonical_key())),
                }
            }
            AtlasAction::Put { grid, dir, coeff } => {
                let grid = grid.grid()?.canonical_form();
                let atlas = Atlas::open(dir).map_err(|e| e.to_string())?;
                let options = ReportOptions { coefficients: coefficients(coeff), ..Default::default() };
                let report = compute_report(&grid, &options).map_err(|e| e.to_string())?;
                let record = AtlasRecord::new(&grid, report);
                match atlas.put(&record).map_err(|e| e.to_string())? {
                    PutOutcome::Written => println!("stored {}", record.key),
                    PutOutcome::AlreadyPresent => println!("already present {}", record.key),
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
