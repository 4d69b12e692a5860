use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use amli_iga::amli::Cycle;
use amli_iga::experiment::{export_operators, run_experiment, write_csv, write_json, ExperimentConfig};
use amli_iga::geometry::Example;
use amli_iga::splines::Continuity;
use amli_iga::splitting::Choice;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Run an AMLI experiment and print one row per mesh size.
#[derive(Debug, Parser)]
#[command(name = "amli", version)]
struct Args {
    /// Test problem: 1 square, 2 quarter annulus, 3 quarter thick ring.
    #[arg(long, default_value_t = 1)]
    example: u8,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// c0 or cpm1.
    #[arg(long, default_value = "cpm1")]
    continuity: String,
    /// Complement family, 1 or 2.
    #[arg(long, default_value = "1")]
    choice: String,
    /// Refinements of the coarsest mesh (h = 1/4 in 2D, 1/2 in 3D).
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// One or more of l1, l2, n2, n3 (comma separated).
    #[arg(long, default_value = "l1", value_delimiter = ',')]
    cycle: Vec<String>,
    /// Chebyshev interval for l2: gamma ([1 - γ², 1]) or ritz (PCG estimate).
    #[arg(long, default_value = "gamma")]
    cheb_bounds: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_it: usize,
    /// Also report γ² and κ(Â₁₁) of the finest splitting.
    #[arg(long)]
    quality: bool,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write the operators of the finest row as Matrix Market files.
    #[arg(long, value_name = "DIR")]
    export_ops: Option<PathBuf>,
}

fn config(args: &Args) -> amli_iga::Result<ExperimentConfig> {
    let example = Example::from_number(args.example)?;
    let continuity: Continuity = args.continuity.parse()?;
    let choice: Choice = args.choice.parse()?;
    let cycles = args
        .cycle
        .iter()
        .map(|c| c.parse::<Cycle>())
        .collect::<amli_iga::Result<Vec<_>>>()?;
    let mut cfg = ExperimentConfig::new(example, args.degree, continuity, choice);
    cfg.levels = args.levels;
    cfg.cycles = cycles;
    cfg.tol = args.tol;
    cfg.max_it = args.max_it;
    cfg.quality = args.quality;
    cfg.bounds = args.cheb_bounds.parse()?;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(dir) = &args.export_ops {
        match export_operators(&cfg, dir) {
            Ok(names) => eprintln!("wrote {} files to {}", names.len(), dir.display()),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    let rows = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => match File::create(p) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => Box::new(io::stdout().lock()),
    };
    let written = match args.format {
        Format::Csv => write_csv(sink, &rows),
        Format::Json => write_json(sink, &rows),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if rows.iter().all(|r| r.all_converged()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
