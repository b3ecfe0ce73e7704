use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cascade_core::oracle::{degenerate_grid, random_grid};
use cascade_core::{compare, preset, run, ComparisonReport, Error, ScenarioConfig};
use clap::Parser;

const VERIFY_SEED: u64 = 20_240_521;
const VERIFY_TIMES: usize = 10;
const VERIFY_T_MAX: f64 = 20.0;
const VERIFY_TOL: f64 = 1e-6;
const DEGENERATE_TOL: f64 = 1e-5;
const DEGENERATE_DRAWS: usize = 20;

/// Time-resolved entanglement of the two cavity modes, written as CSV.
#[derive(Parser, Debug)]
#[command(name = "cascade", version)]
struct Args {
    /// Built-in parameter set, fig1 through fig10.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,

    /// JSON scenario file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the end of the time grid.
    #[arg(long)]
    t_end: Option<f64>,

    /// Override the number of grid points.
    #[arg(long)]
    points: Option<usize>,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Check the closed-form moments against direct integration.
    #[arg(long)]
    verify: bool,

    /// Number of random parameter draws used by --verify.
    #[arg(long, default_value_t = 100)]
    seed_grid: usize,
}

enum Failure {
    Input(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(Error::from)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_config(args: &Args) -> Result<ScenarioConfig, Failure> {
    let mut config = match (&args.preset, &args.config) {
        (Some(id), _) => preset(id)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            ScenarioConfig::from_json(&text)?
        }
        (None, None) => {
            return Err(Failure::Input(
                "one of --preset, --config or --verify is required".into(),
            ))
        }
    };
    if let Some(t) = args.t_end {
        config.t_grid.t_end = t;
    }
    if let Some(n) = args.points {
        config.t_grid.n_points = n;
    }
    Ok(config)
}

fn summarize(name: &str, r: &ComparisonReport) {
    eprintln!(
        "{name}: {} points, max rel err n_a={:.3e} n_b={:.3e} c_ab={:.3e}, tol {:.0e}: {}",
        r.grid.len(),
        r.max_rel_err[0],
        r.max_rel_err[1],
        r.max_rel_err[2],
        r.tolerance,
        if r.pass { "pass" } else { "FAIL" }
    );
    for comp in r.failing_components() {
        let k = cascade_core::oracle::COMPONENTS
            .iter()
            .position(|c| *c == comp)
            .unwrap();
        let g = r.grid[r.worst_point[k]];
        eprintln!("  worst {comp} at {:?}, t={}", g.params, g.t);
    }
}

fn verify(args: &Args) -> Result<(), Failure> {
    if args.seed_grid == 0 {
        return Err(Failure::Input("--seed-grid must be positive".into()));
    }
    let generic = compare(
        &random_grid(VERIFY_SEED, args.seed_grid, VERIFY_TIMES, VERIFY_T_MAX),
        VERIFY_TOL,
    );
    let degenerate = compare(
        &degenerate_grid(
            VERIFY_SEED + 1,
            DEGENERATE_DRAWS,
            VERIFY_TIMES,
            VERIFY_T_MAX,
        ),
        DEGENERATE_TOL,
    );
    summarize("generic", &generic);
    summarize("degenerate", &degenerate);

    let mut w = output(&args.out)?;
    generic.write_csv(&mut w)?;
    // second report without its header
    let mut tail = Vec::new();
    degenerate.write_csv(&mut tail)?;
    let text = String::from_utf8(tail).expect("csv is ascii");
    for line in text.lines().skip(1) {
        writeln!(w, "{line}").map_err(Error::from)?;
    }
    w.flush().map_err(Error::from)?;

    if generic.pass && degenerate.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn scenario(args: &Args) -> Result<(), Failure> {
    let config = load_config(args)?;
    let table = run(&config)?;
    table.write_csv(output(&args.out)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = if args.verify {
        verify(&args)
    } else {
        scenario(&args)
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
