use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use symqubit::cli::selfcheck::Fault;
use symqubit::cli::sweep::parse_angle;
use symqubit::cli::{analyze, make_mixed, make_pure, run_sweep, selfcheck, write_csv, GridRange, SelfcheckOptions, StateFile, SweepSpec};
use symqubit::Error;

/// Fano tensors, multiaxial decomposition and SU(2) invariants of spin-j states.
#[derive(Parser)]
#[command(name = "symqubit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report tensor parameters, axes and invariants of a state file.
    Analyze {
        file: PathBuf,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Tabulate spin-1 invariants and PPT flags of channel states over (p, theta).
    Sweep {
        /// Polarisation grid `start:stop:steps`.
        #[arg(long, value_parser = parse_grid)]
        p: GridRange,
        /// Half opening angle grid `start:stop:steps`, radians or `deg` suffix.
        #[arg(long, value_parser = parse_angle_grid)]
        theta: GridRange,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run algebraic and rotation-invariance self-checks.
    Selfcheck {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Inject a known defect (tau-normalization).
        #[arg(long, hide = true)]
        fault: Option<Fault>,
        #[arg(long)]
        json: bool,
    },
    /// Write a state file for one of the built-in spin-1 families.
    MakeState {
        #[command(subcommand)]
        kind: StateKind,
        /// Output path (`.json` for the structured format); stdout if omitted.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StateKind {
    /// Symmetrised two-spinor state, spinors at +-theta from the bisector.
    Pure {
        #[arg(long, value_parser = parse_angle_arg, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Two polarised spin-1/2 beams projected onto spin 1.
    Mixed {
        #[arg(long)]
        p: f64,
        #[arg(long, value_parser = parse_angle_arg, allow_hyphen_values = true)]
        theta: f64,
    },
}

fn parse_angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<GridRange, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_angle_grid(s: &str) -> Result<GridRange, String> {
    GridRange::parse_angles(s).map_err(|e| e.to_string())
}

fn print_json(value: serde_json::Result<serde_json::Value>) -> Result<(), Error> {
    let value = value.map_err(io::Error::from)?;
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn with_path(path: &std::path::Path) -> impl FnOnce(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Analyze { file, json } => {
            let state = StateFile::read(&file).map_err(with_path(&file))?;
            let rho = state.density_matrix()?;
            let report = analyze(&rho, state.label.as_deref())?;
            if json {
                print_json(serde_json::to_value(&report))?;
            } else {
                print!("{}", report.to_text());
            }
        }
        Command::Sweep { p, theta, out } => {
            let rows = run_sweep(&SweepSpec { p, theta })?;
            File::create(&out)
                .and_then(|f| write_csv(&rows, BufWriter::new(f)))
                .map_err(|e| with_path(&out)(e.into()))?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Selfcheck { seed, trials, fault, json } => {
            let report = selfcheck(SelfcheckOptions { seed, trials, fault })?;
            if json {
                print_json(serde_json::to_value(&report))?;
            } else {
                print!("{}", report.to_text());
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::MakeState { kind, out } => {
            let state = match kind {
                StateKind::Pure { theta } => make_pure(theta),
                StateKind::Mixed { p, theta } => make_mixed(p, theta)?,
            };
            match out {
                Some(path) => state.write(&path).map_err(with_path(&path))?,
                None => print!("{}", state.to_text()),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
