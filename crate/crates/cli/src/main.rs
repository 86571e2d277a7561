use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tetherbuoy::harness::{compare, format_summary_table, run_with, write_outputs, RunOutput};
use tetherbuoy::{ConfigError, ControllerKind, Error, Scenario};

#[derive(Parser)]
#[command(name = "tetherbuoy", version, about = "Tethered UAV and buoy towing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario with one controller.
    Simulate {
        scenario: PathBuf,
        /// Overrides the controller named in the scenario file.
        #[arg(long)]
        controller: Option<ControllerKind>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run one scenario with both controllers and print the comparison.
    Compare {
        scenario: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run every `*.toml` scenario in a directory with both controllers.
    Sweep {
        dir: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Physics time step in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Simulated duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
}

fn load(path: &Path, opts: &RunOpts) -> Result<Scenario, Error> {
    let mut s = Scenario::load(path)?;
    if let Some(dt) = opts.dt {
        s.simulation.dt_physics_s = dt;
    }
    if let Some(d) = opts.duration {
        s.simulation.duration_s = d;
    }
    s.validate()?;
    Ok(s)
}

fn report_failures(runs: &[&RunOutput]) -> Result<(), Error> {
    for r in runs {
        if let Some(e) = &r.failure {
            return Err(Error::Model(e.clone()));
        }
    }
    Ok(())
}

fn simulate(path: &Path, kind: Option<ControllerKind>, opts: &RunOpts) -> Result<(), Error> {
    let scenario = load(path, opts)?;
    let kind = match kind {
        Some(k) => k,
        None => scenario.controller_kind()?,
    };
    let out = run_with::<f64>(&scenario, kind)?;
    for p in write_outputs(&opts.out, &scenario, &[&out])? {
        println!("wrote {}", p.display());
    }
    print!("{}", format_summary_table(&[&out.summary]));
    report_failures(&[&out])
}

/// Runs both controllers, writes the outputs and returns the summary table.
fn compare_one(path: &Path, opts: &RunOpts) -> Result<String, Error> {
    let scenario = load(path, opts)?;
    let runs = compare(&scenario)?;
    let refs: Vec<&RunOutput> = runs.iter().collect();
    write_outputs(&opts.out, &scenario, &refs)?;
    let summaries: Vec<_> = runs.iter().map(|r| &r.summary).collect();
    let table = format_summary_table(&summaries);
    report_failures(&refs).inspect_err(|_| print!("{table}"))?;
    Ok(table)
}

fn sweep(dir: &Path, opts: &RunOpts) -> Result<(), Error> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|source| ConfigError::Read {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(ConfigError::Invalid(format!("no .toml scenarios in {}", dir.display())).into());
    }
    let results: Vec<(PathBuf, Result<String, Error>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| (f.clone(), scope.spawn(|| compare_one(f, opts))))
            .collect();
        handles
            .into_iter()
            .map(|(f, h)| (f, h.join().expect("scenario thread panicked")))
            .collect()
    });
    let mut worst: Option<Error> = None;
    for (f, r) in results {
        match r {
            Ok(table) => println!("{table}"),
            Err(e) => {
                eprintln!("{}: {e}", f.display());
                if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                    worst = Some(e);
                }
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate {
            scenario,
            controller,
            opts,
        } => simulate(scenario, *controller, opts),
        Command::Compare { scenario, opts } => compare_one(scenario, opts).map(|t| print!("{t}")),
        Command::Sweep { dir, opts } => sweep(dir, opts),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
