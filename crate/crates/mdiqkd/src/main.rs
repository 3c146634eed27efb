//! Thin command-line front end over the library: single-table evaluation,
//! scenario sweeps to CSV, and maximizer-versus-oracle checks.
//!
//! Exit codes: 0 success, 1 usage error, 2 input or computation error,
//! 3 sweep completed but with flagged error rows.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdiqkd::{
    bounds, darkcount_table, dense_oracle_with_progress, depolarizing_table, eval_table_with,
    has_error_rows, loss_db_to_eta, maximize, OptimizerSettings, OracleProgress,
    OutcomeProbabilityTable, SearchStrategy, SweepRow,
};
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mdiqkd",
    version,
    about = "Key-rate bounds for MDI-QKD with uncharacterized qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OptimizerArgs {
    /// Upper edge of the coefficient search box
    #[arg(long, default_value_t = 4.0)]
    box_max: f64,
    /// Coarse-grid subdivisions per axis
    #[arg(long, default_value_t = 25)]
    coarse_resolution: u32,
    /// Shrinking local searches per seed
    #[arg(long, default_value_t = 3)]
    refinement_rounds: u32,
    /// Box-width multiplier per refinement round, in (0, 1)
    #[arg(long, default_value_t = 0.2)]
    refinement_shrink: f64,
    /// Additive slack on each feasibility inequality
    #[arg(long, default_value_t = 1e-9)]
    feasibility_tol: f64,
    /// Coarse maxima kept as refinement seeds
    #[arg(long, default_value_t = 8)]
    top_k_seeds: usize,
}

impl OptimizerArgs {
    fn settings(&self) -> OptimizerSettings {
        OptimizerSettings {
            box_max: self.box_max,
            coarse_resolution: self.coarse_resolution,
            refinement_rounds: self.refinement_rounds,
            refinement_shrink: self.refinement_shrink,
            feasibility_tol: self.feasibility_tol,
            top_k_seeds: self.top_k_seeds,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the available cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Swap the maximizer for the exhaustive oracle at this resolution
    #[arg(long, value_name = "RESOLUTION")]
    dense_oracle: Option<u32>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

impl SweepArgs {
    fn strategy(&self) -> SearchStrategy {
        match self.dense_oracle {
            Some(resolution) => SearchStrategy::DenseOracle { resolution },
            None => SearchStrategy::GridRefine,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Depolarizing,
    Darkcount,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one probability-table document and print a JSON report
    Eval {
        /// Path to the table document (JSON object with key "p")
        #[arg(long)]
        table: PathBuf,
        /// Report path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Swap the maximizer for the exhaustive oracle at this resolution
        #[arg(long, value_name = "RESOLUTION")]
        dense_oracle: Option<u32>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Sweep the depolarizing scenario over bit error rates
    SweepDepolarizing {
        #[arg(long, default_value_t = 0.0)]
        min: f64,
        #[arg(long, default_value_t = 0.1)]
        max: f64,
        #[arg(long, default_value_t = 50)]
        steps: u32,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Sweep the dark-count scenario over channel loss in dB
    SweepDarkcount {
        #[arg(long, default_value_t = 0.0)]
        min_db: f64,
        #[arg(long, default_value_t = 40.0)]
        max_db: f64,
        #[arg(long, default_value_t = 41)]
        steps: u32,
        /// Detector dark-count rate per gate
        #[arg(long, default_value_t = 1e-5)]
        dark_rate: f64,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Compare the refined maximizer against the dense oracle
    OracleCheck {
        /// Path to a table document; mutually exclusive with --scenario
        #[arg(long, conflicts_with = "scenario")]
        table: Option<PathBuf>,
        /// Built-in scenario to check instead of a table file
        #[arg(long, value_enum)]
        scenario: Option<Scenario>,
        /// Scenario x-value: bit error rate, or loss in dB
        #[arg(long, default_value_t = 0.02)]
        x: f64,
        /// Dark-count rate for the darkcount scenario
        #[arg(long, default_value_t = 1e-5)]
        dark_rate: f64,
        /// Oracle grid subdivisions per axis
        #[arg(long, default_value_t = 60)]
        resolution: u32,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> mdiqkd::Result<ExitCode> {
    match command {
        Command::Eval {
            table,
            out,
            dense_oracle,
            optimizer,
        } => {
            let text = fs::read_to_string(table)?;
            let strategy = match dense_oracle {
                Some(resolution) => SearchStrategy::DenseOracle { resolution },
                None => SearchStrategy::GridRefine,
            };
            let report = eval_table_with(&text, &optimizer.settings(), strategy)?;
            let json = serde_json::to_string_pretty(&report).expect("report always serializes");
            write_output(out, json.as_bytes(), true)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepDepolarizing {
            min,
            max,
            steps,
            sweep,
        } => {
            let rows = in_pool(sweep.workers, || {
                mdiqkd::sweep_depolarizing_with(
                    min,
                    max,
                    steps,
                    &sweep.optimizer.settings(),
                    sweep.strategy(),
                )
            })?;
            finish_sweep(&rows, sweep.out)
        }
        Command::SweepDarkcount {
            min_db,
            max_db,
            steps,
            dark_rate,
            sweep,
        } => {
            let rows = in_pool(sweep.workers, || {
                mdiqkd::sweep_darkcount_with(
                    min_db,
                    max_db,
                    steps,
                    dark_rate,
                    &sweep.optimizer.settings(),
                    sweep.strategy(),
                )
            })?;
            finish_sweep(&rows, sweep.out)
        }
        Command::OracleCheck {
            table,
            scenario,
            x,
            dark_rate,
            resolution,
            optimizer,
        } => oracle_check(
            table,
            scenario,
            x,
            dark_rate,
            resolution,
            &optimizer.settings(),
        ),
    }
}

fn in_pool<T>(
    workers: Option<usize>,
    job: impl FnOnce() -> mdiqkd::Result<T> + Send,
) -> mdiqkd::Result<T>
where
    T: Send,
{
    match workers {
        None => job(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| mdiqkd::Error::Infeasible {
                    detail: format!("worker pool: {e}"),
                })?;
            pool.install(job)
        }
    }
}

fn finish_sweep(rows: &[SweepRow], out: Option<PathBuf>) -> mdiqkd::Result<ExitCode> {
    let bytes = mdiqkd::csv_bytes(rows)?;
    write_output(out, &bytes, false)?;
    if has_error_rows(rows) {
        eprintln!(
            "warning: {} of {} sweep points recorded errors",
            rows.iter().filter(|r| r.error.is_some()).count(),
            rows.len()
        );
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn write_output(path: Option<PathBuf>, bytes: &[u8], newline: bool) -> mdiqkd::Result<()> {
    match path {
        Some(path) => {
            let mut file = fs::File::create(path)?;
            file.write_all(bytes)?;
            if newline {
                file.write_all(b"\n")?;
            }
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)?;
            if newline {
                lock.write_all(b"\n")?;
            }
            Ok(lock.flush()?)
        }
    }
}

fn oracle_check(
    table_path: Option<PathBuf>,
    scenario: Option<Scenario>,
    x: f64,
    dark_rate: f64,
    resolution: u32,
    settings: &OptimizerSettings,
) -> mdiqkd::Result<ExitCode> {
    let table: OutcomeProbabilityTable = match (table_path, scenario) {
        (Some(path), _) => mdiqkd::parse_table_document(&fs::read_to_string(path)?)?,
        (None, Some(Scenario::Depolarizing)) => depolarizing_table(x)?,
        (None, Some(Scenario::Darkcount)) => darkcount_table(loss_db_to_eta(x)?, dark_rate)?,
        (None, None) => depolarizing_table(x)?,
    };

    let mut all_sound = true;
    for (name, objective) in [
        ("original", ObjectiveKind::Original),
        ("improved", ObjectiveKind::Improved),
    ] {
        if objective == ObjectiveKind::Improved && (table.p00() <= 0.0 || table.p11() <= 0.0) {
            println!("{name}: skipped (needs p00 > 0 and p11 > 0)");
            continue;
        }
        let refined = run_objective(objective, &table, settings, None)?;
        let oracle = run_objective(objective, &table, settings, Some(resolution))?;
        let sound = refined.0 >= oracle.0 - 1e-6;
        all_sound &= sound;
        println!(
            "{name}: maximize = {:.12e} ({} feasible pts), oracle({resolution}) = {:.12e} ({} feasible pts) -> {}",
            refined.0,
            refined.1,
            oracle.0,
            oracle.1,
            if sound { "sound" } else { "REFINED SEARCH LOST THE MAXIMUM" }
        );
    }
    if all_sound {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ObjectiveKind {
    Original,
    Improved,
}

fn run_objective(
    kind: ObjectiveKind,
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
    oracle_resolution: Option<u32>,
) -> mdiqkd::Result<(f64, u64)> {
    let mut last_decile = 0u64;
    let mut progress = |p: OracleProgress| {
        if p.total == 0 {
            return;
        }
        let decile = p.done * 10 / p.total;
        if decile > last_decile {
            last_decile = decile;
            eprintln!("  oracle: {}%", decile * 10);
        }
    };
    macro_rules! dispatch {
        ($objective:expr) => {
            match oracle_resolution {
                None => maximize($objective, table, settings),
                Some(res) => {
                    dense_oracle_with_progress($objective, table, res, settings, &mut progress)
                }
            }
        };
    }
    let result = match kind {
        ObjectiveKind::Original => dispatch!(bounds::objective_original_fn(table)),
        ObjectiveKind::Improved => dispatch!(bounds::objective_improved_fn(table)),
    }?;
    Ok((result.value, result.feasible_points_seen))
}
