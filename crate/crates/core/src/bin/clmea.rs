use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use clmea::harness::{
    compare_dirs, comparisons_csv, run_experiment, summary_csv, write_summary, ExperimentConfig, Metric, Overrides,
    Trace,
};

#[derive(Parser)]
#[command(name = "clmea", version, about = "Surrogate-assisted multi-objective optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every job of an experiment config.
    Run {
        config: PathBuf,
        /// Base seed (run k uses seed + k).
        #[arg(long)]
        seed: Option<u64>,
        /// Runs per job.
        #[arg(long)]
        runs: Option<usize>,
        /// Only these job ids (comma separated).
        #[arg(long, value_delimiter = ',')]
        jobs: Option<Vec<String>>,
        /// Worker threads.
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute summary tables from the traces in an output directory.
    Stats { dir: PathBuf },
    /// Paired Wilcoxon tests between the jobs of two output directories.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = MetricArg::Igd)]
        metric: MetricArg,
    },
    /// Print the final non-dominated set of a trace.
    Front {
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Igd,
    Hv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

const CONFIG_ERROR: u8 = 1;
const RUN_FAILURES: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(CONFIG_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}

fn execute(command: Command) -> clmea::Result<ExitCode> {
    match command {
        Command::Run { config, seed, runs, jobs, threads, out } => {
            let mut experiment = ExperimentConfig::load(&config)?;
            experiment.apply(&Overrides { base_seed: seed, n_runs: runs, jobs, threads, output_dir: out })?;
            let report = run_experiment(&experiment)?;
            print!("{}", summary_csv(&report.stats));
            for f in &report.failures {
                eprintln!("run {} of {} failed: {}", f.run, f.job, f.message);
            }
            eprintln!("{} runs, {} failed; output in {}", report.runs, report.failures.len(), report.output_dir.display());
            Ok(if report.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(RUN_FAILURES) })
        }
        Command::Stats { dir } => {
            let stats = write_summary(&dir)?;
            print!("{}", summary_csv(&stats));
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { a, b, alpha, metric } => {
            let metric = match metric {
                MetricArg::Igd => Metric::Igd,
                MetricArg::Hv => Metric::Hv,
            };
            let (rows, counts) = compare_dirs(&a, &b, metric, alpha)?;
            print!("{}", comparisons_csv(&rows, &[counts]));
            Ok(ExitCode::SUCCESS)
        }
        Command::Front { trace, out } => {
            let trace = Trace::read(&trace)?;
            match out {
                Format::Csv => print!("{}", trace.front_csv()?),
                Format::Json => {
                    let archive = trace.archive()?;
                    let front: Vec<_> = archive.first_front().into_iter().map(|i| archive.get(i).clone()).collect();
                    println!("{}", serde_json::to_string_pretty(&front)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
