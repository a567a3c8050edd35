use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hammersley::cli::{
    cmd_fit, cmd_simulate, merge, report, verify, CliError, Column, ExperimentConfig, FitOptions,
    ProcessSpec, ReportOptions, ResultsFile, VerifyOptions,
};
use hammersley::fitkit::FitForm;
use hammersley::planeproc::{Metric, PlaneModel};

#[derive(Parser)]
#[command(name = "hammersley", version, about = "Hammersley-type particle process simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProcessKind {
    Multiline,
    #[value(name = "plane-i")]
    PlaneI,
    #[value(name = "plane-ii")]
    PlaneIi,
    #[value(name = "plane-iii")]
    PlaneIii,
}

#[derive(Subcommand)]
enum Command {
    /// Run independent replicas and write a results file.
    Simulate {
        #[arg(long, value_enum)]
        process: ProcessKind,
        /// Number of lines for the multiline process.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Boundary slope for plane-i.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        slope: f64,
        #[arg(long, default_value_t = 10_000)]
        nmin: u64,
        #[arg(long, default_value_t = 10_000_000)]
        nmax: u64,
        #[arg(long, default_value_t = 10)]
        checkpoints: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replica r uses stream stream_offset + r.
        #[arg(long, default_value_t = 0)]
        stream_offset: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Linear-scan nearest-particle queries instead of the grid index.
        #[arg(long)]
        naive: bool,
        #[arg(long, default_value_t = Metric::Euclidean)]
        metric: Metric,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive and randomized self-checks.
    Verify {
        /// Largest permutation size for the exhaustive sweep (at most 7).
        #[arg(long, default_value_t = 7)]
        nmax: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        grid_trials: usize,
        #[arg(long, default_value_t = 200)]
        merge_trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Fit a scaling law to the mean or sd column of a results file.
    Fit {
        input: PathBuf,
        #[arg(long)]
        form: FitForm,
        #[arg(long, default_value = "mean")]
        column: Column,
        /// Leading coefficient for corrected-sqrt (default 2(k-1)).
        #[arg(long, allow_negative_numbers = true)]
        c0: Option<f64>,
        /// Fixed exponent for scaled-power (default 1/6).
        #[arg(long, allow_negative_numbers = true)]
        exponent: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary table with normalized columns.
    Report {
        input: PathBuf,
        /// Planar mean normalization exponents b,c in mean (ln n)^-b n^-c.
        #[arg(long, value_delimiter = ',', num_args = 2, allow_negative_numbers = true)]
        mean_exponents: Option<Vec<f64>>,
        /// Planar sd normalization exponent f in sd n^-f.
        #[arg(long, allow_negative_numbers = true)]
        sd_exponent: Option<f64>,
        /// Write two-column plot-data files into this directory.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Combine results files from disjoint streams of the same experiment.
    Merge {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate {
            process,
            k,
            slope,
            nmin,
            nmax,
            checkpoints,
            samples,
            seed,
            stream_offset,
            workers,
            naive,
            metric,
            out,
        } => {
            let process = match process {
                ProcessKind::Multiline => ProcessSpec::Multiline { k },
                ProcessKind::PlaneI => ProcessSpec::Plane { model: PlaneModel::HalfPlane { slope } },
                ProcessKind::PlaneIi => ProcessSpec::Plane { model: PlaneModel::Circle },
                ProcessKind::PlaneIii => ProcessSpec::Plane { model: PlaneModel::Dominance },
            };
            let config = ExperimentConfig {
                n_min: nmin,
                n_max: nmax,
                checkpoints,
                samples,
                seed,
                stream_offset,
                workers,
                naive,
                metric,
                out: Some(out.clone()),
                ..ExperimentConfig::new(process)
            };
            let results = cmd_simulate(&config)?;
            eprintln!(
                "{}: {} samples at {} checkpoints in {:.2}s -> {}",
                results.meta.process,
                results.meta.samples,
                results.rows.len(),
                results.wall_time_secs,
                out.display()
            );
        }
        Command::Verify {
            nmax,
            k,
            grid_trials,
            merge_trials,
            seed,
        } => {
            let outcome = verify(&VerifyOptions {
                n_max: nmax,
                ks: k,
                grid_trials,
                merge_trials,
                seed,
            })?;
            for line in &outcome.lines {
                println!("{line}");
            }
            if !outcome.passed() {
                return Err(CliError::Validation(format!(
                    "{} disagreement(s)",
                    outcome.failures.len()
                )));
            }
            println!("all checks passed");
        }
        Command::Fit {
            input,
            form,
            column,
            c0,
            exponent,
            out,
        } => {
            let opts = FitOptions {
                form,
                column,
                c0,
                exponent,
            };
            println!("{}", cmd_fit(&input, &opts, out.as_deref())?);
        }
        Command::Report {
            input,
            mean_exponents,
            sd_exponent,
            plot_dir,
        } => {
            let file = ResultsFile::read(&input)?;
            let opts = ReportOptions {
                mean_exponents: mean_exponents.map(|v| (v[0], v[1])),
                sd_exponent,
                plot_dir,
            };
            print!("{}", report(&file, &opts)?.render());
        }
        Command::Merge { inputs, out } => {
            let files = inputs
                .iter()
                .map(|p| ResultsFile::read(p))
                .collect::<Result<Vec<_>, _>>()?;
            let merged = merge(&files)?;
            merged.write(&out)?;
            eprintln!("merged {} files, {} samples -> {}", files.len(), merged.meta.samples, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
