use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use classdist::significance::DEFAULT_TRIALS;
use classdist::{Error, FitConfig};

mod commands;
mod format;

#[derive(Parser)]
#[command(name = "classdist", version, about = "Fit the maximum-entropy classification-feature distribution to frequency data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit (n0, gamma) to one dataset.
    Fit {
        input: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
        /// Print a JSON report instead of text.
        #[arg(long)]
        json: bool,
        /// Write error-vs-z and error-vs-n0 curves as CSV into this directory.
        #[arg(long, value_name = "DIR")]
        emit_curves: Option<PathBuf>,
    },
    /// Compare the fit with the Zipf, exponential and legacy baselines.
    Compare {
        /// A single dataset (omit when using --dir).
        #[arg(required_unless_present = "dir", conflicts_with = "dir")]
        input: Option<PathBuf>,
        /// Compare every *.csv in a directory and summarise the corpus.
        #[arg(long, value_name = "DIR")]
        dir: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
        /// Also compute p-values with this many trials where |M| is known.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo p-value of the fit error (needs `# elements=`).
    Pvalue {
        input: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Fit ensembles of uniformly random distributions.
    RandomStudy {
        #[arg(long, default_value_t = 3)]
        m_min: usize,
        #[arg(long, default_value_t = 50)]
        m_max: usize,
        #[arg(long, default_value_t = 500)]
        ensembles: usize,
        /// Draw this many elements per sample instead of using the uniform
        /// weights directly.
        #[arg(long)]
        elements: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone)]
struct FitArgs {
    #[arg(long, default_value_t = FitConfig::default().z_min)]
    z_min: f64,
    #[arg(long, default_value_t = FitConfig::default().z_max)]
    z_max: f64,
    #[arg(long, default_value_t = FitConfig::default().z_step)]
    z_step: f64,
    #[arg(long, default_value_t = FitConfig::default().n0_max)]
    n0_max: usize,
    #[arg(long, default_value_t = FitConfig::default().accuracy_n0)]
    accuracy_n0: f64,
    #[arg(long, default_value_t = FitConfig::default().refine_rounds)]
    refine_rounds: usize,
    #[arg(long, default_value_t = FitConfig::default().refine_shrink)]
    refine_shrink: f64,
}

impl FitArgs {
    fn config(&self) -> FitConfig {
        FitConfig {
            z_min: self.z_min,
            z_max: self.z_max,
            z_step: self.z_step,
            n0_max: self.n0_max,
            accuracy_n0: self.accuracy_n0,
            refine_rounds: self.refine_rounds,
            refine_shrink: self.refine_shrink,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Io(_) | Error::InvalidParameter(_) => 2,
        Error::EmptyInput
        | Error::NegativeValue { .. }
        | Error::ZeroTotal
        | Error::DegenerateInput(_)
        | Error::DegenerateCase(_) => 3,
        Error::MissingElementCount => 4,
        _ => 5,
    }
}

fn run(cli: Cli) -> classdist::Result<String> {
    match cli.command {
        Command::Fit {
            input,
            fit,
            json,
            emit_curves,
        } => commands::fit(&input, &fit.config(), json, emit_curves.as_deref()),
        Command::Compare {
            input,
            dir,
            fit,
            trials,
            seed,
            json,
        } => match (input, dir) {
            (_, Some(dir)) => commands::compare_dir(&dir, &fit.config(), trials, seed, json),
            (Some(input), None) => commands::compare_file(&input, &fit.config(), trials, seed, json),
            (None, None) => unreachable!("clap requires an input or --dir"),
        },
        Command::Pvalue {
            input,
            fit,
            trials,
            seed,
            json,
        } => commands::pvalue(&input, &fit.config(), trials, seed, json),
        Command::RandomStudy {
            m_min,
            m_max,
            ensembles,
            elements,
            seed,
            fit,
            json,
        } => commands::random_study(m_min, m_max, ensembles, elements, seed, &fit.config(), json),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
