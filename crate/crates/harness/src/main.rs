use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use swipt_harness::{emit, read_records, run_experiment, summarize, ExperimentSpec, HarnessError, MethodKind, SummaryDocument};
use swipt_relay::model::{to_linear_config, RawConfig};
use swipt_relay::sr::build_codebook;

#[derive(Parser)]
#[command(name = "swipt-sim", about = "Monte-Carlo experiments for relay SWIPT transceiver designs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    SumMax,
    MaxMin,
    Random,
    Exhaustive,
}

impl From<Method> for MethodKind {
    fn from(m: Method) -> Self {
        match m {
            Method::SumMax => MethodKind::SumMax,
            Method::MaxMin => MethodKind::MaxMin,
            Method::Random => MethodKind::Random,
            Method::Exhaustive => MethodKind::Exhaustive,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment spec and write records and summaries.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Output directory; defaults to the spec's `output` field.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Recompute summaries from a results directory.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print a scored codebook for one random channel draw.
    Codebook {
        #[arg(long, default_value_t = 4)]
        nt: i64,
        #[arg(long, default_value_t = 4)]
        nr: i64,
        #[arg(long, default_value_t = 3)]
        k: i64,
        #[arg(long, default_value_t = 8)]
        b: usize,
        #[arg(long, value_enum, default_value_t = Method::SumMax)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { spec, out, trials, seed, workers } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| HarnessError::Io(format!("{}: {e}", spec.display())))?;
            let mut spec = ExperimentSpec::from_json(&text)?;
            if let Some(t) = trials {
                spec.num_trials = t;
            }
            if let Some(s) = seed {
                spec.seed = s;
            }
            let dir = out
                .or_else(|| spec.output.clone().map(PathBuf::from))
                .ok_or_else(|| HarnessError::Config("no output directory given".into()))?;
            let records = run_experiment(&spec, workers)?;
            let summaries = summarize(&records)?;
            for path in emit(&records, &summaries, &dir)? {
                println!("{}", path.display());
            }
        }
        Command::Summarize { input } => {
            let records = read_records(&input.join(swipt_harness::emit::RECORDS_FILE))?;
            let summaries = summarize(&records)?;
            emit(&records, &summaries, &input)?;
            let doc = SummaryDocument::new(&summaries);
            println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| HarnessError::Io(e.to_string()))?);
        }
        Command::Codebook { nt, nr, k, b, method, seed } => {
            let cfg = to_linear_config(&RawConfig { nt, nr, k, ..RawConfig::default() })?;
            let ch = swipt_harness::trial_channels(&cfg, 0.0, seed);
            let codebook = build_codebook(&ch.g, &ch.h_est, b, MethodKind::from(method).with_seed(seed))?;
            for (perm, score) in codebook.permutations.iter().zip(&codebook.scores) {
                println!("{perm:?}\t{score:.6}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
