//! Monte-Carlo experiment runner for the relay SWIPT designs.

pub mod emit;
pub mod run;
pub mod spec;
pub mod summary;

pub use emit::{emit, read_records, write_records, SummaryDocument, CSV_HEADER};
pub use run::{run_algorithm, run_experiment, trial_channels, trial_seed, TrialRecord};
pub use spec::{AlgorithmSpec, AlgorithmTag, ExperimentSpec, InitKind, MethodKind, Sweep, SweepVariable};
pub use summary::{mean_ci, summarize, Summary};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit code: 2 for configuration and file problems, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 2,
            HarnessError::Solver(_) => 3,
        }
    }
}

impl From<swipt_relay::Error> for HarnessError {
    fn from(e: swipt_relay::Error) -> Self {
        use swipt_relay::Error as E;
        match e {
            E::Config(_) | E::Dimension(_) | E::InvalidRatio { .. } => HarnessError::Config(e.to_string()),
            _ => HarnessError::Solver(e.to_string()),
        }
    }
}
