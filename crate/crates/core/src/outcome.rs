//! Result types shared by the design algorithms.

use serde::{Deserialize, Serialize};

use crate::model::Transceiver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationReason {
    Tolerance,
    PowerIncrease,
    IterationCap,
    InfeasibleSubproblem,
}

/// One rank-one extraction: the relaxed optimum and the power of the
/// design that was actually kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryAudit {
    pub sdr_objective: f64,
    pub recovered_power: f64,
    /// Winning trial index, `0` being the principal component.
    pub trial: usize,
    pub randomized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignOutcome {
    /// `None` when no feasible design was found.
    pub transceiver: Option<Transceiver>,
    pub total_power: f64,
    pub power_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub termination: TerminationReason,
    pub wall_time: f64,
    pub recoveries: Vec<RecoveryAudit>,
    /// Selected codebook index for switched-relay designs.
    pub l_opt: Option<usize>,
    pub beta: Option<f64>,
}

impl DesignOutcome {
    pub fn feasible(&self) -> bool {
        self.transceiver.is_some()
    }

    pub(crate) fn infeasible(wall_time: f64) -> Self {
        Self {
            transceiver: None,
            total_power: f64::INFINITY,
            power_trace: Vec::new(),
            iterations: 0,
            converged: false,
            termination: TerminationReason::InfeasibleSubproblem,
            wall_time,
            recoveries: Vec::new(),
            l_opt: None,
            beta: None,
        }
    }
}
