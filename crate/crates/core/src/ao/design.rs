//! Alternating optimization between the beamformer / splitting step and
//! the relay step.

use std::time::Instant;

use super::{solve_bf_ps_nominal, solve_bf_ps_robust, solve_relay_nominal, solve_relay_robust};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian_mat, CMat};
use crate::model::{check_feasibility_rank, ChannelSet, RelayWeight, SystemConfig, Transceiver};
use crate::rankone::DEFAULT_TRIALS;
use crate::rng::{mix_seed, stream};
use crate::{DesignOutcome, RecoveryAudit, TerminationReason};

/// Starting relay matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum AoInit {
    /// `W = I`.
    Identity,
    /// Entries i.i.d. standard complex Gaussian drawn from the seed.
    Gaussian { seed: u64 },
    /// A relay weight taken from another design, typically switched relaying.
    Given(RelayWeight),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoOptions {
    pub delta: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for AoOptions {
    fn default() -> Self {
        Self { delta: 2e-3, max_iter: 20, trials: DEFAULT_TRIALS, seed: 0 }
    }
}

impl AoInit {
    pub fn relay(&self, nr: usize) -> RelayWeight {
        match self {
            AoInit::Identity => RelayWeight::FullMatrix(CMat::identity(nr, nr)),
            AoInit::Gaussian { seed } => RelayWeight::FullMatrix(complex_gaussian_mat(nr, nr, &mut stream(*seed, 0))),
            AoInit::Given(w) => w.clone(),
        }
    }
}

pub fn design_ao_nominal(channels: &ChannelSet, cfg: &SystemConfig, init: &AoInit, opts: &AoOptions) -> Result<DesignOutcome> {
    run(channels, cfg, init, opts, false)
}

pub fn design_ao_robust(channels: &ChannelSet, cfg: &SystemConfig, init: &AoInit, opts: &AoOptions) -> Result<DesignOutcome> {
    run(channels, cfg, init, opts, true)
}

/// Relative slack on the power-increase test, absorbing solver tolerance.
const INCREASE_TOL: f64 = 1e-6;

/// Subproblem outcomes that end the alternation instead of the run.
fn is_soft(e: &Error) -> bool {
    matches!(e, Error::Infeasible(_) | Error::RecoveryFailed { .. } | Error::NumericalFailure(_))
}

fn run(channels: &ChannelSet, cfg: &SystemConfig, init: &AoInit, opts: &AoOptions, robust: bool) -> Result<DesignOutcome> {
    let start = Instant::now();
    if !check_feasibility_rank(channels) {
        log::warn!("rank(HG) < K; the nominal problem may be infeasible");
    }
    let nr = channels.g.nrows();
    let mut relay = init.relay(nr);
    let mut accepted: Option<(Transceiver, f64)> = None;
    let mut trace = Vec::new();
    let mut recoveries: Vec<RecoveryAudit> = Vec::new();
    let mut termination = TerminationReason::IterationCap;
    let mut iterations = 0;

    for it in 0..opts.max_iter {
        iterations = it + 1;
        let seed = mix_seed(opts.seed, 2 * it as u64);
        let bf = if robust {
            solve_bf_ps_robust(&relay, channels, cfg, opts.trials, seed)
        } else {
            solve_bf_ps_nominal(&relay, channels, cfg, opts.trials, seed)
        };
        let bf = match bf {
            Ok(s) => s,
            Err(e) if is_soft(&e) => {
                log::debug!("beamformer step {it} failed: {e}");
                termination = TerminationReason::InfeasibleSubproblem;
                break;
            }
            Err(e) => return Err(e),
        };
        recoveries.push(bf.audit);
        if let Some((_, prev)) = &accepted {
            if bf.power > *prev * (1.0 + INCREASE_TOL) {
                termination = TerminationReason::PowerIncrease;
                break;
            }
        }

        let seed = mix_seed(opts.seed, 2 * it as u64 + 1);
        let tx = &bf.transceiver;
        let rs = if robust {
            solve_relay_robust(&tx.beamformers, &tx.ps_ratios, channels, cfg, opts.trials, seed)
        } else {
            solve_relay_nominal(&tx.beamformers, &tx.ps_ratios, channels, cfg, opts.trials, seed)
        };
        let ceiling = accepted.as_ref().map_or(bf.power, |a| a.1.min(bf.power));
        let rs = match rs {
            Ok(s) if s.power <= ceiling => s,
            Ok(s) if bf.power <= ceiling => {
                recoveries.push(s.audit);
                trace.push(bf.power);
                accepted = Some((bf.transceiver, bf.power));
                termination = TerminationReason::PowerIncrease;
                break;
            }
            Ok(s) => {
                recoveries.push(s.audit);
                termination = TerminationReason::PowerIncrease;
                break;
            }
            Err(e) if is_soft(&e) => {
                log::debug!("relay step {it} failed: {e}");
                if bf.power <= ceiling {
                    trace.push(bf.power);
                    accepted = Some((bf.transceiver, bf.power));
                }
                termination = TerminationReason::InfeasibleSubproblem;
                break;
            }
            Err(e) => return Err(e),
        };
        recoveries.push(rs.audit);
        let prev = accepted.as_ref().map(|a| a.1);
        trace.push(rs.power);
        relay = rs.transceiver.relay.clone();
        accepted = Some((rs.transceiver, rs.power));
        if let Some(prev) = prev {
            if (prev - rs.power).abs() < opts.delta {
                termination = TerminationReason::Tolerance;
                break;
            }
        }
    }

    let wall_time = start.elapsed().as_secs_f64();
    let Some((tx, power)) = accepted else {
        let mut out = DesignOutcome::infeasible(wall_time);
        out.iterations = iterations;
        out.recoveries = recoveries;
        return Ok(out);
    };
    Ok(DesignOutcome {
        transceiver: Some(tx),
        total_power: power,
        power_trace: trace,
        iterations,
        converged: matches!(termination, TerminationReason::Tolerance | TerminationReason::PowerIncrease),
        termination,
        wall_time,
        recoveries,
        l_opt: None,
        beta: None,
    })
}
