//! Robust latent design: subgradient descent on the relay scale.

use std::time::Instant;

use super::cccp::{Latent, INIT_BETAS};
use crate::ao::{recover, relax_bf_ps, BfPsRelaxation};
use crate::error::{Error, Result};
use crate::{DesignOutcome, RecoveryAudit, TerminationReason};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgradientOptions {
    pub theta: f64,
    pub epsilon: f64,
    pub beta0: f64,
    pub delta: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SubgradientOptions {
    fn default() -> Self {
        Self { theta: 6.0, epsilon: 1e-6, beta0: 1.0, delta: 2e-3, max_iter: 50, trials: crate::rankone::DEFAULT_TRIALS, seed: 0 }
    }
}

/// Relaxed robust optimum at a fixed relay scale.
#[derive(Debug, Clone)]
pub struct FixedBetaSolution {
    pub beta: f64,
    pub relaxation: BfPsRelaxation,
    /// Dual corner scalars of the SINR and EH constraints, scaled to the
    /// constraint form divided by `beta`.
    pub x_dual: Vec<f64>,
    pub y_dual: Vec<f64>,
    /// `f(beta)`, the relaxed objective.
    pub objective: f64,
}

/// Solves the relaxed robust beamformer / splitting program at
/// `W = sqrt(beta) T` over the error balls in `channels.eta`.
pub fn solve_fixed_beta_robust(beta: f64, lat: &Latent<'_>) -> Result<FixedBetaSolution> {
    let w = lat.relay(beta).matrix();
    let relaxation = relax_bf_ps(&w, lat.channels, lat.cfg, &lat.channels.eta)?;
    Ok(FixedBetaSolution {
        beta,
        x_dual: relaxation.sinr_dual.iter().map(|d| d * beta).collect(),
        y_dual: relaxation.eh_dual.iter().map(|d| d * beta).collect(),
        objective: relaxation.objective,
        relaxation,
    })
}

/// Derivative of `f` at the solution's `beta`.
pub fn subgradient(sol: &FixedBetaSolution, lat: &Latent<'_>) -> f64 {
    let cfg = lat.cfg;
    let g = &lat.channels.g;
    let gram = g.adjoint() * g;
    let b2 = sol.beta * sol.beta;
    let mut s = cfg.relay_noise * g.nrows() as f64;
    for (k, f) in sol.relaxation.lifted.iter().enumerate() {
        s += (f * &gram).trace().re;
        let (p, q) = (sol.relaxation.p[k], sol.relaxation.q[k]);
        s -= sol.x_dual[k] * (cfg.antenna_noise[k] + cfg.circuit_noise[k] * p) / b2;
        s += sol.y_dual[k] * (cfg.antenna_noise[k] - cfg.eh_target[k] * q / cfg.eh_efficiency[k]) / b2;
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientState {
    pub beta: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub s: f64,
    /// Best `(beta, f(beta))` seen so far.
    pub best: Option<(f64, f64)>,
}

impl SubgradientState {
    pub fn new(opts: &SubgradientOptions) -> Self {
        Self { beta: opts.beta0, theta: opts.theta, epsilon: opts.epsilon, s: 0.0, best: None }
    }

    /// `max(beta - theta s, epsilon)`.
    pub fn next_beta(&self, beta: f64, s: f64) -> f64 {
        (beta - self.theta * s).max(self.epsilon)
    }
}

/// Records `sol`, computes its subgradient and moves `beta` to
/// `max(beta - theta s, epsilon)`.
pub fn subgradient_step(state: &SubgradientState, sol: &FixedBetaSolution, lat: &Latent<'_>) -> SubgradientState {
    let s = subgradient(sol, lat);
    let best = match state.best {
        Some((_, f)) if f <= sol.objective => state.best,
        _ => Some((sol.beta, sol.objective)),
    };
    SubgradientState { beta: state.next_beta(sol.beta, s), s, best, ..*state }
}

const MAX_HALVINGS: usize = 30;

pub(crate) fn first_feasible(lat: &Latent<'_>, opts: &SubgradientOptions) -> Result<Option<FixedBetaSolution>> {
    let mut betas = vec![opts.beta0];
    betas.extend(INIT_BETAS.iter().copied().filter(|&b| b != opts.beta0));
    for beta in betas {
        match solve_fixed_beta_robust(beta, lat) {
            Ok(sol) => return Ok(Some(sol)),
            Err(e @ (Error::Infeasible(_) | Error::NumericalFailure(_))) => log::debug!("robust latent {} at beta = {beta}: {e}", lat.index),
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Subgradient iterations from `beta0` with rank-one recovery at the best
/// scale found. The trace holds the best-so-far relaxed objective.
pub fn design_latent_subgradient(lat: &Latent<'_>, opts: &SubgradientOptions) -> Result<DesignOutcome> {
    let start = Instant::now();
    let Some(sol) = first_feasible(lat, opts)? else {
        return Ok(DesignOutcome::infeasible(start.elapsed().as_secs_f64()));
    };
    refine_subgradient(lat, sol, opts, start)
}

pub(crate) fn refine_subgradient(lat: &Latent<'_>, first: FixedBetaSolution, opts: &SubgradientOptions, start: Instant) -> Result<DesignOutcome> {
    let mut state = SubgradientState { beta: first.beta, ..SubgradientState::new(opts) };
    let mut best = first.clone();
    let mut cur = first;
    let mut trace = vec![cur.objective];
    let mut termination = TerminationReason::IterationCap;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        state = subgradient_step(&state, &cur, lat);
        let from = cur.beta;
        let mut step = state.theta;
        let mut next = None;
        for _ in 0..MAX_HALVINGS {
            let beta = (from - step * state.s).max(state.epsilon);
            match solve_fixed_beta_robust(beta, lat) {
                Ok(sol) => {
                    next = Some(sol);
                    break;
                }
                Err(Error::Infeasible(_)) => step *= 0.5,
                Err(e @ Error::NumericalFailure(_)) => {
                    log::debug!("robust latent {} at beta = {beta}: {e}", lat.index);
                    step *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        state.theta = step;
        let Some(next) = next else {
            termination = TerminationReason::InfeasibleSubproblem;
            break;
        };
        let change = (next.objective - cur.objective).abs();
        cur = next;
        if cur.objective < best.objective {
            best = cur.clone();
        }
        trace.push(best.objective);
        if change <= opts.delta {
            termination = TerminationReason::Tolerance;
            break;
        }
    }

    let relay = lat.relay(best.beta);
    let step = match recover(&relay, lat.channels, lat.cfg, &lat.channels.eta, best.relaxation.clone(), opts.trials, opts.seed) {
        Ok(step) => step,
        Err(Error::RecoveryFailed { trials }) => {
            log::debug!("robust latent {}: recovery failed after {trials} trials", lat.index);
            let mut out = DesignOutcome::infeasible(start.elapsed().as_secs_f64());
            out.power_trace = trace;
            out.iterations = iterations;
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let audit: RecoveryAudit = step.audit;
    Ok(DesignOutcome {
        transceiver: Some(step.transceiver),
        total_power: step.power,
        power_trace: trace,
        iterations,
        converged: termination == TerminationReason::Tolerance,
        termination,
        wall_time: start.elapsed().as_secs_f64(),
        recoveries: vec![audit],
        l_opt: Some(lat.index),
        beta: Some(best.beta),
    })
}
