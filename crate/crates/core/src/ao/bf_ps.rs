//! Beamformer and power-splitting subproblem for a fixed relay matrix.

use crate::conic::{solve, CAffMat, ConicProgram, ConicSolution, HermVar, LinExpr, SolveStatus, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{principal_component, CMat, CVec, ONE};
use crate::model::{total_power, ChannelSet, RelayWeight, SystemConfig, Transceiver};
use crate::rankone::{randomized_recovery, Lifted, RecoveryContext, RANK_ONE_RATIO};
use crate::RecoveryAudit;

/// Relaxed optimum of the beamformer / splitting subproblem.
#[derive(Debug, Clone)]
pub struct BfPsRelaxation {
    /// Lifted beamformers `F_k`.
    pub lifted: Vec<CMat>,
    /// `1 / rho_k`.
    pub p: Vec<f64>,
    /// `1 / (1 - rho_k)`.
    pub q: Vec<f64>,
    /// S-procedure multipliers; zero for users with a zero error radius.
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    /// Dual multiplier of each SINR constraint (lower-right corner of the
    /// LMI dual for robust users).
    pub sinr_dual: Vec<f64>,
    pub eh_dual: Vec<f64>,
    pub objective: f64,
    pub solution: ConicSolution,
}

impl BfPsRelaxation {
    pub fn ps_ratios(&self) -> Vec<f64> {
        self.p.iter().map(|p| (1.0 / p).clamp(0.0, 1.0)).collect()
    }

    /// Largest `lambda_2 / lambda_1` over the lifted beamformers.
    pub fn worst_rank_ratio(&self) -> f64 {
        self.lifted.iter().map(crate::rankone::rank_ratio).fold(0.0, f64::max)
    }
}

/// `diag(I, -eta^2)`, the S-procedure multiplier pattern.
pub(crate) fn diag_lmi_weight(n: usize, eta: f64) -> CMat {
    let mut d = CMat::identity(n + 1, n + 1);
    d[(n, n)] = ONE * (-eta * eta);
    d
}

/// `[I, h]`, the map taking the lifted error space onto the LMI.
pub(crate) fn lift_map(h: &CVec) -> CMat {
    let n = h.len();
    let mut l = CMat::zeros(n, n + 1);
    for i in 0..n {
        l[(i, i)] = ONE;
        l[(i, n)] = h[i];
    }
    l
}

pub(crate) fn expect_optimal(sol: &ConicSolution, what: &str) -> Result<()> {
    match sol.status {
        SolveStatus::Optimal => Ok(()),
        SolveStatus::Infeasible => Err(Error::Infeasible(what.to_string())),
        SolveStatus::Unbounded => Err(Error::NumericalFailure(format!("{what} is unbounded"))),
        SolveStatus::NumericalFailure => Err(Error::NumericalFailure(what.to_string())),
    }
}

/// Solves the relaxed beamformer / splitting program for a fixed relay
/// matrix `w`. Users with `eta[k] > 0` get S-procedure LMIs over their error
/// ball; users with `eta[k] == 0` get the nominal scalar constraints, which
/// are the exact limit of the LMIs as the ball shrinks.
pub fn relax_bf_ps(w: &CMat, channels: &ChannelSet, cfg: &SystemConfig, eta: &[f64]) -> Result<BfPsRelaxation> {
    let k_users = channels.num_users();
    let nt = channels.g.ncols();
    let nr = channels.g.nrows();
    let wg = w * &channels.g;
    let mut p = ConicProgram::new();
    let f: Vec<HermVar> = (0..k_users).map(|k| p.add_hermitian(&format!("F{k}"), nt)).collect();
    let pv = p.add_vars("p", k_users);
    let qv = p.add_vars("q", k_users);
    for k in 0..k_users {
        p.add_psd_hermitian(&format!("F{k}>=0"), &f[k]);
        p.add_ps_pair(&format!("ps{k}"), pv[k], qv[k]);
    }

    let gain = CMat::identity(nt, nt) + wg.adjoint() * &wg;
    let mut objective = LinExpr::constant(cfg.relay_noise * w.norm_squared());
    for fk in &f {
        objective.add_scaled(&fk.trace_with(&gain), 1.0);
    }
    p.set_objective(objective);

    let mut mults = Vec::with_capacity(k_users);
    let mut blocks = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let h = &channels.h_est[k];
        let gamma = cfg.sinr_target[k];
        let sigma2 = cfg.antenna_noise[k];
        let omega2 = cfg.circuit_noise[k];
        let eh = cfg.eh_target[k] / cfg.eh_efficiency[k];
        let sinr_corner = LinExpr::constant(-sigma2) - LinExpr::term(pv[k], omega2);
        let eh_corner = LinExpr::constant(sigma2) - LinExpr::term(qv[k], eh);
        if eta[k] > 0.0 {
            let l = lift_map(h);
            let b = l.adjoint() * &wg;
            let ww = l.adjoint() * w * w.adjoint() * &l;
            let d = diag_lmi_weight(nr, eta[k]);
            let lam = p.add_var(format!("lambda{k}"));
            let mu = p.add_var(format!("mu{k}"));
            p.add_nonneg("lambda>=0", LinExpr::var(lam));
            p.add_nonneg("mu>=0", LinExpr::var(mu));

            let mut s = CAffMat::zeros(nr + 1);
            let mut e = CAffMat::zeros(nr + 1);
            for (j, fj) in f.iter().enumerate() {
                s.add_congruence(fj, &b, if j == k { 1.0 / gamma } else { -1.0 });
                e.add_congruence(fj, &b, 1.0);
            }
            s.add_const(&ww, -cfg.relay_noise);
            e.add_const(&ww, cfg.relay_noise);
            s.add_expr_times(&LinExpr::var(lam), &d, 1.0);
            e.add_expr_times(&LinExpr::var(mu), &d, 1.0);
            s.get_mut(nr, nr).add_real(&sinr_corner, ONE);
            e.get_mut(nr, nr).add_real(&eh_corner, ONE);
            let bs = p.add_hermitian_lmi(&format!("sinr{k}"), &s);
            let be = p.add_hermitian_lmi(&format!("eh{k}"), &e);
            mults.push(Some((lam, mu)));
            blocks.push((bs, be, true));
        } else {
            let a = wg.ad_mul(h);
            let relay_gain = w.ad_mul(h).norm_squared();
            let mut s = sinr_corner - cfg.relay_noise * relay_gain;
            let mut e = eh_corner + cfg.relay_noise * relay_gain;
            for (j, fj) in f.iter().enumerate() {
                let quad = fj.quad(&a);
                s.add_scaled(&quad, if j == k { 1.0 / gamma } else { -1.0 });
                e.add_scaled(&quad, 1.0);
            }
            let bs = p.add_nonneg(&format!("sinr{k}"), s);
            let be = p.add_nonneg(&format!("eh{k}"), e);
            mults.push(None);
            blocks.push((bs, be, false));
        }
    }

    let sol = solve(&p, DEFAULT_TOL)?;
    expect_optimal(&sol, "beamformer/splitting subproblem")?;
    let x = &sol.x;
    let dual = |b: usize, lmi: bool| if lmi { sol.dual_hermitian_corner(b) } else { sol.duals[b][0] };
    Ok(BfPsRelaxation {
        lifted: f.iter().map(|fk| fk.value(x)).collect(),
        p: pv.iter().map(|&v| x[v]).collect(),
        q: qv.iter().map(|&v| x[v]).collect(),
        lambda: mults.iter().map(|m| m.map_or(0.0, |(l, _)| x[l])).collect(),
        mu: mults.iter().map(|m| m.map_or(0.0, |(_, u)| x[u])).collect(),
        sinr_dual: blocks.iter().map(|&(b, _, lmi)| dual(b, lmi)).collect(),
        eh_dual: blocks.iter().map(|&(_, b, lmi)| dual(b, lmi)).collect(),
        objective: sol.objective,
        solution: sol.clone(),
    })
}

/// Rank-one design produced by one beamformer / splitting step.
#[derive(Debug, Clone)]
pub struct BfPsStep {
    pub transceiver: Transceiver,
    pub power: f64,
    pub relaxation: BfPsRelaxation,
    pub audit: RecoveryAudit,
}

/// Nominal step: the relaxation is tight, so each beamformer is the
/// principal component of its lifted matrix. A lifted matrix that fails the
/// rank-one ratio test is logged and handed to randomized recovery.
pub fn solve_bf_ps_nominal(relay: &RelayWeight, channels: &ChannelSet, cfg: &SystemConfig, trials: usize, seed: u64) -> Result<BfPsStep> {
    let w = relay.matrix();
    let zeros = vec![0.0; channels.num_users()];
    let relaxation = relax_bf_ps(&w, channels, cfg, &zeros)?;
    let ratio = relaxation.worst_rank_ratio();
    if ratio <= RANK_ONE_RATIO {
        let beamformers = relaxation.lifted.iter().map(|f| principal_component(f).0).collect();
        let transceiver = Transceiver { beamformers, relay: relay.clone(), ps_ratios: relaxation.ps_ratios() };
        let power = total_power(&transceiver, channels, cfg)?;
        let audit = RecoveryAudit { sdr_objective: relaxation.objective, recovered_power: power, trial: 0, randomized: false };
        return Ok(BfPsStep { transceiver, power, relaxation, audit });
    }
    if ratio > 1e-3 {
        log::warn!("nominal beamformer relaxation is not rank one (ratio {ratio:.2e})");
    } else {
        log::debug!("nominal beamformer relaxation is rank one only to solver accuracy (ratio {ratio:.2e})");
    }
    recover(relay, channels, cfg, &zeros, relaxation, trials, seed)
}

/// Robust step over the error balls in `channels.eta`.
pub fn solve_bf_ps_robust(relay: &RelayWeight, channels: &ChannelSet, cfg: &SystemConfig, trials: usize, seed: u64) -> Result<BfPsStep> {
    let w = relay.matrix();
    let relaxation = relax_bf_ps(&w, channels, cfg, &channels.eta)?;
    recover(relay, channels, cfg, &channels.eta, relaxation, trials, seed)
}

pub(crate) fn recover(
    relay: &RelayWeight,
    channels: &ChannelSet,
    cfg: &SystemConfig,
    eta: &[f64],
    relaxation: BfPsRelaxation,
    trials: usize,
    seed: u64,
) -> Result<BfPsStep> {
    let ctx = RecoveryContext { channels, cfg, eta };
    let rec = randomized_recovery(Lifted::Beamformers { f: &relaxation.lifted, relay }, trials, seed, &ctx)?;
    let power = total_power(&rec.transceiver, channels, cfg)?;
    let audit = RecoveryAudit { sdr_objective: relaxation.objective, recovered_power: power, trial: rec.trial, randomized: rec.trial > 0 };
    Ok(BfPsStep { transceiver: rec.transceiver, power, relaxation, audit })
}
