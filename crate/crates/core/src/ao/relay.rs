//! Relay-matrix subproblem for fixed beamformers and splitting ratios.

use super::bf_ps::{diag_lmi_weight, expect_optimal, lift_map};
use crate::conic::{solve, CAffMat, ConicProgram, ConicSolution, HermVar, LinExpr, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{principal_component, unvec_square, CMat, CVec, C64, ONE};
use crate::model::{total_power, ChannelSet, RelayWeight, SystemConfig, Transceiver};
use crate::rankone::{randomized_recovery, Lifted, RecoveryContext, RANK_ONE_RATIO};
use crate::RecoveryAudit;

#[derive(Debug, Clone)]
pub struct RelayRelaxation {
    /// Lifted relay weight `vec(W) vec(W)^H`, column-major `vec`.
    pub lifted: CMat,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub objective: f64,
    pub solution: ConicSolution,
}

/// `W b b^H W^H` as an affine matrix in the lifted relay variable.
fn lifted_outer(wt: &HermVar, b: &CVec) -> CAffMat {
    let nr = b.len();
    let mut m = CAffMat::zeros(nr);
    for r in 0..nr {
        for s in 0..nr {
            let entry = m.get_mut(r, s);
            for c in 0..nr {
                for d in 0..nr {
                    entry.add_scaled(&wt.entry(c * nr + r, d * nr + s), b[c] * b[d].conj());
                }
            }
            entry.compress();
        }
    }
    m
}

/// `W W^H` as an affine matrix in the lifted relay variable.
fn lifted_gram(wt: &HermVar, nr: usize) -> CAffMat {
    let mut m = CAffMat::zeros(nr);
    for r in 0..nr {
        for s in 0..nr {
            let entry = m.get_mut(r, s);
            for c in 0..nr {
                entry.add_scaled(&wt.entry(c * nr + r, c * nr + s), ONE);
            }
            entry.compress();
        }
    }
    m
}

/// Solves the relaxed relay program for fixed beamformers and splitting
/// ratios. Robust users (`eta[k] > 0`) get S-procedure LMIs; the others get
/// scalar constraints.
pub fn relax_relay(beamformers: &[CVec], ps_ratios: &[f64], channels: &ChannelSet, cfg: &SystemConfig, eta: &[f64]) -> Result<RelayRelaxation> {
    let k_users = channels.num_users();
    let nr = channels.g.nrows();
    let n2 = nr * nr;
    let streams: Vec<CVec> = beamformers.iter().map(|f| &channels.g * f).collect();
    let mut p = ConicProgram::new();
    let wt = p.add_hermitian("Wt", n2);
    p.add_psd_hermitian("Wt>=0", &wt);

    let mut power = CMat::identity(n2, n2) * C64::from(cfg.relay_noise);
    for b in &streams {
        let outer = b.conjugate() * b.transpose();
        power += outer.kronecker(&CMat::identity(nr, nr));
    }
    let bs: f64 = beamformers.iter().map(|f| f.norm_squared()).sum();
    p.set_objective(wt.trace_with(&power) + bs);

    let gram = if eta.iter().any(|&e| e > 0.0) { Some(lifted_gram(&wt, nr)) } else { None };
    let outers: Vec<CAffMat> = if gram.is_some() { streams.iter().map(|b| lifted_outer(&wt, b)).collect() } else { Vec::new() };
    let mut mults = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let rho = ps_ratios[k];
        if !(0.0..=1.0).contains(&rho) || (rho <= 0.0 && cfg.circuit_noise[k] > 0.0) || (rho >= 1.0 && cfg.eh_target[k] > 0.0) {
            return Err(Error::InvalidRatio { user: k, value: rho });
        }
        let h = &channels.h_est[k];
        let gamma = cfg.sinr_target[k];
        let sigma2 = cfg.antenna_noise[k];
        let sinr_rhs = sigma2 + cfg.circuit_noise[k] / rho;
        let eh_rhs = cfg.eh_target[k] / (cfg.eh_efficiency[k] * (1.0 - rho)) - sigma2;
        if eta[k] > 0.0 {
            let l = lift_map(h);
            let d = diag_lmi_weight(nr, eta[k]);
            let lam = p.add_var(format!("lambda{k}"));
            let mu = p.add_var(format!("mu{k}"));
            p.add_nonneg("lambda>=0", LinExpr::var(lam));
            p.add_nonneg("mu>=0", LinExpr::var(mu));
            let gram = gram.as_ref().expect("built when any radius is positive");
            let mut u = CAffMat::zeros(nr);
            let mut v = CAffMat::zeros(nr);
            for (j, o) in outers.iter().enumerate() {
                u.add_scaled(o, if j == k { 1.0 / gamma } else { -1.0 });
                v.add_scaled(o, 1.0);
            }
            u.add_scaled(gram, -cfg.relay_noise);
            v.add_scaled(gram, cfg.relay_noise);
            let mut s = u.congruence_by(&l);
            let mut e = v.congruence_by(&l);
            s.add_expr_times(&LinExpr::var(lam), &d, 1.0);
            e.add_expr_times(&LinExpr::var(mu), &d, 1.0);
            s.get_mut(nr, nr).constant -= ONE * sinr_rhs;
            e.get_mut(nr, nr).constant -= ONE * eh_rhs;
            p.add_hermitian_lmi(&format!("sinr{k}"), &s);
            p.add_hermitian_lmi(&format!("eh{k}"), &e);
            mults.push(Some((lam, mu)));
        } else {
            let noise = CMat::identity(nr, nr).kronecker(&(h * h.adjoint()));
            let relay_noise = wt.trace_with(&noise) * cfg.relay_noise;
            let mut s = LinExpr::constant(-sinr_rhs) - relay_noise.clone();
            let mut e = LinExpr::constant(-eh_rhs) + relay_noise;
            for (j, b) in streams.iter().enumerate() {
                let a = crate::linalg::vec_col_major(&(h * b.adjoint()));
                let quad = wt.quad(&a);
                s.add_scaled(&quad, if j == k { 1.0 / gamma } else { -1.0 });
                e.add_scaled(&quad, 1.0);
            }
            p.add_nonneg(&format!("sinr{k}"), s);
            p.add_nonneg(&format!("eh{k}"), e);
            mults.push(None);
        }
    }

    let sol = solve(&p, DEFAULT_TOL)?;
    expect_optimal(&sol, "relay subproblem")?;
    let x = &sol.x;
    Ok(RelayRelaxation {
        lifted: wt.value(x),
        lambda: mults.iter().map(|m| m.map_or(0.0, |(l, _)| x[l])).collect(),
        mu: mults.iter().map(|m| m.map_or(0.0, |(_, u)| x[u])).collect(),
        objective: sol.objective,
        solution: sol.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct RelayStep {
    pub transceiver: Transceiver,
    pub power: f64,
    pub relaxation: RelayRelaxation,
    pub audit: RecoveryAudit,
}

fn relay_step(
    beamformers: &[CVec],
    ps_ratios: &[f64],
    channels: &ChannelSet,
    cfg: &SystemConfig,
    eta: &[f64],
    trials: usize,
    seed: u64,
) -> Result<RelayStep> {
    let nr = channels.g.nrows();
    let relaxation = relax_relay(beamformers, ps_ratios, channels, cfg, eta)?;
    let (v, ratio) = principal_component(&relaxation.lifted);
    if ratio <= RANK_ONE_RATIO {
        let transceiver = Transceiver {
            beamformers: beamformers.to_vec(),
            relay: RelayWeight::FullMatrix(unvec_square(&v, nr)),
            ps_ratios: ps_ratios.to_vec(),
        };
        let power = total_power(&transceiver, channels, cfg)?;
        let audit = RecoveryAudit { sdr_objective: relaxation.objective, recovered_power: power, trial: 0, randomized: false };
        return Ok(RelayStep { transceiver, power, relaxation, audit });
    }
    let ctx = RecoveryContext { channels, cfg, eta };
    let rec = randomized_recovery(Lifted::Relay { w_tilde: &relaxation.lifted, beamformers }, trials, seed, &ctx)?;
    let power = total_power(&rec.transceiver, channels, cfg)?;
    let audit = RecoveryAudit { sdr_objective: relaxation.objective, recovered_power: power, trial: rec.trial, randomized: true };
    Ok(RelayStep { transceiver: rec.transceiver, power, relaxation, audit })
}

/// Nominal relay step at the estimated channels.
pub fn solve_relay_nominal(
    beamformers: &[CVec],
    ps_ratios: &[f64],
    channels: &ChannelSet,
    cfg: &SystemConfig,
    trials: usize,
    seed: u64,
) -> Result<RelayStep> {
    let zeros = vec![0.0; channels.num_users()];
    relay_step(beamformers, ps_ratios, channels, cfg, &zeros, trials, seed)
}

/// Robust relay step over the error balls in `channels.eta`.
pub fn solve_relay_robust(
    beamformers: &[CVec],
    ps_ratios: &[f64],
    channels: &ChannelSet,
    cfg: &SystemConfig,
    trials: usize,
    seed: u64,
) -> Result<RelayStep> {
    relay_step(beamformers, ps_ratios, channels, cfg, &channels.eta, trials, seed)
}
