//! Randomized extraction of a rank-one design from a lifted solution.

use super::{compute_bounds, rescale_beamformers, rescale_relay, RescaleSolution};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian_vec, hermitian_eigen, unvec_square, CMat, CVec, C64};
use crate::model::{ChannelSet, RelayWeight, SystemConfig, Transceiver};
use crate::rng::stream;

pub const DEFAULT_TRIALS: usize = 100;

/// Largest `lambda_2 / lambda_1` treated as rank one.
pub const RANK_ONE_RATIO: f64 = 1e-6;

/// The relaxed solution to recover from.
#[derive(Debug, Clone, Copy)]
pub enum Lifted<'a> {
    /// Lifted beamformers `F_k` for a fixed relay weight.
    Beamformers { f: &'a [CMat], relay: &'a RelayWeight },
    /// Lifted relay weight `vec(W) vec(W)^H` for fixed beamformers.
    Relay { w_tilde: &'a CMat, beamformers: &'a [CVec] },
}

#[derive(Debug, Clone, Copy)]
pub struct RecoveryContext<'a> {
    pub channels: &'a ChannelSet,
    pub cfg: &'a SystemConfig,
    /// Error radii the bounds are taken over; zeros give nominal recovery.
    pub eta: &'a [f64],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovered {
    pub transceiver: Transceiver,
    pub objective: f64,
    /// Index of the winning trial, `0` being the principal component.
    pub trial: usize,
    pub feasible_trials: usize,
    pub rescale: RescaleSolution,
}

/// Spectral ratio `lambda_2 / lambda_1` of a PSD matrix (0 for size one).
pub fn rank_ratio(m: &CMat) -> f64 {
    let (lam, _) = hermitian_eigen(m);
    if lam.len() < 2 || lam[0] <= 0.0 {
        return 0.0;
    }
    lam[1].max(0.0) / lam[0]
}

struct Factor {
    /// `Q Lambda^{1/2}`, columns scaled by the clipped eigenvalue roots.
    q_sqrt: CMat,
    principal: CVec,
    ratio: f64,
}

fn factor(m: &CMat) -> Factor {
    let (lam, q) = hermitian_eigen(m);
    let mut q_sqrt = q.clone();
    for (i, l) in lam.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        q_sqrt.column_mut(i).scale_mut(s);
    }
    let principal = q_sqrt.column(0).into_owned();
    let ratio = if lam.len() > 1 && lam[0] > 0.0 { lam[1].max(0.0) / lam[0] } else { 0.0 };
    Factor { q_sqrt, principal, ratio }
}

fn draw(f: &Factor, rng: &mut rand_chacha::ChaCha8Rng) -> CVec {
    let w = complex_gaussian_vec(f.q_sqrt.ncols(), rng);
    &f.q_sqrt * w
}

/// Runs the randomization loop: trial 0 uses the principal component, the
/// remaining trials draw `Q Lambda^{1/2} w` with `w` standard complex
/// Gaussian. Each candidate is rescaled against worst-case bounds over
/// `ctx.eta` and infeasible candidates are discarded. When the lifted input
/// is already rank one only the principal candidate is evaluated, since every draw is a
/// scalar multiple of it.
pub fn randomized_recovery(lifted: Lifted<'_>, trials: usize, seed: u64, ctx: &RecoveryContext<'_>) -> Result<Recovered> {
    let trials = trials.max(1);
    let ch = ctx.channels;
    let mut best: Option<Recovered> = None;
    let mut feasible = 0;
    match lifted {
        Lifted::Beamformers { f, relay } => {
            let factors: Vec<Factor> = f.iter().map(factor).collect();
            let rank_one = factors.iter().all(|fa| fa.ratio <= RANK_ONE_RATIO);
            let w = relay.matrix();
            let n = if rank_one { 1 } else { trials };
            for t in 0..n {
                let cand: Vec<CVec> = if t == 0 {
                    factors.iter().map(|fa| fa.principal.clone()).collect()
                } else {
                    let mut rng = stream(seed, t as u64);
                    factors.iter().map(|fa| draw(fa, &mut rng)).collect()
                };
                let bounds = compute_bounds(&ch.h_est, ctx.eta, &w, &ch.g, &cand)?;
                let rs = match rescale_beamformers(&cand, &w, &ch.g, &bounds, ctx.cfg) {
                    Ok(Some(rs)) => rs,
                    Ok(None) => continue,
                    Err(e) => {
                        log::debug!("discarding candidate {t}: {e}");
                        continue;
                    }
                };
                feasible += 1;
                if best.as_ref().map_or(true, |b| rs.objective < b.objective) {
                    let beamformers = cand.iter().zip(&rs.phi).map(|(f, p)| f * C64::from(p.sqrt())).collect();
                    best = Some(Recovered {
                        transceiver: Transceiver { beamformers, relay: relay.clone(), ps_ratios: rs.ps_ratios.clone() },
                        objective: rs.objective,
                        trial: t,
                        feasible_trials: 0,
                        rescale: rs,
                    });
                }
            }
        }
        Lifted::Relay { w_tilde, beamformers } => {
            let nr = ch.g.nrows();
            let fa = factor(w_tilde);
            let n = if fa.ratio <= RANK_ONE_RATIO { 1 } else { trials };
            for t in 0..n {
                let v = if t == 0 {
                    fa.principal.clone()
                } else {
                    let mut rng = stream(seed, t as u64);
                    draw(&fa, &mut rng)
                };
                let w = unvec_square(&v, nr);
                let bounds = compute_bounds(&ch.h_est, ctx.eta, &w, &ch.g, beamformers)?;
                let Some(rs) = rescale_relay(beamformers, &w, &ch.g, &bounds, ctx.cfg)? else {
                    continue;
                };
                feasible += 1;
                if best.as_ref().map_or(true, |b| rs.objective < b.objective) {
                    let w = w * C64::from(rs.phi[0].sqrt());
                    best = Some(Recovered {
                        transceiver: Transceiver {
                            beamformers: beamformers.to_vec(),
                            relay: RelayWeight::FullMatrix(w),
                            ps_ratios: rs.ps_ratios.clone(),
                        },
                        objective: rs.objective,
                        trial: t,
                        feasible_trials: 0,
                        rescale: rs,
                    });
                }
            }
        }
    }
    let mut best = best.ok_or(Error::RecoveryFailed { trials })?;
    best.feasible_trials = feasible;
    Ok(best)
}
