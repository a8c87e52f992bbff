//! Power rescaling of a rank-one candidate against worst-case bounds.

use serde::{Deserialize, Serialize};

use super::WorstCaseBounds;
use crate::conic::{solve, ConicProgram, LinExpr, SolveStatus, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::model::SystemConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleSolution {
    /// One scale per beamformer, or a single common relay scale.
    pub phi: Vec<f64>,
    pub ps_ratios: Vec<f64>,
    /// Interference-free SINR margin per user (before multiplying by `rho`).
    pub z: Vec<f64>,
    /// Worst-case received power per user.
    pub z_tilde: Vec<f64>,
    /// Total transmit power of the rescaled design.
    pub objective: f64,
}

/// Jointly picks beamformer power scales and splitting ratios for fixed
/// beamformer directions and relay matrix. Returns `Ok(None)` when the
/// candidate cannot meet the targets at any scaling.
pub fn rescale_beamformers(
    beamformers: &[CVec],
    w: &CMat,
    g: &CMat,
    bounds: &WorstCaseBounds,
    cfg: &SystemConfig,
) -> Result<Option<RescaleSolution>> {
    let k = beamformers.len();
    let wg = w * g;
    let mut p = ConicProgram::new();
    let phi = p.add_vars("phi", k);
    let rho = p.add_vars("rho", k);
    let mut objective = LinExpr::constant(cfg.relay_noise * w.norm_squared());
    let mut z_exprs = Vec::with_capacity(k);
    let mut zt_exprs = Vec::with_capacity(k);
    for i in 0..k {
        let f = &beamformers[i];
        objective.add_term(phi[i], f.norm_squared() + (&wg * f).norm_squared());
        p.add_nonneg("phi>=0", LinExpr::var(phi[i]));
        p.add_nonneg("rho<=1", LinExpr::constant(1.0) - LinExpr::var(rho[i]));

        let mut z = LinExpr::constant(-cfg.antenna_noise[i] - cfg.relay_noise * bounds.w_bar[i]);
        z.add_term(phi[i], bounds.u[i][i] / cfg.sinr_target[i]);
        let mut zt = LinExpr::constant(cfg.antenna_noise[i] + cfg.relay_noise * bounds.w_tilde[i]);
        for j in 0..k {
            if j != i {
                z.add_term(phi[j], -bounds.v[i][j]);
            }
            zt.add_term(phi[j], bounds.u[i][j]);
        }
        let omega = cfg.circuit_noise[i].sqrt();
        p.add_rotated_soc("sinr", z.clone(), LinExpr::var(rho[i]), vec![LinExpr::constant(omega)]);
        let eh = (cfg.eh_target[i] / cfg.eh_efficiency[i]).sqrt();
        p.add_rotated_soc("eh", zt.clone(), LinExpr::constant(1.0) - LinExpr::var(rho[i]), vec![LinExpr::constant(eh)]);
        z_exprs.push(z);
        zt_exprs.push(zt);
    }
    p.set_objective(objective);
    let sol = solve(&p, DEFAULT_TOL)?;
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Ok(None),
        SolveStatus::Unbounded => return Err(Error::NumericalFailure("rescaling program is unbounded".into())),
        SolveStatus::NumericalFailure => return Err(Error::NumericalFailure("rescaling program".into())),
    }
    let x = &sol.x;
    Ok(Some(RescaleSolution {
        phi: phi.iter().map(|&v| x[v].max(0.0)).collect(),
        ps_ratios: rho.iter().map(|&v| x[v].clamp(0.0, 1.0)).collect(),
        z: z_exprs.iter().map(|e| e.eval(x)).collect(),
        z_tilde: zt_exprs.iter().map(|e| e.eval(x)).collect(),
        objective: sol.objective,
    }))
}

const PHI_MAX: f64 = 1e6;
const PHI_MIN: f64 = 1e-12;
const PHI_REL_TOL: f64 = 1e-8;

/// Feasible splitting interval of every user at relay scale `phi`.
fn rho_intervals(phi: f64, a: &[f64], b: &[f64], cfg: &SystemConfig) -> Option<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(a.len());
    for k in 0..a.len() {
        let margin = phi * a[k] - cfg.antenna_noise[k];
        let omega2 = cfg.circuit_noise[k];
        let lo = if omega2 > 0.0 {
            if margin <= 0.0 {
                return None;
            }
            omega2 / margin
        } else if margin < 0.0 {
            return None;
        } else {
            0.0
        };
        let received = phi * b[k] + cfg.antenna_noise[k];
        let hi = if cfg.eh_target[k] > 0.0 {
            if received <= 0.0 {
                return None;
            }
            1.0 - cfg.eh_target[k] / (cfg.eh_efficiency[k] * received)
        } else {
            1.0
        };
        if lo > hi || hi < 0.0 || lo > 1.0 {
            return None;
        }
        out.push((lo.max(0.0), hi.min(1.0)));
    }
    Some(out)
}

/// Smallest common scale of the relay matrix meeting every worst-case
/// target, with the splitting ratios at the centre of each feasible
/// interval. `Ok(None)` when no scale up to the bracket limit works.
pub fn rescale_relay(beamformers: &[CVec], w: &CMat, g: &CMat, bounds: &WorstCaseBounds, cfg: &SystemConfig) -> Result<Option<RescaleSolution>> {
    let k = beamformers.len();
    let a: Vec<f64> = (0..k)
        .map(|i| {
            let interference: f64 = (0..k).filter(|&j| j != i).map(|j| bounds.v[i][j]).sum();
            bounds.u[i][i] / cfg.sinr_target[i] - interference - cfg.relay_noise * bounds.w_bar[i]
        })
        .collect();
    let b: Vec<f64> = (0..k).map(|i| bounds.u[i].iter().sum::<f64>() + cfg.relay_noise * bounds.w_tilde[i]).collect();
    let feasible = |phi: f64| rho_intervals(phi, &a, &b, cfg).is_some();

    let mut hi = 1.0;
    let mut lo;
    if feasible(hi) {
        lo = hi;
        while feasible(lo) {
            hi = lo;
            lo *= 0.5;
            if lo < PHI_MIN {
                lo = 0.0;
                break;
            }
        }
    } else {
        lo = hi;
        while !feasible(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > PHI_MAX {
                log::debug!("relay rescaling hit the upper bracket {PHI_MAX:e}");
                return Ok(None);
            }
        }
    }
    while lo > 0.0 && hi - lo > PHI_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let phi = hi;
    let intervals = rho_intervals(phi, &a, &b, cfg).ok_or_else(|| Error::NumericalFailure("relay bisection lost feasibility".into()))?;
    let wg = w * g;
    let signal: f64 = beamformers.iter().map(|f| (&wg * f).norm_squared()).sum();
    let bs: f64 = beamformers.iter().map(|f| f.norm_squared()).sum();
    Ok(Some(RescaleSolution {
        phi: vec![phi],
        ps_ratios: intervals.iter().map(|(l, h)| 0.5 * (l + h)).collect(),
        z: a.iter().zip(&cfg.antenna_noise).map(|(a, s)| phi * a - s).collect(),
        z_tilde: b.iter().zip(&cfg.antenna_noise).map(|(b, s)| phi * b + s).collect(),
        objective: bs + phi * (signal + cfg.relay_noise * w.norm_squared()),
    }))
}
