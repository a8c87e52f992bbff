//! Worst-case received-power bounds over a norm-bounded channel error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMat, CVec};

/// Extremes of the per-user link terms over `||e_k|| <= eta_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseBounds {
    /// `u[k][j]`: minimum of `|(h_k + e)^H W G f_j|^2`.
    pub u: Vec<Vec<f64>>,
    /// `v[k][j]`: maximum of the same quantity.
    pub v: Vec<Vec<f64>>,
    /// Maximum of `||(h_k + e)^H W||^2`.
    pub w_bar: Vec<f64>,
    /// Minimum of `||(h_k + e)^H W||^2`.
    pub w_tilde: Vec<f64>,
}

/// Extremes of `|(h + e)^H b|^2` over the ball, as `(min, max)`.
pub fn worst_case_linear_bounds(h: &CVec, eta: f64, b: &CVec) -> (f64, f64) {
    let c = h.dotc(b).norm();
    let r = eta * b.norm();
    ((c - r).max(0.0).powi(2), (c + r).powi(2))
}

const SECULAR_TOL: f64 = 1e-13;
const SECULAR_MAX_ITER: usize = 500;

/// Extremes of `(h + e)^H M (h + e)` over `||e|| <= eta` for `M = W W^H`,
/// returned as `(max, min)`.
pub fn worst_case_quadratic_bounds(h: &CVec, eta: f64, w: &CMat) -> Result<(f64, f64)> {
    let m = w * w.adjoint();
    let nominal = (h.adjoint() * &m * h)[(0, 0)].re.max(0.0);
    if eta == 0.0 {
        return Ok((nominal, nominal));
    }
    let (lam, q) = hermitian_eigen(&m);
    let lam: Vec<f64> = lam.into_iter().map(|l| l.max(0.0)).collect();
    let c2: Vec<f64> = (0..lam.len()).map(|i| q.column(i).dotc(h).norm_sqr()).collect();
    Ok((quadratic_max(&lam, &c2, eta)?, quadratic_min(&lam, &c2, eta)?))
}

fn bisect(mut lo: f64, mut hi: f64, decreasing: impl Fn(f64) -> f64) -> Result<f64> {
    for _ in 0..SECULAR_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if decreasing(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= SECULAR_TOL * hi.abs().max(1e-300) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NumericalFailure("secular equation bisection did not converge".into()))
}

fn quadratic_max(lam: &[f64], c2: &[f64], eta: f64) -> Result<f64> {
    let lmax = lam[0];
    if lmax <= 0.0 {
        return Ok(0.0);
    }
    let eta2 = eta * eta;
    let top_tol = 1e-10 * lmax;
    let top: Vec<bool> = lam.iter().map(|&l| lmax - l <= top_tol).collect();
    let top_mass: f64 = c2.iter().zip(&top).filter(|(_, &t)| t).map(|(c, _)| c).sum();
    let total: f64 = c2.iter().sum();
    let err2 = |nu: f64| -> f64 {
        lam.iter().zip(c2).map(|(&l, &c)| if c == 0.0 { 0.0 } else { l * l * c / (nu - l).powi(2) }).sum()
    };
    let value = |nu: f64| -> f64 { lam.iter().zip(c2).map(|(&l, &c)| l * nu * nu * c / (nu - l).powi(2)).sum() };

    if top_mass <= 1e-24 * total.max(1e-300) {
        // Hard case candidate: the forcing vector misses the top eigenspace.
        let rest = |nu: f64| -> f64 {
            lam.iter()
                .zip(c2)
                .zip(&top)
                .filter(|(_, &t)| !t)
                .map(|((&l, &c), _)| l * l * c / (nu - l).powi(2))
                .sum()
        };
        let spent = rest(lmax);
        if spent <= eta2 {
            let base: f64 = lam
                .iter()
                .zip(c2)
                .zip(&top)
                .filter(|(_, &t)| !t)
                .map(|((&l, &c), _)| l * lmax * lmax * c / (lmax - l).powi(2))
                .sum();
            return Ok(base + lmax * (eta2 - spent));
        }
        let hi = lmax + lmax * total.sqrt() / eta;
        let nu = bisect(lmax, hi, |nu| rest(nu) - eta2)?;
        return Ok(value(nu));
    }
    let hi = lmax + lmax * total.sqrt() / eta;
    let nu = bisect(lmax, hi, |nu| err2(nu) - eta2)?;
    Ok(value(nu))
}

fn quadratic_min(lam: &[f64], c2: &[f64], eta: f64) -> Result<f64> {
    let lmax = lam[0];
    if lmax <= 0.0 {
        return Ok(0.0);
    }
    let eta2 = eta * eta;
    let range_tol = 1e-12 * lmax;
    let reach: f64 = lam.iter().zip(c2).filter(|(&l, _)| l > range_tol).map(|(_, c)| c).sum();
    if reach <= eta2 {
        return Ok(0.0);
    }
    let err2 = |nu: f64| -> f64 { lam.iter().zip(c2).map(|(&l, &c)| l * l * c / (l + nu).powi(2)).sum() };
    let hi = lmax * c2.iter().sum::<f64>().sqrt() / eta;
    let nu = bisect(0.0, hi, |nu| err2(nu) - eta2)?;
    Ok(lam.iter().zip(c2).map(|(&l, &c)| l * nu * nu * c / (l + nu).powi(2)).sum())
}

/// Bounds for every user and stream of a fixed rank-one design.
pub fn compute_bounds(h_est: &[CVec], eta: &[f64], w: &CMat, g: &CMat, beamformers: &[CVec]) -> Result<WorstCaseBounds> {
    let k = h_est.len();
    let streams: Vec<CVec> = beamformers.iter().map(|f| w * (g * f)).collect();
    let mut out = WorstCaseBounds {
        u: vec![vec![0.0; k]; k],
        v: vec![vec![0.0; k]; k],
        w_bar: vec![0.0; k],
        w_tilde: vec![0.0; k],
    };
    for (i, h) in h_est.iter().enumerate() {
        for (j, b) in streams.iter().enumerate() {
            let (u, v) = worst_case_linear_bounds(h, eta[i], b);
            out.u[i][j] = u;
            out.v[i][j] = v;
        }
        let (wb, wt) = worst_case_quadratic_bounds(h, eta[i], w)?;
        out.w_bar[i] = wb;
        out.w_tilde[i] = wt;
    }
    Ok(out)
}
