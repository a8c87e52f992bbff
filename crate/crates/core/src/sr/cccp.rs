//! Non-robust latent design by the concave-convex procedure.
//!
//! With `W = sqrt(beta) T` and `phi = 1 / beta`, the SINR and EH constraints
//! become differences of convex functions of `r = (p, q, phi, f)`; each step
//! linearizes the subtracted pieces and solves the resulting SOCP.

use std::time::Instant;

use crate::ao::solve_bf_ps_nominal;
use crate::conic::{solve, ConicProgram, LinExpr, SolveStatus, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};
use crate::model::{permutation_matrix, total_power, ChannelSet, RelayWeight, SystemConfig, Transceiver};
use crate::{DesignOutcome, RecoveryAudit, TerminationReason};

/// Relay scales tried, in order, for the initial point.
pub const INIT_BETAS: [f64; 3] = [1.0, 4.0, 16.0];

/// Fixed data of one latent problem.
#[derive(Debug, Clone)]
pub struct Latent<'a> {
    pub index: usize,
    pub perm: Vec<usize>,
    pub channels: &'a ChannelSet,
    pub cfg: &'a SystemConfig,
    /// `a_k = G^H T^H h_k`, so that `h_k^H T G f = a_k^H f`.
    a: Vec<CVec>,
    h_norm2: Vec<f64>,
}

impl<'a> Latent<'a> {
    pub fn new(index: usize, perm: &[usize], channels: &'a ChannelSet, cfg: &'a SystemConfig) -> Self {
        let t = permutation_matrix(perm);
        let tg = &t * &channels.g;
        let a = channels.h_est.iter().map(|h| tg.ad_mul(h)).collect();
        let h_norm2 = channels.h_est.iter().map(|h| h.norm_squared()).collect();
        Self { index, perm: perm.to_vec(), channels, cfg, a, h_norm2 }
    }

    pub fn relay(&self, beta: f64) -> RelayWeight {
        RelayWeight::ScaledPermutation { index: self.index, perm: self.perm.clone(), beta }
    }

    /// `f^H G~_k f = |a_k^H f|^2`.
    fn gain(&self, k: usize, f: &CVec) -> f64 {
        self.a[k].dotc(f).norm_sqr()
    }
}

/// CCCP iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct CccpPoint {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub phi: f64,
    pub f: Vec<CVec>,
}

impl CccpPoint {
    /// Point of a transceiver with relay scale `beta`.
    pub fn from_design(f: Vec<CVec>, ps_ratios: &[f64], beta: f64) -> Self {
        let rho: Vec<f64> = ps_ratios.iter().map(|r| r.clamp(1e-12, 1.0 - 1e-12)).collect();
        Self { p: rho.iter().map(|r| 1.0 / r).collect(), q: rho.iter().map(|r| 1.0 / (1.0 - r)).collect(), phi: 1.0 / beta, f }
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.phi
    }

    /// `rho_k = 1 / p_k`, which keeps both constraints whenever
    /// `1/p + 1/q <= 1`.
    pub fn ps_ratios(&self) -> Vec<f64> {
        self.p.iter().map(|p| (1.0 / p).clamp(0.0, 1.0)).collect()
    }

    /// Total transmit power `sum ||f||^2 + (sum ||G f||^2 + sigma_r^2 Nr) / phi`.
    pub fn power(&self, g: &CMat, cfg: &SystemConfig) -> f64 {
        let bs: f64 = self.f.iter().map(|f| f.norm_squared()).sum();
        let relayed: f64 = self.f.iter().map(|f| (g * f).norm_squared()).sum();
        bs + (relayed + cfg.relay_noise * g.nrows() as f64) / self.phi
    }
}

/// SINR pieces `w_k` and `x_k`; the constraint is `w_k <= x_k`.
pub fn sinr_pieces(r: &CccpPoint, k: usize, lat: &Latent<'_>) -> (f64, f64) {
    let cfg = lat.cfg;
    let om2 = cfg.circuit_noise[k];
    let interference: f64 = (0..r.f.len()).filter(|&j| j != k).map(|j| lat.gain(k, &r.f[j])).sum();
    let w = interference + cfg.antenna_noise[k] * r.phi + cfg.relay_noise * lat.h_norm2[k] + 0.25 * om2 * (r.p[k] + r.phi).powi(2);
    let x = 0.25 * om2 * (r.p[k] - r.phi).powi(2) + lat.gain(k, &r.f[k]) / cfg.sinr_target[k];
    (w, x)
}

/// EH pieces `y_k` and `z_k`; the constraint is `y_k <= z_k`.
pub fn eh_pieces(r: &CccpPoint, k: usize, lat: &Latent<'_>) -> (f64, f64) {
    let cfg = lat.cfg;
    let c = cfg.eh_target[k] / (4.0 * cfg.eh_efficiency[k]);
    let y = c * (r.q[k] + r.phi).powi(2) - cfg.relay_noise * lat.h_norm2[k];
    let received: f64 = r.f.iter().map(|f| lat.gain(k, f)).sum();
    let z = received + cfg.antenna_noise[k] * r.phi + c * (r.q[k] - r.phi).powi(2);
    (y, z)
}

/// First-order expansion `value + 2 Re{grad^H (r - r0)}` of a real function
/// of `r`. Derivatives with respect to the real coordinates are halved so
/// that one formula covers real and complex parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    pub value: f64,
    pub grad_p: Vec<f64>,
    pub grad_q: Vec<f64>,
    pub grad_phi: f64,
    pub grad_f: Vec<CVec>,
}

impl Linearization {
    pub fn eval(&self, r0: &CccpPoint, r: &CccpPoint) -> f64 {
        let mut d = self.grad_phi * (r.phi - r0.phi);
        for k in 0..r.p.len() {
            d += self.grad_p[k] * (r.p[k] - r0.p[k]) + self.grad_q[k] * (r.q[k] - r0.q[k]);
            d += self.grad_f[k].dotc(&(&r.f[k] - &r0.f[k])).re;
        }
        self.value + 2.0 * d
    }
}

/// Linearizations of `x_k` and `z_k` around `r0`.
pub fn linearize(r0: &CccpPoint, k: usize, lat: &Latent<'_>) -> (Linearization, Linearization) {
    let cfg = lat.cfg;
    let n = r0.p.len();
    let nt = r0.f[0].len();
    let om2 = cfg.circuit_noise[k];
    let c = cfg.eh_target[k] / (4.0 * cfg.eh_efficiency[k]);
    // G~_k f = a_k (a_k^H f).
    let gf = |f: &CVec| &lat.a[k] * lat.a[k].dotc(f);

    let mut x = Linearization {
        value: sinr_pieces(r0, k, lat).1,
        grad_p: vec![0.0; n],
        grad_q: vec![0.0; n],
        grad_phi: -0.25 * om2 * (r0.p[k] - r0.phi),
        grad_f: vec![CVec::zeros(nt); n],
    };
    x.grad_p[k] = 0.25 * om2 * (r0.p[k] - r0.phi);
    x.grad_f[k] = gf(&r0.f[k]) / C64::from(cfg.sinr_target[k]);

    let mut z = Linearization {
        value: eh_pieces(r0, k, lat).1,
        grad_p: vec![0.0; n],
        grad_q: vec![0.0; n],
        grad_phi: 0.5 * cfg.antenna_noise[k] - c * (r0.q[k] - r0.phi),
        grad_f: r0.f.iter().map(gf).collect(),
    };
    z.grad_q[k] = c * (r0.q[k] - r0.phi);
    (x, z)
}

/// Real and imaginary variable indices of a complex vector.
#[derive(Debug, Clone)]
pub(crate) struct CVars {
    pub re: Vec<usize>,
    pub im: Vec<usize>,
}

impl CVars {
    pub fn new(p: &mut ConicProgram, name: &str, n: usize) -> Self {
        Self { re: p.add_vars(&format!("{name}.re"), n), im: p.add_vars(&format!("{name}.im"), n) }
    }

    /// `(Re, Im)` of `a^H f`.
    pub fn inner(&self, a: &CVec) -> (LinExpr, LinExpr) {
        let mut re = LinExpr::zero();
        let mut im = LinExpr::zero();
        for i in 0..a.len() {
            re.add_term(self.re[i], a[i].re);
            re.add_term(self.im[i], a[i].im);
            im.add_term(self.im[i], a[i].re);
            im.add_term(self.re[i], -a[i].im);
        }
        (re, im)
    }

    /// Real and imaginary parts of `M f`, interleaved.
    pub fn mapped(&self, m: &CMat) -> Vec<LinExpr> {
        (0..m.nrows())
            .flat_map(|r| {
                let row = m.row(r).adjoint();
                let (re, im) = self.inner(&row);
                [re, im]
            })
            .collect()
    }

    pub fn components(&self) -> Vec<LinExpr> {
        self.re.iter().chain(&self.im).map(|&v| LinExpr::var(v)).collect()
    }

    pub fn value(&self, x: &[f64]) -> CVec {
        CVec::from_iterator(self.re.len(), self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(x[r], x[i])))
    }
}

/// `2 Re{c^H (a^H f)}` as an affine expression, the linear term of
/// `f0^H G~ f` with `c = a^H f0`.
fn cross_term(vars: &CVars, a: &CVec, c: C64) -> LinExpr {
    let (re, im) = vars.inner(a);
    re * (2.0 * c.re) + im * (2.0 * c.im)
}

/// One CCCP step: solves the convexified program around `r0` in the SOCP
/// form with auxiliary `d_k, d~_k, e_k, e~_k` and power epigraphs
/// `P1, P2, P3`. Returns the new point and its objective value.
pub fn cccp_step(r0: &CccpPoint, lat: &Latent<'_>) -> Result<(CccpPoint, f64)> {
    let cfg = lat.cfg;
    let g = &lat.channels.g;
    let n = r0.p.len();
    let nt = g.ncols();
    let mut p = ConicProgram::new();
    let pv = p.add_vars("p", n);
    let qv = p.add_vars("q", n);
    let phi = p.add_var("phi");
    let f: Vec<CVars> = (0..n).map(|k| CVars::new(&mut p, &format!("f{k}"), nt)).collect();
    let p1 = p.add_var("P1");
    let p2 = p.add_var("P2");
    let p3 = p.add_var("P3");
    for k in 0..n {
        p.add_ps_pair(&format!("ps{k}"), pv[k], qv[k]);
    }

    let all_f: Vec<LinExpr> = f.iter().flat_map(CVars::components).collect();
    p.add_rotated_soc("P1", LinExpr::var(p1), LinExpr::constant(1.0), all_f);
    let all_gf: Vec<LinExpr> = f.iter().flat_map(|fk| fk.mapped(g)).collect();
    p.add_rotated_soc("P2", LinExpr::var(p2), LinExpr::var(phi), all_gf);
    p.add_hyperbolic("P3", LinExpr::var(p3), LinExpr::var(phi), cfg.relay_noise * g.nrows() as f64)?;

    for k in 0..n {
        let a = &lat.a[k];
        let gamma = cfg.sinr_target[k];
        let om2 = cfg.circuit_noise[k];
        let sigma2 = cfg.antenna_noise[k];
        let c_eh = cfg.eh_target[k] / (4.0 * cfg.eh_efficiency[k]);
        let dp = r0.p[k] - r0.phi;
        let dq = r0.q[k] - r0.phi;
        let own = a.dotc(&r0.f[k]);

        let d = cfg.relay_noise * lat.h_norm2[k] + 0.25 * om2 * dp * dp + own.norm_sqr() / gamma;
        let mut d_t = LinExpr::term(phi, -sigma2);
        d_t.add_scaled(&(LinExpr::var(pv[k]) - LinExpr::var(phi)), 0.5 * om2 * dp);
        d_t.add_scaled(&cross_term(&f[k], a, own), 1.0 / gamma);
        let mut w = Vec::with_capacity(2 * n - 1);
        for j in (0..n).filter(|&j| j != k) {
            let (re, im) = f[j].inner(a);
            w.push(re);
            w.push(im);
        }
        w.push((LinExpr::var(pv[k]) + LinExpr::var(phi)) * (0.5 * om2.sqrt()));
        p.add_rotated_soc(&format!("sinr{k}"), d_t - d, LinExpr::constant(1.0), w);

        let received: f64 = r0.f.iter().map(|fj| a.dotc(fj).norm_sqr()).sum();
        let e = -cfg.relay_noise * lat.h_norm2[k] + received + c_eh * dq * dq;
        let mut e_t = LinExpr::term(phi, sigma2);
        e_t.add_scaled(&(LinExpr::var(qv[k]) - LinExpr::var(phi)), 2.0 * c_eh * dq);
        for j in 0..n {
            e_t.add_scaled(&cross_term(&f[j], a, a.dotc(&r0.f[j])), 1.0);
        }
        let harvest = (LinExpr::var(qv[k]) + LinExpr::var(phi)) * c_eh.sqrt();
        p.add_rotated_soc(&format!("eh{k}"), e_t - e, LinExpr::constant(1.0), vec![harvest]);
    }
    p.set_objective(LinExpr::var(p1) + LinExpr::var(p2) + LinExpr::var(p3));

    let sol = solve(&p, DEFAULT_TOL)?;
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Err(Error::Infeasible("CCCP step".into())),
        SolveStatus::Unbounded => return Err(Error::NumericalFailure("CCCP step is unbounded".into())),
        SolveStatus::NumericalFailure => return Err(Error::NumericalFailure("CCCP step".into())),
    }
    let x = &sol.x;
    let point = CccpPoint {
        p: pv.iter().map(|&v| x[v]).collect(),
        q: qv.iter().map(|&v| x[v]).collect(),
        phi: x[phi],
        f: f.iter().map(|fk| fk.value(x)).collect(),
    };
    Ok((point, sol.objective))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CccpOptions {
    pub delta: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for CccpOptions {
    fn default() -> Self {
        Self { delta: 2e-3, max_iter: 50, trials: crate::rankone::DEFAULT_TRIALS, seed: 0 }
    }
}

/// Initial point: the beamformer / splitting problem at `W = sqrt(beta) T`
/// for the first workable `beta` of [`INIT_BETAS`].
pub fn initial_point(lat: &Latent<'_>, opts: &CccpOptions) -> Result<Option<(CccpPoint, f64, RecoveryAudit)>> {
    for beta in INIT_BETAS {
        match solve_bf_ps_nominal(&lat.relay(beta), lat.channels, lat.cfg, opts.trials, opts.seed) {
            Ok(step) => {
                let tx = step.transceiver;
                return Ok(Some((CccpPoint::from_design(tx.beamformers, &tx.ps_ratios, beta), step.power, step.audit)));
            }
            Err(e @ (Error::Infeasible(_) | Error::RecoveryFailed { .. } | Error::NumericalFailure(_))) => {
                log::debug!("latent {} at beta = {beta}: {e}", lat.index);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Runs CCCP from the initial point until the power change drops below
/// `delta` or `max_iter` steps have been taken.
pub fn design_latent_cccp(lat: &Latent<'_>, opts: &CccpOptions) -> Result<DesignOutcome> {
    let start = Instant::now();
    let Some((point, power, audit)) = initial_point(lat, opts)? else {
        return Ok(DesignOutcome::infeasible(start.elapsed().as_secs_f64()));
    };
    Ok(refine_cccp(lat, point, power, vec![audit], opts, start))
}

/// CCCP iterations from a given feasible point.
pub(crate) fn refine_cccp(
    lat: &Latent<'_>,
    mut point: CccpPoint,
    mut power: f64,
    recoveries: Vec<RecoveryAudit>,
    opts: &CccpOptions,
    start: Instant,
) -> DesignOutcome {
    let g = &lat.channels.g;
    let mut trace = vec![power];
    let mut termination = TerminationReason::IterationCap;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let next = match cccp_step(&point, lat) {
            Ok((next, _)) => next,
            Err(e) => {
                log::warn!("CCCP step {it} of latent {} failed from a feasible point: {e}", lat.index);
                termination = TerminationReason::InfeasibleSubproblem;
                break;
            }
        };
        let next_power = next.power(g, lat.cfg);
        if next_power > power * (1.0 + 1e-6) {
            termination = TerminationReason::PowerIncrease;
            break;
        }
        let change = (power - next_power).abs();
        point = next;
        power = next_power;
        trace.push(power);
        if change <= opts.delta {
            termination = TerminationReason::Tolerance;
            break;
        }
    }
    let transceiver = Transceiver { beamformers: point.f.clone(), relay: lat.relay(point.beta()), ps_ratios: point.ps_ratios() };
    let total = total_power(&transceiver, lat.channels, lat.cfg).unwrap_or(power);
    DesignOutcome {
        transceiver: Some(transceiver),
        total_power: total,
        power_trace: trace,
        iterations,
        converged: matches!(termination, TerminationReason::Tolerance | TerminationReason::PowerIncrease),
        termination,
        wall_time: start.elapsed().as_secs_f64(),
        recoveries,
        l_opt: Some(lat.index),
        beta: Some(point.beta()),
    }
}
