use std::time::Instant;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
    SupportedConeT::{NonnegativeConeT, PSDTriangleConeT, SecondOrderConeT, ZeroConeT},
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::program::{ConeKind, ConicProgram};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-7;

pub const DEFAULT_MAX_ITER: u32 = 200;

/// Factoriser, static regularisation and equilibration tried in turn after a numerical breakdown.
const RETRY_LADDER: [(&str, f64, bool); 2] = [("qdldl", 1e-7, false), ("qdldl", 1e-6, true)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: u32,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

/// Primal-dual result of a cone program.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Set when the backend only met its relaxed stopping criteria.
    pub reduced_accuracy: bool,
    pub x: Vec<f64>,
    /// Dual vector per block, in the block's own row layout. For an
    /// infeasible status this is the infeasibility certificate.
    pub duals: Vec<Vec<f64>>,
    pub objective: f64,
    pub dual_objective: f64,
    pub iterations: u32,
    pub solve_time: f64,
}

impl ConicSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Dual of a PSD block as a full symmetric matrix.
    pub fn dual_psd(&self, block: usize) -> DMatrix<f64> {
        svec_to_mat(&self.duals[block])
    }

    /// Lower-right corner of the complex dual of a Hermitian LMI that was
    /// added through [`ConicProgram::add_hermitian_lmi`].
    pub fn dual_hermitian_corner(&self, block: usize) -> f64 {
        let z = self.dual_psd(block);
        let n = z.nrows() / 2;
        z[(n - 1, n - 1)] + z[(2 * n - 1, 2 * n - 1)]
    }
}

/// Unpacks a scaled upper-triangle vector into a symmetric matrix.
pub fn svec_to_mat(v: &[f64]) -> DMatrix<f64> {
    let side = (((8 * v.len() + 1) as f64).sqrt() as usize - 1) / 2;
    let mut m = DMatrix::zeros(side, side);
    let mut idx = 0;
    for col in 0..side {
        for row in 0..=col {
            let val = if row == col { v[idx] } else { v[idx] * std::f64::consts::FRAC_1_SQRT_2 };
            m[(row, col)] = val;
            m[(col, row)] = val;
            idx += 1;
        }
    }
    m
}

/// A numerical backend able to solve a [`ConicProgram`].
pub trait ConicBackend {
    fn solve(&self, program: &ConicProgram, settings: &SolverSettings) -> Result<ConicSolution>;
}

/// Interior-point backend built on the Clarabel solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClarabelBackend;

impl ConicBackend for ClarabelBackend {
    fn solve(&self, program: &ConicProgram, settings: &SolverSettings) -> Result<ConicSolution> {
        program.validate()?;
        let n = program.num_vars();
        let mut rows_i = Vec::new();
        let mut cols_j = Vec::new();
        let mut vals = Vec::new();
        let mut b = Vec::new();
        let mut cones: Vec<SupportedConeT<f64>> = Vec::with_capacity(program.blocks().len());
        let mut offsets = Vec::with_capacity(program.blocks().len());
        for block in program.blocks() {
            offsets.push(b.len());
            for row in &block.rows {
                let r = b.len();
                for &(v, c) in &row.terms {
                    rows_i.push(r);
                    cols_j.push(v);
                    vals.push(-c);
                }
                b.push(row.constant);
            }
            cones.push(match block.cone {
                ConeKind::Zero => ZeroConeT(block.rows.len()),
                ConeKind::Nonnegative => NonnegativeConeT(block.rows.len()),
                ConeKind::SecondOrder => SecondOrderConeT(block.rows.len()),
                ConeKind::Psd { side } => PSDTriangleConeT(side),
            });
        }
        let m = b.len();
        let a = CscMatrix::new_from_triplets(m, n, rows_i, cols_j, vals);
        let p = CscMatrix::<f64>::zeros((n, n));
        let mut q = vec![0.0; n];
        for &(v, c) in &program.objective().terms {
            q[v] += c;
        }

        let mut s = DefaultSettings::<f64>::default();
        s.verbose = false;
        s.max_iter = settings.max_iter;
        s.tol_gap_abs = settings.tol;
        s.tol_gap_rel = settings.tol;
        s.tol_feas = settings.tol;
        s.chordal_decomposition_enable = false;
        s.presolve_enable = false;
        s.direct_solve_method = "faer".to_string();

        let start = Instant::now();
        let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, s.clone())
            .map_err(|e| Error::InvalidProgram(format!("backend rejected program: {e:?}")))?;
        solver.solve();
        // Factorisation breakdowns are often cured by a different KKT setup.
        for (method, reg, equilibrate) in RETRY_LADDER {
            if !matches!(solver.solution.status, SolverStatus::NumericalError | SolverStatus::InsufficientProgress) {
                break;
            }
            log::debug!("backend stopped with {:?} after {} iterations, retrying with {method}", solver.solution.status, solver.solution.iterations);
            s.direct_solve_method = method.to_string();
            s.static_regularization_constant = reg;
            s.equilibrate_enable = equilibrate;
            solver = DefaultSolver::new(&p, &q, &a, &b, &cones, s.clone())
                .map_err(|e| Error::InvalidProgram(format!("backend rejected program: {e:?}")))?;
            solver.solve();
        }
        let sol = &solver.solution;
        let (status, reduced) = match sol.status {
            SolverStatus::Solved => (SolveStatus::Optimal, false),
            SolverStatus::AlmostSolved => (SolveStatus::Optimal, true),
            SolverStatus::PrimalInfeasible => (SolveStatus::Infeasible, false),
            SolverStatus::AlmostPrimalInfeasible => (SolveStatus::Infeasible, true),
            SolverStatus::DualInfeasible => (SolveStatus::Unbounded, false),
            SolverStatus::AlmostDualInfeasible => (SolveStatus::Unbounded, true),
            other => {
                log::debug!("backend stopped with {other:?} after {} iterations", sol.iterations);
                (SolveStatus::NumericalFailure, false)
            }
        };
        let duals = program
            .blocks()
            .iter()
            .zip(&offsets)
            .map(|(blk, &off)| sol.z[off..off + blk.rows.len()].to_vec())
            .collect();
        let c0 = program.objective().constant;
        Ok(ConicSolution {
            status,
            reduced_accuracy: reduced,
            x: sol.x.clone(),
            duals,
            objective: sol.obj_val + c0,
            dual_objective: sol.obj_val_dual + c0,
            iterations: sol.iterations,
            solve_time: start.elapsed().as_secs_f64(),
        })
    }
}

/// Solves with the shipped backend at the given tolerance.
pub fn solve(program: &ConicProgram, tol: f64) -> Result<ConicSolution> {
    ClarabelBackend.solve(program, &SolverSettings { tol, ..SolverSettings::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::LinExpr;

    #[test]
    fn unit_soc() {
        let mut p = ConicProgram::new();
        let t = p.add_var("t");
        p.add_soc("soc", LinExpr::var(t), vec![LinExpr::constant(1.0)]);
        p.set_objective(LinExpr::var(t));
        let s = solve(&p, DEFAULT_TOL).unwrap();
        assert!(s.is_optimal());
        assert!((s.x[t] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn psd_lower_bound() {
        let mut p = ConicProgram::new();
        let x = p.add_vars("x", 3);
        let e = |i: usize, j: usize| match (i, j) {
            (0, 0) => LinExpr::var(x[0]) - 1.0,
            (1, 1) => LinExpr::var(x[2]) - 1.0,
            _ => LinExpr::var(x[1]),
        };
        p.add_psd_real("X-I", 2, e);
        p.set_objective(LinExpr::var(x[0]) + LinExpr::var(x[2]));
        let s = solve(&p, DEFAULT_TOL).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective - 2.0).abs() < 1e-6);
        assert!((s.objective - s.dual_objective).abs() < 1e-6);
    }

    #[test]
    fn infeasible_toy() {
        let mut p = ConicProgram::new();
        let x = p.add_var("x");
        p.add_nonneg("x>=1", LinExpr::var(x) - 1.0);
        p.add_nonneg("x<=0", -LinExpr::var(x));
        p.set_objective(LinExpr::var(x));
        let s = solve(&p, DEFAULT_TOL).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
    }

    #[test]
    fn hermitian_dual_corner_is_multiplier() {
        // min t s.t. [[1, 0], [0, t - 2]] >= 0 has optimum 2 and corner dual 1.
        let mut p = ConicProgram::new();
        let t = p.add_var("t");
        let mut m = crate::conic::CAffMat::zeros(2);
        m.get_mut(0, 0).constant = crate::linalg::ONE;
        m.get_mut(1, 1).add_real(&(LinExpr::var(t) - 2.0), crate::linalg::ONE);
        let b = p.add_hermitian_lmi("lmi", &m);
        p.set_objective(LinExpr::var(t));
        let s = solve(&p, DEFAULT_TOL).unwrap();
        assert!((s.x[t] - 2.0).abs() < 1e-6);
        assert!((s.dual_hermitian_corner(b) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn svec_roundtrip() {
        let v = [1.0, 2.0 * std::f64::consts::SQRT_2, 3.0];
        let m = svec_to_mat(&v);
        assert!((m[(0, 1)] - 2.0).abs() < 1e-15);
        assert_eq!(m[(0, 1)], m[(1, 0)]);
        assert_eq!(m[(1, 1)], 3.0);
    }
}
