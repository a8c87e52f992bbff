use std::fmt::Write as _;

use super::expr::{CAffMat, HermVar, LinExpr};
use crate::error::{Error, Result};

/// Cone attached to one constraint block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    /// Every row equals zero.
    Zero,
    /// Every row is non-negative.
    Nonnegative,
    /// First row bounds the Euclidean norm of the remaining rows.
    SecondOrder,
    /// Rows are the scaled upper triangle (column-major, off-diagonals times
    /// `sqrt(2)`) of a real symmetric matrix of the given side.
    Psd { side: usize },
}

impl ConeKind {
    /// Number of rows a block of this cone must have, when that is fixed.
    pub fn rows(&self) -> Option<usize> {
        match self {
            ConeKind::Psd { side } => Some(side * (side + 1) / 2),
            _ => None,
        }
    }
}

/// One constraint block: the affine rows must lie in the cone.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub label: String,
    pub cone: ConeKind,
    pub rows: Vec<LinExpr>,
}

/// Linear-objective cone program `min c^T x + c0` over products of the
/// zero, non-negative, second-order and PSD cones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConicProgram {
    names: Vec<String>,
    objective: LinExpr,
    blocks: Vec<Block>,
}

impl ConicProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn var_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn add_vars(&mut self, prefix: &str, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.add_var(format!("{prefix}[{i}]"))).collect()
    }

    /// Declares an `n x n` Hermitian variable. No cone constraint is added;
    /// see [`ConicProgram::add_psd_hermitian`].
    pub fn add_hermitian(&mut self, name: &str, n: usize) -> HermVar {
        let diag = (0..n).map(|i| self.add_var(format!("{name}[{i},{i}]"))).collect();
        let mut off = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let re = self.add_var(format!("re {name}[{i},{j}]"));
                let im = self.add_var(format!("im {name}[{i},{j}]"));
                off.push((re, im));
            }
        }
        HermVar::new(n, diag, off)
    }

    /// Constrains a Hermitian variable to be positive semidefinite.
    pub fn add_psd_hermitian(&mut self, label: &str, f: &HermVar) -> usize {
        self.add_hermitian_lmi(label, &f.as_affine())
    }

    pub fn set_objective(&mut self, objective: LinExpr) {
        let mut objective = objective;
        objective.compress();
        self.objective = objective;
    }

    fn push(&mut self, label: &str, cone: ConeKind, mut rows: Vec<LinExpr>) -> usize {
        rows.iter_mut().for_each(LinExpr::compress);
        self.blocks.push(Block { label: label.to_string(), cone, rows });
        self.blocks.len() - 1
    }

    /// `expr >= 0`.
    pub fn add_nonneg(&mut self, label: &str, expr: LinExpr) -> usize {
        self.push(label, ConeKind::Nonnegative, vec![expr])
    }

    /// `expr == 0`.
    pub fn add_equality(&mut self, label: &str, expr: LinExpr) -> usize {
        self.push(label, ConeKind::Zero, vec![expr])
    }

    /// `||xs|| <= t`.
    pub fn add_soc(&mut self, label: &str, t: LinExpr, xs: Vec<LinExpr>) -> usize {
        let mut rows = Vec::with_capacity(xs.len() + 1);
        rows.push(t);
        rows.extend(xs);
        self.push(label, ConeKind::SecondOrder, rows)
    }

    /// `||xs||^2 <= a b` with `a, b >= 0`, written as `||[2 xs, a - b]|| <= a + b`.
    pub fn add_rotated_soc(&mut self, label: &str, a: LinExpr, b: LinExpr, xs: Vec<LinExpr>) -> usize {
        let mut rows: Vec<LinExpr> = xs.into_iter().map(|x| x * 2.0).collect();
        rows.push(a.clone() - b.clone());
        self.add_soc(label, a + b, rows)
    }

    /// `a b >= s` with `a, b >= 0` and a constant `s > 0`, written as
    /// `||[2 sqrt(s), a - b]|| <= a + b`.
    pub fn add_hyperbolic(&mut self, label: &str, a: LinExpr, b: LinExpr, s: f64) -> Result<usize> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidProgram(format!("hyperbolic constraint needs s > 0, got {s}")));
        }
        let rows = vec![LinExpr::constant(2.0 * s.sqrt()), a.clone() - b.clone()];
        Ok(self.add_soc(label, a + b, rows))
    }

    /// Encodes `p, q >= 1` and `1/p + 1/q <= 1` through auxiliary `u, v` with
    /// `u + v <= 1`, `u p >= 1` and `v q >= 1`.
    pub fn add_ps_pair(&mut self, label: &str, p: usize, q: usize) {
        let u = self.add_var(format!("{label}.u"));
        let v = self.add_var(format!("{label}.v"));
        self.add_nonneg(&format!("{label}.p>=1"), LinExpr::var(p) - 1.0);
        self.add_nonneg(&format!("{label}.q>=1"), LinExpr::var(q) - 1.0);
        self.add_nonneg(&format!("{label}.u+v<=1"), LinExpr::constant(1.0) - LinExpr::var(u) - LinExpr::var(v));
        self.add_hyperbolic(&format!("{label}.up>=1"), LinExpr::var(u), LinExpr::var(p), 1.0)
            .expect("constant is positive");
        self.add_hyperbolic(&format!("{label}.vq>=1"), LinExpr::var(v), LinExpr::var(q), 1.0)
            .expect("constant is positive");
    }

    /// Real symmetric LMI given by its upper triangle (`entry(i, j)`, `i <= j`).
    pub fn add_psd_real(&mut self, label: &str, side: usize, mut entry: impl FnMut(usize, usize) -> LinExpr) -> usize {
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut rows = Vec::with_capacity(side * (side + 1) / 2);
        for col in 0..side {
            for row in 0..=col {
                let e = entry(row, col);
                rows.push(if row == col { e } else { e * sqrt2 });
            }
        }
        self.push(label, ConeKind::Psd { side }, rows)
    }

    /// Hermitian LMI `M(x) >= 0`, embedded as the real LMI
    /// `[[Re M, -Im M], [Im M, Re M]] >= 0`. Only the upper triangle of `M`
    /// is read.
    pub fn add_hermitian_lmi(&mut self, label: &str, m: &CAffMat) -> usize {
        let n = m.dim();
        let upper = |i: usize, j: usize| -> (LinExpr, LinExpr) {
            if i <= j {
                let e = m.get(i, j);
                (e.re(), e.im())
            } else {
                let e = m.get(j, i);
                (e.re(), -e.im())
            }
        };
        self.add_psd_real(label, 2 * n, |r, c| {
            if c < n {
                upper(r, c).0
            } else if r >= n {
                upper(r - n, c - n).0
            } else {
                -upper(r, c - n).1
            }
        })
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.eval(x)
    }

    /// Checks block shapes and variable references.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if let Some(&(v, _)) = self.objective.terms.iter().find(|t| t.0 >= n) {
            return Err(Error::InvalidProgram(format!("objective references variable {v} of {n}")));
        }
        for b in &self.blocks {
            if b.rows.is_empty() {
                return Err(Error::InvalidProgram(format!("block '{}' is empty", b.label)));
            }
            if let Some(r) = b.cone.rows() {
                if r != b.rows.len() {
                    return Err(Error::InvalidProgram(format!(
                        "block '{}' has {} rows, cone needs {r}",
                        b.label,
                        b.rows.len()
                    )));
                }
            }
            for row in &b.rows {
                if let Some(&(v, _)) = row.terms.iter().find(|t| t.0 >= n) {
                    return Err(Error::InvalidProgram(format!("block '{}' references variable {v} of {n}", b.label)));
                }
                if !row.constant.is_finite() || row.terms.iter().any(|t| !t.1.is_finite()) {
                    return Err(Error::InvalidProgram(format!("block '{}' has a non-finite coefficient", b.label)));
                }
            }
        }
        Ok(())
    }

    /// Sparse triplet dump, one nonzero per line as `block row col value`.
    /// Column `-1` holds the row constant; block `-1` holds the objective.
    pub fn to_triplets(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vars {} blocks {}", self.num_vars(), self.blocks.len());
        for (bi, b) in self.blocks.iter().enumerate() {
            let _ = writeln!(out, "# block {bi} {:?} {}", b.cone, b.label);
        }
        for &(v, c) in &self.objective.terms {
            let _ = writeln!(out, "-1 0 {v} {c:e}");
        }
        if self.objective.constant != 0.0 {
            let _ = writeln!(out, "-1 0 -1 {:e}", self.objective.constant);
        }
        for (bi, b) in self.blocks.iter().enumerate() {
            for (ri, row) in b.rows.iter().enumerate() {
                for &(v, c) in &row.terms {
                    let _ = writeln!(out, "{bi} {ri} {v} {c:e}");
                }
                if row.constant != 0.0 {
                    let _ = writeln!(out, "{bi} {ri} -1 {:e}", row.constant);
                }
            }
        }
        out
    }
}
