//! Affine expressions over the real decision variables of a [`ConicProgram`].
//!
//! [`ConicProgram`]: super::ConicProgram

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::linalg::{CMat, CVec, C64, ZERO};

/// Real affine expression `constant + sum coef * x[var]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn var(v: usize) -> Self {
        Self { terms: vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn term(v: usize, coef: f64) -> Self {
        Self { terms: vec![(v, coef)], constant: 0.0 }
    }

    pub fn add_term(&mut self, v: usize, coef: f64) {
        if coef != 0.0 {
            self.terms.push((v, coef));
        }
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &LinExpr, scale: f64) {
        if scale == 0.0 {
            return;
        }
        self.terms.extend(other.terms.iter().map(|&(v, c)| (v, c * scale)));
        self.constant += other.constant * scale;
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, c)| c * x[v]).sum::<f64>()
    }

    /// Merges duplicate variables and drops exact zeros.
    pub fn compress(&mut self) {
        if self.terms.len() < 2 {
            self.terms.retain(|t| t.1 != 0.0);
            return;
        }
        self.terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|t| t.1 != 0.0);
        self.terms = out;
    }
}

impl From<f64> for LinExpr {
    fn from(c: f64) -> Self {
        LinExpr::constant(c)
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        self.add_scaled(&rhs, 1.0);
        self
    }
}

impl Add<f64> for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: f64) -> LinExpr {
        self.constant += rhs;
        self
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(mut self, rhs: LinExpr) -> LinExpr {
        self.add_scaled(&rhs, -1.0);
        self
    }
}

impl Sub<f64> for LinExpr {
    type Output = LinExpr;
    fn sub(mut self, rhs: f64) -> LinExpr {
        self.constant -= rhs;
        self
    }
}

impl Mul<f64> for LinExpr {
    type Output = LinExpr;
    fn mul(self, rhs: f64) -> LinExpr {
        self.scaled(rhs)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scaled(-1.0)
    }
}

impl AddAssign for LinExpr {
    fn add_assign(&mut self, rhs: LinExpr) {
        self.add_scaled(&rhs, 1.0);
    }
}

/// Complex-valued affine expression over real variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CLinExpr {
    pub terms: Vec<(usize, C64)>,
    pub constant: C64,
}

impl CLinExpr {
    pub fn zero() -> Self {
        Self { terms: Vec::new(), constant: ZERO }
    }

    pub fn constant(c: C64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn add_term(&mut self, v: usize, coef: C64) {
        if coef != ZERO {
            self.terms.push((v, coef));
        }
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &CLinExpr, scale: C64) {
        if scale == ZERO {
            return;
        }
        self.terms.extend(other.terms.iter().map(|&(v, c)| (v, c * scale)));
        self.constant += other.constant * scale;
    }

    /// `self += scale * other` for a real expression.
    pub fn add_real(&mut self, other: &LinExpr, scale: C64) {
        if scale == ZERO {
            return;
        }
        self.terms.extend(other.terms.iter().map(|&(v, c)| (v, scale * c)));
        self.constant += scale * other.constant;
    }

    pub fn re(&self) -> LinExpr {
        let mut e = LinExpr::constant(self.constant.re);
        for &(v, c) in &self.terms {
            e.add_term(v, c.re);
        }
        e.compress();
        e
    }

    pub fn im(&self) -> LinExpr {
        let mut e = LinExpr::constant(self.constant.im);
        for &(v, c) in &self.terms {
            e.add_term(v, c.im);
        }
        e.compress();
        e
    }

    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|&(v, c)| (v, c.conj())).collect(), constant: self.constant.conj() }
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.constant + self.terms.iter().map(|&(v, c)| c * x[v]).sum::<C64>()
    }

    pub fn compress(&mut self) {
        self.terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(usize, C64)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|t| t.1 != ZERO);
        self.terms = out;
    }
}

impl From<&LinExpr> for CLinExpr {
    fn from(e: &LinExpr) -> Self {
        let mut out = CLinExpr::zero();
        out.add_real(e, C64::new(1.0, 0.0));
        out
    }
}

/// Square matrix whose entries are complex affine expressions. Intended to
/// hold Hermitian LMIs before embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct CAffMat {
    n: usize,
    data: Vec<CLinExpr>,
}

impl CAffMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![CLinExpr::zero(); n * n] }
    }

    pub fn from_const(m: &CMat) -> Self {
        let n = m.nrows();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j].constant = m[(i, j)];
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &CLinExpr {
        &self.data[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut CLinExpr {
        &mut self.data[i * self.n + j]
    }

    /// `self += scale * m`.
    pub fn add_const(&mut self, m: &CMat, scale: f64) {
        for i in 0..self.n {
            for j in 0..self.n {
                self.data[i * self.n + j].constant += m[(i, j)] * scale;
            }
        }
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &CAffMat, scale: f64) {
        let s = C64::new(scale, 0.0);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.add_scaled(b, s);
        }
    }

    /// `self += scale * x * m` for a scalar real expression `x` and constant `m`.
    pub fn add_expr_times(&mut self, x: &LinExpr, m: &CMat, scale: f64) {
        for i in 0..self.n {
            for j in 0..self.n {
                let c = m[(i, j)] * scale;
                self.data[i * self.n + j].add_real(x, c);
            }
        }
    }

    /// `self += scale * B F B^H` for a Hermitian variable `F`.
    pub fn add_congruence(&mut self, f: &HermVar, b: &CMat, scale: f64) {
        assert_eq!(b.nrows(), self.n);
        assert_eq!(b.ncols(), f.dim());
        for r in 0..self.n {
            for s in 0..self.n {
                let entry = &mut self.data[r * self.n + s];
                for i in 0..f.dim() {
                    let c = b[(r, i)] * b[(s, i)].conj() * scale;
                    entry.add_term(f.diag(i), c);
                    for j in (i + 1)..f.dim() {
                        let (x, y) = f.off(i, j);
                        let p = b[(r, i)] * b[(s, j)].conj();
                        let q = b[(r, j)] * b[(s, i)].conj();
                        entry.add_term(x, (p + q) * scale);
                        entry.add_term(y, C64::new(0.0, 1.0) * (p - q) * scale);
                    }
                }
            }
        }
    }

    /// `L^H self L` for a constant `L` of shape `n x m`.
    pub fn congruence_by(&self, l: &CMat) -> CAffMat {
        assert_eq!(l.nrows(), self.n);
        let m = l.ncols();
        let mut out = CAffMat::zeros(m);
        for a in 0..m {
            for b in 0..m {
                let entry = &mut out.data[a * m + b];
                for i in 0..self.n {
                    let li = l[(i, a)].conj();
                    if li == ZERO {
                        continue;
                    }
                    for j in 0..self.n {
                        let c = li * l[(j, b)];
                        if c != ZERO {
                            entry.add_scaled(&self.data[i * self.n + j], c);
                        }
                    }
                }
                entry.compress();
            }
        }
        out
    }

    pub fn compress(&mut self) {
        self.data.iter_mut().for_each(CLinExpr::compress);
    }

    pub fn eval(&self, x: &[f64]) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.data[i * self.n + j].eval(x))
    }
}

/// Hermitian matrix variable parameterised by its real diagonal and the real
/// and imaginary parts of its strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct HermVar {
    n: usize,
    diag: Vec<usize>,
    // (re, im) for i < j, row-major over the upper triangle
    off: Vec<(usize, usize)>,
}

impl HermVar {
    pub(crate) fn new(n: usize, diag: Vec<usize>, off: Vec<(usize, usize)>) -> Self {
        Self { n, diag, off }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diag(&self, i: usize) -> usize {
        self.diag[i]
    }

    /// Variable indices of `(Re F_ij, Im F_ij)` for `i < j`.
    pub fn off(&self, i: usize, j: usize) -> (usize, usize) {
        debug_assert!(i < j);
        let idx = i * self.n - i * (i + 1) / 2 + (j - i - 1);
        self.off[idx]
    }

    /// Entry `F_ij` as an expression.
    pub fn entry(&self, i: usize, j: usize) -> CLinExpr {
        let mut e = CLinExpr::zero();
        if i == j {
            e.add_term(self.diag[i], C64::new(1.0, 0.0));
        } else {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let (x, y) = self.off(a, b);
            e.add_term(x, C64::new(1.0, 0.0));
            e.add_term(y, C64::new(0.0, if i < j { 1.0 } else { -1.0 }));
        }
        e
    }

    /// `tr(F M)` for Hermitian `M`.
    pub fn trace_with(&self, m: &CMat) -> LinExpr {
        let mut e = LinExpr::zero();
        for i in 0..self.n {
            e.add_term(self.diag[i], m[(i, i)].re);
            for j in (i + 1)..self.n {
                let (x, y) = self.off(i, j);
                let mji = m[(j, i)];
                e.add_term(x, 2.0 * mji.re);
                e.add_term(y, -2.0 * mji.im);
            }
        }
        e
    }

    /// `a^H F a`.
    pub fn quad(&self, a: &CVec) -> LinExpr {
        let mut e = LinExpr::zero();
        for i in 0..self.n {
            e.add_term(self.diag[i], a[i].norm_sqr());
            for j in (i + 1)..self.n {
                let (x, y) = self.off(i, j);
                let c = a[i].conj() * a[j];
                e.add_term(x, 2.0 * c.re);
                e.add_term(y, -2.0 * c.im);
            }
        }
        e
    }

    pub fn trace(&self) -> LinExpr {
        let mut e = LinExpr::zero();
        for &d in &self.diag {
            e.add_term(d, 1.0);
        }
        e
    }

    /// Affine-matrix view of the variable itself.
    pub fn as_affine(&self) -> CAffMat {
        let mut m = CAffMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                *m.get_mut(i, j) = self.entry(i, j);
            }
        }
        m
    }

    /// Reads the matrix value out of a primal solution vector.
    pub fn value(&self, x: &[f64]) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.entry(i, j).eval(x))
    }
}
