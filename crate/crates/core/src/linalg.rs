//! Small complex linear-algebra helpers shared by the design modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted in
/// descending order with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let sym = hermitian_part(m);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `(M + M^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entry of `|M - M^H|`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Principal component `sqrt(l1) v1` of a PSD matrix together with the
/// spectral ratio `l2 / l1` (zero for a 1x1 or exactly rank-one input).
pub fn principal_component(m: &CMat) -> (CVec, f64) {
    let (values, vectors) = hermitian_eigen(m);
    let top = values[0].max(0.0);
    let ratio = if values.len() > 1 && top > 0.0 {
        values[1].max(0.0) / top
    } else {
        0.0
    };
    (vectors.column(0).scale(top.sqrt()), ratio)
}

/// `a^H M a` for Hermitian `M`, returned as a real number.
pub fn quad_form(m: &CMat, a: &CVec) -> f64 {
    a.dotc(&(m * a)).re
}

/// Circularly-symmetric complex Gaussian vector with unit-variance entries.
pub fn complex_gaussian_vec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVec::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(s * re, s * im)
    })
}

/// Matrix with i.i.d. unit-variance circularly-symmetric complex Gaussian entries.
pub fn complex_gaussian_mat<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(s * re, s * im)
    })
}

/// Column-major vectorisation.
pub fn vec_col_major(m: &CMat) -> CVec {
    CVec::from_iterator(m.len(), m.iter().copied())
}

/// Inverse of [`vec_col_major`] for a square `n x n` matrix.
pub fn unvec_square(v: &CVec, n: usize) -> CMat {
    CMat::from_iterator(n, n, v.iter().copied())
}

/// Real matrix lifted to complex.
pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigen_sorted_descending() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 3.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let v = vecs.column(0).into_owned();
        let mv = &m * &v;
        assert!((mv - v.scale(3.0)).norm() < 1e-12);
    }

    #[test]
    fn principal_component_of_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = complex_gaussian_vec(4, &mut rng);
        let m = &f * f.adjoint();
        let (pc, ratio) = principal_component(&m);
        assert!(ratio < 1e-12);
        assert!(((&pc * pc.adjoint()) - m).norm() < 1e-10);
    }

    #[test]
    fn vec_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = complex_gaussian_mat(3, 3, &mut rng);
        assert_eq!(unvec_square(&vec_col_major(&w), 3), w);
        // column-major: entry (r, c) lands at c * n + r
        assert_eq!(vec_col_major(&w)[3 + 2], w[(2, 1)]);
    }
}
