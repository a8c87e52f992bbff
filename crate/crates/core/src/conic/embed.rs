use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, CMat};

/// Hermitian tolerance accepted by [`embed_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]` of a Hermitian
/// matrix. The embedding has the spectrum of `H` with every multiplicity
/// doubled, so it is PSD exactly when `H` is.
pub fn embed_hermitian(h: &CMat) -> Result<DMatrix<f64>> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", h.nrows(), h.ncols())));
    }
    let defect = hermitian_defect(h);
    if defect > HERMITIAN_TOL * (1.0 + h.norm()) {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.nrows();
    Ok(DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    }))
}

/// Inverse of [`embed_hermitian`] for a real matrix that has the embedded
/// structure. General symmetric inputs are projected onto it.
pub fn unembed(m: &DMatrix<f64>) -> CMat {
    let n = m.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        let re = 0.5 * (m[(i, j)] + m[(i + n, j + n)]);
        let im = 0.5 * (m[(i + n, j)] - m[(i, j + n)]);
        crate::linalg::C64::new(re, im)
    })
}
