use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};

/// Relay amplify-and-forward weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RelayWeight {
    FullMatrix(CMat),
    /// `W = sqrt(beta) T` where `T[i, perm[i]] = 1`.
    ScaledPermutation { index: usize, perm: Vec<usize>, beta: f64 },
}

impl RelayWeight {
    /// Materialises the relay matrix.
    pub fn matrix(&self) -> CMat {
        match self {
            RelayWeight::FullMatrix(w) => w.clone(),
            RelayWeight::ScaledPermutation { perm, beta, .. } => {
                permutation_matrix(perm).scale(beta.max(0.0).sqrt())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RelayWeight::FullMatrix(w) => w.nrows(),
            RelayWeight::ScaledPermutation { perm, .. } => perm.len(),
        }
    }
}

/// Permutation matrix with a single one at `(i, perm[i])` in every row.
pub fn permutation_matrix(perm: &[usize]) -> CMat {
    let n = perm.len();
    let mut t = CMat::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        t[(i, j)] = C64::new(1.0, 0.0);
    }
    t
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
}

/// Beamformers, relay weight and power-splitting ratios of one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transceiver {
    pub beamformers: Vec<CVec>,
    pub relay: RelayWeight,
    pub ps_ratios: Vec<f64>,
}

impl Transceiver {
    pub fn check(&self, nt: usize, nr: usize) -> Result<()> {
        if self.beamformers.len() != self.ps_ratios.len() {
            return Err(Error::Dimension(format!(
                "{} beamformers but {} ratios",
                self.beamformers.len(),
                self.ps_ratios.len()
            )));
        }
        if let Some(f) = self.beamformers.iter().find(|f| f.len() != nt) {
            return Err(Error::Dimension(format!("beamformer of length {} for Nt={nt}", f.len())));
        }
        if self.relay.dim() != nr {
            return Err(Error::Dimension(format!("relay of size {} for Nr={nr}", self.relay.dim())));
        }
        if let RelayWeight::ScaledPermutation { perm, beta, .. } = &self.relay {
            if !is_permutation(perm) || *beta < 0.0 {
                return Err(Error::Config("invalid scaled permutation".into()));
            }
        }
        for (user, &value) in self.ps_ratios.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidRatio { user, value });
            }
        }
        Ok(())
    }
}
