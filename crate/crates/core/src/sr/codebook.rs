//! Permutation codebooks for switched relaying.

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::model::{is_permutation, permutation_matrix, stack_adjoint};
use crate::rng::stream;

/// Largest relay size for which every permutation is scored.
pub const ENUMERATION_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookMethod {
    /// Largest sums of the top-K singular values of `H T G`.
    SumMax,
    /// Largest smallest singular value among the top K.
    MaxMin,
    /// Distinct uniformly drawn permutations plus the identity.
    Random { seed: u64 },
    /// Every permutation, in lexicographic order.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    /// Permutations in one-line notation, `T[i, perm[i]] = 1`.
    pub permutations: Vec<Vec<usize>>,
    pub method: CodebookMethod,
    /// Sum or minimum of the singular values for the scored methods,
    /// sum for the others.
    pub scores: Vec<f64>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.permutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutations.is_empty()
    }

    /// Codebook holding only the identity, the naive scaled-relay scheme.
    pub fn identity(nr: usize) -> Self {
        Self { permutations: vec![(0..nr).collect()], method: CodebookMethod::Exhaustive, scores: vec![f64::NAN] }
    }

    pub fn matrix(&self, l: usize) -> CMat {
        permutation_matrix(&self.permutations[l])
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Top-`k` singular values of `H T G` in descending order.
fn singular_values(h: &CMat, perm: &[usize], g: &CMat, k: usize) -> Vec<f64> {
    let m = h * permutation_matrix(perm) * g;
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.truncate(k);
    s
}

/// Builds a size-`b` codebook from the relay channel `g` (`Nr x Nt`) and
/// the estimated user channels. The identity is always a member.
pub fn build_codebook(g: &CMat, h_est: &[CVec], b: usize, method: CodebookMethod) -> Result<Codebook> {
    let nr = g.nrows();
    if b == 0 {
        return Err(Error::Config("codebook size must be at least 1".into()));
    }
    if (b as u128) > factorial(nr) {
        return Err(Error::Config(format!("codebook size {b} exceeds {nr}! permutations")));
    }
    let h = stack_adjoint(h_est);
    let k = h_est.len();
    let identity: Vec<usize> = (0..nr).collect();
    let sum = |p: &[usize]| singular_values(&h, p, g, k).iter().sum::<f64>();

    if let CodebookMethod::Random { seed } = method {
        let mut rng = stream(seed, 0);
        let mut perms = vec![identity.clone()];
        while perms.len() < b {
            let mut p = identity.clone();
            p.shuffle(&mut rng);
            if !perms.contains(&p) {
                perms.push(p);
            }
        }
        let scores = perms.iter().map(|p| sum(p)).collect();
        return Ok(Codebook { permutations: perms, method, scores });
    }

    if nr > ENUMERATION_CAP {
        return Err(Error::Config(format!("enumerating {nr}! permutations exceeds the cap of {ENUMERATION_CAP}; use the random method")));
    }
    let score = |p: &[usize]| -> f64 {
        match method {
            CodebookMethod::MaxMin => singular_values(&h, p, g, k).last().copied().unwrap_or(0.0),
            _ => sum(p),
        }
    };
    // Lexicographic enumeration makes the stable sort break ties by one-line notation.
    let mut scored: Vec<(Vec<usize>, f64)> = (0..nr).permutations(nr).map(|p| {
        let s = score(&p);
        (p, s)
    }).collect();
    if method == CodebookMethod::Exhaustive {
        let (permutations, scores) = scored.into_iter().unzip();
        return Ok(Codebook { permutations, method, scores });
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut chosen: Vec<(Vec<usize>, f64)> = scored.iter().take(b).cloned().collect();
    if !chosen.iter().any(|(p, _)| *p == identity) {
        let id = scored.iter().find(|(p, _)| *p == identity).cloned().expect("identity is enumerated");
        chosen.pop();
        chosen.push(id);
    }
    debug_assert!(chosen.iter().all(|(p, _)| is_permutation(p)));
    let (permutations, scores) = chosen.into_iter().unzip();
    Ok(Codebook { permutations, method, scores })
}
