use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SystemConfig;
use crate::linalg::{complex_gaussian_mat, complex_gaussian_vec, singular_values, CMat, CVec, C64};

/// First-phase channel, true and estimated second-phase channels and the
/// per-user error radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    /// BS to RS channel, `Nr x Nt`.
    pub g: CMat,
    pub h_true: Vec<CVec>,
    pub h_est: Vec<CVec>,
    pub eta: Vec<f64>,
}

/// Selects which second-phase channel an evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichChannel {
    True,
    Estimated,
}

impl ChannelSet {
    pub fn num_users(&self) -> usize {
        self.h_est.len()
    }

    pub fn channel(&self, k: usize, which: WhichChannel) -> &CVec {
        match which {
            WhichChannel::True => &self.h_true[k],
            WhichChannel::Estimated => &self.h_est[k],
        }
    }

    /// Builds a set with perfect estimates (`h_est == h_true`, zero radii).
    pub fn perfect(g: CMat, h: Vec<CVec>) -> Self {
        let k = h.len();
        Self { g, h_est: h.clone(), h_true: h, eta: vec![0.0; k] }
    }

    /// Same channels with different uncertainty radii. The estimates are
    /// kept, so the true channels may fall outside the new balls.
    pub fn with_eta(&self, eta: &[f64]) -> Self {
        Self { eta: eta.to_vec(), ..self.clone() }
    }

    /// Stacked estimated channels `H = [h_1, ..., h_K]^H` (`K x Nr`).
    pub fn stacked_estimate(&self) -> CMat {
        stack_adjoint(&self.h_est)
    }

    /// Stable 64-bit fingerprint of the channel realisation, used to check
    /// that paired algorithms saw identical inputs.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: f64| {
            for b in x.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        };
        self.g.iter().for_each(|z| {
            eat(z.re);
            eat(z.im)
        });
        for v in self.h_true.iter().chain(&self.h_est) {
            v.iter().for_each(|z| {
                eat(z.re);
                eat(z.im)
            });
        }
        self.eta.iter().for_each(|&e| eat(e));
        h
    }
}

pub(crate) fn stack_adjoint(hs: &[CVec]) -> CMat {
    let nr = hs.first().map_or(0, |h| h.len());
    CMat::from_fn(hs.len(), nr, |k, r| hs[k][r].conj())
}

/// Error vector drawn uniformly from the complex ball of radius `eta`.
pub fn sample_in_ball<R: Rng + ?Sized>(n: usize, eta: f64, rng: &mut R) -> CVec {
    let u: f64 = 1.0 - rng.gen::<f64>();
    sample_direction(n, rng).scale(eta * u.powf(1.0 / (2 * n) as f64))
}

/// Error vector drawn uniformly from the sphere of radius `eta`.
pub fn sample_on_sphere<R: Rng + ?Sized>(n: usize, eta: f64, rng: &mut R) -> CVec {
    sample_direction(n, rng).scale(eta)
}

fn sample_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        });
        let norm = v.norm();
        if norm > 1e-300 {
            return v.unscale(norm);
        }
    }
}

/// Draws a Rayleigh channel realisation. The true second-phase channels are
/// unit-variance Gaussian and the estimates are `h_k - e_k` with `e_k`
/// uniform in the `eta_k` ball.
pub fn sample_channels<R: Rng + ?Sized>(cfg: &SystemConfig, eta: &[f64], rng: &mut R) -> ChannelSet {
    let (nt, nr, k) = (cfg.num_bs_antennas, cfg.num_rs_antennas, cfg.num_users);
    let g = complex_gaussian_mat(nr, nt, rng);
    let h_true: Vec<CVec> = (0..k).map(|_| complex_gaussian_vec(nr, rng)).collect();
    let radius = |i: usize| eta.get(i).copied().or_else(|| eta.last().copied()).unwrap_or(0.0);
    let h_est = h_true
        .iter()
        .enumerate()
        .map(|(i, h)| {
            if radius(i) > 0.0 {
                h - sample_in_ball(nr, radius(i), rng)
            } else {
                h.clone()
            }
        })
        .collect();
    ChannelSet { g, h_true, h_est, eta: (0..k).map(radius).collect() }
}

/// Relative threshold on `sigma_K / sigma_1` for the rank test.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Sufficient condition for non-robust feasibility: `rank(H G) = K`,
/// evaluated on the true channels.
pub fn check_feasibility_rank(channels: &ChannelSet) -> bool {
    let h = stack_adjoint(&channels.h_true);
    let hg = &h * &channels.g;
    let k = channels.num_users();
    let s = singular_values(&hg);
    if s.len() < k || s[0] <= 0.0 {
        return false;
    }
    s[k - 1] / s[0] > RANK_THRESHOLD
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{to_linear_config, RawConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        to_linear_config(&RawConfig::default()).unwrap()
    }

    #[test]
    fn zero_radius_keeps_estimate_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = sample_channels(&cfg(), &[0.0], &mut rng);
        assert_eq!(ch.h_true, ch.h_est);
    }

    #[test]
    fn errors_stay_inside_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let ch = sample_channels(&cfg(), &[0.1], &mut rng);
            for k in 0..3 {
                assert!((&ch.h_true[k] - &ch.h_est[k]).norm() <= 0.1 + 1e-12);
            }
        }
    }

    #[test]
    fn identical_seed_identical_channels() {
        let a = sample_channels(&cfg(), &[0.1], &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_channels(&cfg(), &[0.1], &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn rank_test_examples() {
        let id = CMat::identity(2, 2);
        let e0 = CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let e1 = CVec::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(check_feasibility_rank(&ChannelSet::perfect(id.clone(), vec![e0.clone(), e1])));
        assert!(!check_feasibility_rank(&ChannelSet::perfect(id, vec![e0.clone(), e0])));
    }
}
