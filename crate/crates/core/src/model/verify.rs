use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::channels::{sample_in_ball, sample_on_sphere};
use super::metrics::{bs_power, eh_from_terms, link_terms, rs_power, sinr_from_terms};
use super::{ChannelSet, SystemConfig, Transceiver};
use crate::error::Result;

/// Relative constraint tolerance accepted by [`verify_design`].
pub const VERIFY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyMode {
    /// Evaluate at the estimated channels only.
    Nominal,
    /// Evaluate at the estimate plus `samples` error vectors per user ball,
    /// alternating interior and surface points.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Worst SINR seen per user.
    pub sinr: Vec<f64>,
    /// Worst harvested power seen per user, mW.
    pub harvested: Vec<f64>,
    pub bs_power: f64,
    pub rs_power: f64,
    pub total_power: f64,
    pub all_constraints_met: bool,
    /// Smallest relative margin `achieved / target - 1` over all constraints.
    pub worst_slack: f64,
    /// `max(0, -worst_slack)`.
    pub worst_violation: f64,
}

fn slack(achieved: f64, target: f64) -> f64 {
    if target <= 0.0 {
        f64::INFINITY
    } else {
        achieved / target - 1.0
    }
}

/// Checks the SINR and EH constraints of a design, either at the estimates
/// or against sampled channel errors.
pub fn verify_design(
    tx: &Transceiver,
    channels: &ChannelSet,
    cfg: &SystemConfig,
    mode: VerifyMode,
) -> Result<VerificationReport> {
    tx.check(cfg.num_bs_antennas, cfg.num_rs_antennas)?;
    let w = tx.relay.matrix();
    let k_users = cfg.num_users;
    let mut worst_sinr = vec![f64::INFINITY; k_users];
    let mut worst_eh = vec![f64::INFINITY; k_users];
    let mut evaluate = |k: usize, h: &crate::linalg::CVec| {
        let t = link_terms(h, &w, &channels.g, &tx.beamformers);
        let rho = tx.ps_ratios[k];
        worst_sinr[k] = worst_sinr[k].min(sinr_from_terms(k, &t, rho, cfg));
        worst_eh[k] = worst_eh[k].min(eh_from_terms(k, &t, rho, cfg));
    };
    for k in 0..k_users {
        evaluate(k, &channels.h_est[k]);
    }
    if let VerifyMode::Sampled { samples, seed } = mode {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nr = cfg.num_rs_antennas;
        for k in 0..k_users {
            let eta = channels.eta[k];
            for s in 0..samples {
                let e = if s % 2 == 0 { sample_on_sphere(nr, eta, &mut rng) } else { sample_in_ball(nr, eta, &mut rng) };
                evaluate(k, &(&channels.h_est[k] + e));
            }
        }
    }
    let mut worst_slack = f64::INFINITY;
    for k in 0..k_users {
        worst_slack = worst_slack.min(slack(worst_sinr[k], cfg.sinr_target[k]));
        worst_slack = worst_slack.min(slack(worst_eh[k], cfg.eh_target[k]));
    }
    let bs = bs_power(tx);
    let rs = rs_power(tx, channels, cfg)?;
    Ok(VerificationReport {
        sinr: worst_sinr,
        harvested: worst_eh,
        bs_power: bs,
        rs_power: rs,
        total_power: bs + rs,
        all_constraints_met: worst_slack >= -VERIFY_TOL,
        worst_slack,
        worst_violation: (-worst_slack).max(0.0),
    })
}
