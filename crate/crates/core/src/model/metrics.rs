//! Power, SINR and harvested-energy evaluation.

use super::{ChannelSet, SystemConfig, Transceiver, WhichChannel};
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};

/// Total BS transmit power `sum_k ||f_k||^2`.
pub fn bs_power(tx: &Transceiver) -> f64 {
    tx.beamformers.iter().map(|f| f.norm_squared()).sum()
}

/// Relay transmit power `sum_k ||W G f_k||^2 + sigma_r^2 ||W||_F^2`.
pub fn rs_power(tx: &Transceiver, channels: &ChannelSet, cfg: &SystemConfig) -> Result<f64> {
    let w = tx.relay.matrix();
    check_dims(&w, channels, tx)?;
    let wg = &w * &channels.g;
    let signal: f64 = tx.beamformers.iter().map(|f| (&wg * f).norm_squared()).sum();
    Ok(signal + cfg.relay_noise * w.norm_squared())
}

pub fn total_power(tx: &Transceiver, channels: &ChannelSet, cfg: &SystemConfig) -> Result<f64> {
    Ok(bs_power(tx) + rs_power(tx, channels, cfg)?)
}

fn check_dims(w: &CMat, channels: &ChannelSet, tx: &Transceiver) -> Result<()> {
    if w.ncols() != channels.g.nrows() {
        return Err(Error::Dimension(format!("W has {} columns, G has {} rows", w.ncols(), channels.g.nrows())));
    }
    if let Some(f) = tx.beamformers.iter().find(|f| f.len() != channels.g.ncols()) {
        return Err(Error::Dimension(format!("beamformer length {} vs Nt={}", f.len(), channels.g.ncols())));
    }
    Ok(())
}

/// Received-power breakdown at one user for a given channel vector.
#[derive(Debug, Clone)]
pub(crate) struct LinkTerms {
    /// `|h^H W G f_j|^2` for every stream `j`.
    pub stream: Vec<f64>,
    /// `||h^H W||^2`.
    pub relay_gain: f64,
}

pub(crate) fn link_terms(h: &CVec, w: &CMat, g: &CMat, beamformers: &[CVec]) -> LinkTerms {
    let hw = w.ad_mul(h).adjoint();
    let hwg = &hw * g;
    let stream = beamformers.iter().map(|f| (&hwg * f)[(0, 0)].norm_sqr()).collect();
    LinkTerms { stream, relay_gain: hw.norm_squared() }
}

pub(crate) fn sinr_from_terms(k: usize, t: &LinkTerms, rho: f64, cfg: &SystemConfig) -> f64 {
    let omega = cfg.circuit_noise[k];
    if rho == 0.0 && omega > 0.0 {
        return 0.0;
    }
    let interference: f64 = t.stream.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v).sum();
    let denom = rho * (interference + cfg.relay_noise * t.relay_gain + cfg.antenna_noise[k]) + omega;
    let num = rho * t.stream[k];
    if denom <= 0.0 {
        return if num > 0.0 { f64::INFINITY } else { 0.0 };
    }
    num / denom
}

pub(crate) fn eh_from_terms(k: usize, t: &LinkTerms, rho: f64, cfg: &SystemConfig) -> f64 {
    let received: f64 = t.stream.iter().sum::<f64>() + cfg.relay_noise * t.relay_gain + cfg.antenna_noise[k];
    cfg.eh_efficiency[k] * (1.0 - rho) * received
}

fn ratio(tx: &Transceiver, k: usize) -> Result<f64> {
    let value = *tx
        .ps_ratios
        .get(k)
        .ok_or_else(|| Error::Dimension(format!("no power-splitting ratio for user {k}")))?;
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidRatio { user: k, value });
    }
    Ok(value)
}

/// SINR of user `k`; `which` selects the true or estimated channel.
pub fn sinr(k: usize, tx: &Transceiver, channels: &ChannelSet, cfg: &SystemConfig, which: WhichChannel) -> Result<f64> {
    let rho = ratio(tx, k)?;
    let w = tx.relay.matrix();
    check_dims(&w, channels, tx)?;
    let t = link_terms(channels.channel(k, which), &w, &channels.g, &tx.beamformers);
    Ok(sinr_from_terms(k, &t, rho, cfg))
}

/// Harvested power of user `k` in milliwatts.
pub fn harvested_power(
    k: usize,
    tx: &Transceiver,
    channels: &ChannelSet,
    cfg: &SystemConfig,
    which: WhichChannel,
) -> Result<f64> {
    let rho = ratio(tx, k)?;
    let w = tx.relay.matrix();
    check_dims(&w, channels, tx)?;
    let t = link_terms(channels.channel(k, which), &w, &channels.g, &tx.beamformers);
    Ok(eh_from_terms(k, &t, rho, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::model::RelayWeight;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scalar_cfg(k: usize, relay_noise: f64, antenna: f64, omega: f64) -> SystemConfig {
        SystemConfig {
            num_bs_antennas: 2,
            num_rs_antennas: 2,
            num_users: k,
            relay_noise,
            antenna_noise: vec![antenna; k],
            circuit_noise: vec![omega; k],
            eh_efficiency: vec![1.0; k],
            sinr_target: vec![1.0; k],
            eh_target: vec![0.0; k],
            power_weight: 1.0,
        }
    }

    #[test]
    fn bs_power_sums_norms() {
        let tx = Transceiver {
            beamformers: vec![CVec::from_vec(vec![c(1.0), c(0.0)]), CVec::from_vec(vec![c(0.0), c(2.0)])],
            relay: RelayWeight::FullMatrix(CMat::identity(2, 2)),
            ps_ratios: vec![0.5, 0.5],
        };
        assert_eq!(bs_power(&tx), 5.0);
    }

    #[test]
    fn relay_power_identity_channel() {
        let e0 = CVec::from_vec(vec![c(1.0), c(0.0)]);
        let ch = ChannelSet::perfect(CMat::identity(2, 2), vec![e0.clone()]);
        let tx = Transceiver { beamformers: vec![e0], relay: RelayWeight::FullMatrix(CMat::identity(2, 2)), ps_ratios: vec![1.0] };
        let cfg = scalar_cfg(1, 0.01, 1.0, 0.0);
        assert!((rs_power(&tx, &ch, &cfg).unwrap() - 1.02).abs() < 1e-12);
        let zero = Transceiver { relay: RelayWeight::ScaledPermutation { index: 0, perm: vec![1, 0], beta: 0.0 }, ..tx };
        assert_eq!(rs_power(&zero, &ch, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn single_user_sinr_and_eh() {
        let h = CVec::from_vec(vec![c(1.0), c(0.0)]);
        let ch = ChannelSet::perfect(CMat::identity(2, 2), vec![h]);
        let tx = Transceiver {
            beamformers: vec![CVec::from_vec(vec![c(2.0), c(0.0)])],
            relay: RelayWeight::FullMatrix(CMat::identity(2, 2)),
            ps_ratios: vec![1.0],
        };
        let cfg = scalar_cfg(1, 0.0, 1.0, 0.0);
        assert!((sinr(0, &tx, &ch, &cfg, WhichChannel::Estimated).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(harvested_power(0, &tx, &ch, &cfg, WhichChannel::True).unwrap(), 0.0);

        let tx2 = Transceiver { beamformers: vec![CVec::from_vec(vec![c(1.0), c(0.0)])], ps_ratios: vec![0.0], ..tx };
        assert!((harvested_power(0, &tx2, &ch, &cfg, WhichChannel::True).unwrap() - 2.0).abs() < 1e-12);
        let cfg_omega = scalar_cfg(1, 0.0, 1.0, 0.1);
        assert_eq!(sinr(0, &tx2, &ch, &cfg_omega, WhichChannel::True).unwrap(), 0.0);
    }

    #[test]
    fn rejects_ratio_out_of_range() {
        let h = CVec::from_vec(vec![c(1.0), c(0.0)]);
        let ch = ChannelSet::perfect(CMat::identity(2, 2), vec![h.clone()]);
        let tx = Transceiver { beamformers: vec![h], relay: RelayWeight::FullMatrix(CMat::identity(2, 2)), ps_ratios: vec![1.5] };
        let cfg = scalar_cfg(1, 0.0, 1.0, 0.0);
        assert!(matches!(sinr(0, &tx, &ch, &cfg, WhichChannel::True), Err(Error::InvalidRatio { .. })));
    }
}
