#![allow(dead_code)]

use swipt_relay::model::{sample_channels, to_linear_config, ChannelSet, RawConfig, SystemConfig};
use swipt_relay::rng::stream;

pub fn desk_config() -> SystemConfig {
    to_linear_config(&RawConfig::default()).unwrap()
}

pub fn scalar_config() -> SystemConfig {
    to_linear_config(&RawConfig { nt: 1, nr: 1, k: 1, ..RawConfig::default() }).unwrap()
}

pub fn channels(cfg: &SystemConfig, eta: f64, seed: u64) -> ChannelSet {
    sample_channels(cfg, &vec![eta; cfg.num_users], &mut stream(seed, 0))
}

/// Scalar link data `(|g|^2, |h|^2)` of a one-antenna, one-user instance.
pub fn scalar_gains(ch: &ChannelSet) -> (f64, f64) {
    (ch.g[(0, 0)].norm_sqr(), ch.h_est[0][0].norm_sqr())
}

/// Smallest `|f|^2` meeting both targets at relay gain `b = |w|^2` and
/// splitting ratio `rho`, or `None` if no beamformer power works.
pub fn min_bs_power(cfg: &SystemConfig, ga: f64, ha: f64, b: f64, rho: f64) -> Option<f64> {
    let (sr, s2, w2) = (cfg.relay_noise, cfg.antenna_noise[0], cfg.circuit_noise[0]);
    let gamma = cfg.sinr_target[0];
    let psi = cfg.eh_target[0] / cfg.eh_efficiency[0];
    if b <= 0.0 || rho <= 0.0 || rho >= 1.0 {
        return None;
    }
    let sinr = gamma * (rho * (sr * b * ha + s2) + w2) / (rho * b * ha * ga);
    let eh = (psi / (1.0 - rho) - s2) / (b * ha * ga) - sr / ga;
    Some(sinr.max(eh).max(0.0))
}

pub fn scalar_power(cfg: &SystemConfig, ga: f64, a: f64, b: f64) -> f64 {
    a + b * (ga * a + cfg.relay_noise)
}

/// Brute-force minimum of a 2-D function over a log-spaced `b` axis and a
/// linear `rho` axis, refined by repeated zooming around the best cell.
pub fn grid_min(mut objective: impl FnMut(f64, f64) -> f64, b_range: (f64, f64)) -> (f64, f64, f64) {
    let n = 400;
    let (mut lb0, mut lb1) = (b_range.0.ln(), b_range.1.ln());
    let (mut r0, mut r1) = (1e-6, 1.0 - 1e-6);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for _ in 0..6 {
        for i in 0..=n {
            let b = (lb0 + (lb1 - lb0) * i as f64 / n as f64).exp();
            for j in 0..=n {
                let rho = r0 + (r1 - r0) * j as f64 / n as f64;
                let v = objective(b, rho);
                if v < best.0 {
                    best = (v, b, rho);
                }
            }
        }
        let (db, dr) = (4.0 * (lb1 - lb0) / n as f64, 4.0 * (r1 - r0) / n as f64);
        let lb = best.1.ln();
        lb0 = (lb - db).max(b_range.0.ln());
        lb1 = (lb + db).min(b_range.1.ln());
        r0 = (best.2 - dr).max(1e-9);
        r1 = (best.2 + dr).min(1.0 - 1e-9);
    }
    best
}

/// Minimum total power of a one-antenna, one-user instance over
/// `(|f|^2, |w|^2, rho)`.
pub fn scalar_oracle(ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
    let (ga, ha) = scalar_gains(ch);
    let (v, _, _) = grid_min(
        |b, rho| min_bs_power(cfg, ga, ha, b, rho).map_or(f64::INFINITY, |a| scalar_power(cfg, ga, a, b)),
        (1e-6, 1e6),
    );
    v
}

/// Minimum over `(|f|^2, rho)` at a fixed relay gain `b`.
pub fn scalar_oracle_fixed_relay(ch: &ChannelSet, cfg: &SystemConfig, b: f64) -> f64 {
    let (ga, ha) = scalar_gains(ch);
    let (v, _, _) =
        grid_min(|_, rho| min_bs_power(cfg, ga, ha, b, rho).map_or(f64::INFINITY, |a| scalar_power(cfg, ga, a, b)), (1.0, 1.0 + 1e-12));
    v
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
