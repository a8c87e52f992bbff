use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear-unit system parameters. Powers are in milliwatts, ratios are linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_bs_antennas: usize,
    pub num_rs_antennas: usize,
    pub num_users: usize,
    pub relay_noise: f64,
    pub antenna_noise: Vec<f64>,
    pub circuit_noise: Vec<f64>,
    pub eh_efficiency: Vec<f64>,
    pub sinr_target: Vec<f64>,
    pub eh_target: Vec<f64>,
    pub power_weight: f64,
}

/// Flat configuration document as read from JSON, in dBm / dB units.
///
/// Counts are signed so that malformed documents can be rejected with a
/// configuration error instead of a parse error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawConfig {
    pub nt: i64,
    pub nr: i64,
    pub k: i64,
    pub sigma_r_dbm: f64,
    pub sigma_dbm: f64,
    pub omega_dbm: f64,
    pub xi: f64,
    pub gamma_db: f64,
    pub psi_dbm: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RawConfig {
    /// The desk-scale configuration used throughout the simulations.
    fn default() -> Self {
        Self {
            nt: 4,
            nr: 4,
            k: 3,
            sigma_r_dbm: -30.0,
            sigma_dbm: -30.0,
            omega_dbm: -20.0,
            xi: 1.0,
            gamma_db: 10.0,
            psi_dbm: 0.0,
            eta: 0.1,
            seed: 0,
        }
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a raw dBm/dB document into a validated [`SystemConfig`].
pub fn to_linear_config(raw: &RawConfig) -> Result<SystemConfig> {
    if raw.nt <= 0 || raw.nr <= 0 || raw.k <= 0 {
        return Err(Error::Config(format!(
            "antenna and user counts must be positive (nt={}, nr={}, k={})",
            raw.nt, raw.nr, raw.k
        )));
    }
    let (nt, nr, k) = (raw.nt as usize, raw.nr as usize, raw.k as usize);
    let values = [raw.sigma_r_dbm, raw.sigma_dbm, raw.omega_dbm, raw.xi, raw.gamma_db, raw.psi_dbm, raw.eta];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite parameter".into()));
    }
    if raw.eta < 0.0 {
        return Err(Error::Config(format!("eta must be non-negative, got {}", raw.eta)));
    }
    let cfg = SystemConfig {
        num_bs_antennas: nt,
        num_rs_antennas: nr,
        num_users: k,
        relay_noise: dbm_to_mw(raw.sigma_r_dbm),
        antenna_noise: vec![dbm_to_mw(raw.sigma_dbm); k],
        circuit_noise: vec![dbm_to_mw(raw.omega_dbm); k],
        eh_efficiency: vec![raw.xi; k],
        sinr_target: vec![db_to_linear(raw.gamma_db); k],
        eh_target: vec![dbm_to_mw(raw.psi_dbm); k],
        power_weight: 1.0,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.num_users;
        if k == 0 || self.num_bs_antennas == 0 || self.num_rs_antennas == 0 {
            return Err(Error::Config("antenna and user counts must be positive".into()));
        }
        if k > self.num_bs_antennas.min(self.num_rs_antennas) {
            return Err(Error::Config(format!(
                "K={} exceeds min(Nt, Nr)={}",
                k,
                self.num_bs_antennas.min(self.num_rs_antennas)
            )));
        }
        let per_user = [
            ("antenna_noise", &self.antenna_noise),
            ("circuit_noise", &self.circuit_noise),
            ("eh_efficiency", &self.eh_efficiency),
            ("sinr_target", &self.sinr_target),
            ("eh_target", &self.eh_target),
        ];
        for (name, v) in per_user {
            if v.len() != k {
                return Err(Error::Config(format!("{name} has {} entries, expected {k}", v.len())));
            }
        }
        let powers = self
            .antenna_noise
            .iter()
            .chain(&self.circuit_noise)
            .chain(&self.eh_target)
            .chain(std::iter::once(&self.relay_noise));
        if powers.clone().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::Config("powers must be finite and non-negative".into()));
        }
        if self.eh_efficiency.iter().any(|x| !(*x > 0.0 && *x <= 1.0)) {
            return Err(Error::Config("eh_efficiency must lie in (0, 1]".into()));
        }
        if self.sinr_target.iter().any(|g| !(*g > 0.0) || !g.is_finite()) {
            return Err(Error::Config("sinr targets must be positive".into()));
        }
        if self.power_weight != 1.0 {
            return Err(Error::Config("power_weight is fixed to 1".into()));
        }
        Ok(())
    }

    /// Copy with every user's SINR target replaced.
    pub fn with_sinr_target(&self, gamma: f64) -> Self {
        let mut c = self.clone();
        c.sinr_target = vec![gamma; self.num_users];
        c
    }

    /// Copy with every user's EH target replaced.
    pub fn with_eh_target(&self, psi: f64) -> Self {
        let mut c = self.clone();
        c.eh_target = vec![psi; self.num_users];
        c
    }
}
