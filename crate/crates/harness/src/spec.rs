//! Experiment description as read from JSON.

use serde::{Deserialize, Serialize};
use swipt_relay::model::{to_linear_config, RawConfig, SystemConfig};
use swipt_relay::sr::CodebookMethod;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmTag {
    AoNominal,
    AoRobust,
    SrCccp,
    SrSubgradient,
    SrSimplifiedNominal,
    SrSimplifiedRobust,
}

impl AlgorithmTag {
    pub const ALL: [AlgorithmTag; 6] = [
        AlgorithmTag::AoNominal,
        AlgorithmTag::AoRobust,
        AlgorithmTag::SrCccp,
        AlgorithmTag::SrSubgradient,
        AlgorithmTag::SrSimplifiedNominal,
        AlgorithmTag::SrSimplifiedRobust,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmTag::AoNominal => "ao_nominal",
            AlgorithmTag::AoRobust => "ao_robust",
            AlgorithmTag::SrCccp => "sr_cccp",
            AlgorithmTag::SrSubgradient => "sr_subgradient",
            AlgorithmTag::SrSimplifiedNominal => "sr_simplified_nominal",
            AlgorithmTag::SrSimplifiedRobust => "sr_simplified_robust",
        }
    }

    pub fn is_robust(self) -> bool {
        matches!(self, AlgorithmTag::AoRobust | AlgorithmTag::SrSubgradient | AlgorithmTag::SrSimplifiedRobust)
    }

    pub fn is_sr(self) -> bool {
        !matches!(self, AlgorithmTag::AoNominal | AlgorithmTag::AoRobust)
    }

    /// Nominal counterpart of a robust algorithm.
    pub fn nominal_twin(self) -> Option<AlgorithmTag> {
        match self {
            AlgorithmTag::AoRobust => Some(AlgorithmTag::AoNominal),
            AlgorithmTag::SrSubgradient => Some(AlgorithmTag::SrCccp),
            AlgorithmTag::SrSimplifiedRobust => Some(AlgorithmTag::SrSimplifiedNominal),
            _ => None,
        }
    }
}

impl std::str::FromStr for AlgorithmTag {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown algorithm tag '{s}'")))
    }
}

impl std::fmt::Display for AlgorithmTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relay matrix the AO iteration starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    #[default]
    Identity,
    Gaussian,
    /// The relay weight of a simplified switched-relay design.
    Sr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    #[default]
    SumMax,
    MaxMin,
    Random,
    Exhaustive,
}

impl MethodKind {
    pub fn with_seed(self, seed: u64) -> CodebookMethod {
        match self {
            MethodKind::SumMax => CodebookMethod::SumMax,
            MethodKind::MaxMin => CodebookMethod::MaxMin,
            MethodKind::Random => CodebookMethod::Random { seed },
            MethodKind::Exhaustive => CodebookMethod::Exhaustive,
        }
    }
}

/// Per-algorithm options; anything left out takes the algorithm default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub tag: AlgorithmTag,
    #[serde(default)]
    pub init: InitKind,
    /// Codebook size `B`.
    #[serde(default = "default_b")]
    pub b: usize,
    #[serde(default)]
    pub method: MethodKind,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub beta0: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    /// Iteration cap of the outer loop.
    #[serde(default)]
    pub max_iter: Option<usize>,
    /// Randomization trials `R` per rank-one recovery.
    #[serde(default)]
    pub trials: Option<usize>,
}

fn default_b() -> usize {
    8
}

impl AlgorithmSpec {
    pub fn new(tag: AlgorithmTag) -> Self {
        Self { tag, init: InitKind::Identity, b: default_b(), method: MethodKind::SumMax, theta: None, epsilon: None, beta0: None, delta: None, max_iter: None, trials: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    PsiDbm,
    GammaDb,
    Eta,
    CodebookSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub base: RawConfig,
    pub sweep: Sweep,
    pub algorithms: Vec<AlgorithmSpec>,
    pub num_trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.sweep.values.is_empty() {
            return Err(HarnessError::Config("sweep value list is empty".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("algorithm list is empty".into()));
        }
        if self.num_trials == 0 {
            return Err(HarnessError::Config("num_trials must be at least 1".into()));
        }
        if self.sweep.variable == SweepVariable::CodebookSize && self.sweep.values.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
            return Err(HarnessError::Config("codebook sizes must be positive integers".into()));
        }
        if self.algorithms.iter().any(|a| a.b == 0) {
            return Err(HarnessError::Config("codebook size b must be at least 1".into()));
        }
        for &v in &self.sweep.values {
            self.config_at(v)?;
        }
        Ok(())
    }

    /// Raw configuration with the sweep variable set to `value`.
    pub fn raw_at(&self, value: f64) -> RawConfig {
        let mut raw = self.base.clone();
        match self.sweep.variable {
            SweepVariable::PsiDbm => raw.psi_dbm = value,
            SweepVariable::GammaDb => raw.gamma_db = value,
            SweepVariable::Eta => raw.eta = value,
            SweepVariable::CodebookSize => {}
        }
        raw
    }

    pub fn config_at(&self, value: f64) -> Result<SystemConfig, HarnessError> {
        if !(self.raw_at(value).eta >= 0.0) {
            return Err(HarnessError::Config("eta must be non-negative".into()));
        }
        to_linear_config(&self.raw_at(value)).map_err(HarnessError::from)
    }

    /// Codebook size of `alg` at sweep point `value`.
    pub fn codebook_size(&self, alg: &AlgorithmSpec, value: f64) -> usize {
        match self.sweep.variable {
            SweepVariable::CodebookSize => value as usize,
            _ => alg.b,
        }
    }
}
