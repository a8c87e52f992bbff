//! Aggregation of trial records per sweep point and algorithm.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::run::TrialRecord;
use crate::spec::AlgorithmTag;
use crate::HarnessError;

/// Normal quantile of a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub sweep: f64,
    pub algorithm: AlgorithmTag,
    pub num_trials: usize,
    pub num_feasible: usize,
    pub feasibility_rate: f64,
    /// Mean of the feasible powers in dBm; absent without feasible trials.
    pub mean_dbm: Option<f64>,
    /// Half-width of the normal 95% interval around `mean_dbm`.
    pub ci95_db: Option<f64>,
    /// Mean of the feasible powers in mW.
    pub mean_mw: Option<f64>,
}

impl Summary {
    /// Linear-domain mean converted to dBm.
    pub fn mean_mw_dbm(&self) -> Option<f64> {
        self.mean_mw.map(swipt_relay::model::mw_to_dbm)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean and normal 95% half-width of a sample; the half-width needs two points.
pub fn mean_ci(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = mean(&sorted);
    if sorted.len() < 2 {
        return (Some(m), None);
    }
    let var = sorted.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (sorted.len() - 1) as f64;
    (Some(m), Some(Z95 * (var / sorted.len() as f64).sqrt()))
}

/// Groups records by (algorithm, sweep value). Values are sorted before
/// summing, so the result does not depend on record order.
pub fn summarize(records: &[TrialRecord]) -> Result<Vec<Summary>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Config("no records to summarize".into()));
    }
    let mut keys: Vec<(AlgorithmTag, f64)> = records.iter().map(|r| (r.algorithm, r.sweep)).collect();
    let order = |a: &(AlgorithmTag, f64), b: &(AlgorithmTag, f64)| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1));
    keys.sort_by(order);
    keys.dedup_by(|a, b| order(a, b) == Ordering::Equal);

    Ok(keys
        .into_iter()
        .map(|(algorithm, sweep)| {
            let group: Vec<&TrialRecord> = records.iter().filter(|r| r.algorithm == algorithm && r.sweep.total_cmp(&sweep).is_eq()).collect();
            let dbm: Vec<f64> = group.iter().filter(|r| r.feasible).filter_map(|r| r.power_dbm).collect();
            let (mean_dbm, ci95_db) = mean_ci(&dbm);
            let mut mw: Vec<f64> = group.iter().filter(|r| r.feasible).filter_map(|r| r.power_mw).collect();
            mw.sort_by(f64::total_cmp);
            Summary {
                sweep,
                algorithm,
                num_trials: group.len(),
                num_feasible: dbm.len(),
                feasibility_rate: dbm.len() as f64 / group.len() as f64,
                mean_dbm,
                ci95_db,
                mean_mw: (!mw.is_empty()).then(|| mean(&mw)),
            }
        })
        .collect())
}
