//! Paired Monte-Carlo trials over a sweep.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use swipt_relay::ao::{design_ao_nominal, design_ao_robust, AoInit, AoOptions};
use swipt_relay::model::{mw_to_dbm, sample_channels, ChannelSet, SystemConfig};
use swipt_relay::rng::{mix_seed, stream};
use swipt_relay::sr::{build_codebook, design_sr, CccpOptions, SrOptions, SubgradientOptions};
use swipt_relay::{DesignOutcome, Error};

use crate::spec::{AlgorithmSpec, AlgorithmTag, ExperimentSpec, InitKind};
use crate::HarnessError;

/// One algorithm run on one trial's channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub sweep: f64,
    pub algorithm: AlgorithmTag,
    pub power_mw: Option<f64>,
    pub power_dbm: Option<f64>,
    pub feasible: bool,
    pub iterations: usize,
    pub wall_ms: f64,
    pub l_opt: Option<usize>,
    pub beta: Option<f64>,
    /// Fingerprint of the trial's channels; kept in memory only.
    #[serde(skip)]
    pub channel_hash: u64,
}

impl TrialRecord {
    pub fn from_outcome(trial: usize, seed: u64, sweep: f64, algorithm: AlgorithmTag, out: &DesignOutcome, channel_hash: u64) -> Self {
        let feasible = out.feasible() && out.total_power.is_finite();
        let power_mw = feasible.then_some(out.total_power);
        Self {
            trial,
            seed,
            sweep,
            algorithm,
            power_mw,
            power_dbm: power_mw.map(mw_to_dbm),
            feasible,
            iterations: out.iterations,
            wall_ms: out.wall_time * 1e3,
            l_opt: out.l_opt,
            beta: out.beta,
            channel_hash,
        }
    }
}

/// Per-trial seed shared by every algorithm and sweep point.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    mix_seed(master, trial as u64)
}

pub fn trial_channels(cfg: &SystemConfig, eta: f64, seed: u64) -> ChannelSet {
    sample_channels(cfg, &vec![eta; cfg.num_users], &mut stream(seed, 0))
}

fn sr_options(alg: &AlgorithmSpec, seed: u64) -> SrOptions {
    let cccp_default = CccpOptions::default();
    let sg_default = SubgradientOptions::default();
    SrOptions {
        cccp: CccpOptions {
            delta: alg.delta.unwrap_or(cccp_default.delta),
            max_iter: alg.max_iter.unwrap_or(cccp_default.max_iter),
            trials: alg.trials.unwrap_or(cccp_default.trials),
            seed,
        },
        subgradient: SubgradientOptions {
            theta: alg.theta.unwrap_or(sg_default.theta),
            epsilon: alg.epsilon.unwrap_or(sg_default.epsilon),
            beta0: alg.beta0.unwrap_or(sg_default.beta0),
            delta: alg.delta.unwrap_or(sg_default.delta),
            max_iter: alg.max_iter.unwrap_or(sg_default.max_iter),
            trials: alg.trials.unwrap_or(sg_default.trials),
            seed,
        },
    }
}

fn run_sr(alg: &AlgorithmSpec, b: usize, ch: &ChannelSet, cfg: &SystemConfig, seed: u64, robust: bool, simplified: bool) -> swipt_relay::Result<DesignOutcome> {
    let codebook = build_codebook(&ch.g, &ch.h_est, b, alg.method.with_seed(mix_seed(seed, 1)))?;
    design_sr(ch, cfg, &codebook, robust, simplified, &sr_options(alg, seed))
}

/// Runs one algorithm with codebook size `b` on the given channels.
pub fn run_algorithm(alg: &AlgorithmSpec, b: usize, ch: &ChannelSet, cfg: &SystemConfig, seed: u64) -> swipt_relay::Result<DesignOutcome> {
    match alg.tag {
        AlgorithmTag::AoNominal | AlgorithmTag::AoRobust => {
            let robust = alg.tag == AlgorithmTag::AoRobust;
            let d = AoOptions::default();
            let opts = AoOptions { delta: alg.delta.unwrap_or(d.delta), max_iter: alg.max_iter.unwrap_or(d.max_iter), trials: alg.trials.unwrap_or(d.trials), seed };
            let init = match alg.init {
                InitKind::Identity => AoInit::Identity,
                InitKind::Gaussian => AoInit::Gaussian { seed: mix_seed(seed, 2) },
                InitKind::Sr => {
                    let sr = run_sr(alg, b, ch, cfg, seed, robust, true)?;
                    match sr.transceiver {
                        Some(tx) => AoInit::Given(tx.relay),
                        None => {
                            log::debug!("switched-relay start infeasible, starting from the identity");
                            AoInit::Identity
                        }
                    }
                }
            };
            if robust {
                design_ao_robust(ch, cfg, &init, &opts)
            } else {
                design_ao_nominal(ch, cfg, &init, &opts)
            }
        }
        AlgorithmTag::SrCccp => run_sr(alg, b, ch, cfg, seed, false, false),
        AlgorithmTag::SrSubgradient => run_sr(alg, b, ch, cfg, seed, true, false),
        AlgorithmTag::SrSimplifiedNominal => run_sr(alg, b, ch, cfg, seed, false, true),
        AlgorithmTag::SrSimplifiedRobust => run_sr(alg, b, ch, cfg, seed, true, true),
    }
}

fn outcome_or_infeasible(res: swipt_relay::Result<DesignOutcome>) -> Result<Option<DesignOutcome>, HarnessError> {
    match res {
        Ok(o) => Ok(Some(o)),
        Err(Error::Infeasible(_)) | Err(Error::RecoveryFailed { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn flag_pairing(records: &[TrialRecord], outcomes: &[Option<DesignOutcome>]) {
    for (r, o) in records.iter().zip(outcomes) {
        if let Some(o) = o {
            if matches!(r.algorithm, AlgorithmTag::AoNominal | AlgorithmTag::AoRobust) && o.power_trace.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-6)) {
                log::warn!("flag: {} trace increases on trial {}", r.algorithm, r.trial);
            }
        }
        let (Some(twin), Some(p)) = (r.algorithm.nominal_twin(), r.power_mw) else { continue };
        if let Some(q) = records.iter().find(|n| n.algorithm == twin).and_then(|n| n.power_mw) {
            if p < q * (1.0 - 1e-3) {
                log::warn!("flag: {} below {} on trial {} ({p:.4e} < {q:.4e} mW)", r.algorithm, twin, r.trial);
            }
        }
    }
}

fn run_job(spec: &ExperimentSpec, value: f64, trial: usize) -> Result<Vec<TrialRecord>, HarnessError> {
    let cfg = spec.config_at(value)?;
    let seed = trial_seed(spec.seed, trial);
    let ch = trial_channels(&cfg, spec.raw_at(value).eta, seed);
    let hash = ch.fingerprint();
    let mut records = Vec::with_capacity(spec.algorithms.len());
    let mut outcomes = Vec::with_capacity(spec.algorithms.len());
    for alg in &spec.algorithms {
        let b = spec.codebook_size(alg, value);
        let out = outcome_or_infeasible(run_algorithm(alg, b, &ch, &cfg, seed))?;
        let record = match &out {
            Some(o) => TrialRecord::from_outcome(trial, seed, value, alg.tag, o, hash),
            None => TrialRecord {
                trial,
                seed,
                sweep: value,
                algorithm: alg.tag,
                power_mw: None,
                power_dbm: None,
                feasible: false,
                iterations: 0,
                wall_ms: 0.0,
                l_opt: None,
                beta: None,
                channel_hash: hash,
            },
        };
        records.push(record);
        outcomes.push(out);
    }
    flag_pairing(&records, &outcomes);
    Ok(records)
}

/// Runs every sweep value and trial on `workers` threads. Records come back
/// ordered by sweep position, trial, then algorithm list order.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<Vec<TrialRecord>, HarnessError> {
    spec.validate()?;
    let jobs: Vec<(f64, usize)> = spec.sweep.values.iter().flat_map(|&v| (0..spec.num_trials).map(move |t| (v, t))).collect();
    let results: Mutex<Vec<Option<Vec<TrialRecord>>>> = Mutex::new(vec![None; jobs.len()]);
    let first_error: Mutex<Option<HarnessError>> = Mutex::new(None);
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() || stop.load(Ordering::Relaxed) {
                    break;
                }
                let (value, trial) = jobs[i];
                match run_job(spec, value, trial) {
                    Ok(r) => results.lock().expect("results lock")[i] = Some(r),
                    Err(e) => {
                        stop.store(true, Ordering::Relaxed);
                        first_error.lock().expect("error lock").get_or_insert(e);
                    }
                }
            });
        }
    });
    if let Some(e) = first_error.into_inner().expect("error lock") {
        return Err(e);
    }
    Ok(results.into_inner().expect("results lock").into_iter().flatten().flatten().collect())
}
