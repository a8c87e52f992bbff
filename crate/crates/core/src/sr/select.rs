//! Switched-relaying design: one latent transceiver per codebook element
//! and minimum-power selection.

use std::time::Instant;

use super::cccp::{initial_point, refine_cccp, CccpOptions, Latent};
use super::codebook::Codebook;
use super::subgradient::{first_feasible, refine_subgradient, SubgradientOptions};
use super::{design_latent_cccp, design_latent_subgradient};
use crate::error::{Error, Result};
use crate::model::{ChannelSet, SystemConfig};
use crate::DesignOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SrOptions {
    pub cccp: CccpOptions,
    pub subgradient: SubgradientOptions,
}

/// Index of the smallest power, lowest index on ties; `None` if all are
/// infinite or NaN.
pub fn select_latent(powers: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (l, &p) in powers.iter().enumerate() {
        if p.is_finite() && best.map_or(true, |b| p < powers[b]) {
            best = Some(l);
        }
    }
    best
}

/// Designs the switched-relaying transceiver over `codebook`.
///
/// Full mode designs every latent transceiver and keeps the cheapest.
/// Simplified mode only computes each latent's initial point, then refines
/// the one with the lowest initial power.
pub fn design_sr(
    channels: &ChannelSet,
    cfg: &SystemConfig,
    codebook: &Codebook,
    robust: bool,
    simplified: bool,
    opts: &SrOptions,
) -> Result<DesignOutcome> {
    if codebook.is_empty() {
        return Err(Error::Config("codebook is empty".into()));
    }
    let start = Instant::now();
    let latents: Vec<Latent<'_>> =
        codebook.permutations.iter().enumerate().map(|(l, p)| Latent::new(l, p, channels, cfg)).collect();

    let mut out = if simplified { simplified_design(&latents, robust, opts, start)? } else { full_design(&latents, robust, opts)? };
    out.wall_time = start.elapsed().as_secs_f64();
    Ok(out)
}

fn full_design(latents: &[Latent<'_>], robust: bool, opts: &SrOptions) -> Result<DesignOutcome> {
    let mut outcomes = Vec::with_capacity(latents.len());
    for lat in latents {
        let o = if robust { design_latent_subgradient(lat, &opts.subgradient)? } else { design_latent_cccp(lat, &opts.cccp)? };
        outcomes.push(o);
    }
    let powers: Vec<f64> = outcomes.iter().map(|o| if o.feasible() { o.total_power } else { f64::INFINITY }).collect();
    let recoveries = outcomes.iter().flat_map(|o| o.recoveries.iter().cloned()).collect();
    let iterations = outcomes.iter().map(|o| o.iterations).sum();
    let Some(l) = select_latent(&powers) else {
        let mut out = DesignOutcome::infeasible(0.0);
        out.recoveries = recoveries;
        out.iterations = iterations;
        return Ok(out);
    };
    let mut out = outcomes.swap_remove(l);
    out.recoveries = recoveries;
    Ok(out)
}

fn simplified_design(latents: &[Latent<'_>], robust: bool, opts: &SrOptions, start: Instant) -> Result<DesignOutcome> {
    if robust {
        let mut starts = Vec::with_capacity(latents.len());
        for lat in latents {
            starts.push(first_feasible(lat, &opts.subgradient)?);
        }
        let powers: Vec<f64> = starts.iter().map(|s| s.as_ref().map_or(f64::INFINITY, |s| s.objective)).collect();
        let Some(l) = select_latent(&powers) else {
            return Ok(DesignOutcome::infeasible(0.0));
        };
        let first = starts.swap_remove(l).expect("selected latent has a start");
        return refine_subgradient(&latents[l], first, &opts.subgradient, start);
    }
    let mut starts = Vec::with_capacity(latents.len());
    for lat in latents {
        starts.push(initial_point(lat, &opts.cccp)?);
    }
    let powers: Vec<f64> = starts.iter().map(|s| s.as_ref().map_or(f64::INFINITY, |s| s.1)).collect();
    let recoveries: Vec<_> = starts.iter().flatten().map(|s| s.2.clone()).collect();
    let Some(l) = select_latent(&powers) else {
        let mut out = DesignOutcome::infeasible(0.0);
        out.recoveries = recoveries;
        return Ok(out);
    };
    let (point, power, _) = starts.swap_remove(l).expect("selected latent has a start");
    Ok(refine_cccp(&latents[l], point, power, recoveries, &opts.cccp, start))
}
