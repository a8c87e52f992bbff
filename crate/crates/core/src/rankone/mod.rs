//! Rank-one recovery from relaxed solutions: worst-case bounds, power
//! rescaling and the randomization loop.

mod bounds;
mod recovery;
mod rescale;

pub use bounds::{compute_bounds, worst_case_linear_bounds, worst_case_quadratic_bounds, WorstCaseBounds};
pub use recovery::{rank_ratio, randomized_recovery, Lifted, Recovered, RecoveryContext, DEFAULT_TRIALS, RANK_ONE_RATIO};
pub use rescale::{rescale_beamformers, rescale_relay, RescaleSolution};
