//! Joint beamforming, relay and power-splitting design for multiuser
//! SWIPT relay networks.

extern crate openblas_src;

pub mod ao;
pub mod conic;
pub mod error;
pub mod linalg;
pub mod model;
pub mod outcome;
pub mod rankone;
pub mod rng;
pub mod sr;

pub use error::{Error, Result};
pub use outcome::{DesignOutcome, RecoveryAudit, TerminationReason};
