//! System model: configuration, channel generation, power and
//! SINR / energy-harvesting evaluation, and design verification.

mod channels;
mod config;
mod metrics;
mod transceiver;
mod verify;

pub use channels::{check_feasibility_rank, sample_channels, sample_in_ball, sample_on_sphere, ChannelSet, WhichChannel, RANK_THRESHOLD};
pub use config::{db_to_linear, dbm_to_mw, mw_to_dbm, to_linear_config, RawConfig, SystemConfig};
pub use metrics::{bs_power, harvested_power, rs_power, sinr, total_power};
pub use transceiver::{is_permutation, permutation_matrix, RelayWeight, Transceiver};
pub use verify::{verify_design, VerificationReport, VerifyMode, VERIFY_TOL};

pub(crate) use channels::stack_adjoint;
