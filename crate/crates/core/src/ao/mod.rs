//! Alternating-optimization designs with a full relay matrix.

mod bf_ps;
mod design;
mod relay;

pub use bf_ps::{relax_bf_ps, solve_bf_ps_nominal, solve_bf_ps_robust, BfPsRelaxation, BfPsStep};
pub use design::{design_ao_nominal, design_ao_robust, AoInit, AoOptions};
pub use relay::{relax_relay, solve_relay_nominal, solve_relay_robust, RelayRelaxation, RelayStep};

pub(crate) use bf_ps::recover;
