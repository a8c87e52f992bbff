//! Switched relaying: the relay applies a scaled permutation chosen from a
//! small codebook.

mod cccp;
mod codebook;
mod select;
mod subgradient;

pub use cccp::{
    cccp_step, design_latent_cccp, eh_pieces, initial_point, linearize, sinr_pieces, CccpOptions, CccpPoint, Latent, Linearization,
    INIT_BETAS,
};
pub use codebook::{build_codebook, Codebook, CodebookMethod, ENUMERATION_CAP};
pub use select::{design_sr, select_latent, SrOptions};
pub use subgradient::{
    design_latent_subgradient, solve_fixed_beta_robust, subgradient, subgradient_step, FixedBetaSolution, SubgradientOptions,
    SubgradientState,
};
