//! Dyadic cutoffs, isotropic and anisotropic Littlewood-Paley blocks, Besov
//! norms and Bony paraproducts.

mod besov;
mod blocks;
mod cutoff;
mod paraproduct;

pub use besov::{
    aniso_besov_norm, aniso_block_lp_norms, besov_norm, block_lp_norms, mixed_lp_norm,
    sequence_norm, spectral_lp_norm, vertical_besov_lp_h, AnisoBesovSpec, BesovSpec,
};
pub use blocks::{aniso_block, block, covered_part, BlockIndex, Direction};
pub use cutoff::DyadicCutoff;
pub use paraproduct::{
    bony_decomposition, horizontal_bony_split, paraproduct_t, remainder_r, vertical_bony_split,
    BonyPieces,
};
