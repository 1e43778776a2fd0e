//! Littlewood-Paley decomposition on the periodic grid, homogeneous and
//! hybrid Besov norms, time-Lebesgue Besov norms and Bony's paraproduct.

mod filter;
mod norms;
mod para;

pub use filter::{chi, low_high_split, phi, DyadicFilterBank};
pub use norms::{
    besov_norm, besov_norm_unchecked, block_lp_norms, block_lp_norms_multi, block_lp_norms_tuple, check_tail,
    exponent_serde, hybrid_norm, hybrid_norm_split, hybrid_norm_unchecked, lp_norm, lq_of_besov_from_series,
    norm_from_blocks, time_besov_norm, time_lq, time_norm_from_series, weighted_sum, BesovParams, HybridSign,
    NormRecord, NormValue, TAIL_LIMIT,
};
pub use para::{paraconv_pairing, paraproduct, product_law_ratio, remainder};

#[derive(Debug, thiserror::Error)]
pub enum BesovError {
    #[error("block {j} outside the bank range [{j_min}, {j_max}]")]
    BlockOutOfRange { j: i32, j_min: i32, j_max: i32 },
    #[error("truncated norm failed the Cauchy check (tail ratio {tail_ratio:.3} > 0.5)")]
    NormDivergent { tail_ratio: f64 },
    #[error("empty snapshot sequence")]
    EmptySequence,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid block range: {0}")]
    InvalidRange(String),
}
