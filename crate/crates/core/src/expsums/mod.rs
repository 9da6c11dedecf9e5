//! Kloosterman-type sums and the character sums built from them.

mod c4;
mod dsum;
mod kloosterman;
mod offdiagonal;
mod psi_average;
mod twisted_split;
mod voronoi;

pub use c4::{c4_correlation, C4Factor, C4Params, C4_BUDGET};
pub use dsum::{c3_closed, c3_diagonal, c3_paired, c3_raw, d_sum, d_sum_all};
pub use kloosterman::{
    kloosterman, kloosterman_batch, ramanujan_sum, ramanujan_value, twisted_kloosterman,
    KLOOSTERMAN_BUDGET,
};
pub use offdiagonal::{
    c1_sum, c2_closed, c2_inner, c2_raw, offdiagonal_sum_closed, offdiagonal_sum_raw,
};
pub use psi_average::{psi_average_closed, psi_average_raw, PsiAverageParams};
pub use twisted_split::{twisted_split_check, TwistedSplit, TwistedSplitParams};
pub use voronoi::{voronoi_char_sum_closed, voronoi_char_sum_raw, VoronoiParams, VoronoiSplit};
