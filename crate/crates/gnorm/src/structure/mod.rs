//! Structural diagnostics: the bipartite support graph (degrees, distances,
//! r-connected subsets, count bound), the block-diagonal norm identity, and
//! the greedy dyadic band decomposition with certified off-band decay.

mod blocks;
mod decompose;
mod graph;

pub use blocks::{block_diag_compose, block_diag_norm_check, BlockDiagCheck};
pub use decompose::{
    band_edge, cut_size, greedy_band_decomposition, verify_decay_bounds, Band, CutLevel,
    DecayLevel, DecayReport, Decomposition, MaskRun, MAX_PADDED_SIDE,
};
pub use graph::{
    bipartite_distance, check_subset_count_bound, degrees, enumerate_r_connected_subsets,
    ProfileGraph, SubsetCountReport, Vertex,
};
