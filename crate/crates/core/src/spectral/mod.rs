//! Laplacian spectrum, sweep cuts, balanced separators, and certified
//! upper bounds on λ₂.

mod certificate;
mod cuts;
mod eigen;

pub use certificate::{certify_with_weights, lambda2_certificate, EmbedConfig, Lambda2Certificate};
pub use cuts::{
    cut_ratio, fhl_sweep, recursive_edge_separator, separator_alpha, sweep_cut, CutResult, Cutter,
    EdgeSeparator, SweepCutter, VertexSeparator,
};
pub use eigen::{lambda2_dense, lambda2_iterative, lambda2_solve, SpectrumMethod, SpectrumResult, DENSE_LIMIT};
