//! Vertex-congestion flows on graphs, their metric duals, and the spectral
//! bounds and separators that follow from them.
//!
//! Numeric types are generic over [`scalar::Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for common use.

pub mod embed;
pub mod error;
pub mod flow;
pub mod graph;
pub mod harness;
pub mod integral;
pub mod partition;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::Graph;

pub type WeightFunction64 = graph::WeightFunction<f64>;
pub type Metric64 = graph::Metric<f64>;
pub type FractionalFlow64 = flow::FractionalFlow<f64>;
pub type DualitySolution64 = flow::DualitySolution<f64>;
pub type PaddedPartition64 = partition::PaddedPartition<f64>;
pub type LineEmbedding64 = embed::LineEmbedding<f64>;
pub type SpectrumResult64 = spectral::SpectrumResult<f64>;
pub type CutResult64 = spectral::CutResult<f64>;
pub type VertexSeparator64 = spectral::VertexSeparator<f64>;
pub type Lambda2Certificate64 = spectral::Lambda2Certificate<f64>;

pub type WeightFunction32 = graph::WeightFunction<f32>;
pub type Metric32 = graph::Metric<f32>;
pub type FractionalFlow32 = flow::FractionalFlow<f32>;
pub type DualitySolution32 = flow::DualitySolution<f32>;
pub type PaddedPartition32 = partition::PaddedPartition<f32>;
pub type LineEmbedding32 = embed::LineEmbedding<f32>;
pub type SpectrumResult32 = spectral::SpectrumResult<f32>;
pub type CutResult32 = spectral::CutResult<f32>;
pub type VertexSeparator32 = spectral::VertexSeparator<f32>;
pub type Lambda2Certificate32 = spectral::Lambda2Certificate<f32>;
