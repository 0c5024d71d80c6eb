//! Crossing-number estimation for dense graphs.

pub mod cutmetric;
pub mod drawing;
pub mod exact;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod pipeline;
pub mod planarity;
pub mod transfer;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{crossing_lower_bound, VertexPartition, WeightedGraph};
