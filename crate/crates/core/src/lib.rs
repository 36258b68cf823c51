//! Multilevel graph partitioning for doubly-weighted graphs.
//!
//! A graph carries positive vertex weights `M` and symmetric edge weights
//! `W`. Partitions are scored by the weighted cut
//! `Wcut = Σ cut(C, V∖C) / mvol(C)` and by the normalized cut, which is the
//! special case `M = D`. The pipeline coarsens with heavy-edge matching
//! (supernode weight = summed fine degree), clusters the coarsest graph with
//! the spectrum of `M^{-1/2} (D - W) M^{-1/2}`, and refines on the way back.

pub mod cluster;
pub mod coarsen;
pub mod eigen;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod kmeans;
pub mod laplacian;
pub mod oracle;
pub mod pipeline;
pub mod refine;

pub use cluster::Strategy;
pub use coarsen::{build_hierarchy, CoarseMap, Hierarchy};
pub use eigen::SpectralEmbedding;
pub use error::{Error, Result};
pub use graph::{DoublyWeightedGraph, Partition};
pub use laplacian::WeightedLaplacian;
pub use refine::{vcycle, RefineOptions};
