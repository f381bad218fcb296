//! Topological comparison of transformer attention heads with functional
//! brain networks.
//!
//! Attention heads and brain networks are both turned into weighted graphs,
//! summarized by five graph metrics, and compared by cosine similarity. Every
//! head becomes a point in a seven-dimensional space (one axis per canonical
//! brain network), which is then analysed with PCA, k-means and a per-model
//! brain-likeness score.

pub mod attention;
pub mod brain;
pub mod error;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod pipeline;
pub mod reference;
pub mod rng;
pub mod space;
pub mod synthetic;

pub use attention::{HeadRef, HeadWeights, PositionalEmbedding};
pub use brain::NetworkId;
pub use error::{Error, Result};
pub use graph::{AdjacencyMatrix, DistanceMatrix, GraphPair, NormalizationConstants};
pub use matrix::DenseMatrix;
pub use metrics::{FeatureVector, Partition};
pub use space::{HeadFeatures, SimilarityVector, SpaceConfig, SpaceModel};
