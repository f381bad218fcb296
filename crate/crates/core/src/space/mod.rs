//! The brain-like space: standardization, similarity vectors, principal
//! axes, clustering, matching and scoring.

mod kmeans;
mod model;
mod pca;
mod scoring;
mod similarity;

pub use kmeans::{
    fit_kmeans, kmeans, nearest, silhouette, KMeansFit, KSelection, KMEANS_MAX_ITER, KMEANS_RESTARTS,
    KMEANS_TOL,
};
pub use model::{
    brain_likeness_score, BrainReference, ExcludedHead, FittedSpace, HeadFeatures, HeadRecord,
    ModelReport, ScoreMode, SilhouetteScore, SpaceConfig, SpaceModel, SpaceReport,
    StandardizationScope, SPACE_FORMAT_VERSION,
};
pub use pca::{fit_pca, PcaFit, MIN_PCA_SAMPLES};
pub use scoring::{
    correlate, match_head, pearson_p_value, Correlation, DEFAULT_MATCH_THRESHOLD,
    RELAXED_MATCH_THRESHOLD,
};
pub use similarity::{
    cosine_similarity, fit_standardization, similarities, similarity_vector, standardize,
    SimilarityVector, StandardizationParams,
};
