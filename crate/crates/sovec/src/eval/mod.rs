//! Evaluation protocols: word-similarity correlation, logistic-regression
//! text classification, k-means cluster inspection, and word-intrusion
//! instance generation.

mod features;
mod intrusion;
mod kmeans;
mod logreg;
mod similarity;

pub use features::{featurize, featurize_dataset, FeatureMode, FeatureSet, Features};
pub use intrusion::{gen_intrusions, IntrusionInstance, IntrusionReport};
pub use kmeans::{kmeans, KMeansResult};
pub use logreg::{default_l2_grid, loss_and_gradient, train_logreg, LogRegFit, LogisticRegression};
pub use similarity::{eval_similarity, spearman, SimilarityEval};
