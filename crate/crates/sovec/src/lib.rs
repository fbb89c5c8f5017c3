//! sovec turns dense word-vector matrices into sparse overcomplete
//! (optionally nonnegative and binary) representations via online
//! dictionary learning, and evaluates the results with standard intrinsic
//! and extrinsic protocols.
//!
//! The learner factors a V x L input matrix into an L x K dictionary and
//! V x K sparse codes by minimizing a squared reconstruction loss with an
//! l1 penalty on the codes and an l2 penalty on the dictionary. Updates use
//! AdaGrad step sizes; the code side runs regularized dual averaging, which
//! thresholds running average gradients against the l1 penalty and thereby
//! produces exact zeros. Codes can be constrained nonnegative and then
//! projected to binary indicators.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release --example transform          # method A: sparse overcomplete codes
//! cargo run --release --example binary_pipeline    # method B: nonnegative codes -> binary
//! cargo run --release --example baseline_transforms # sign / mean-threshold comparisons
//! cargo run --release --example similarity_eval    # word-similarity correlation protocol
//! cargo run --release --example text_classification # logistic-regression protocol
//! cargo run --release --example cluster_inspect    # k-means over binary codes
//! cargo run --release --example intrusion_instances # word-intrusion instance generation
//! cargo run --release --example grid_search        # lambda x K selection workflow
//! ```
//!
//! The `sovec` binary exposes the same workflows over files; see the
//! repository README.
//!
//! ## Modules
//!
//! - [`types`]: embedding/dictionary/code containers and cosine similarity.
//! - [`optim`]: the RDA code update and AdaGrad dictionary step.
//! - [`trainer`]: training loops, objective evaluation, binarization.
//! - [`baselines`]: sign binarization and mean thresholding.
//! - [`io`]: text formats for vectors, codes, and evaluation datasets.
//! - [`eval`]: similarity, classification, clustering, intrusion protocols.
//! - [`grid`]: hyperparameter grid search.
//! - [`manifest`]: reproducibility manifests for CLI runs.

pub mod baselines;
pub mod error;
pub mod eval;
pub mod grid;
mod hogwild;
pub mod io;
pub mod manifest;
pub mod optim;
pub mod trainer;
pub mod types;

pub use error::{Error, Result};
pub use optim::TrainerConfig;
pub use trainer::{binarize, objective, train, train_nonneg, train_sparse, TrainReport};
pub use types::{
    cosine, cosine_dense, BinaryEmbeddings, Dictionary, EmbeddingMatrix, SparseEmbeddings,
    VectorLookup, VectorRef,
};
