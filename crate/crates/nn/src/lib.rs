//! Graph neural networks over vertex-deleted and k-vertex induced subgraphs.
//!
//! A base message-passing network embeds each induced k-card of the input
//! graph; a sum-decomposition head pools the card embeddings into one
//! graph-level representation. Setting the card rule to the whole graph
//! recovers a plain GNN, so the ordinary baseline and the subgraph models
//! share one training and evaluation path.
//!
//! Everything is deterministic given a seed: initialization, subgraph
//! sampling, shuffling, and bootstrap draws each consume a named substream
//! derived from the run seed.

pub mod audit;
pub mod error;
pub mod gradcheck;
pub mod head;
pub mod layers;
pub mod loss;
pub mod model;
pub mod optim;
pub mod tensor;
pub mod train;
pub mod variance;

pub use audit::{run_all, run_selected, CriterionResult, Tier};
pub use error::{Error, Result};
pub use head::{DeepSetsHead, Mlp, Pooling};
pub use layers::{ConvKind, GradSet, Readout};
pub use loss::LossKind;
pub use model::{build_model, GnnModel, KRule, ModelConfig, ReconModel};
pub use train::{evaluate, train, Metric, TrainConfig, TrainOutcome};
pub use variance::{variance_experiment, VarianceReport};
