//! Exact discrete laboratory for maximum-entropy models.
//!
//! The crate builds finite, exactly computable instances of the
//! maximum-entropy classification problem and checks, on those
//! instances, when a feature-based softmax model coincides with the
//! original maximum-entropy conditional. On top of that it provides a
//! small sigmoid network trained either by joint backpropagation or by
//! layer-wise coordinate sweeps, plus information-plane tracking of
//! I(X;T) and I(T;Y) during training.
//!
//! Everything is deterministic per seed: same inputs, same bytes out.

pub mod config;
pub mod discrete_prob;
pub mod equivalence_lab;
pub mod info_plane;
pub mod maxent_core;
pub mod recursive_net;
pub mod registry;
pub mod suite;

pub use discrete_prob::{Alphabet, FeatureMap, JointTable, SampleSet};
pub use equivalence_lab::{EquivalenceReport, Instance};
pub use maxent_core::{FitDiagnostics, MEDualParams, SoftmaxParams, TrainConfig};
pub use recursive_net::{LayerStack, NetTrainConfig, TrainMode, TrainTrace};

/// Crate-wide error type. Numeric preconditions, convergence failures
/// and I/O all funnel through here.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("distribution not normalized: sum = {sum}")]
    NotNormalized { sum: f64 },
    #[error("negative probability entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("{n} features exceed the 16-feature enumeration cap")]
    TooManyFeatures { n: usize },
    #[error("empty sample set")]
    EmptySample,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("did not converge within {iters} iterations (gradient residual {residual:e})")]
    NonConvergence { iters: usize, residual: f64 },
    #[error("rejection sampling budget of {budget} draws exceeded")]
    RejectionBudgetExceeded { budget: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config field `{field}`: {message}")]
    Range { field: String, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
