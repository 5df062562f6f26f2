//! Real-dataset pipeline: CSV loading, trees trained on boosting weights,
//! and their mistake dichotomies.

mod dataset;
mod pipeline;
mod tree;

pub use dataset::{load_csv, parse_csv, Dataset, Provenance};
pub use pipeline::{run_on_dataset, DatasetRun};
pub use tree::{
    dichotomy_of, signs_of, train_tree, train_tree_sorted, weighted_edge, Node, SortedFeatures,
    TreeBounds, TreeHypothesis,
};

use crate::engine::EngineError;
use crate::simplex::SimplexError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnerError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("label column `{0}` not found in header")]
    MissingColumn(String),
    #[error("feature column `{0}` has no numeric values")]
    NonNumericColumn(String),
    #[error("dataset has no usable rows")]
    EmptyDataset,
    #[error("every row has the same label (positive class `{0}`)")]
    SingleClass(String),
    #[error("{0}")]
    Shape(String),
    #[error("sample size {size} exceeds the {available} available rows")]
    SampleTooLarge { size: usize, available: usize },
    #[error("invalid tree bounds: {0}")]
    InvalidBounds(String),
    #[error("expected {expected} weights, found {found}")]
    WeightLength { expected: usize, found: usize },
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
