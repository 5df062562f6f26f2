//! Cycle detection and the structural checks run on cycling traces.

mod decomposition;
mod detect;
mod matching;

pub use decomposition::{
    check_step, check_thm_3wgt, contributions, four_term_edge, partition, subsums,
    three_weight_edge, Contribution, ContributionVector, Group, IndexPartition, Subsums,
    ThreeWeightRow, BETA_MAX_DENOMINATOR, BETA_TOLERANCE,
};
pub use detect::{
    align_permutation, detect_cycle, is_cyclic_rotation, CycleConfig, CycleReport,
    DEFAULT_MIN_REPEATS, DEFAULT_TOLERANCE, QUANTUM,
};
pub use matching::{lattice_agreement, match_farey, replay_deviation, Agreement, Component};

use crate::engine::EngineError;
use crate::simplex::{NablaStatus, SimplexError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CycleError {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("previous edge {0} outside (0, 1)")]
    EdgeOutOfRange(String),
    #[error("partition does not match the current dichotomy")]
    InconsistentPartition,
    #[error("trace has {found} steps, need at least {needed}")]
    TraceTooShort { needed: usize, found: usize },
    #[error("points {rows:?} are misclassified at both steps")]
    NablaRequired { rows: Vec<usize> },
    #[error("group {0} has zero subsum")]
    DegenerateGroup(&'static str),
    #[error("anchor {anchor} outside window {start}..{end}")]
    AnchorOutsideWindow {
        anchor: usize,
        start: usize,
        end: usize,
    },
    #[error("window {start}..{end} not covered by both traces")]
    WindowOutsideTrace { start: usize, end: usize },
    #[error("periodic learning condition fails on the {trace} trace: {status:?}")]
    NablaViolated {
        trace: &'static str,
        status: NablaStatus,
    },
    #[error("the traces have different edge cycles")]
    EdgeCyclesDiffer,
    #[error("the traces do not agree at iteration {iteration}")]
    NoAnchorAgreement { iteration: usize },
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
