//! Farey and Gauss dynamics with exact periodic orbits in real quadratic fields.

mod maps;
mod orbit;
mod quadratic;
pub mod squarefree;
mod word;

pub use maps::{farey, gauss, inv_l, inv_r};
pub use orbit::{
    cf_expansion, cf_terms_u64, enumerate_orbits, orbit, periodic_point, uniqueness_report,
    OrbitClass, OrbitKind, PeriodicPoint, UniquenessReport, MAX_ENUMERATION_LENGTH,
};
pub use quadratic::QuadraticIrrational;
pub use word::{word_matrix, FareyWord, Letter, MoebiusMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FareyError {
    #[error("{op} is undefined at {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("empty word")]
    EmptyWord,
    #[error("invalid letter {0:?}, expected L or R")]
    InvalidLetter(char),
    #[error("cannot combine sqrt({left}) and sqrt({right})")]
    FieldMismatch { left: String, right: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("word length {0} outside 1..=20")]
    OutOfBounds(usize),
    #[error("{0} exceeds 64 bits")]
    TooLarge(String),
    #[error("radicand {0} must be positive")]
    InvalidRadicand(String),
}
