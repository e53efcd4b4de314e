//! Error type shared by every module of the library.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),
    #[error("{0}")]
    Precondition(String),
    #[error("argument count mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("grading mismatch between polyvector fields")]
    GradingMismatch,
    #[error("missing table entry for {0}")]
    MissingEntry(String),
    #[error("propagator {0} is singular on this boundary or map")]
    Singular(String),
    #[error("integrand degree {form} does not match chart dimension {chart}")]
    DegreeMismatch { form: usize, chart: usize },
    #[error("shape not recognized: {0}")]
    UnknownShape(String),
    #[error("{0} is not exactly representable with rational coefficients")]
    Irrational(String),
}

pub type Result<T> = std::result::Result<T, Error>;
