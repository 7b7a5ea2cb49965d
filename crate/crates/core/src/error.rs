use crate::classify::ClassificationReport;
use crate::parse::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("a compact set needs at least one interval")]
    EmptySet,
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("enlargement radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("extreme points are only defined here for convex sets, got {0}")]
    NotConvex(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    InvalidMap(String),
    #[error("{0}")]
    InvalidArgument(String),
    /// An operation was applied outside the class it is defined on.
    #[error("{op} requires a {required} map\n{report}")]
    Precondition {
        op: &'static str,
        required: &'static str,
        report: Box<ClassificationReport>,
    },
    /// Two computations that must agree did not.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("could not enclose the supremum to the requested tolerance: {0}")]
    Unresolved(String),
    #[error("unknown example '{name}'; available: {available}")]
    UnknownExample { name: String, available: String },
}
