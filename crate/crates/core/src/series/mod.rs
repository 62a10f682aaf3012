//! Truncated multivariate formal power series over an exact field, with the
//! linear algebra built on top of them: determinants of series matrices,
//! the Plücker exchange identity and a degree-by-degree implicit solver.

mod context;
mod implicit;
pub mod linalg;
mod matrix;
mod monomial;
mod truncated;

pub use context::VariableContext;
pub use implicit::solve_implicit;
pub use matrix::{plucker_check, SeriesMatrix};
pub use monomial::{Monomial, MonomialDisplay};
pub use truncated::TruncatedSeries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series live in different variable contexts: {left} vs {right}")]
    ContextMismatch { left: String, right: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("expected {expected} entries, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("series has zero constant term and cannot be inverted")]
    NotAUnit,
    #[error("cannot substitute a series with nonzero constant term for `{0}`")]
    NonAdmissibleComposition(String),
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("system does not vanish at the origin")]
    NotCentered,
    #[error("Jacobian of the implicit system is singular at the origin")]
    SingularJacobian,
}
