//! Exact sparse polynomials over a finite variable universe.

mod field;
mod lincomb;
mod monomial;
mod polynomial;
mod var;

pub use field::{PolyVectorField, Valuation};
pub use lincomb::LinComb;
pub use monomial::{Monomial, MonomialDisplay};
pub use polynomial::{Polynomial, PolynomialDisplay};
pub use var::{Universe, Var};

pub use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable names must be nonempty")]
    EmptyName,
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("valuation has no value for `{0}`")]
    MissingValue(String),
    #[error("right-hand side of `{0}` mentions a variable outside the universe")]
    ForeignVariable(String),
    #[error("expected {expected} right-hand sides, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}
