//! Exact multivariate polynomials over the Gaussian rationals, polynomial
//! matrices (determinants, adjugates, minors) and a text parser.

mod matrix;
mod parse;
#[allow(clippy::module_inception)]
mod poly;
mod rational;

pub use matrix::PolyMatrix;
pub use parse::parse;
pub use poly::{CompiledPoly, Monomial, Poly};
pub use rational::GaussRat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable z{index} at byte {offset} exceeds nvars = {nvars}")]
    VariableOutOfRange { offset: usize, index: usize, nvars: usize },
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("division by the zero polynomial")]
    DivisionByZero,
}
