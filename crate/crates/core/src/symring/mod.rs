//! Exact symbolic arithmetic over the rationals: polynomials in coordinates,
//! `exp`/`log` generators and jet symbols, and their fractions.

mod calculus;
mod compile;
mod expr;
mod matrix;
mod monomial;
mod parse;
mod poly;
mod var;

pub use calculus::integrate_gradient;
pub use compile::Compiled;
pub use expr::{Expr, Number, Point};
pub use matrix::{det_f64, solve_f64, Matrix};
pub use monomial::Monomial;
pub use parse::parse;
pub use poly::Poly;
pub use var::{Var, MAX_COORDS, NUM_VARS};

pub type Q = num_rational::BigRational;

pub use poly::{fmt_q, q_to_f64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unknown symbol `{name}` at line {line}, column {col}")]
    UnknownSymbol {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("coordinate index {0} out of range")]
    InvalidIndex(usize),
    #[error("not expressible: {0}")]
    Inexpressible(String),
    #[error("no elementary antiderivative: {0}")]
    NotIntegrable(String),
    #[error("1-form is not closed: {0}")]
    NotClosed(String),
    #[error("jet depth exceeded")]
    JetDepth,
    #[error("evaluation hit a pole")]
    Pole,
    #[error("no value supplied for `{0}`")]
    MissingSymbol(String),
    #[error("expression needs floating-point evaluation")]
    NeedsFloat,
    #[error("singular matrix")]
    Singular,
}
