//! Exact arithmetic: Gaussian rationals, sparse polynomials, rational
//! functions, univariate Laurent expansion and dense linear solves.

mod gaussian;
mod laurent;
mod linalg;
mod poly;
mod rational;

use thiserror::Error;

pub use gaussian::{rational, GaussianRational, Rational};
pub use laurent::{laurent_expand, residue_coefficient, LaurentSeries};
pub use linalg::{rank, solve};
pub use poly::{poly_arith, vars, ArithOp, Monomial, MultiPoly, Vars};
pub use rational::RationalFunction;


#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable lists differ: [{}] vs [{}]", left.join(", "), right.join(", "))]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("series truncated at order {0}, below the residue exponent -1")]
    InsufficientOrder(i64),
    #[error("expression involves variables other than `{0}`")]
    NotUnivariate(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational function `{0}` is not a polynomial")]
    NotPolynomial(String),
}

impl AlgebraError {
    pub fn code(&self) -> &'static str {
        match self {
            AlgebraError::VariableMismatch { .. } => "VariableMismatch",
            AlgebraError::UnknownVariable(_) => "UnknownVariable",
            AlgebraError::ZeroDenominator => "ZeroDenominator",
            AlgebraError::InsufficientOrder(_) => "InsufficientOrder",
            AlgebraError::NotUnivariate(_) => "NotUnivariate",
            AlgebraError::DivisionByZero => "DivisionByZero",
            AlgebraError::NotPolynomial(_) => "NotPolynomial",
        }
    }
}
