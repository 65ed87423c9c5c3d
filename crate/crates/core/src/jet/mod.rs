//! Jets of functions and vector fields on the k-th infinitesimal
//! neighborhood `O_M / I_S^(k+1)` of a submanifold `S = {normal vars = 0}`.

mod class;
mod field;
mod ideal;
mod involutive;
mod primitive;

use thiserror::Error;

use crate::algebra::AlgebraError;

pub use class::{truncate, JetClass, JetFraction};
pub use field::{classify_field, jet_apply, jet_bracket, restrict_to_S, FieldStatus, VectorFieldJet};
pub use ideal::IdealSpec;
pub use involutive::{involutivity_check, rank_at, InvolutivityResult, MembershipWitness};
pub use primitive::{
    normalize_commuting_extension, normalize_commuting_representative, primitive_of_closed_1form, FieldExtension,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("normal and tangential variable lists overlap on `{0}`")]
    OverlappingRoles(String),
    #[error("operands live over different ideals")]
    IdealMismatch,
    #[error("vector field is not logarithmic along S")]
    NotLogarithmic,
    #[error("1-form is not closed: d/d{second} of the {first} coefficient differs from d/d{first} of the {second} coefficient")]
    NotClosed { first: String, second: String },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("expected ideal order {expected}, found {found}")]
    OrderMismatch { expected: u32, found: u32 },
    #[error("`{0}` is not a tangential variable")]
    NotTangentialVariable(String),
    #[error("jet fraction denominator is not a unit")]
    NotUnit,
}

impl JetError {
    pub fn code(&self) -> &'static str {
        match self {
            JetError::Algebra(e) => e.code(),
            JetError::OverlappingRoles(_) => "OverlappingRoles",
            JetError::IdealMismatch => "IdealMismatch",
            JetError::NotLogarithmic => "NotLogarithmic",
            JetError::NotClosed { .. } => "NotClosed",
            JetError::PreconditionFailed(_) => "PreconditionFailed",
            JetError::EmptyGenerators => "EmptyGenerators",
            JetError::OrderMismatch { .. } => "OrderMismatch",
            JetError::NotTangentialVariable(_) => "NotTangentialVariable",
            JetError::NotUnit => "NotUnit",
        }
    }
}
