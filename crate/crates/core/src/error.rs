use thiserror::Error;

/// Errors raised by the library. Warnings that do not abort a computation
/// are carried on the result types instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma set violates the Clifford relations (residual {residual:e})")]
    InvalidGammaSet { residual: f64 },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("family parameters violate the unit-circle constraint: {a}² + {b}² − 1 = {defect:e}")]
    FamilyConstraint { a: f64, b: f64, defect: f64 },

    #[error("family {family} is singular at this parameter (divisor {divisor})")]
    SingularFamily { family: &'static str, divisor: f64 },

    #[error("boundary matrix is not invertible (|det| = {det_abs:e})")]
    SingularBoundaryMatrix { det_abs: f64 },

    #[error("chiral phase {theta} is not 0 or π and cannot carry a Majorana state")]
    NonMajoranaPhase { theta: f64 },

    #[error("boundary condition is not self-adjoint (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("energy window is invalid: {0}")]
    InvalidWindow(String),

    #[error("grid is invalid: {0}")]
    InvalidGrid(String),

    #[error("state is identically zero")]
    ZeroState,

    #[error("state and spectrum are incompatible: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
