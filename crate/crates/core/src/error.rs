//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a documented precondition (non-Hermitian matrix,
    /// non-unit probe vector, residual imaginary part, ...).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Matrix or vector dimensions do not match what the operation expects.
    #[error("shape error: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    /// A parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The relative state vanishes somewhere along the loop, so the member's
    /// geometric phase does not exist.
    #[error("nodal passage: relative state vanishes along the loop{}", member_suffix(.member))]
    NodalPassage { member: Option<usize> },

    /// The weighted phase-factor sum (or interference trace) has vanishing
    /// modulus; the phase is undefined.
    #[error("undefined phase: {0}")]
    UndefinedPhase(String),

    /// Separable input where an entanglement-minimizing construction was
    /// requested; callers should use the trivial-phase shortcut instead.
    #[error("separable state: entanglement-minimizing decomposition not defined")]
    Separable,

    /// The requested path family is not supported.
    #[error("not implemented: {0}")]
    NotImplemented(String),

    /// An internal invariant failed; this indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    /// Density-matrix text format error with source position.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

fn member_suffix(member: &Option<usize>) -> String {
    match member {
        Some(k) => format!(" (decomposition member {k})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
