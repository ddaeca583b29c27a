//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by path construction, planning, certification and sweeps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A path or segment was queried outside its parameter domain.
    #[error("parameter {t} outside the valid domain {reason}")]
    OutOfDomain { t: f64, reason: &'static str },

    /// Two pieces meant to join do not share an endpoint.
    #[error("discontinuous join: endpoint gap {gap:.3e} exceeds {tolerance:.3e}")]
    DiscontinuousJoin { gap: f64, tolerance: f64 },

    /// Mixed ambient dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// No domain of the planner's cover contains the query.
    #[error("query ({start:?} -> {goal:?}) lies outside all planner domains")]
    QueryOutsideAllDomains { start: Vec<f64>, goal: Vec<f64> },

    /// A contraction basepoint lies on the hypersurface it must avoid.
    #[error("contraction basepoint lies on surface component {label} (|f| = {value:.3e})")]
    BasepointOnSurface { label: String, value: f64 },

    /// Rejection sampling failed to land in any planner domain.
    #[error("domain sampling exhausted after {attempts} rejections")]
    DomainSamplingExhausted { attempts: usize },

    /// A configuration value violates its invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A deserialized or hand-built value violates a structural invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
