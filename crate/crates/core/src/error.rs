use thiserror::Error;

use crate::exponent::PExponent;

/// A triple that breaks the p-triangle inequality, with the amount by which
/// it fails. Indices refer to positions in the space's label list and the
/// violated inequality is `d(i,j) <= d(i,k) ⊞_p d(k,j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleViolation {
    pub i: usize,
    pub k: usize,
    pub j: usize,
    pub lhs: f64,
    pub bound: f64,
    /// `lhs - bound`, always positive for a reported violation.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Matrix shape, symmetry, diagonal, sign or label problems. These are
    /// detected at construction time and are distinct from triangle
    /// violations, which concern an otherwise well-formed matrix.
    #[error("structural: {0}")]
    Structural(String),

    /// The matrix is well-formed but fails the p-triangle inequality.
    #[error(
        "not a {p}-metric: d({i},{j}) = {lhs} exceeds d({i},{k}) \u{229e}_{p} d({k},{j}) = {bound} by {slack:e}",
        p = p, i = v.i, j = v.j, k = v.k, lhs = v.lhs, bound = v.bound, slack = v.slack
    )]
    Triangle { p: PExponent, v: TriangleViolation },

    /// An enumeration or tuple budget would be exceeded; the message names
    /// the bound that was hit.
    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input file/stream could not be read or decoded at all.
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
