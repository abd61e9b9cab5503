//! Exact, desk-scale computation of Gromov-Hausdorff-type distances on
//! finite p-metric and ultrametric spaces.
//!
//! The crate is organized around a small tower:
//!
//! * [`arith`]: the p-sum `⊞_p`, absolute p-difference `Λ_p` and its
//!   asymmetric variant `A_p`, with p = ∞ as a first-class case.
//! * [`space`]: finite metric spaces as validated dense distance
//!   matrices, with diameter/separation/spectrum and curvature sets.
//! * [`project`]: the canonical projections `𝔖_p` onto p-metric spaces
//!   (Floyd-Warshall on p-th powers; single-linkage minimax at p = ∞)
//!   and the snowflake transform.
//! * [`dendrogram`]: the bijection between finite ultrametric spaces and
//!   dendrograms, t-closed quotients, and canonical signatures that decide
//!   ultrametric isometry.
//! * [`gh`]: p-distortion of correspondences and maps, exact `d_GH^(p)`
//!   by enumeration at small scale, the closed-form `u_GH` scan over
//!   quotient signatures, Hausdorff distances on ultrametric subsets, and
//!   the spectrum/curvature lower bounds and diameter/Hölder bounds.
//! * [`interleave`]: interleaving distances `d_I` and `d_{I,p}` between
//!   finite ultrametric spaces via the distortion characterization.
//! * [`generate`]: seeded, reproducible generators for random metric,
//!   p-metric, and ultrametric spaces.
//! * [`selftest`]: the seeded property suites behind `pgh selftest`.
//!
//! Everything is pure and immutable after construction; all operations can
//! be called concurrently.

#![forbid(unsafe_code)]

pub mod arith;
pub mod dendrogram;
pub mod error;
pub mod exponent;
pub mod generate;
pub mod gh;
pub mod interleave;
pub mod io;
pub mod project;
pub mod selftest;
pub mod space;

pub use arith::{a_p, lambda_p, p_sum, p_sum_many};
pub use error::{Error, Result, TriangleViolation};
pub use exponent::{NonNegReal, PExponent};
pub use space::FiniteMetricSpace;

/// Absolute tolerance for distance comparisons, triangle checks, spectrum
/// deduplication and signature height snapping. Inputs are doubles read
/// from text; 1e-9 is far below any meaningful spectrum gap at desk scale.
pub const EPS: f64 = 1e-9;

/// Limits for the exhaustive searches. Exceeding a limit yields
/// [`Error::Budget`] naming the bound instead of an open-ended computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Cap on `#X^n` tuple enumeration for curvature sets.
    pub max_tuples: u128,
    /// Cap on `#Y^#X · #X^#Y` map-pair enumeration (exact `d_GH^(p)`,
    /// interleaving distances).
    pub max_map_pairs: u128,
    /// Cap on `#X·#Y` for raw `2^(#X·#Y)` correspondence-subset enumeration.
    pub max_raw_product: u32,
}

impl Default for Budget {
    fn default() -> Self {
        // The defaults admit raw subset search up to #X·#Y = 20 and
        // map-pair search up to 5x5 spaces (5^5 · 5^5 < 10^7).
        Budget {
            max_tuples: 4_000_000,
            max_map_pairs: 40_000_000,
            max_raw_product: 20,
        }
    }
}

impl Budget {
    /// A budget scaled from one knob, as set by the `PGH_BUDGET`
    /// environment variable: `limit` caps both tuple and map-pair counts.
    pub fn from_limit(limit: u128) -> Self {
        Budget {
            max_tuples: limit,
            max_map_pairs: limit,
            ..Budget::default()
        }
    }
}

/// Snaps a non-negative distance value to the comparison grid of width
/// [`EPS`]. Used wherever values from two different spaces must be tested
/// for equality (signature heights, spectra, curvature matrices).
pub(crate) fn grid(value: f64) -> i64 {
    (value / EPS).round() as i64
}
