//! Interleaving distances between finite ultrametric spaces, through the
//! distortion characterization: `d_{I,p}(X, Y)` is the minimum over map
//! pairs `φ: X→Y`, `ψ: Y→X` of
//! `max(dis_{I,p}(φ), dis_{I,p}(ψ), codis_{I,p}(φ, ψ))`, where the
//! I-distortion penalizes expansion only (`A_p` of image distance against
//! source distance) and the I-codistortion is `2^{-1/p}` times the worst
//! round-trip displacement. At p = ∞ this coincides with `u_GH`.

use crate::arith::a_p_f;
use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::gh::{all_maps, pruned_pair_min};
use crate::space::FiniteMetricSpace;
use crate::Budget;

/// Result of an interleaving-distance search: the value and a map pair
/// attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct InterleavingReport {
    pub value: f64,
    pub witness_phi: Vec<usize>,
    pub witness_psi: Vec<usize>,
}

fn check_map(map: &[usize], from: &FiniteMetricSpace, to: &FiniteMetricSpace) -> Result<()> {
    if map.len() != from.len() || map.iter().any(|&j| j >= to.len()) {
        return Err(Error::invalid(format!(
            "map must be total on a {}-point space with values among {} points",
            from.len(),
            to.len()
        )));
    }
    Ok(())
}

fn dis_i_p_raw(phi: &[usize], x: &FiniteMetricSpace, y: &FiniteMetricSpace, p: PExponent) -> f64 {
    let n = x.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max(a_p_f(y.dist(phi[i], phi[j]), x.dist(i, j), p));
        }
    }
    worst
}

fn round_trip_worst(fwd: &[usize], back: &[usize], space: &FiniteMetricSpace) -> f64 {
    (0..space.len())
        .map(|i| space.dist(i, back[fwd[i]]))
        .fold(0.0, f64::max)
}

/// The p-I-distortion of `φ: X→Y`:
/// `sup A_p(u_Y(φ(x), φ(x')), u_X(x, x'))`. At p = 1 this is the worst
/// positive part of `u_Y(φ(x), φ(x')) − u_X(x, x')`.
pub fn dis_i_p(
    phi: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
) -> Result<f64> {
    check_map(phi, x, y)?;
    Ok(dis_i_p_raw(phi, x, y, p))
}

/// The p-I-codistortion: `2^{-1/p} · max` of the two round-trip
/// displacement maxima `u_X(x, ψ∘φ(x))` and `u_Y(y, φ∘ψ(y))`.
pub fn codis_i_p(
    phi: &[usize],
    psi: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
) -> Result<f64> {
    check_map(phi, x, y)?;
    check_map(psi, y, x)?;
    Ok(p.half_pow() * round_trip_worst(phi, psi, x).max(round_trip_worst(psi, phi, y)))
}

/// Exact `d_{I,p}` by exhaustive map-pair search with pruning, with the
/// witnesses attaining the minimum. Both inputs must be ultrametric.
pub fn interleaving_distance(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    p: PExponent,
    budget: &Budget,
) -> Result<InterleavingReport> {
    x.validate(PExponent::INFINITY)?;
    y.validate(PExponent::INFINITY)?;
    let (nx, ny) = (x.len(), y.len());
    let count = (ny as u128)
        .checked_pow(nx as u32)
        .and_then(|a| {
            (nx as u128)
                .checked_pow(ny as u32)
                .and_then(|b| a.checked_mul(b))
        })
        .unwrap_or(u128::MAX);
    if count > budget.max_map_pairs {
        return Err(Error::Budget {
            what: format!("interleaving map-pair search on {nx}x{ny} points"),
            needed: count,
            limit: budget.max_map_pairs,
        });
    }
    let phis: Vec<(f64, Vec<usize>)> = all_maps(nx, ny)
        .into_iter()
        .map(|m| (dis_i_p_raw(&m, x, y, p), m))
        .collect();
    let psis: Vec<(f64, Vec<usize>)> = all_maps(ny, nx)
        .into_iter()
        .map(|m| (dis_i_p_raw(&m, y, x, p), m))
        .collect();
    let coeff = p.half_pow();
    let (value, phi, psi) = pruned_pair_min(phis, psis, |phi, psi| {
        coeff * round_trip_worst(phi, psi, x).max(round_trip_worst(psi, phi, y))
    });
    Ok(InterleavingReport {
        value,
        witness_phi: phi,
        witness_psi: psi,
    })
}

/// Whether `(φ, ψ)` realizes an ε-interleaving of the two ultrametric
/// spaces: images expand distances by at most ε and both round trips
/// displace every point by at most 2ε.
pub fn check_eps_interleaved(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    phi: &[usize],
    psi: &[usize],
    eps: f64,
) -> Result<bool> {
    if eps < 0.0 || eps.is_nan() {
        return Err(Error::invalid(format!("epsilon must be >= 0, got {eps}")));
    }
    x.validate(PExponent::INFINITY)?;
    y.validate(PExponent::INFINITY)?;
    check_map(phi, x, y)?;
    check_map(psi, y, x)?;
    let expands_ok = |map: &[usize], from: &FiniteMetricSpace, to: &FiniteMetricSpace| {
        (0..from.len())
            .all(|i| (i + 1..from.len()).all(|j| to.dist(map[i], map[j]) <= from.dist(i, j) + eps))
    };
    Ok(expands_ok(phi, x, y)
        && expands_ok(psi, y, x)
        && round_trip_worst(phi, psi, x) <= 2.0 * eps
        && round_trip_worst(psi, phi, y) <= 2.0 * eps)
}
