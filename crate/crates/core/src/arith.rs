//! Generalized addition and difference of non-negative reals.
//!
//! The p-sum `a ⊞_p b = (a^p + b^p)^{1/p}` (max at p = ∞) makes
//! `(ℝ_{≥0}, ⊞_p)` a commutative monoid with identity 0. The absolute
//! p-difference `Λ_p(a, b) = |a^p − b^p|^{1/p}` degenerates at p = ∞ to
//! `max(a, b)` for distinct arguments and 0 otherwise, and `A_p` is its
//! asymmetric variant that clamps to 0 when `a ≤ b`.
//!
//! Finite-p powers are evaluated in factored log-domain form
//! (`hi · f(lo/hi)`), so exponents like p = 100 neither overflow nor lose
//! the identities `x ⊞_p 0 = x` and `Λ_p(x, 0) = x`.

use crate::error::{Error, Result};
use crate::exponent::{NonNegReal, PExponent};

pub(crate) fn p_sum_f(a: f64, b: f64, p: PExponent) -> f64 {
    if p.is_infinity() {
        return a.max(b);
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo == 0.0 {
        return hi;
    }
    let pv = p.get();
    if pv == 1.0 {
        return a + b;
    }
    if pv == 2.0 {
        return a.hypot(b);
    }
    // hi * (1 + (lo/hi)^p)^(1/p); the ratio is in (0, 1].
    hi * (((lo / hi).powf(pv)).ln_1p() / pv).exp()
}

pub(crate) fn lambda_p_f(a: f64, b: f64, p: PExponent) -> f64 {
    if p.is_infinity() {
        // Λ_∞ is discontinuous by definition; exact-zero equality is bitwise.
        // Callers needing tolerant comparison apply their own epsilon first.
        return if a.to_bits() == b.to_bits() {
            0.0
        } else {
            a.max(b)
        };
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo == hi {
        return 0.0;
    }
    if lo == 0.0 {
        return hi;
    }
    let pv = p.get();
    if pv == 1.0 {
        return hi - lo;
    }
    if pv == 2.0 {
        return ((hi - lo) * (hi + lo)).sqrt();
    }
    // hi * (1 - (lo/hi)^p)^(1/p) with 1 - r^p = -expm1(p ln r).
    hi * (-(pv * (lo / hi).ln()).exp_m1()).powf(1.0 / pv)
}

pub(crate) fn a_p_f(a: f64, b: f64, p: PExponent) -> f64 {
    if a > b {
        lambda_p_f(a, b, p)
    } else {
        0.0
    }
}

/// The p-sum `a ⊞_p b`.
pub fn p_sum(a: NonNegReal, b: NonNegReal, p: PExponent) -> NonNegReal {
    NonNegReal::raw(p_sum_f(a.get(), b.get(), p))
}

/// Folds `⊞_p` over a non-empty slice, left to right.
pub fn p_sum_many(values: &[NonNegReal], p: PExponent) -> Result<NonNegReal> {
    let (first, rest) = values
        .split_first()
        .ok_or_else(|| Error::invalid("p_sum_many: empty fold is undefined"))?;
    Ok(rest.iter().fold(*first, |acc, v| p_sum(acc, *v, p)))
}

/// The absolute p-difference `Λ_p(a, b)`.
pub fn lambda_p(a: NonNegReal, b: NonNegReal, p: PExponent) -> NonNegReal {
    NonNegReal::raw(lambda_p_f(a.get(), b.get(), p))
}

/// The asymmetric p-difference: `Λ_p(a, b)` when `a > b`, else 0.
pub fn a_p(a: NonNegReal, b: NonNegReal, p: PExponent) -> NonNegReal {
    NonNegReal::raw(a_p_f(a.get(), b.get(), p))
}
