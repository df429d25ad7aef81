//! Numeric special functions: Hurwitz zeta, log-factorials, exact binomials.
//!
//! The Hurwitz zeta function
//!
//! ζ(α, q) = Σ_{j≥0} (j + q)^(−α),   α > 1, q > 0,
//!
//! is the normalizer of the power-law family under uniform thinning. It is
//! evaluated by direct summation of the head plus the integral of the tail
//! with a midpoint correction; the remainder of that correction is bounded by
//! |f′(J)|/12 for the convex integrand f(x) = (x + q)^(−α), which gives a
//! certified error bound alongside the value.

use crate::dist::DistError;
use crate::scalar::{from_usize, real, Real};

/// Hard cap on summation length for the zeta evaluation.
const MAX_TERMS: usize = 50_000_000;

/// Evaluates ζ(α, q) = Σ_{j≥0} (j+q)^(−α) with a certified error bound.
///
/// Returns `(value, error_bound)`. The summation length is chosen so that the
/// bound does not exceed `tol` in absolute terms when the value is of order
/// one, and `tol` relative to the value when the value is small (large `q`).
pub fn hurwitz_zeta_with<T: Real>(alpha: T, q: T, tol: T) -> Result<(T, T), DistError> {
    if alpha <= T::one() {
        return Err(DistError::InvalidParameter(format!(
            "hurwitz zeta diverges for alpha = {alpha} <= 1"
        )));
    }
    if q <= T::zero() {
        return Err(DistError::InvalidParameter(format!(
            "hurwitz zeta requires q > 0, got {q}"
        )));
    }
    if tol <= T::zero() {
        return Err(DistError::InvalidParameter(
            "zeta tolerance must be positive".into(),
        ));
    }

    // Crude value estimate from the integral sandwich, used to switch the
    // target between absolute (value >= 1) and relative (value < 1).
    let one = T::one();
    let estimate = q.powf(one - alpha) / (alpha - one);
    let target = tol * estimate.min(one);

    // alpha * (J+q)^-(alpha+1) / 12 <= target  =>  J+q >= (alpha/(12 target))^(1/(alpha+1))
    let need = (alpha / (real::<T>(12.0) * target)).powf(one / (alpha + one));
    let j_terms = if need <= q {
        16usize
    } else {
        let j = (need - q).to_f64().unwrap_or(f64::INFINITY).ceil();
        if !j.is_finite() || j as usize > MAX_TERMS {
            return Err(DistError::InvalidParameter(format!(
                "zeta tolerance {tol} unreachable within {MAX_TERMS} terms"
            )));
        }
        (j as usize).max(16)
    };

    // Sum ascending terms in descending order (small first), compensated.
    let mut sum = T::zero();
    let mut comp = T::zero();
    for j in (0..j_terms).rev() {
        let term = (from_usize::<T>(j) + q).powf(-alpha);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    let edge = from_usize::<T>(j_terms) + q;
    let tail_integral = edge.powf(one - alpha) / (alpha - one);
    let half_term = edge.powf(-alpha) / real::<T>(2.0);
    let value = sum + tail_integral + half_term;

    let remainder = alpha * edge.powf(-(alpha + one)) / real::<T>(12.0);
    let rounding = real::<T>(8.0) * T::epsilon() * value;
    Ok((value, remainder + rounding))
}

/// ζ(α, q) at the default certified tolerance 1e-13 (meant for `f64`).
pub fn hurwitz_zeta<T: Real>(alpha: T, q: T) -> Result<(T, T), DistError> {
    hurwitz_zeta_with(alpha, q, real(1e-13))
}

/// Cumulative log-factorials `ln(0!), ln(1!), …, ln(n!)`, compensated.
pub fn ln_factorial_table<T: Real>(n: usize) -> Vec<T> {
    let mut table = Vec::with_capacity(n + 1);
    table.push(T::zero());
    let mut sum = T::zero();
    let mut comp = T::zero();
    for i in 1..=n {
        let y = from_usize::<T>(i).ln() - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        table.push(sum);
    }
    table
}

/// Exact binomial coefficient in `u128`. `C(130, 65)` still fits; beyond
/// that the accumulation would wrap, so oversized arguments panic instead
/// of silently corrupting downstream weights.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    assert!(n <= 130, "exact binomial limited to n <= 130, got {n}");
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc
}

/// Binomial coefficient rounded into the scalar type.
pub fn binomial<T: Real>(n: u64, k: u64) -> T {
    real(binomial_u128(n, k) as f64)
}
