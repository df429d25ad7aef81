//! Closed-form condensation matrices for the supported model pairs.
//!
//! Each supported `(law, thinning)` pair admits an explicit posterior:
//!
//! * Poisson(λ) under independent q-thinning — splitting rows are
//!   Poisson((1−q)λ), identical for every kept count.
//! * Binomial(r, p) under independent q-thinning — splitting row `k` is
//!   Binomial(r−k, p(1−q)/(1−pq)).
//! * Negative binomial(r, p) under independent q-thinning — splitting row `k`
//!   is negative binomial(r+k, p(1−q)).
//! * Power law (α) under uniform thinning — `Q[k][n] = (n+1)^(−α−1)/ζ(α+1, k+1)`.
//! * Any law under all-or-nothing thinning — a point of mass 1 above, a
//!   two-part row at zero.
//! * Any law under almost-nothing thinning — a two-point row mixing `k` and
//!   `k+1`.
//!
//! Rows are evaluated from the analytic formulas and then renormalized onto
//! the window, so the matrices line up entrywise with the Bayes route
//! computed on the same window; the absorbed defect is recorded on the
//! matrix. Certified unrenormalized values for spot checks come from the
//! `*_entry` helpers.

use crate::dist::{DistError, Orientation, TriMatrix};
use crate::scalar::{from_usize, Real};
use crate::special::hurwitz_zeta;
use crate::zoo::{make_dist, DistSpec, ThinSpec};

/// Raw condensation entry of the power-law/uniform pair,
/// `Q[k][n] = (n+1)^(−α−1) / ζ(α+1, k+1)`, with a certified error bound.
pub fn power_law_condensation_entry<T: Real>(
    alpha: T,
    k: usize,
    n: usize,
) -> Result<(T, T), DistError> {
    if n < k {
        return Ok((T::zero(), T::zero()));
    }
    let (zeta, zeta_err) = hurwitz_zeta(alpha + T::one(), from_usize::<T>(k + 1))?;
    let value = from_usize::<T>(n + 1).powf(-(alpha + T::one())) / zeta;
    let bound = value * (zeta_err / zeta) + T::epsilon() * value;
    Ok((value, bound))
}

/// Splitting form of the same entry, `Υ[k][l] = 1 / (ζ(α+1, k+1) (k+l+1)^(α+1))`.
pub fn power_law_splitting_entry<T: Real>(
    alpha: T,
    k: usize,
    l: usize,
) -> Result<(T, T), DistError> {
    power_law_condensation_entry(alpha, k, k + l)
}

/// Assembles the closed-form condensation matrix for a supported pair on
/// `{0, …, n_max}`. Rows whose kept count is unreachable (zero thinned mass)
/// degenerate to a point mass, matching the Bayes convention.
pub fn closed_form_condensation<T: Real>(
    dist: &DistSpec<T>,
    thin: &ThinSpec<T>,
    n_max: usize,
) -> Result<TriMatrix<T>, DistError> {
    dist.validate()?;
    thin.validate()?;
    let side = n_max + 1;
    let one = T::one();

    let rows: Vec<Vec<T>> = match (dist, thin) {
        (DistSpec::Poisson { lambda }, ThinSpec::Independent { q }) => {
            let mean = (one - *q) * *lambda;
            (0..side)
                .map(|k| {
                    let mut row = vec![T::zero(); side];
                    let mut mass = (-mean).exp();
                    for (l, slot) in row.iter_mut().skip(k).enumerate() {
                        *slot = mass;
                        mass = mass * mean / from_usize::<T>(l + 1);
                    }
                    row
                })
                .collect()
        }
        (DistSpec::Binomial { r, p }, ThinSpec::Independent { q }) => {
            let r = *r as usize;
            let denom = one - *p * *q;
            let succ = *p * (one - *q) / denom;
            let fail = (one - *p) / denom;
            (0..side)
                .map(|k| {
                    let mut row = vec![T::zero(); side];
                    if k > r {
                        row[k] = one;
                        return row;
                    }
                    let width = (r - k).min(n_max - k);
                    let mut mass = fail.powi((r - k) as i32);
                    for l in 0..=width {
                        row[k + l] = mass;
                        if l < width {
                            mass = mass * from_usize::<T>(r - k - l) / from_usize::<T>(l + 1)
                                * (succ / fail);
                        }
                    }
                    row
                })
                .collect()
        }
        (DistSpec::NegBinomial { r, p }, ThinSpec::Independent { q }) => {
            let succ = *p * (one - *q);
            (0..side)
                .map(|k| {
                    let mut row = vec![T::zero(); side];
                    let shape = *r + from_usize::<T>(k);
                    let mut mass = (one - succ).powf(shape);
                    for (l, slot) in row.iter_mut().skip(k).enumerate() {
                        *slot = mass;
                        mass = mass * succ * (shape + from_usize::<T>(l)) / from_usize::<T>(l + 1);
                    }
                    row
                })
                .collect()
        }
        (DistSpec::PowerLaw { alpha }, ThinSpec::Uniform) => {
            // zeta(α+1, k+1) built upward from the certified largest-shift
            // value, adding head terms; downward subtraction would cancel.
            let exponent = *alpha + one;
            let (mut zeta_k, _) = hurwitz_zeta(exponent, from_usize::<T>(side + 1))?;
            let mut zetas = vec![T::zero(); side + 1];
            for k in (0..=side).rev() {
                zetas[k] = zeta_k;
                if k > 0 {
                    zeta_k += from_usize::<T>(k).powf(-exponent);
                }
            }
            (0..side)
                .map(|k| {
                    let mut row = vec![T::zero(); side];
                    for (n, slot) in row.iter_mut().enumerate().skip(k) {
                        *slot = from_usize::<T>(n + 1).powf(-exponent) / zetas[k];
                    }
                    row
                })
                .collect()
        }
        (_, ThinSpec::AllOrNothing { q }) => {
            let nu = make_dist(dist, n_max, one)?;
            let nu0 = nu.weight(0);
            let denom = (one - *q) + *q * nu0;
            (0..side)
                .map(|k| {
                    let mut row = vec![T::zero(); side];
                    if k == 0 {
                        row[0] = nu0 / denom;
                        for (n, slot) in row.iter_mut().enumerate().skip(1) {
                            *slot = (one - *q) * nu.weight(n) / denom;
                        }
                    } else {
                        row[k] = one;
                    }
                    row
                })
                .collect()
        }
        (_, ThinSpec::AlmostNothing { q }) => {
            let nu = make_dist(dist, n_max, one)?;
            (0..side)
                .map(|k| {
                    let mut row = vec![T::zero(); side];
                    let here = nu.weight(k);
                    let above = nu.weight(k + 1);
                    let keep = if k == 0 { one } else { *q };
                    let denom = keep * here + (one - *q) * above;
                    if denom > T::zero() {
                        row[k] = keep * here / denom;
                        if k < n_max {
                            row[k + 1] = (one - *q) * above / denom;
                        }
                    } else {
                        row[k] = one;
                    }
                    row
                })
                .collect()
        }
        _ => {
            return Err(DistError::UnsupportedPair {
                dist: dist.name().into(),
                thinning: thin.name().into(),
            })
        }
    };

    TriMatrix::from_rows_renormalizing(rows, Orientation::Upper)
}
