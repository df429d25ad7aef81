use crate::dist::{DistError, Orientation, TriMatrix, TruncatedPmf};
use crate::scalar::{from_usize, real, Real};
use crate::special::{hurwitz_zeta, ln_factorial_table};
use crate::zoo::{DistSpec, ThinSpec};

/// Hard cap on automatic window extension.
pub const HARD_CAP: usize = 10_000;

/// Instantiates a built-in law on a window wide enough that the omitted tail
/// stays below `tail_tol`, extending the requested `n_max` if necessary (up
/// to [`HARD_CAP`]). Weights are the untruncated masses; the omitted tail is
/// recorded, not folded back in.
pub fn make_dist<T: Real>(
    spec: &DistSpec<T>,
    n_max: usize,
    tail_tol: T,
) -> Result<TruncatedPmf<T>, DistError> {
    spec.validate()?;
    match spec {
        DistSpec::Poisson { lambda } => {
            let head = |n: usize| -> Vec<T> {
                let mut w = Vec::with_capacity(n + 1);
                w.push((-*lambda).exp());
                for i in 0..n {
                    let next = w[i] * *lambda / from_usize::<T>(i + 1);
                    w.push(next);
                }
                w
            };
            grow_until(n_max, tail_tol, head)
        }
        DistSpec::Binomial { r, p } => {
            let r = *r as usize;
            let window = n_max.max(r);
            let mut w = vec![T::zero(); window + 1];
            w[0] = (T::one() - *p).powi(r as i32);
            for k in 0..r {
                let ratio = *p / (T::one() - *p);
                w[k + 1] = w[k] * from_usize::<T>(r - k) / from_usize::<T>(k + 1) * ratio;
            }
            let sum: T = w.iter().copied().sum();
            TruncatedPmf::new(w, (T::one() - sum).abs(), true)
        }
        DistSpec::NegBinomial { r, p } => {
            let head = |n: usize| -> Vec<T> {
                let mut w = Vec::with_capacity(n + 1);
                w.push((T::one() - *p).powf(*r));
                for i in 0..n {
                    let next = w[i] * (*r + from_usize::<T>(i)) / from_usize::<T>(i + 1) * *p;
                    w.push(next);
                }
                w
            };
            grow_until(n_max, tail_tol, head)
        }
        DistSpec::PowerLaw { alpha } => {
            let (zeta, zeta_err) = hurwitz_zeta(*alpha, T::one())?;
            let mut window = n_max;
            loop {
                let (tail_z, _) = hurwitz_zeta(*alpha, from_usize::<T>(window + 2))?;
                let tail = tail_z / zeta;
                if tail < tail_tol {
                    let w: Vec<T> = (0..=window)
                        .map(|n| from_usize::<T>(n + 1).powf(-*alpha) / zeta)
                        .collect();
                    return TruncatedPmf::new(w, tail + zeta_err, true);
                }
                if window >= HARD_CAP {
                    return Err(DistError::TailUnreachable {
                        tail_tol: tail_tol.to_f64().unwrap_or(f64::NAN),
                        cap: HARD_CAP,
                        achieved: tail.to_f64().unwrap_or(f64::NAN),
                    });
                }
                window = (window * 2).clamp(16, HARD_CAP);
            }
        }
        DistSpec::PointMass { m } => TruncatedPmf::point_mass(*m, n_max.max(*m)),
        DistSpec::Custom { weights } => {
            let mut w: Vec<T> = weights.clone();
            if w.len() < n_max + 1 {
                w.resize(n_max + 1, T::zero());
            }
            TruncatedPmf::from_weights(w)
        }
    }
}

/// Extends the window until the leftover mass drops below the tolerance.
fn grow_until<T: Real>(
    n_max: usize,
    tail_tol: T,
    head: impl Fn(usize) -> Vec<T>,
) -> Result<TruncatedPmf<T>, DistError> {
    let mut window = n_max;
    loop {
        let w = head(window);
        let sum: T = w.iter().copied().sum();
        let tail = (T::one() - sum).max(T::zero());
        if tail < tail_tol {
            return TruncatedPmf::new(w, tail + real(1e-15), true);
        }
        if window >= HARD_CAP {
            return Err(DistError::TailUnreachable {
                tail_tol: tail_tol.to_f64().unwrap_or(f64::NAN),
                cap: HARD_CAP,
                achieved: tail.to_f64().unwrap_or(f64::NAN),
            });
        }
        window = (window * 2).clamp(16, HARD_CAP);
    }
}

/// Builds the thinning matrix of a descriptor on `{0, …, n_max}`.
pub fn make_thinning<T: Real>(spec: &ThinSpec<T>, n_max: usize) -> Result<TriMatrix<T>, DistError> {
    spec.validate()?;
    let side = n_max + 1;
    let rows = match spec {
        ThinSpec::Independent { q } => {
            // Binomial rows in log space so deep windows cannot overflow the
            // intermediate factorials.
            let lf = ln_factorial_table::<T>(n_max);
            let ln_q = q.ln();
            let ln_1q = (T::one() - *q).ln();
            (0..side)
                .map(|n| {
                    let mut row = vec![T::zero(); side];
                    for (k, slot) in row.iter_mut().enumerate().take(n + 1) {
                        let ln_c = lf[n] - lf[k] - lf[n - k];
                        *slot = (ln_c
                            + from_usize::<T>(k) * ln_q
                            + from_usize::<T>(n - k) * ln_1q)
                            .exp();
                    }
                    row
                })
                .collect()
        }
        ThinSpec::Uniform => (0..side)
            .map(|n| {
                let mut row = vec![T::zero(); side];
                let mass = T::one() / from_usize::<T>(n + 1);
                for slot in row.iter_mut().take(n + 1) {
                    *slot = mass;
                }
                row
            })
            .collect(),
        ThinSpec::AlmostNothing { q } => (0..side)
            .map(|n| {
                let mut row = vec![T::zero(); side];
                if n == 0 {
                    row[0] = T::one();
                } else {
                    row[n] = *q;
                    row[n - 1] = T::one() - *q;
                }
                row
            })
            .collect(),
        ThinSpec::AllOrNothing { q } => (0..side)
            .map(|n| {
                let mut row = vec![T::zero(); side];
                if n == 0 {
                    row[0] = T::one();
                } else {
                    row[n] = *q;
                    row[0] = T::one() - *q;
                }
                row
            })
            .collect(),
        ThinSpec::Custom { rows } => {
            if rows.len() < side {
                return Err(DistError::DimensionMismatch {
                    left: rows.len(),
                    right: side,
                });
            }
            rows.iter()
                .take(side)
                .map(|r| {
                    let mut row = r.clone();
                    row.resize(side, T::zero());
                    row
                })
                .collect()
        }
    };
    TriMatrix::from_rows(rows, Orientation::Lower)
}
