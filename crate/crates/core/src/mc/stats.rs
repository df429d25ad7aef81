use serde::{Deserialize, Serialize};

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// Distance from `target` in units of the standard error.
    pub fn z_against(&self, target: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.stderr
        }
    }
}

/// Streaming mean/variance accumulator (Welford), mergeable in a fixed
/// order so chunked parallel reductions stay bit-identical.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = (self.n + other.n) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n;
        self.m2 += other.m2 + delta * delta * self.n as f64 * other.n as f64 / n;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn estimate(&self, seed: u64) -> MCEstimate {
        MCEstimate {
            mean: self.mean(),
            stderr: self.stderr(),
            n_samples: self.n,
            seed,
        }
    }
}

/// ln Γ(k/2) for positive integer `k`, through the closed forms for integer
/// and half-integer arguments; covers every chi-square degree of freedom.
fn ln_gamma_half(k: u64) -> f64 {
    if k.is_multiple_of(2) {
        // Γ(m) = (m-1)!
        let m = k / 2;
        (1..m).map(|i| (i as f64).ln()).sum()
    } else {
        // Γ(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)
        let m = (k - 1) / 2;
        let ln_fact = |j: u64| -> f64 { (1..=j).map(|i| (i as f64).ln()).sum() };
        ln_fact(2 * m) + 0.5 * std::f64::consts::PI.ln()
            - m as f64 * 4.0f64.ln()
            - ln_fact(m)
    }
}

/// Regularized lower incomplete gamma `P(a, x)` for `a = half_twice/2`,
/// by series for `x < a + 1` and continued fraction otherwise.
pub fn gamma_p(half_twice: u64, x: f64) -> f64 {
    assert!(half_twice > 0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let a = half_twice as f64 / 2.0;
    let ln_gamma = ln_gamma_half(half_twice);
    if x < a + 1.0 {
        // Series: P(a,x) = x^a e^-x / Γ(a) Σ x^n / (a (a+1) ... (a+n)).
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..500 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (sum * (a * x.ln() - x - ln_gamma).exp()).min(1.0)
    } else {
        // Lentz continued fraction for Q(a,x).
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (a * x.ln() - x - ln_gamma).exp() * h;
        (1.0 - q).clamp(0.0, 1.0)
    }
}

/// Upper tail probability of the chi-square distribution with `df` degrees
/// of freedom at `stat`.
pub fn chi_square_pvalue(stat: f64, df: u64) -> f64 {
    1.0 - gamma_p(df, stat / 2.0)
}
