//! Small numerical helpers: stable log-domain arithmetic, tail sums of
//! power-law series, sample statistics and least squares.

use serde::{Deserialize, Serialize};

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln Σ e^{x_k}`; returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln cosh z`, accurate for large `|z|`.
pub fn ln_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Composite Simpson rule on `[a, b]` with `panels` (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// `Σ_{t ≥ from} f(t)` for a smooth, eventually monotone summand decaying
/// like `t^{-p}` with `p > 1`.
///
/// The first `direct` terms are added explicitly; the remainder uses the
/// Euler-Maclaurin formula with the integral computed on a logarithmic grid.
pub fn tail_sum<F: Fn(f64) -> f64>(f: F, from: usize, p: f64, direct: usize) -> f64 {
    assert!(p > 1.0, "tail_sum needs a summable power");
    let mut s = 0.0;
    for t in from..from + direct {
        s += f(t as f64);
    }
    let n = (from + direct) as f64;
    s + euler_maclaurin_remainder(&f, n, p)
}

/// `Σ_{t ≥ n} f(t)` via `∫_n^∞ f + f(n)/2 - f'(n)/12`.
pub fn euler_maclaurin_remainder<F: Fn(f64) -> f64>(f: &F, n: f64, p: f64) -> f64 {
    // t = n e^u, the integrand decays like e^{-(p-1)u}
    let upper = 48.0 / (p - 1.0);
    let integral = simpson(|u| {
        let t = n * u.exp();
        f(t) * t
    }, 0.0, upper, 20_000);
    let h = 1e-3 * n;
    let deriv = (f(n + h) - f(n - h)) / (2.0 * h);
    integral + 0.5 * f(n) - deriv / 12.0
}

/// Monte Carlo or deterministic estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            std_err: 0.0,
            samples: 1,
        }
    }

    /// Sample mean and standard error of the mean.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Estimate {
                value: f64::NAN,
                std_err: f64::NAN,
                samples: 0,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            value: mean,
            std_err: se,
            samples: n,
        }
    }

    /// Is `|self - other| <= k * sqrt(se_1^2 + se_2^2)`?
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        let pooled = (self.std_err * self.std_err + other.std_err * other.std_err).sqrt();
        (self.value - other.value).abs() <= k * pooled
    }
}

/// Ordinary least squares fit `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}
