//! Strand charge laws and the product disorder field `ω_{ij} = ω̂_i ω̄_j`.

use crate::error::{Error, Result};
use crate::lattice::BoxSize;
use crate::numerics::{ln_cosh, log_sum_exp};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Largest support allowed for a discrete law.
pub const MAX_SUPPORT: usize = 8;

/// Law of a single strand charge; both strands share it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrandLaw {
    Gaussian { sigma: f64 },
    /// `±x` with probability ½ each.
    Rademacher { x: f64 },
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl StrandLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            StrandLaw::Gaussian { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::param("disorder.sigma", "must be positive"));
                }
            }
            StrandLaw::Rademacher { x } => {
                if !(x.is_finite() && *x > 0.0) {
                    return Err(Error::param("disorder.x", "must be positive"));
                }
            }
            StrandLaw::Discrete { values, probs } => {
                if values.is_empty() {
                    return Err(Error::param("disorder.values", "support is empty"));
                }
                if values.len() != probs.len() {
                    return Err(Error::param("disorder.probs", "length differs from values"));
                }
                if values.len() > MAX_SUPPORT {
                    return Err(Error::param("disorder.values", format!("support larger than {MAX_SUPPORT}")));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::param("disorder.values", "entries must be finite"));
                }
                if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return Err(Error::param("disorder.probs", "entries must be nonnegative"));
                }
                let s: f64 = probs.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(Error::param("disorder.probs", format!("sum to {s}, not 1")));
                }
            }
        }
        Ok(())
    }

    /// Largest β with `E[e^{β ω̂ ω̄}] < ∞`.
    pub fn beta0(&self) -> f64 {
        match self {
            StrandLaw::Gaussian { sigma } => 1.0 / (sigma * sigma),
            _ => f64::INFINITY,
        }
    }

    /// Finite support `(values, probs)`; Gaussian has none.
    pub fn support(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            StrandLaw::Gaussian { .. } => None,
            StrandLaw::Rademacher { x } => Some((vec![-x, *x], vec![0.5, 0.5])),
            StrandLaw::Discrete { values, probs } => Some((values.clone(), probs.clone())),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            StrandLaw::Gaussian { sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                sigma * z
            }
            StrandLaw::Rademacher { x } => {
                if rng.random::<bool>() {
                    *x
                } else {
                    -x
                }
            }
            StrandLaw::Discrete { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                values[values.len() - 1]
            }
        }
    }

    fn check_beta(&self, beta: f64) -> Result<()> {
        let b0 = self.beta0();
        if !beta.is_finite() || beta.abs() >= b0 {
            return Err(Error::Divergence { beta, beta0: b0 });
        }
        Ok(())
    }
}

/// Charges of the two strands in a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrandSample {
    pub hat: Vec<f64>,
    pub bar: Vec<f64>,
}

impl StrandSample {
    pub fn new(hat: Vec<f64>, bar: Vec<f64>) -> Self {
        StrandSample { hat, bar }
    }

    /// All-zero charges, used for the homogeneous model.
    pub fn zeros(bx: BoxSize) -> Self {
        StrandSample {
            hat: vec![0.0; bx.n1],
            bar: vec![0.0; bx.n2],
        }
    }

    pub fn box_size(&self) -> BoxSize {
        BoxSize::new(self.hat.len(), self.bar.len())
    }

    /// `ω_{ij} = ω̂_i ω̄_j`, 1-based.
    pub fn field_value(&self, i: usize, j: usize) -> Result<f64> {
        if i == 0 || j == 0 || i > self.hat.len() || j > self.bar.len() {
            return Err(Error::OutOfRange {
                point: (i, j),
                range: format!("[1, {}] x [1, {}]", self.hat.len(), self.bar.len()),
            });
        }
        Ok(self.hat[i - 1] * self.bar[j - 1])
    }

    /// Sub-sample covering rows `a1+1..=b1` and columns `a2+1..=b2`.
    pub fn window(&self, a1: usize, a2: usize, b1: usize, b2: usize) -> StrandSample {
        StrandSample {
            hat: self.hat[a1..b1].to_vec(),
            bar: self.bar[a2..b2].to_vec(),
        }
    }
}

pub fn sample_strands<R: Rng + ?Sized>(law: &StrandLaw, bx: BoxSize, rng: &mut R) -> StrandSample {
    let hat = (0..bx.n1).map(|_| law.sample(rng)).collect();
    let bar = (0..bx.n2).map(|_| law.sample(rng)).collect();
    StrandSample { hat, bar }
}

/// `λ(β) = log E[e^{β ω̂ ω̄}]`.
pub fn log_mgf(law: &StrandLaw, beta: f64) -> Result<f64> {
    law.check_beta(beta)?;
    Ok(match law {
        StrandLaw::Gaussian { sigma } => {
            let s = beta * sigma * sigma;
            -0.5 * (-s * s).ln_1p()
        }
        StrandLaw::Rademacher { x } => ln_cosh(beta * x * x),
        StrandLaw::Discrete { values, probs } => {
            let mut terms = Vec::with_capacity(values.len() * values.len());
            for (x, px) in values.iter().zip(probs) {
                for (y, py) in values.iter().zip(probs) {
                    if *px > 0.0 && *py > 0.0 {
                        terms.push(px.ln() + py.ln() + beta * x * y);
                    }
                }
            }
            log_sum_exp(&terms)
        }
    })
}

/// `m_k = E[ω̂^k]`.
pub fn moments(law: &StrandLaw, k: u32) -> f64 {
    match law {
        StrandLaw::Gaussian { sigma } => {
            if k % 2 == 1 {
                0.0
            } else {
                // (k-1)!! σ^k
                let mut df = 1.0;
                let mut m = k as i64 - 1;
                while m > 1 {
                    df *= m as f64;
                    m -= 2;
                }
                df * sigma.powi(k as i32)
            }
        }
        StrandLaw::Rademacher { x } => {
            if k % 2 == 1 {
                0.0
            } else {
                x.powi(k as i32)
            }
        }
        StrandLaw::Discrete { values, probs } => values.iter().zip(probs).map(|(v, p)| p * v.powi(k as i32)).sum(),
    }
}

/// `log E[e^{t ω̂}]` for one strand.
pub fn log_mgf_single(law: &StrandLaw, t: f64) -> f64 {
    match law {
        StrandLaw::Gaussian { sigma } => 0.5 * sigma * sigma * t * t,
        StrandLaw::Rademacher { x } => ln_cosh(t * x),
        StrandLaw::Discrete { values, probs } => {
            let terms: Vec<f64> = values
                .iter()
                .zip(probs)
                .filter(|(_, p)| **p > 0.0)
                .map(|(v, p)| p.ln() + t * v)
                .collect();
            log_sum_exp(&terms)
        }
    }
}

/// `log E[e^{-t ω̂²}]` for one strand.
pub fn log_mgf_square(law: &StrandLaw, t: f64) -> Result<f64> {
    match law {
        StrandLaw::Gaussian { sigma } => {
            let d = 2.0 * t * sigma * sigma;
            if d <= -1.0 {
                return Err(Error::Divergence { beta: t, beta0: f64::NAN });
            }
            Ok(-0.5 * d.ln_1p())
        }
        StrandLaw::Rademacher { x } => Ok(-t * x * x),
        StrandLaw::Discrete { values, probs } => {
            let terms: Vec<f64> = values
                .iter()
                .zip(probs)
                .filter(|(_, p)| **p > 0.0)
                .map(|(v, p)| p.ln() - t * v * v)
                .collect();
            Ok(log_sum_exp(&terms))
        }
    }
}

fn discrete_log_sum(values: &[f64], probs: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut terms = Vec::with_capacity(values.len() * values.len());
    for (x, px) in values.iter().zip(probs) {
        for (y, py) in values.iter().zip(probs) {
            if *px > 0.0 && *py > 0.0 {
                terms.push(px.ln() + py.ln() + f(*x, *y));
            }
        }
    }
    log_sum_exp(&terms)
}

/// `log Q(δ, β) = log E[e^{β ω + δ ω̂ + δ ω̄}]`.
pub fn log_tilt_q(law: &StrandLaw, delta: f64, beta: f64) -> Result<f64> {
    law.check_beta(beta)?;
    Ok(match law {
        StrandLaw::Gaussian { sigma } => {
            let s2 = sigma * sigma;
            let s = beta * s2;
            -0.5 * (-s * s).ln_1p() + s2 * delta * delta / (1.0 - s)
        }
        _ => {
            let (v, p) = law.support().expect("finite support");
            discrete_log_sum(&v, &p, |x, y| beta * x * y + delta * x + delta * y)
        }
    })
}

pub fn tilt_q(law: &StrandLaw, delta: f64, beta: f64) -> Result<f64> {
    log_tilt_q(law, delta, beta).map(f64::exp)
}

/// `log R(δ, β) = log E[e^{β ω - δ ω̂² - δ ω̄²}]`.
pub fn log_tilt_r(law: &StrandLaw, delta: f64, beta: f64) -> Result<f64> {
    law.check_beta(beta)?;
    Ok(match law {
        StrandLaw::Gaussian { sigma } => {
            let s2 = sigma * sigma;
            let s = beta * s2;
            let d = 1.0 + 2.0 * delta * s2;
            if d <= s.abs() {
                return Err(Error::Divergence { beta, beta0: law.beta0() });
            }
            // d² - s² = 1 + (4δσ² + 4δ²σ⁴ - s²)
            let e = 4.0 * delta * s2 + 4.0 * delta * delta * s2 * s2 - s * s;
            -0.5 * e.ln_1p()
        }
        _ => {
            let (v, p) = law.support().expect("finite support");
            discrete_log_sum(&v, &p, |x, y| beta * x * y - delta * x * x - delta * y * y)
        }
    })
}

pub fn tilt_r(law: &StrandLaw, delta: f64, beta: f64) -> Result<f64> {
    log_tilt_r(law, delta, beta).map(f64::exp)
}

/// Which normalized tilt ratio to expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiltKind {
    /// Linear tilt `Frac = Q(δ,β) / (Q(δ,0) Q(0,β))`.
    QFrac,
    /// Quadratic tilt `Frac₂ = R(δ,β) / (R(δ,0) R(0,β))`.
    RFrac,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorResidual {
    pub value: f64,
    pub leading_term: f64,
    /// `value - 1 - leading_term`, computed without cancellation against 1.
    pub residual: f64,
}

/// `log Frac` or `log Frac₂`.
pub fn log_frac(kind: TiltKind, law: &StrandLaw, delta: f64, beta: f64) -> Result<f64> {
    let f = match kind {
        TiltKind::QFrac => log_tilt_q,
        TiltKind::RFrac => log_tilt_r,
    };
    Ok(f(law, delta, beta)? - f(law, delta, 0.0)? - f(law, 0.0, beta)?)
}

pub fn taylor_residual(kind: TiltKind, law: &StrandLaw, delta: f64, beta: f64) -> Result<TaylorResidual> {
    let lf = log_frac(kind, law, delta, beta)?;
    let m1 = moments(law, 1);
    let m2 = moments(law, 2);
    let m4 = moments(law, 4);
    let leading_term = match kind {
        // both strands carry the tilt, hence the factor 2
        TiltKind::QFrac => 2.0 * delta * beta * m1 * (m2 - m1 * m1),
        TiltKind::RFrac => -delta * beta * beta * m2 * (m4 - m2 * m2),
    };
    let excess = lf.exp_m1();
    Ok(TaylorResidual {
        value: 1.0 + excess,
        leading_term,
        residual: excess - leading_term,
    })
}

/// Relative entropy per variable of the dilation `(1+δ) ω̂` against `ω̂`.
pub fn dilation_entropy(law: &StrandLaw, delta: f64) -> Result<f64> {
    match law {
        StrandLaw::Gaussian { .. } => {
            if !(delta.abs() < 1.0) {
                return Err(Error::param("delta", "dilation needs |delta| < 1"));
            }
            Ok((delta + 0.5 * delta * delta - delta.ln_1p()).max(0.0))
        }
        _ => Err(Error::Unsupported(
            "dilation entropy is only defined for the Gaussian law".into(),
        )),
    }
}
