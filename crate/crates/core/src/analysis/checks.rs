//! Finite-size checks of the homogeneous bound at negative pinning, the
//! tilted annealed identities and the extended-diagonal tilt.

use crate::disorder::{log_frac, StrandLaw, TiltKind};
use crate::error::{Error, Result};
use crate::lattice::{BoxSize, Trajectory};
use crate::numerics::{ln_cosh, Estimate};
use crate::partition::{homogeneous_grid, homogeneous_partition, DpOptions};
use crate::renewal::{renewal_mass_grid, Mode, RenewalLaw};
use crate::rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZhomCheck {
    /// `Z_{n,-u}` at the box corner.
    pub lhs: f64,
    pub rhs: f64,
    /// Smallest `C₁` making the bound hold at every point of the box.
    pub c1: f64,
    /// Same fit on the half box.
    pub c1_half: f64,
    pub c2: f64,
    pub gamma: f64,
    pub holds: bool,
}

/// Compare `Z_{n,-u}` with `C₁ K(‖n‖)/u² + P(n∈τ) e^{-C₂ u ‖n‖^γ}`,
/// `γ = min(0.9 α, 1)`, with `C₂` given and `C₁` fitted over the box.
pub fn zhom_negative_check(rlaw: &RenewalLaw, u: f64, bx: BoxSize, c2: f64) -> Result<ZhomCheck> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::param("u", "must be positive"));
    }
    if !(c2 > 0.0) {
        return Err(Error::param("c2", "must be positive"));
    }
    rlaw.check_box(bx)?;
    let gamma = (0.9 * rlaw.alpha).min(1.0);
    let z = homogeneous_grid(rlaw, -u, bx, DpOptions::default())?;
    let mass = renewal_mass_grid(rlaw, bx)?;
    let second = |i: usize, j: usize| *mass.get(i, j) * (-c2 * u * ((i + j) as f64).powf(gamma)).exp();
    let fit = |m1: usize, m2: usize| {
        let mut c1: f64 = 0.0;
        for i in 1..=m1 {
            for j in 1..=m2 {
                let k = rlaw.kernel(i + j);
                let excess = z.log_value(i, j).exp() - second(i, j);
                if excess > 0.0 && k > 0.0 {
                    c1 = c1.max(excess * u * u / k);
                }
            }
        }
        c1
    };
    let c1 = fit(bx.n1, bx.n2);
    let c1_half = fit((bx.n1 / 2).max(1), (bx.n2 / 2).max(1));
    let lhs = z.log_value(bx.n1, bx.n2).exp();
    let rhs = c1 * rlaw.kernel(bx.norm()) / (u * u) + second(bx.n1, bx.n2);
    Ok(ZhomCheck {
        lhs,
        rhs,
        c1,
        c1_half,
        c2,
        gamma,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

/// `log E_{n,δ}[Z^q_{n,h}]` under the linear (`QFrac`) or quadratic (`RFrac`)
/// tilt: the homogeneous constrained model at `h + log Frac`.
#[allow(clippy::too_many_arguments)]
pub fn tilted_annealed(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    delta: f64,
    beta: f64,
    h: f64,
    bx: BoxSize,
    kind: TiltKind,
) -> Result<f64> {
    let shift = log_frac(kind, slaw, delta, beta)?;
    Ok(homogeneous_partition(rlaw, h + shift, bx, Mode::Constrained)?.log_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalOptions {
    pub eps: f64,
    /// Constant in `ℓ_n = C √(n log n)` for `α > 2`.
    pub wide_const: f64,
}

impl Default for DiagonalOptions {
    fn default() -> Self {
        DiagonalOptions { eps: 0.1, wide_const: 2.0 }
    }
}

/// Half-width `ℓ_n` of the extended diagonal.
pub fn diagonal_width(alpha: f64, n1: usize, opts: DiagonalOptions) -> Result<f64> {
    if alpha <= 1.0 {
        return Err(Error::param("alpha", "the extended diagonal needs alpha > 1"));
    }
    let n = n1 as f64;
    Ok(if alpha <= 2.0 {
        n.powf((1.0 + opts.eps * opts.eps) / alpha)
    } else {
        opts.wide_const * (n * n.ln()).sqrt()
    })
}

/// `σ_i = Σ_{j ∈ J_n(i)} ω̄_j` for `i = 1..=n1`, with
/// `J_n(i) = {j ≤ n2 : |i - j| ≤ 2ℓ}`.
pub fn sigma(bar: &[f64], n1: usize, ell: f64) -> Vec<f64> {
    let n2 = bar.len();
    let mut prefix = vec![0.0; n2 + 1];
    for j in 0..n2 {
        prefix[j + 1] = prefix[j] + bar[j];
    }
    let w = (2.0 * ell).floor() as usize;
    (1..=n1)
        .map(|i| {
            let lo = i.saturating_sub(w).max(1);
            let hi = (i + w).min(n2);
            if lo > hi {
                0.0
            } else {
                prefix[hi] - prefix[lo - 1]
            }
        })
        .collect()
}

/// `σ̄_i = Σ_j ω̄_j 1{(i,j) ∈ τ}`.
pub fn sigma_bar(bar: &[f64], n1: usize, tau: &Trajectory) -> Vec<f64> {
    let mut out = vec![0.0; n1];
    for &(i, j) in &tau.points {
        if (1..=n1).contains(&i) && (1..=bar.len()).contains(&j) {
            out[i - 1] += bar[j - 1];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalTilt {
    pub q_bar: Estimate,
    pub ell: f64,
    pub max_row: usize,
    pub max_abs_sigma: f64,
    /// `δ² n₁ ℓ_n`.
    pub smallness: f64,
}

/// `Q̄_{J_n}(δ) = E[∏_i cosh(δ σ_i(ω̄))]` by Monte Carlo over `ω̄`.
pub fn diagonal_tilt(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    bx: BoxSize,
    delta: f64,
    samples: usize,
    seed: u64,
    opts: DiagonalOptions,
) -> Result<DiagonalTilt> {
    match slaw {
        StrandLaw::Rademacher { x } if *x == 1.0 => {}
        _ => return Err(Error::Unsupported("the diagonal tilt is defined for Rademacher(1) strands".into())),
    }
    if bx.n1 == 0 || bx.n2 == 0 {
        return Err(Error::param("box", "both sides must be at least 1"));
    }
    let ell = diagonal_width(rlaw.alpha, bx.n1, opts)?;
    let w = (2.0 * ell).floor() as usize;
    let max_row = (1..=bx.n1)
        .map(|i| (i + w).min(bx.n2) + 1 - i.saturating_sub(w).max(1))
        .max()
        .unwrap_or(0);
    let smallness = delta * delta * bx.n1 as f64 * ell;
    if delta == 0.0 {
        return Ok(DiagonalTilt {
            q_bar: Estimate::exact(1.0),
            ell,
            max_row,
            max_abs_sigma: 0.0,
            smallness,
        });
    }
    if samples == 0 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    let out: Vec<(f64, f64)> = rng::par_samples(seed, samples, |_, r| {
        let bar: Vec<f64> = (0..bx.n2).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let s = sigma(&bar, bx.n1, ell);
        let log_q: f64 = s.iter().map(|&v| ln_cosh(delta * v)).sum();
        let m = s.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        (log_q.exp(), m)
    });
    let vals: Vec<f64> = out.iter().map(|p| p.0).collect();
    Ok(DiagonalTilt {
        q_bar: Estimate::from_samples(&vals),
        ell,
        max_row,
        max_abs_sigma: out.iter().fold(0.0, |a, p| a.max(p.1)),
        smallness,
    })
}
