//! Fractional moments, coarse-graining sums and the replica scale `n_β`.

use crate::disorder::{log_mgf, sample_strands, StrandLaw};
use crate::error::{Error, Result};
use crate::lattice::{BoxSize, Grid};
use crate::numerics::{self, Estimate};
use crate::partition::{homogeneous_partition, quenched_grid, DpOptions};
use crate::renewal::{Mode, RenewalLaw};
use crate::replica::second_moment_schedule;
use crate::rng;
use serde::{Deserialize, Serialize};

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("eta", "must lie in (0, 1)"));
    }
    Ok(())
}

/// `A_n = E[(Z^q_{n,h})^η]` for the constrained model.
#[allow(clippy::too_many_arguments)]
pub fn fractional_moment(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    eta: f64,
    bx: BoxSize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_eta(eta)?;
    log_mgf(slaw, beta)?;
    if beta == 0.0 {
        let z = homogeneous_partition(rlaw, h, bx, Mode::Constrained)?;
        return Ok(Estimate::exact((eta * z.log_value).exp()));
    }
    if samples == 0 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    rlaw.check_box(bx)?;
    let v: Vec<f64> = rng::par_samples(seed, samples, |_, r| {
        let s = sample_strands(slaw, bx, r);
        quenched_grid(rlaw, &s, slaw, beta, h, bx, DpOptions::default()).map(|g| (eta * g.log_value(bx.n1, bx.n2)).exp())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&v))
}

/// `Â_i` for all `i ≺ (k, k)`, i.e. `i ∈ ⟦0, k-1⟧²`.
#[derive(Debug, Clone)]
pub struct FracMomentTable {
    pub eta: f64,
    pub h: f64,
    pub k: usize,
    pub value: Grid<f64>,
    pub std_err: Grid<f64>,
}

impl FracMomentTable {
    pub fn from_fn<F: Fn(usize, usize) -> f64>(eta: f64, h: f64, k: usize, f: F) -> Self {
        let mut value = Grid::filled(k - 1, k - 1, 0.0);
        for i in 0..k {
            for j in 0..k {
                value.set(i, j, f(i, j));
            }
        }
        FracMomentTable {
            eta,
            h,
            k,
            value,
            std_err: Grid::filled(k - 1, k - 1, 0.0),
        }
    }

    /// `A_i = e^{η h min(i₁, i₂)}`, the Jensen upper bound.
    pub fn jensen(eta: f64, h: f64, k: usize) -> Self {
        Self::from_fn(eta, h, k, |i, j| (eta * h * i.min(j) as f64).exp())
    }

    /// Monte Carlo table: one DP per disorder sample on `(k-1, k-1)` yields
    /// `Z_i` for every `i` at once. `A_0 = 1`; points on the axes carry no
    /// renewal mass and get 0.
    #[allow(clippy::too_many_arguments)]
    pub fn monte_carlo(
        rlaw: &RenewalLaw,
        slaw: &StrandLaw,
        beta: f64,
        h: f64,
        eta: f64,
        k: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        check_eta(eta)?;
        if k < 2 {
            return Err(Error::param("k", "must be at least 2"));
        }
        let bx = BoxSize::square(k - 1);
        rlaw.check_box(bx)?;
        log_mgf(slaw, beta)?;
        let n = if beta == 0.0 { 1 } else { samples.max(1) };
        let grids: Vec<Grid<f64>> = rng::par_samples(seed, n, |_, r| {
            let s = sample_strands(slaw, bx, r);
            let g = quenched_grid(rlaw, &s, slaw, beta, h, bx, DpOptions::default())?;
            let mut out = Grid::filled(k - 1, k - 1, 0.0);
            for i in 0..k {
                for j in 0..k {
                    out.set(i, j, (eta * g.log_value(i, j)).exp());
                }
            }
            Ok(out)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let mut value = Grid::filled(k - 1, k - 1, 0.0);
        let mut std_err = Grid::filled(k - 1, k - 1, 0.0);
        let mut buf = vec![0.0; grids.len()];
        for i in 0..k {
            for j in 0..k {
                for (b, g) in buf.iter_mut().zip(&grids) {
                    *b = *g.get(i, j);
                }
                let e = Estimate::from_samples(&buf);
                value.set(i, j, e.value);
                std_err.set(i, j, e.std_err);
            }
        }
        Ok(FracMomentTable {
            eta,
            h,
            k,
            value,
            std_err,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        *self.value.get(i, j)
    }

    /// Entries above `e^{η h min(i)} + 4 se`.
    pub fn jensen_violations(&self) -> usize {
        let mut n = 0;
        for i in 0..self.k {
            for j in 0..self.k {
                let bound = (self.eta * self.h * i.min(j) as f64).exp();
                if self.get(i, j) > bound + 4.0 * self.std_err.get(i, j) + 1e-12 * bound {
                    n += 1;
                }
            }
        }
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoOptions {
    /// Jumps with `‖j‖ > radius` are dropped from the explicit sums.
    pub radius: usize,
    /// Add the Euler-Maclaurin estimate of the dropped tail.
    pub tail_correction: bool,
}

impl Default for RhoOptions {
    fn default() -> Self {
        RhoOptions {
            radius: 1 << 16,
            tail_correction: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoSums {
    pub rho: [f64; 3],
    pub sum: f64,
    /// `ρ₁ + ρ₂ + ρ₃ ≤ 1`.
    pub triggers: bool,
}

/// `ρ_s = C Σ_{(i,j) ∈ D^s} K(‖j‖)^η A_i` over the three block families
/// `D¹: k ⪯ i+j`, `D²: i₁+j₁ < k ≤ i₂+j₂`, `D³` its mirror image.
pub fn coarse_grain_rho(rlaw: &RenewalLaw, k: usize, eta: f64, table: &FracMomentTable, c_const: f64, opts: RhoOptions) -> Result<RhoSums> {
    check_eta(eta)?;
    let p = (2.0 + rlaw.alpha) * eta;
    if p <= 2.0 {
        return Err(Error::param("eta", "need (2 + alpha) eta > 2 for the sums to converge"));
    }
    if table.k < k {
        return Err(Error::param("table", "does not cover all i < (k, k)"));
    }
    let radius = opts.radius.max(2 * k + 2);
    let kap = |t: usize| rlaw.kernel(t).powf(eta);
    // s0[m] = Σ_{m ≤ t ≤ R} κ(t), s1[m] = Σ_{m ≤ t ≤ R} t κ(t), plus tails
    let mut s0 = vec![0.0; radius + 2];
    let mut s1 = vec![0.0; radius + 2];
    if opts.tail_correction {
        let c = rlaw.norm_const.powf(eta);
        let sv = &rlaw.slow_vary;
        let a = rlaw.alpha;
        let f0 = |t: f64| c * sv.eval(t).powf(eta) * t.powf(-(2.0 + a) * eta);
        let f1 = |t: f64| t * f0(t);
        s0[radius + 1] = numerics::euler_maclaurin_remainder(&f0, (radius + 1) as f64, p);
        s1[radius + 1] = numerics::euler_maclaurin_remainder(&f1, (radius + 1) as f64, p - 1.0);
    }
    for m in (2..=radius).rev() {
        let v = kap(m);
        s0[m] = s0[m + 1] + v;
        s1[m] = s1[m + 1] + m as f64 * v;
    }
    // cum0[m] = Σ_{m' ≤ m} s0[m']
    let mut cum0 = vec![0.0; 2 * k + 2];
    for m in 1..cum0.len() {
        cum0[m] = cum0[m - 1] + if m >= 2 { s0[m] } else { 0.0 };
    }
    let seg = |from: usize, to: usize| -> f64 {
        // Σ_{m=from}^{to} s0[m]
        if from > to {
            0.0
        } else {
            cum0[to] - cum0[from - 1]
        }
    };
    let mut rho = [0.0; 3];
    for i1 in 0..k {
        for i2 in 0..k {
            let a = table.get(i1, i2);
            if a == 0.0 {
                continue;
            }
            let (u1, u2) = (k - i1, k - i2);
            let v = u1 + u2;
            // Σ_{j₁≥u₁, j₂≥u₂} κ(j₁+j₂) = Σ_{t≥v} (t - v + 1) κ(t)
            rho[0] += a * (s1[v] - (v as f64 - 1.0) * s0[v]);
            // Σ_{j₁=1}^{u₁-1} Σ_{j₂≥u₂} κ(j₁+j₂) = Σ_{m=u₂+1}^{u₁+u₂-1} s0[m]
            rho[1] += a * seg(u2 + 1, v - 1);
            rho[2] += a * seg(u1 + 1, v - 1);
        }
    }
    for r in rho.iter_mut() {
        *r *= c_const;
    }
    let sum = rho.iter().sum();
    Ok(RhoSums {
        rho,
        sum,
        triggers: sum <= 1.0,
    })
}

/// `C_{β,h,η} = e^{λ(ηβ) - ηλ(β) + ηh}`.
pub fn coarse_grain_constant(slaw: &StrandLaw, beta: f64, h: f64, eta: f64) -> Result<f64> {
    Ok((log_mgf(slaw, eta * beta)? - eta * log_mgf(slaw, beta)? + eta * h).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NBeta {
    /// Largest box before the first one whose second moment exceeds `C`;
    /// `None` when no box in the schedule exceeds it. `Some(0)` means the
    /// first box already exceeds.
    pub n_hat: Option<usize>,
    pub estimates: Vec<(usize, Estimate)>,
}

/// `n̂_β` from `E[(Z^{free}_{n,0})²] ≤ C` along a schedule of square boxes,
/// all read off the same trajectory pairs.
#[allow(clippy::too_many_arguments)]
pub fn n_beta_estimate(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    c: f64,
    schedule: &[usize],
    samples: usize,
    seed: u64,
) -> Result<NBeta> {
    if !(c > 1.0) {
        return Err(Error::param("c", "must exceed 1"));
    }
    let boxes: Vec<BoxSize> = schedule.iter().map(|&n| BoxSize::square(n)).collect();
    let m = second_moment_schedule(rlaw, slaw, beta, &boxes, samples, seed)?;
    let estimates: Vec<(usize, Estimate)> = schedule.iter().copied().zip(m.iter().map(|p| p.exact)).collect();
    let n_hat = estimates
        .iter()
        .position(|(_, e)| e.value > c)
        .map(|k| if k == 0 { 0 } else { schedule[k - 1] });
    Ok(NBeta { n_hat, estimates })
}
