//! Free energy estimates, the critical point and the homogeneous exponent.

use crate::disorder::{log_mgf, sample_strands, StrandLaw, StrandSample};
use crate::error::{Error, Result};
use crate::lattice::BoxSize;
use crate::numerics::{linear_fit, Estimate};
use crate::partition::{homogeneous_grid, quenched_grid, DpOptions, ExitTable, ScaledGrid};
use crate::renewal::RenewalLaw;
use crate::rng;
use serde::{Deserialize, Serialize};

/// Default bisection tolerance on `h`.
pub const DEFAULT_TOL: f64 = 1e-3;

/// Default localization threshold on the free-energy increment.
pub const DEFAULT_THRESHOLD: f64 = 1e-5;

fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::param("boxes", "empty box schedule"));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("boxes", "schedule must be strictly increasing and positive"));
    }
    Ok(())
}

/// One DP per disorder sample on the largest box; `f` reads off what it
/// needs. `β = 0` runs a single deterministic evaluation.
fn per_sample<T, F>(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    n: usize,
    samples: usize,
    seed: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&ScaledGrid) -> T + Sync,
{
    let bx = BoxSize::square(n);
    rlaw.check_box(bx)?;
    log_mgf(slaw, beta)?;
    if samples == 0 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    if beta == 0.0 {
        let g = homogeneous_grid(rlaw, h, bx, DpOptions::default())?;
        return Ok(vec![f(&g)]);
    }
    let out = rng::par_samples(seed, samples, |_, r| {
        let s = sample_strands(slaw, bx, r);
        quenched_grid(rlaw, &s, slaw, beta, h, bx, DpOptions::default()).map(|g| f(&g))
    });
    out.into_iter().collect()
}

/// Slope `a` of `y = a x + b log x + c` through three points.
pub fn three_point_slope(x: [f64; 3], y: [f64; 3]) -> f64 {
    let rows: Vec<[f64; 4]> = (0..3).map(|k| [x[k], x[k].ln(), 1.0, y[k]]).collect();
    let mut m = [rows[0], rows[1], rows[2]];
    for c in 0..3 {
        let piv = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, piv);
        let p = m[c][c];
        for v in m[c].iter_mut() {
            *v /= p;
        }
        for r in 0..3 {
            if r != c {
                let f = m[r][c];
                for k in 0..4 {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    m[0][3]
}

/// Extrapolated free energy from `log Z` values along a schedule: the
/// three-point fit over the last three boxes, or the increment when only
/// two are available.
fn extrapolate(ns: &[usize], logz: &[f64]) -> f64 {
    let k = ns.len();
    if k >= 3 {
        let x = [ns[k - 3] as f64, ns[k - 2] as f64, ns[k - 1] as f64];
        three_point_slope(x, [logz[k - 3], logz[k - 2], logz[k - 1]])
    } else if k == 2 {
        (logz[1] - logz[0]) / (ns[1] - ns[0]) as f64
    } else {
        logz[0] / ns[0] as f64
    }
}

/// `(1/n) E log Z` on a square box with constrained endpoint.
pub fn free_energy_estimate(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    bx: BoxSize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if bx.n1 != bx.n2 {
        return Err(Error::param("box", "free energy estimates use square boxes"));
    }
    let n = bx.n1;
    let v = per_sample(rlaw, slaw, beta, h, n, samples, seed, |g| g.log_value(n, n) / n as f64)?;
    Ok(Estimate::from_samples(&v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyProfile {
    pub boxes: Vec<usize>,
    /// `(1/n) E log Z_n` per box.
    pub per_box: Vec<Estimate>,
    /// Largest per-box mean; a lower bound on `F` by super-additivity.
    pub lower_bound: f64,
    /// Value on the largest box.
    pub headline: Estimate,
    /// Fit of `log Z_n ≈ F n + b log n + c` over the last three boxes.
    pub extrapolated: Estimate,
}

/// Constrained free energy along a box schedule, all boxes nested in the
/// same disorder sample.
pub fn free_energy_profile(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    schedule: &[usize],
    samples: usize,
    seed: u64,
) -> Result<FreeEnergyProfile> {
    check_schedule(schedule)?;
    let n = *schedule.last().unwrap();
    let rows = per_sample(rlaw, slaw, beta, h, n, samples, seed, |g| {
        let lz: Vec<f64> = schedule.iter().map(|&m| g.log_value(m, m)).collect();
        let ext = extrapolate(schedule, &lz);
        (lz, ext)
    })?;
    let per_box: Vec<Estimate> = (0..schedule.len())
        .map(|k| {
            let v: Vec<f64> = rows.iter().map(|r| r.0[k] / schedule[k] as f64).collect();
            Estimate::from_samples(&v)
        })
        .collect();
    let ext: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(FreeEnergyProfile {
        boxes: schedule.to_vec(),
        lower_bound: per_box.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max),
        headline: *per_box.last().unwrap(),
        per_box,
        extrapolated: Estimate::from_samples(&ext),
    })
}

/// Free-endpoint increment `(E log Z^{free}_N - E log Z^{free}_M) / (N - M)`
/// over the last two boxes of the schedule.
pub fn free_increment(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    schedule: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_schedule(schedule)?;
    if schedule.len() < 2 {
        return Err(Error::param("boxes", "need at least two boxes"));
    }
    let k = schedule.len();
    let (m, n) = (schedule[k - 2], schedule[k - 1]);
    let exit = ExitTable::new(rlaw, 2 * n);
    let v = per_sample(rlaw, slaw, beta, h, n, samples, seed, |g| {
        (g.log_free(&exit, n, n) - g.log_free(&exit, m, m)) / (n - m) as f64
    })?;
    Ok(Estimate::from_samples(&v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub h_c: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Bisection for `h_c(β)` on the indicator "free-endpoint increment exceeds
/// `threshold + 3 se`". The search starts from `[-1, λ(β) + 1]`.
#[allow(clippy::too_many_arguments)]
pub fn critical_point_bisect(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    schedule: &[usize],
    threshold: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CriticalPoint> {
    if !(threshold > 0.0) {
        return Err(Error::param("threshold", "must be positive"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let lambda = log_mgf(slaw, beta)?;
    let mut evaluations = 0;
    let mut localized = |h: f64| -> Result<bool> {
        evaluations += 1;
        let e = free_increment(rlaw, slaw, beta, h, schedule, samples, seed)?;
        Ok(e.value > threshold + 3.0 * e.std_err)
    };
    let (mut lo, mut hi) = (-1.0, lambda + 1.0);
    if localized(lo)? || !localized(hi)? {
        return Err(Error::SearchFailed(format!(
            "no sign change of the localization indicator on [{lo}, {hi}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if localized(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalPoint {
        h_c: 0.5 * (lo + hi),
        bracket: (lo, hi),
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub r_squared: f64,
    pub h: Vec<f64>,
    pub f_hat: Vec<f64>,
}

/// `F̂(0, h)` from the free-endpoint partition functions on boxes
/// `box_cap/4, box_cap/2, box_cap` through a three-point fit.
pub fn homogeneous_free_energy_fit(rlaw: &RenewalLaw, h: f64, box_cap: usize) -> Result<f64> {
    if box_cap < 4 {
        return Err(Error::param("box_cap", "must be at least 4"));
    }
    let ns = [box_cap / 4, box_cap / 2, box_cap];
    let g = homogeneous_grid(rlaw, h, BoxSize::square(box_cap), DpOptions::default())?;
    let exit = ExitTable::new(rlaw, 2 * box_cap);
    let y = ns.map(|m| g.log_free(&exit, m, m));
    Ok(three_point_slope(ns.map(|m| m as f64), y))
}

/// Least-squares slope of `log F̂(0,h)` against `log h`.
pub fn homogeneous_exponent_fit(rlaw: &RenewalLaw, h_grid: &[f64], box_cap: usize) -> Result<ExponentFit> {
    if h_grid.len() < 3 {
        return Err(Error::FitQuality("need at least three h values".into()));
    }
    if h_grid.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::param("h_grid", "values must be positive"));
    }
    let (hmin, hmax) = h_grid
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &h| (a.min(h), b.max(h)));
    if hmax / hmin < 10.0 {
        return Err(Error::FitQuality("h grid spans less than one decade".into()));
    }
    let f_hat: Vec<f64> = h_grid
        .iter()
        .map(|&h| homogeneous_free_energy_fit(rlaw, h, box_cap))
        .collect::<Result<_>>()?;
    if let Some(k) = f_hat.iter().position(|f| !(*f > 0.0)) {
        return Err(Error::FitQuality(format!(
            "free energy estimate not positive at h = {}; box_cap too small for this grid",
            h_grid[k]
        )));
    }
    let lx: Vec<f64> = h_grid.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = f_hat.iter().map(|f| f.ln()).collect();
    let fit = linear_fit(&lx, &ly);
    Ok(ExponentFit {
        exponent: fit.slope,
        r_squared: fit.r_squared,
        h: h_grid.to_vec(),
        f_hat,
    })
}

/// Infinite-volume homogeneous free energy on square boxes.
///
/// With `K` depending on `a + b` only, `F(0,h) = 2μ` where `μ > 0` solves
/// `Σ_t (t-1) K(t) e^{-μ t} = e^{-h}`; zero for `h ≤ 0`.
pub fn homogeneous_free_energy_limit(rlaw: &RenewalLaw, h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    let target = (-h).exp();
    let g = |mu: f64| {
        let tmax = ((45.0 / mu) as usize).clamp(64, 50_000_000);
        let mut s = 0.0;
        for t in 2..=tmax {
            s += (t - 1) as f64 * rlaw.kernel(t) * (-mu * t as f64).exp();
        }
        s
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while g(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + hi
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingCurve {
    pub h_c: f64,
    /// `(t, (1/n) E log Z^{free}_n at h_c + t)` on the largest box.
    pub rows: Vec<(f64, Estimate)>,
    /// Slope of `log F̂` against `log t` over rows with positive `F̂`.
    pub local_exponent: f64,
    /// Always set: finite boxes cannot certify the near-critical behaviour.
    pub exploratory: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn smoothing_curve(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    t_grid: &[f64],
    schedule: &[usize],
    threshold: f64,
    samples: usize,
    seed: u64,
) -> Result<SmoothingCurve> {
    if t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::param("t_grid", "values must be positive"));
    }
    let cp = critical_point_bisect(rlaw, slaw, beta, schedule, threshold, samples, seed, DEFAULT_TOL)?;
    let n = *schedule.last().unwrap();
    let exit = ExitTable::new(rlaw, 2 * n);
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let v = per_sample(rlaw, slaw, beta, cp.h_c + t, n, samples, seed, |g| g.log_free(&exit, n, n) / n as f64)?;
        rows.push((t, Estimate::from_samples(&v)));
    }
    let pos: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, e)| e.value > 0.0)
        .map(|(t, e)| (t.ln(), e.value.ln()))
        .collect();
    let local_exponent = if pos.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = pos.into_iter().unzip();
        linear_fit(&x, &y).slope
    } else {
        f64::NAN
    };
    Ok(SmoothingCurve {
        h_c: cp.h_c,
        rows,
        local_exponent,
        exploratory: true,
    })
}

/// Mean of `log Z` over an explicit list of disorder samples; used to pair
/// estimators with enumerated disorder in tests and experiments.
pub fn mean_log_partition(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    samples: &[StrandSample],
    beta: f64,
    h: f64,
    bx: BoxSize,
) -> Result<Estimate> {
    let v: Vec<f64> = samples
        .iter()
        .map(|s| quenched_grid(rlaw, s, slaw, beta, h, bx, DpOptions::default()).map(|g| g.log_value(bx.n1, bx.n2)))
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_slope_recovers_coefficients() {
        let f = |x: f64| 0.3 * x - 0.5 * x.ln() + 2.0;
        let s = three_point_slope([16.0, 32.0, 64.0], [f(16.0), f(32.0), f(64.0)]);
        assert!((s - 0.3).abs() < 1e-12);
    }

    #[test]
    fn localized_at_large_h() {
        let r = RenewalLaw::pure(0.5).unwrap();
        let g = StrandLaw::Rademacher { x: 1.0 };
        let e = free_energy_estimate(&r, &g, 0.0, 2.0, BoxSize::square(64), 1, 0).unwrap();
        assert!(e.value > 0.0);
        assert_eq!(e.std_err, 0.0);
        let z = free_energy_estimate(&r, &g, 0.0, 0.0, BoxSize::square(64), 1, 0).unwrap();
        assert!(z.value <= 0.0);
    }
}
