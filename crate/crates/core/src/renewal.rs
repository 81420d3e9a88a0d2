//! Bivariate renewal substrate.
//!
//! The inter-arrival law is `P(τ₁ = (a, b)) = K(a + b)` with
//! `K(t) = c L(t) t^{-(2+α)}`, normalized so the process is persistent.

use crate::error::{Error, Result};
use crate::lattice::{BoxSize, Grid, Point, Trajectory};
use crate::numerics::{self, Estimate};
use crate::rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Number of explicit terms added before switching to Euler-Maclaurin.
const DIRECT_TERMS: usize = 4000;

/// Horizon used when none is requested explicitly.
pub const DEFAULT_HORIZON: usize = 1 << 20;

/// Largest box for which constrained sampling is done by exact backward
/// sampling from the renewal mass.
pub const EXACT_CONSTRAINED_MAX: usize = 8;

/// Attempts allowed to the constrained rejection sampler.
pub const REJECTION_BUDGET: usize = 1_000_000;

/// Slowly varying factor `L(t)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SlowVary {
    #[default]
    Constant,
    /// `L(t) = log(1 + t)^kappa`.
    LogPower { kappa: f64 },
    /// `values[t - 1] = L(t)`; constant equal to the last entry beyond.
    Table { values: Vec<f64> },
}

impl SlowVary {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SlowVary::Constant => 1.0,
            SlowVary::LogPower { kappa } => t.ln_1p().powf(*kappa),
            SlowVary::Table { values } => {
                let k = (t.round() as usize).clamp(1, values.len());
                values[k - 1]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SlowVary::Constant => Ok(()),
            SlowVary::LogPower { kappa } => {
                if kappa.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("slow_vary.kappa", "must be finite"))
                }
            }
            SlowVary::Table { values } => {
                if values.is_empty() {
                    return Err(Error::param("slow_vary.values", "table is empty"));
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::param("slow_vary.values", "entries must be positive"));
                }
                Ok(())
            }
        }
    }

    fn table_len(&self) -> usize {
        match self {
            SlowVary::Table { values } => values.len(),
            _ => 0,
        }
    }
}

/// Inter-arrival law of the bivariate renewal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewalLaw {
    pub alpha: f64,
    pub slow_vary: SlowVary,
    pub norm_const: f64,
    pub horizon: usize,
    pub tail_tol: f64,
}

impl RenewalLaw {
    /// Law with horizon `max(DEFAULT_HORIZON, smallest admissible for tail_tol)`.
    pub fn new(alpha: f64, slow_vary: SlowVary, tail_tol: f64) -> Result<Self> {
        check_alpha_tol(alpha, tail_tol)?;
        slow_vary.validate()?;
        let c = normalize_unchecked(alpha, &slow_vary);
        let horizon = required_horizon(alpha, &slow_vary, c, tail_tol).max(DEFAULT_HORIZON);
        Ok(RenewalLaw {
            alpha,
            slow_vary,
            norm_const: c,
            horizon,
            tail_tol,
        })
    }

    /// Law with an explicit horizon; refuses horizons whose tail bound
    /// exceeds `tail_tol`.
    pub fn with_horizon(alpha: f64, slow_vary: SlowVary, horizon: usize, tail_tol: f64) -> Result<Self> {
        let c = normalize(alpha, &slow_vary, horizon, tail_tol)?;
        Ok(RenewalLaw {
            alpha,
            slow_vary,
            norm_const: c,
            horizon,
            tail_tol,
        })
    }

    /// `L ≡ 1` with tail tolerance `1e-2`.
    pub fn pure(alpha: f64) -> Result<Self> {
        Self::new(alpha, SlowVary::Constant, 1e-2)
    }

    /// `K(t)` for `t ≥ 2`, zero below.
    #[inline]
    pub fn kernel(&self, t: usize) -> f64 {
        if t < 2 {
            return 0.0;
        }
        let tf = t as f64;
        self.norm_const * self.slow_vary.eval(tf) * tf.powf(-2.0 - self.alpha)
    }

    /// `K(t)` for `t = 0..=tmax`.
    pub fn kernel_table(&self, tmax: usize) -> Vec<f64> {
        (0..=tmax).map(|t| self.kernel(t)).collect()
    }

    /// Analytic upper bound on the mass of jumps with `a + b > h`.
    pub fn tail_bound(&self, h: usize) -> f64 {
        tail_bound(self.alpha, &self.slow_vary, self.norm_const, h)
    }

    /// Check that a box can be handled with tabulated masses.
    pub fn check_box(&self, b: BoxSize) -> Result<()> {
        if b.n1 == 0 || b.n2 == 0 {
            return Err(Error::param("box", "both sides must be at least 1"));
        }
        if b.norm() > self.horizon {
            return Err(Error::OutOfRange {
                point: (b.n1, b.n2),
                range: format!("n1 + n2 <= horizon {}", self.horizon),
            });
        }
        Ok(())
    }

    /// `P(τ₁ = (a, b))`.
    pub fn interarrival_mass(&self, a: usize, b: usize) -> Result<f64> {
        if a == 0 || b == 0 || a + b > self.horizon {
            return Err(Error::OutOfRange {
                point: (a, b),
                range: format!("a, b >= 1 and a + b <= {}", self.horizon),
            });
        }
        Ok(self.kernel(a + b))
    }

    /// `P(τ₁^{(1)} = a) = Σ_{b≥1} K(a + b)`.
    pub fn projection_interarrival(&self, a: usize) -> f64 {
        if a == 0 {
            return 0.0;
        }
        let direct = DIRECT_TERMS.max(self.slow_vary.table_len() + 2);
        let f = |t: f64| self.slow_vary_at(t) * t.powf(-2.0 - self.alpha);
        self.norm_const * numerics::tail_sum(f, a + 1, 2.0 + self.alpha, direct)
    }

    fn slow_vary_at(&self, t: f64) -> f64 {
        self.slow_vary.eval(t)
    }

    /// `Σ_{t>m} (t-1) K(t)`, the probability that the first total jump exceeds `m`.
    pub fn mass_tail(&self, m: usize) -> f64 {
        let direct = DIRECT_TERMS.max(self.slow_vary.table_len() + 2);
        let f = |t: f64| (t - 1.0) * self.slow_vary_at(t) * t.powf(-2.0 - self.alpha);
        self.norm_const * numerics::tail_sum(f, m.max(1) + 1, 1.0 + self.alpha, direct)
    }

    /// Truncated mean `μ(n) = E[τ₁^{(1)} 1{τ₁^{(1)} ≤ n}]`.
    pub fn truncated_mean(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        // P(τ^{(1)} = a) = P(τ^{(1)} = a + 1) + K(a + 1), run downwards
        let mut p = self.projection_interarrival(n);
        let mut mu = n as f64 * p;
        for a in (1..n).rev() {
            p += self.kernel(a + 1);
            mu += a as f64 * p;
        }
        mu
    }

    /// Full mean `E[τ₁^{(1)}] = ½ Σ t(t-1) K(t)`; infinite for `α ≤ 1`.
    pub fn projection_mean(&self) -> f64 {
        if self.alpha <= 1.0 {
            return f64::INFINITY;
        }
        let direct = DIRECT_TERMS.max(self.slow_vary.table_len() + 2);
        let f = |t: f64| t * (t - 1.0) * self.slow_vary_at(t) * t.powf(-2.0 - self.alpha);
        0.5 * self.norm_const * numerics::tail_sum(f, 2, self.alpha, direct)
    }

    /// `E[(τ₁^{(1)})²] = Σ K(t) (t-1) t (2t-1) / 6`; infinite for `α ≤ 2`.
    pub fn projection_second_moment(&self) -> f64 {
        if self.alpha <= 2.0 {
            return f64::INFINITY;
        }
        let direct = DIRECT_TERMS.max(self.slow_vary.table_len() + 2);
        let f = |t: f64| (t - 1.0) * t * (2.0 * t - 1.0) / 6.0 * self.slow_vary_at(t) * t.powf(-2.0 - self.alpha);
        self.norm_const * numerics::tail_sum(f, 2, self.alpha - 1.0, direct)
    }
}

fn check_alpha_tol(alpha: f64, tail_tol: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::param("alpha", "must be a positive real"));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::param("tail_tol", "must lie in (0, 1)"));
    }
    Ok(())
}

/// Normalizing constant `c` making `Σ_{t≥2} (t-1) K(t) = 1`.
///
/// The series is summed in full; `horizon` only has to be large enough that
/// the mass beyond it is below `tail_tol`.
pub fn normalize(alpha: f64, slow_vary: &SlowVary, horizon: usize, tail_tol: f64) -> Result<f64> {
    check_alpha_tol(alpha, tail_tol)?;
    slow_vary.validate()?;
    let c = normalize_unchecked(alpha, slow_vary);
    let required = required_horizon(alpha, slow_vary, c, tail_tol);
    if horizon < required {
        return Err(Error::HorizonTooSmall {
            given: horizon,
            required,
        });
    }
    Ok(c)
}

fn normalize_unchecked(alpha: f64, slow_vary: &SlowVary) -> f64 {
    let direct = DIRECT_TERMS.max(slow_vary.table_len() + 2);
    let f = |t: f64| (t - 1.0) * slow_vary.eval(t) * t.powf(-2.0 - alpha);
    1.0 / numerics::tail_sum(f, 2, 1.0 + alpha, direct)
}

/// Upper bound on `c Σ_{t>h} (t-1) L(t) t^{-(2+α)}` through
/// `∫_h^∞ L(s) s^{-1-α} ds`, valid once `L(s) s^{-1-α}` is decreasing.
fn tail_bound(alpha: f64, slow_vary: &SlowVary, c: f64, h: usize) -> f64 {
    let hf = h as f64;
    match slow_vary {
        SlowVary::Constant => c * hf.powf(-alpha) / alpha,
        SlowVary::Table { values } => {
            if h < values.len() {
                return f64::INFINITY;
            }
            c * values[values.len() - 1] * hf.powf(-alpha) / alpha
        }
        SlowVary::LogPower { kappa } => {
            // g(s) = log(1+s)^κ s^{-1-α} decreases iff κ s / ((1+s) log(1+s)) < 1 + α
            let decreasing = *kappa * hf / ((1.0 + hf) * hf.ln_1p()) < 1.0 + alpha;
            if !decreasing || h < 2 {
                return f64::INFINITY;
            }
            let upper = 48.0 / alpha;
            c * numerics::simpson(
                |u| {
                    let s = hf * f64::exp(u);
                    s.ln_1p().powf(*kappa) * s.powf(-alpha)
                },
                0.0,
                upper,
                20_000,
            )
        }
    }
}

fn required_horizon(alpha: f64, slow_vary: &SlowVary, c: f64, tail_tol: f64) -> usize {
    let mut lo = 2usize.max(slow_vary.table_len());
    if tail_bound(alpha, slow_vary, c, lo) < tail_tol {
        return lo;
    }
    let mut hi = lo;
    while tail_bound(alpha, slow_vary, c, hi) >= tail_tol {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi == usize::MAX {
            return hi;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail_bound(alpha, slow_vary, c, mid) < tail_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Sampling mode for trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Paths forced through the corner `(n1, n2)`.
    Constrained,
    /// Paths with a free endpoint, restricted to the box.
    Free,
}

/// Jump sampler specialised to one box: totals beyond `n1 + n2` can only
/// leave the box, so they are lumped into a single "exit" outcome.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    bx: BoxSize,
    cdf: Vec<f64>,
}

impl JumpSampler {
    pub fn new(law: &RenewalLaw, bx: BoxSize) -> Self {
        let tmax = bx.norm();
        let mut cdf = Vec::with_capacity(tmax.saturating_sub(1));
        let mut acc = 0.0;
        for t in 2..=tmax {
            acc += (t - 1) as f64 * law.kernel(t);
            cdf.push(acc);
        }
        JumpSampler { bx, cdf }
    }

    /// Next jump `(a, b)`, or `None` when the jump certainly leaves the box.
    pub fn jump<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Point> {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u);
        if k == self.cdf.len() {
            return None;
        }
        let t = k + 2;
        let a = rng.random_range(1..t);
        Some((a, t - a))
    }

    /// Renewal points inside the box, started from the origin.
    pub fn free<R: Rng + ?Sized>(&self, rng: &mut R) -> Trajectory {
        let mut pts = Vec::new();
        let mut cur = (0usize, 0usize);
        while let Some((a, b)) = self.jump(rng) {
            let next = (cur.0 + a, cur.1 + b);
            if next.0 > self.bx.n1 || next.1 > self.bx.n2 {
                break;
            }
            pts.push(next);
            cur = next;
        }
        let t = Trajectory::new(pts);
        debug_assert!(t.is_strictly_increasing());
        t
    }
}

/// Sample one trajectory in `bx`.
pub fn sample_trajectory<R: Rng + ?Sized>(law: &RenewalLaw, rng: &mut R, bx: BoxSize, mode: Mode) -> Result<Trajectory> {
    law.check_box(bx)?;
    let sampler = JumpSampler::new(law, bx);
    match mode {
        Mode::Free => Ok(sampler.free(rng)),
        Mode::Constrained => {
            if bx.n1 <= EXACT_CONSTRAINED_MAX && bx.n2 <= EXACT_CONSTRAINED_MAX {
                Ok(sample_constrained_exact(law, rng, bx))
            } else {
                let target = (bx.n1, bx.n2);
                for _ in 0..REJECTION_BUDGET {
                    let t = sampler.free(rng);
                    if t.points.last() == Some(&target) {
                        return Ok(t);
                    }
                }
                Err(Error::RejectionBudget {
                    attempts: REJECTION_BUDGET,
                })
            }
        }
    }
}

/// Endpoint-conditioned sampling: walk backwards from the corner choosing the
/// predecessor `p` with probability `u(p) K(‖q - p‖) / u(q)`.
fn sample_constrained_exact<R: Rng + ?Sized>(law: &RenewalLaw, rng: &mut R, bx: BoxSize) -> Trajectory {
    let u = renewal_mass_unchecked(law, bx);
    let mut pts = vec![(bx.n1, bx.n2)];
    let mut q = (bx.n1, bx.n2);
    while q != (0, 0) {
        let total = *u.get(q.0, q.1);
        let x: f64 = rng.random::<f64>() * total;
        let mut acc = law.kernel(q.0 + q.1); // predecessor (0, 0)
        let mut chosen = (0, 0);
        if acc <= x {
            'outer: for a in 1..q.0 {
                for b in 1..q.1 {
                    acc += u.get(a, b) * law.kernel(q.0 - a + q.1 - b);
                    chosen = (a, b);
                    if acc > x {
                        break 'outer;
                    }
                }
            }
        }
        if chosen != (0, 0) {
            pts.push(chosen);
        }
        q = chosen;
    }
    pts.reverse();
    Trajectory::new(pts)
}

/// Convolution over strictly smaller points organised by anti-diagonals.
///
/// With `src = None` solves `u(i,j) = Σ_{p ≺ (i,j)} u(p) K(‖(i,j) - p‖)`,
/// `u(0,0) = 1`; otherwise returns `Σ_{p ≺ (i,j)} src(p) K(‖(i,j) - p‖)`.
fn diag_convolve(kern: &[f64], n1: usize, n2: usize, src: Option<&Grid<f64>>) -> Grid<f64> {
    let mut out = Grid::filled(n1, n2, 0.0);
    if src.is_none() {
        out.set(0, 0, 1.0);
    }
    let dmax = n1 + n2;
    // prefix[s][a] = Σ_{a' ≤ a} v(a', s - a')
    let mut prefix: Vec<Vec<f64>> = Vec::with_capacity(dmax + 1);
    let value = |g: &Grid<f64>, a: usize, b: usize| *g.get(a, b);
    let build = |g: &Grid<f64>, s: usize| -> Vec<f64> {
        let mut p = vec![0.0; n1 + 1];
        let mut acc = 0.0;
        for (a, slot) in p.iter_mut().enumerate() {
            if a <= s && s - a <= n2 {
                acc += value(g, a, s - a);
            }
            *slot = acc;
        }
        p
    };
    let source = |s: usize, out: &Grid<f64>| -> Vec<f64> {
        match src {
            Some(g) => build(g, s),
            None => build(out, s),
        }
    };
    prefix.push(source(0, &out));
    prefix.push(vec![0.0; n1 + 1]);
    for d in 2..=dmax {
        let ilo = 1.max(d.saturating_sub(n2));
        let ihi = n1.min(d - 1);
        for i in ilo..=ihi {
            let j = d - i;
            let mut acc = 0.0;
            for (s, p) in prefix.iter().enumerate().take(d - 1) {
                let lo = s.saturating_sub(j - 1);
                let hi = (i - 1).min(s);
                if lo > hi {
                    continue;
                }
                let seg = if lo == 0 { p[hi] } else { p[hi] - p[lo - 1] };
                acc += kern[d - s] * seg;
            }
            out.set(i, j, acc);
        }
        let p = source(d, &out);
        prefix.push(p);
    }
    out
}

/// `P((i, j) ∈ τ)` for all `(i, j) ⪯ n`.
pub fn renewal_mass_grid(law: &RenewalLaw, bx: BoxSize) -> Result<Grid<f64>> {
    law.check_box(bx)?;
    Ok(renewal_mass_unchecked(law, bx))
}

fn renewal_mass_unchecked(law: &RenewalLaw, bx: BoxSize) -> Grid<f64> {
    let kern = law.kernel_table(bx.norm());
    diag_convolve(&kern, bx.n1, bx.n2, None)
}

/// `P(τ_j = n)` for `j = 1..=jmax`, as grids over the box.
pub fn epoch_mass_grids(law: &RenewalLaw, bx: BoxSize, jmax: usize) -> Result<Vec<Grid<f64>>> {
    law.check_box(bx)?;
    let kern = law.kernel_table(bx.norm());
    let mut origin = Grid::filled(bx.n1, bx.n2, 0.0);
    origin.set(0, 0, 1.0);
    let mut out = Vec::with_capacity(jmax);
    let mut cur = origin;
    for _ in 0..jmax {
        cur = diag_convolve(&kern, bx.n1, bx.n2, Some(&cur));
        out.push(cur.clone());
    }
    Ok(out)
}

/// Stable-law scaling and recentering for the first projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeq {
    pub a_n: f64,
    pub b_n: f64,
    pub mu_n: f64,
}

/// `a_n = ψ(n) n^{1/min(α,2)}` and the recentering `b_n`.
///
/// For `α ≤ 2`, ψ is fixed by `n P(τ₁^{(1)} > a_n) ≈ 1` with the power-law
/// tail `c L(n) x^{-α} / (α(1+α))`; for `α > 2` it is the standard deviation.
pub fn scaling_sequences(law: &RenewalLaw, n: usize) -> Result<ScalingSeq> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let alpha = law.alpha;
    let nf = n as f64;
    let a_n = if alpha > 2.0 {
        let m = law.projection_mean();
        let var = law.projection_second_moment() - m * m;
        var.sqrt() * nf.sqrt()
    } else {
        let ae = alpha;
        let scale = law.norm_const * law.slow_vary.eval(nf) / (ae * (1.0 + ae));
        (scale * nf).powf(1.0 / ae)
    };
    let mu_n = law.truncated_mean(n);
    let b_n = if alpha < 1.0 {
        0.0
    } else if alpha == 1.0 {
        nf * law.truncated_mean(a_n.floor().max(1.0) as usize)
    } else {
        nf * law.projection_mean()
    };
    Ok(ScalingSeq { a_n, b_n, mu_n })
}

/// Mean, variance and standard error of an integer counter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountStats {
    pub mean: f64,
    pub variance: f64,
    pub std_err: f64,
}

impl CountStats {
    fn from_counts(xs: &[f64]) -> Self {
        let e = Estimate::from_samples(xs);
        CountStats {
            mean: e.value,
            variance: e.std_err * e.std_err * xs.len() as f64,
            std_err: e.std_err,
        }
    }
}

/// Intersection statistics of two independent free trajectories in a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionSummary {
    pub samples: usize,
    /// Set when no sample was drawn; all statistics are then NaN.
    pub empty: bool,
    pub bivariate: CountStats,
    pub proj1: CountStats,
    pub proj2: CountStats,
    /// Parameter `p` of the geometric law `P(N = k) = (1-p) p^k` matched to
    /// the mean of the bivariate count.
    pub geometric_p: f64,
    /// Every pair satisfied `|τ∩τ′| ≤ min(p₁, p₂)`.
    pub bound_holds: bool,
}

/// Sizes of `τ∩τ′`, `τ^{(1)}∩τ′^{(1)}` and `τ^{(2)}∩τ′^{(2)}` for two
/// trajectories already restricted to a box.
pub fn intersection_counts(t1: &Trajectory, t2: &Trajectory) -> (usize, usize, usize) {
    let both = sorted_intersection(&t1.points, &t2.points);
    let r1: Vec<usize> = t1.points.iter().map(|p| p.0).collect();
    let r2: Vec<usize> = t2.points.iter().map(|p| p.0).collect();
    let c1: Vec<usize> = t1.points.iter().map(|p| p.1).collect();
    let c2: Vec<usize> = t2.points.iter().map(|p| p.1).collect();
    (both, sorted_intersection(&r1, &r2), sorted_intersection(&c1, &c2))
}

fn sorted_intersection<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub fn intersection_stats(law: &RenewalLaw, bx: BoxSize, samples: usize, seed: u64) -> Result<IntersectionSummary> {
    law.check_box(bx)?;
    if samples == 0 {
        let nan = CountStats {
            mean: f64::NAN,
            variance: f64::NAN,
            std_err: f64::NAN,
        };
        return Ok(IntersectionSummary {
            samples: 0,
            empty: true,
            bivariate: nan,
            proj1: nan,
            proj2: nan,
            geometric_p: f64::NAN,
            bound_holds: true,
        });
    }
    let sampler = JumpSampler::new(law, bx);
    let counts = rng::par_samples(seed, samples, |_, r| {
        let a = sampler.free(r);
        let b = sampler.free(r);
        intersection_counts(&a, &b)
    });
    let bound_holds = counts.iter().all(|&(n, p1, p2)| n <= p1.min(p2));
    let col = |f: fn(&(usize, usize, usize)) -> usize| -> Vec<f64> { counts.iter().map(|c| f(c) as f64).collect() };
    let bivariate = CountStats::from_counts(&col(|c| c.0));
    let m = bivariate.mean;
    Ok(IntersectionSummary {
        samples,
        empty: false,
        bivariate,
        proj1: CountStats::from_counts(&col(|c| c.1)),
        proj2: CountStats::from_counts(&col(|c| c.2)),
        geometric_p: m / (1.0 + m),
        bound_holds,
    })
}
