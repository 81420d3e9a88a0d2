//! Exact partition functions by dynamic programming.
//!
//! `Z(i,j) = w(i,j) Σ_{p ≺ (i,j)} Z(p) K(‖(i,j) - p‖)` with `Z(0,0) = 1` and
//! `w(i,j) = e^{β ω_{ij} - λ(β) + h}`. Predecessors of `(i,j)` lying on one
//! anti-diagonal form a contiguous run, so prefix sums per anti-diagonal
//! bring the cost down to `O(n³)`. Values are stored as mantissas with one
//! log-offset per anti-diagonal.

use crate::disorder::{log_mgf, StrandLaw, StrandSample};
use crate::error::{Error, Result};
use crate::lattice::{strictly_below, BoxSize, Grid, Point};
use crate::numerics::log_sum_exp;
use crate::renewal::{Mode, RenewalLaw};
use serde::{Deserialize, Serialize};

/// Default mantissa cap.
pub const DEFAULT_M_CAP: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpOptions {
    /// A diagonal is renormalized when one of its mantissas exceeds `m_cap`
    /// or all of them fall below `1 / m_cap`.
    pub m_cap: f64,
    /// Also propagate `Σ_paths weight × contacts`.
    pub contacts: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            m_cap: DEFAULT_M_CAP,
            contacts: false,
        }
    }
}

impl DpOptions {
    fn validate(&self) -> Result<()> {
        if !(self.m_cap >= 1e2 && self.m_cap <= 1e200) {
            return Err(Error::param("m_cap", "must lie in [1e2, 1e200]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    /// `log Z`; `-inf` encodes the zero partition function.
    pub log_value: f64,
    pub mode: Mode,
    pub n1: usize,
    pub n2: usize,
}

/// `Z` over a box, stored as `mantissa(i,j) · exp(diag_log_scale[i+j])`.
#[derive(Debug, Clone)]
pub struct ScaledGrid {
    pub mantissa: Grid<f64>,
    pub diag_log_scale: Vec<f64>,
    /// Contact-weighted companion on the same scale, when requested.
    pub contacts: Option<Grid<f64>>,
}

impl ScaledGrid {
    pub fn n1(&self) -> usize {
        self.mantissa.n1
    }

    pub fn n2(&self) -> usize {
        self.mantissa.n2
    }

    /// `log Z(i, j)`.
    pub fn log_value(&self, i: usize, j: usize) -> f64 {
        let m = *self.mantissa.get(i, j);
        if m <= 0.0 {
            f64::NEG_INFINITY
        } else {
            m.ln() + self.diag_log_scale[i + j]
        }
    }

    /// Gibbs mean number of contacts for the path constrained to `(i, j)`.
    pub fn mean_contacts(&self, i: usize, j: usize) -> Option<f64> {
        let c = self.contacts.as_ref()?;
        Some(c.get(i, j) / self.mantissa.get(i, j))
    }

    /// `log Σ_{p ⪯ (m1,m2)} Z(p) ExitMass_{(m1,m2)}(p)`, the free partition
    /// function of the sub-box `(m1, m2)`.
    pub fn log_free(&self, exit: &ExitTable, m1: usize, m2: usize) -> f64 {
        self.free_sum(exit, m1, m2, false).0
    }

    /// Free partition function and its contact-weighted companion (log scale).
    fn free_sum(&self, exit: &ExitTable, m1: usize, m2: usize, with_contacts: bool) -> (f64, f64) {
        let mut terms = Vec::with_capacity(m1 + m2 + 1);
        let mut cterms = Vec::new();
        for d in 0..=m1 + m2 {
            let ilo = if d == 0 { 0 } else { 1.max(d.saturating_sub(m2)) };
            let ihi = if d == 0 { 0 } else { m1.min(d - 1) };
            let mut s = 0.0;
            let mut cs = 0.0;
            for i in ilo..=ihi {
                let j = d - i;
                if d > 0 && j == 0 {
                    continue;
                }
                let e = exit.exit(m1 - i, m2 - j);
                s += self.mantissa.get(i, j) * e;
                if with_contacts {
                    cs += self.contacts.as_ref().unwrap().get(i, j) * e;
                }
            }
            if s > 0.0 {
                terms.push(s.ln() + self.diag_log_scale[d]);
            }
            if cs > 0.0 {
                cterms.push(cs.ln() + self.diag_log_scale[d]);
            }
        }
        (log_sum_exp(&terms), log_sum_exp(&cterms))
    }
}

/// Probability that a jump from a point at distance `(r1, r2)` from the
/// corner leaves the box: `T(r1+1) + T(r2+1) - T(r1+r2+1)` with
/// `T(m) = Σ_{t>m} (t - m) K(t)`.
#[derive(Debug, Clone)]
pub struct ExitTable {
    t1: Vec<f64>,
}

impl ExitTable {
    /// Table valid for boxes with `n1 + n2 ≤ nmax`.
    pub fn new(law: &RenewalLaw, nmax: usize) -> Self {
        let top = nmax + 2;
        // mass_tail(m) = Σ_{t>m} (t-1)K(t), ktail(m) = Σ_{t>m} K(t)
        let mut mt = law.mass_tail(top);
        let mut kt = law.projection_interarrival(top);
        let mut t1 = vec![0.0; top + 1];
        for m in (1..=top).rev() {
            t1[m] = mt - (m as f64 - 1.0) * kt;
            let k = law.kernel(m);
            mt += (m as f64 - 1.0) * k;
            kt += k;
        }
        ExitTable { t1 }
    }

    #[inline]
    pub fn exit(&self, r1: usize, r2: usize) -> f64 {
        self.t1[r1 + 1] + self.t1[r2 + 1] - self.t1[r1 + r2 + 1]
    }
}

/// Run the scaled DP for log-weights `log_w(i, j)` on `(n1, n2)`.
pub fn solve<F: Fn(usize, usize) -> f64>(kern: &[f64], n1: usize, n2: usize, log_w: F, opts: DpOptions) -> ScaledGrid {
    let dmax = n1 + n2;
    let mut mant = Grid::filled(n1, n2, 0.0);
    mant.set(0, 0, 1.0);
    let mut contacts = if opts.contacts { Some(Grid::filled(n1, n2, 0.0)) } else { None };
    let mut scale = vec![f64::NEG_INFINITY; dmax + 1];
    scale[0] = 0.0;

    let prefix_of = |g: &Grid<f64>, s: usize| -> Vec<f64> {
        let mut p = vec![0.0; n1 + 1];
        let mut acc = 0.0;
        for (a, slot) in p.iter_mut().enumerate() {
            if a <= s && s - a <= n2 && (s == 0 || (a > 0 && a < s)) {
                acc += g.get(a, s - a);
            }
            *slot = acc;
        }
        p
    };
    let mut prefix: Vec<Vec<f64>> = vec![prefix_of(&mant, 0), vec![0.0; n1 + 1]];
    let mut cprefix: Vec<Vec<f64>> = if opts.contacts {
        vec![vec![0.0; n1 + 1], vec![0.0; n1 + 1]]
    } else {
        Vec::new()
    };
    let mut factor = vec![0.0; dmax + 1];

    for d in 2..=dmax {
        let lstar = scale[..d - 1].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for s in 0..d - 1 {
            factor[s] = if scale[s] == f64::NEG_INFINITY {
                0.0
            } else {
                kern[d - s] * (scale[s] - lstar).exp()
            };
        }
        let ilo = 1.max(d.saturating_sub(n2));
        let ihi = n1.min(d - 1);
        let wmax = (ilo..=ihi).map(|i| log_w(i, d - i)).fold(f64::NEG_INFINITY, f64::max);
        let mut mmax: f64 = 0.0;
        for i in ilo..=ihi {
            let j = d - i;
            let mut acc = 0.0;
            let mut cacc = 0.0;
            for s in 0..d - 1 {
                let f = factor[s];
                if f == 0.0 {
                    continue;
                }
                let lo = s.saturating_sub(j - 1);
                let hi = (i - 1).min(s);
                if lo > hi {
                    continue;
                }
                let p = &prefix[s];
                acc += f * if lo == 0 { p[hi] } else { p[hi] - p[lo - 1] };
                if opts.contacts {
                    let c = &cprefix[s];
                    cacc += f * if lo == 0 { c[hi] } else { c[hi] - c[lo - 1] };
                }
            }
            let w = (log_w(i, j) - wmax).exp();
            let z = acc * w;
            mant.set(i, j, z);
            if let Some(cg) = contacts.as_mut() {
                cg.set(i, j, cacc * w + z);
            }
            mmax = mmax.max(z);
        }
        let mut sd = lstar + wmax;
        if mmax > opts.m_cap || (mmax > 0.0 && mmax < 1.0 / opts.m_cap) {
            let inv = 1.0 / mmax;
            for i in ilo..=ihi {
                *mant.get_mut(i, d - i) *= inv;
                if let Some(cg) = contacts.as_mut() {
                    *cg.get_mut(i, d - i) *= inv;
                }
            }
            sd += mmax.ln();
        }
        scale[d] = if mmax > 0.0 { sd } else { f64::NEG_INFINITY };
        prefix.push(prefix_of(&mant, d));
        if let Some(cg) = contacts.as_ref() {
            cprefix.push(prefix_of(cg, d));
        }
    }
    ScaledGrid {
        mantissa: mant,
        diag_log_scale: scale,
        contacts,
    }
}

fn check_inputs(rlaw: &RenewalLaw, s: &StrandSample, slaw: &StrandLaw, beta: f64, bx: BoxSize) -> Result<f64> {
    rlaw.check_box(bx)?;
    if s.hat.len() < bx.n1 || s.bar.len() < bx.n2 {
        return Err(Error::param("sample", "strand sample shorter than the box"));
    }
    log_mgf(slaw, beta)
}

/// Full DP grid for the quenched model on `bx`.
pub fn quenched_grid(
    rlaw: &RenewalLaw,
    s: &StrandSample,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    bx: BoxSize,
    opts: DpOptions,
) -> Result<ScaledGrid> {
    opts.validate()?;
    let lambda = check_inputs(rlaw, s, slaw, beta, bx)?;
    let kern = rlaw.kernel_table(bx.norm());
    let shift = h - lambda;
    Ok(solve(&kern, bx.n1, bx.n2, |i, j| beta * s.hat[i - 1] * s.bar[j - 1] + shift, opts))
}

fn result_from_grid(rlaw: &RenewalLaw, g: &ScaledGrid, bx: BoxSize, mode: Mode) -> PartitionResult {
    let log_value = match mode {
        Mode::Constrained => g.log_value(bx.n1, bx.n2),
        Mode::Free => g.log_free(&ExitTable::new(rlaw, bx.norm()), bx.n1, bx.n2),
    };
    PartitionResult {
        log_value,
        mode,
        n1: bx.n1,
        n2: bx.n2,
    }
}

/// Quenched partition function on `bx`, using the top-left part of `s`.
pub fn quenched_partition(
    rlaw: &RenewalLaw,
    s: &StrandSample,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    bx: BoxSize,
    mode: Mode,
) -> Result<PartitionResult> {
    let g = quenched_grid(rlaw, s, slaw, beta, h, bx, DpOptions::default())?;
    Ok(result_from_grid(rlaw, &g, bx, mode))
}

/// Same as [`quenched_partition`] with explicit DP options.
pub fn quenched_partition_with(
    rlaw: &RenewalLaw,
    s: &StrandSample,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    bx: BoxSize,
    mode: Mode,
    opts: DpOptions,
) -> Result<PartitionResult> {
    let g = quenched_grid(rlaw, s, slaw, beta, h, bx, opts)?;
    Ok(result_from_grid(rlaw, &g, bx, mode))
}

/// Homogeneous model: every contact weighs `e^h`.
pub fn homogeneous_grid(rlaw: &RenewalLaw, h: f64, bx: BoxSize, opts: DpOptions) -> Result<ScaledGrid> {
    opts.validate()?;
    rlaw.check_box(bx)?;
    if !h.is_finite() {
        return Err(Error::param("h", "must be finite"));
    }
    let kern = rlaw.kernel_table(bx.norm());
    Ok(solve(&kern, bx.n1, bx.n2, |_, _| h, opts))
}

pub fn homogeneous_partition(rlaw: &RenewalLaw, h: f64, bx: BoxSize, mode: Mode) -> Result<PartitionResult> {
    let g = homogeneous_grid(rlaw, h, bx, DpOptions::default())?;
    Ok(result_from_grid(rlaw, &g, bx, mode))
}

/// Partition function of paths from `a` to `b` rewarded on `⟦a+1, b⟧`;
/// `-inf` when `a ⊀ b`.
pub fn conditioned_partition(
    rlaw: &RenewalLaw,
    s: &StrandSample,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    a: Point,
    b: Point,
) -> Result<PartitionResult> {
    if !strictly_below(a, b) {
        return Ok(PartitionResult {
            log_value: f64::NEG_INFINITY,
            mode: Mode::Constrained,
            n1: b.0.saturating_sub(a.0),
            n2: b.1.saturating_sub(a.1),
        });
    }
    if b.0 > s.hat.len() || b.1 > s.bar.len() {
        return Err(Error::OutOfRange {
            point: b,
            range: format!("[0, {}] x [0, {}]", s.hat.len(), s.bar.len()),
        });
    }
    let sub = s.window(a.0, a.1, b.0, b.1);
    quenched_partition(rlaw, &sub, slaw, beta, h, BoxSize::new(b.0 - a.0, b.1 - a.1), Mode::Constrained)
}

/// `(1/n1) E^{Gibbs}[|τ ∩ box|]` for the constrained model.
pub fn contact_fraction(rlaw: &RenewalLaw, s: &StrandSample, slaw: &StrandLaw, beta: f64, h: f64, bx: BoxSize) -> Result<f64> {
    let opts = DpOptions {
        contacts: true,
        ..DpOptions::default()
    };
    let g = quenched_grid(rlaw, s, slaw, beta, h, bx, opts)?;
    Ok(g.mean_contacts(bx.n1, bx.n2).unwrap() / bx.n1 as f64)
}

/// Gibbs mean contact count in the free model.
pub fn free_mean_contacts(rlaw: &RenewalLaw, s: &StrandSample, slaw: &StrandLaw, beta: f64, h: f64, bx: BoxSize) -> Result<f64> {
    let opts = DpOptions {
        contacts: true,
        ..DpOptions::default()
    };
    let g = quenched_grid(rlaw, s, slaw, beta, h, bx, opts)?;
    let (lz, lc) = g.free_sum(&ExitTable::new(rlaw, bx.norm()), bx.n1, bx.n2, true);
    Ok((lc - lz).exp())
}

/// Reference `O(n⁴)` recursion in the log domain, summing over every
/// predecessor explicitly. Exit masses are `1 - Σ` of in-box jump masses.
pub mod naive {
    use super::*;

    pub fn log_partition(
        rlaw: &RenewalLaw,
        s: &StrandSample,
        slaw: &StrandLaw,
        beta: f64,
        h: f64,
        bx: BoxSize,
        mode: Mode,
    ) -> Result<f64> {
        let lambda = check_inputs(rlaw, s, slaw, beta, bx)?;
        let (n1, n2) = (bx.n1, bx.n2);
        let lk: Vec<f64> = (0..=n1 + n2).map(|t| rlaw.kernel(t).ln()).collect();
        let mut lz = Grid::filled(n1, n2, f64::NEG_INFINITY);
        lz.set(0, 0, 0.0);
        let mut terms = Vec::new();
        for i in 1..=n1 {
            for j in 1..=n2 {
                terms.clear();
                terms.push(lk[i + j]);
                for a in 1..i {
                    for b in 1..j {
                        terms.push(lz.get(a, b) + lk[i - a + j - b]);
                    }
                }
                let w = beta * s.hat[i - 1] * s.bar[j - 1] - lambda + h;
                lz.set(i, j, w + log_sum_exp(&terms));
            }
        }
        Ok(match mode {
            Mode::Constrained => *lz.get(n1, n2),
            Mode::Free => {
                let mut t = Vec::new();
                for i in 0..=n1 {
                    for j in 0..=n2 {
                        if (i == 0) != (j == 0) {
                            continue;
                        }
                        let mut inside = 0.0;
                        for a in 1..=n1 - i {
                            for b in 1..=n2 - j {
                                inside += rlaw.kernel(a + b);
                            }
                        }
                        t.push(lz.get(i, j) + (1.0 - inside).ln());
                    }
                }
                log_sum_exp(&t)
            }
        })
    }
}
