//! Two-replica computations: chain decomposition of a pair of trajectories
//! and the second moment `E[(Z^{free}_{n,0})²]`.
//!
//! For fixed `τ, τ′` the disorder average factorizes over double points
//! (`τ∩τ′`), isolated points (weight 1) and chains of aligned points, which
//! share one strand charge between consecutive members.

use crate::disorder::{log_mgf, StrandLaw};
use crate::error::{Error, Result};
use crate::lattice::{BoxSize, Point, Trajectory};
use crate::numerics::Estimate;
use crate::renewal::{intersection_counts, JumpSampler, RenewalLaw};
use crate::rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChainDecomposition {
    /// `ν = τ ∩ τ′`, lexically ordered.
    pub doubles: Vec<Point>,
    pub isolated: Vec<Point>,
    pub chains: Vec<Vec<Point>>,
}

impl ChainDecomposition {
    /// Total number of chained points `|𝔖|`.
    pub fn chained_points(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    /// Check the structural invariants against the trajectories it came
    /// from, plus `½(p₁+p₂) ≤ |ν|+|𝔖| ≤ 2(p₁+p₂)`.
    pub fn validate(&self, t1: &Trajectory, t2: &Trajectory, bx: BoxSize) -> std::result::Result<(), String> {
        let a: HashSet<Point> = t1.restrict(bx).points.into_iter().collect();
        let b: HashSet<Point> = t2.restrict(bx).points.into_iter().collect();
        let union: HashSet<Point> = a.union(&b).copied().collect();

        let mut seen = HashSet::new();
        let all = self.doubles.iter().chain(&self.isolated).chain(self.chains.iter().flatten());
        for p in all {
            if !seen.insert(*p) {
                return Err(format!("point {p:?} appears twice"));
            }
        }
        if seen != union {
            return Err("parts do not cover the union of the trajectories".into());
        }
        for p in &self.doubles {
            if !(a.contains(p) && b.contains(p)) {
                return Err(format!("double point {p:?} not in both trajectories"));
            }
        }
        let mut chain_of = HashMap::new();
        for (m, chain) in self.chains.iter().enumerate() {
            if chain.len() < 2 {
                return Err(format!("chain {m} has length {}", chain.len()));
            }
            for w in chain.windows(2) {
                let (p, q) = (w[0], w[1]);
                if a.contains(&p) == a.contains(&q) {
                    return Err(format!("chain {m} does not alternate at {p:?} -> {q:?}"));
                }
                if (p.0 == q.0) == (p.1 == q.1) {
                    return Err(format!("{p:?} and {q:?} do not share exactly one coordinate"));
                }
            }
            for p in chain {
                chain_of.insert(*p, m);
            }
        }
        let pts: Vec<Point> = union.iter().copied().collect();
        for (k, p) in pts.iter().enumerate() {
            for q in &pts[k + 1..] {
                if p.0 == q.0 || p.1 == q.1 {
                    match (chain_of.get(p), chain_of.get(q)) {
                        (Some(x), Some(y)) if x == y => {}
                        _ => return Err(format!("aligned points {p:?}, {q:?} not in one chain")),
                    }
                }
            }
        }
        let (_, p1, p2) = intersection_counts(&t1.restrict(bx), &t2.restrict(bx));
        let s = (p1 + p2) as f64;
        let c = (self.doubles.len() + self.chained_points()) as f64;
        if !(0.5 * s <= c && c <= 2.0 * s) {
            return Err(format!("count inequality fails: p1+p2 = {s}, |nu|+|S| = {c}"));
        }
        Ok(())
    }
}

/// Split `(τ ∪ τ′) ∩ box` into double, isolated and chained points.
///
/// Chains are grown from the lexically first unassigned chained point by
/// repeatedly moving to the unassigned point sharing a row or column.
pub fn decompose(t1: &Trajectory, t2: &Trajectory, bx: BoxSize) -> ChainDecomposition {
    let a = t1.restrict(bx).points;
    let b = t2.restrict(bx).points;
    let bset: HashSet<Point> = b.iter().copied().collect();
    let aset: HashSet<Point> = a.iter().copied().collect();

    let doubles: Vec<Point> = a.iter().copied().filter(|p| bset.contains(p)).collect();
    let mut single: Vec<Point> = a
        .iter()
        .copied()
        .filter(|p| !bset.contains(p))
        .chain(b.iter().copied().filter(|p| !aset.contains(p)))
        .collect();
    single.sort_unstable();

    let mut rows: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut cols: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, p) in single.iter().enumerate() {
        rows.entry(p.0).or_default().push(k);
        cols.entry(p.1).or_default().push(k);
    }
    let neighbours = |k: usize| -> Vec<usize> {
        let p = single[k];
        rows[&p.0].iter().chain(&cols[&p.1]).copied().filter(|&m| m != k).collect()
    };

    let mut assigned = vec![false; single.len()];
    let mut isolated = Vec::new();
    let mut chains = Vec::new();
    for k in 0..single.len() {
        if assigned[k] {
            continue;
        }
        if neighbours(k).is_empty() {
            isolated.push(single[k]);
            assigned[k] = true;
            continue;
        }
        let mut chain = vec![single[k]];
        assigned[k] = true;
        let mut cur = k;
        while let Some(next) = neighbours(cur).into_iter().find(|&m| !assigned[m]) {
            assigned[next] = true;
            chain.push(single[next]);
            cur = next;
        }
        chains.push(chain);
    }
    ChainDecomposition {
        doubles,
        isolated,
        chains,
    }
}

/// `ξ₁, …, ξ_ℓ` from `ξ₀ = 1`, `ξ_{k+1} = (1 - β² ξ_k²)^{-1/2}`.
pub fn xi_sequence(beta: f64, len: usize) -> Result<Vec<f64>> {
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::Domain(format!("xi recursion needs 0 <= beta <= 1/2, got {beta}")));
    }
    let mut out = Vec::with_capacity(len);
    let mut x = 1.0f64;
    for _ in 0..len {
        x = 1.0 / (1.0 - beta * beta * x * x).sqrt();
        out.push(x);
    }
    Ok(out)
}

/// Fixed point `ξ_∞ = (β√2)^{-1} √(1 - √(1 - 4β²))`.
pub fn xi_limit(beta: f64) -> f64 {
    if beta == 0.0 {
        return 1.0;
    }
    (1.0 - (1.0 - 4.0 * beta * beta).sqrt()).sqrt() / (beta * std::f64::consts::SQRT_2)
}

/// `log E[∏_{i∈σ} e^{β ω_i - λ(β)}]` for a chain of `len` points.
pub fn log_chain_weight(slaw: &StrandLaw, beta: f64, len: usize) -> Result<f64> {
    if len == 0 {
        return Err(Error::param("len", "chains have at least one point"));
    }
    let lambda = log_mgf(slaw, beta)?;
    match slaw {
        StrandLaw::Rademacher { .. } => Ok(0.0),
        StrandLaw::Gaussian { sigma } => {
            let s = beta * sigma * sigma;
            if s > 0.5 {
                return Err(Error::Domain(format!(
                    "Gaussian chain weights need beta sigma^2 <= 1/2, got {s}"
                )));
            }
            let xi = xi_sequence(s, len)?;
            Ok(xi.iter().map(|x| x.ln()).sum::<f64>() - len as f64 * xi[0].ln())
        }
        StrandLaw::Discrete { values, probs } => {
            // v_k(y) = p(y) Σ_x v_{k-1}(x) e^{β x y} e^{-λ}
            let mut v = probs.clone();
            let mut log_scale = 0.0;
            for _ in 0..len {
                let mut next = vec![0.0; v.len()];
                for (y, slot) in next.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (x, vx) in v.iter().enumerate() {
                        acc += vx * (beta * values[x] * values[y] - lambda).exp();
                    }
                    *slot = probs[y] * acc;
                }
                let m = next.iter().cloned().fold(0.0, f64::max);
                for e in next.iter_mut() {
                    *e /= m;
                }
                log_scale += m.ln();
                v = next;
            }
            Ok(log_scale + v.iter().sum::<f64>().ln())
        }
    }
}

pub fn chain_weight(slaw: &StrandLaw, beta: f64, len: usize) -> Result<f64> {
    log_chain_weight(slaw, beta, len).map(f64::exp)
}

/// `λ(2β) - 2λ(β)`, the exponent per double point.
pub fn double_point_exponent(slaw: &StrandLaw, beta: f64) -> Result<f64> {
    if 2.0 * beta >= slaw.beta0() {
        return Err(Error::Divergence {
            beta: 2.0 * beta,
            beta0: slaw.beta0(),
        });
    }
    Ok(log_mgf(slaw, 2.0 * beta)? - 2.0 * log_mgf(slaw, beta)?)
}

/// Chain weights `log w(ℓ)` for `ℓ = 1..=max_len`, index 0 unused.
fn chain_table(slaw: &StrandLaw, beta: f64, max_len: usize) -> Result<Vec<f64>> {
    let mut t = vec![0.0; max_len + 1];
    for (len, slot) in t.iter_mut().enumerate().skip(1) {
        *slot = log_chain_weight(slaw, beta, len)?;
    }
    Ok(t)
}

/// `e^{(λ(2β)-2λ(β))|ν|} ∏_m w(|σ_m|)`.
pub fn pair_second_moment_weight(d: &ChainDecomposition, slaw: &StrandLaw, beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(1.0);
    }
    let g = double_point_exponent(slaw, beta)?;
    let mut lw = g * d.doubles.len() as f64;
    for c in &d.chains {
        lw += log_chain_weight(slaw, beta, c.len())?;
    }
    Ok(lw.exp())
}

/// Second moment and its Cauchy-Schwarz bounds on the same trajectory pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedMoments {
    /// `E[(Z^{free}_{n,0})²]`.
    pub exact: Estimate,
    /// `E[e^{(3/2) g (p₁+p₂)}]`.
    pub cs_bound: Estimate,
    /// `E[e^{3 g p₁}]`.
    pub proj_bound: Estimate,
    /// Fraction of pairs whose exact weight is at most the `cs_bound` weight.
    pub dominated_fraction: f64,
}

struct PairWeights {
    exact: f64,
    cs: f64,
    proj: f64,
}

fn pair_weights(t1: &Trajectory, t2: &Trajectory, bx: BoxSize, g: f64, chains: &[f64]) -> PairWeights {
    let d = decompose(t1, t2, bx);
    let mut lw = g * d.doubles.len() as f64;
    for c in &d.chains {
        lw += chains[c.len()];
    }
    let (_, p1, p2) = intersection_counts(&t1.restrict(bx), &t2.restrict(bx));
    PairWeights {
        exact: lw.exp(),
        cs: (1.5 * g * (p1 + p2) as f64).exp(),
        proj: (3.0 * g * p1 as f64).exp(),
    }
}

fn check_moment_inputs(rlaw: &RenewalLaw, slaw: &StrandLaw, beta: f64, bx: BoxSize, samples: usize) -> Result<()> {
    rlaw.check_box(bx)?;
    if samples == 0 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    if beta < 0.0 {
        return Err(Error::param("beta", "must be nonnegative"));
    }
    double_point_exponent(slaw, beta).map(|_| ())
}

/// Exact and bounding second-moment estimates over the boxes in
/// `schedule`, all read off the same trajectory pairs (sampled in the
/// largest box and restricted).
pub fn second_moment_schedule(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    schedule: &[BoxSize],
    samples: usize,
    seed: u64,
) -> Result<Vec<PairedMoments>> {
    let big = *schedule
        .iter()
        .max_by_key(|b| b.norm())
        .ok_or_else(|| Error::param("schedule", "empty box schedule"))?;
    for bx in schedule {
        check_moment_inputs(rlaw, slaw, beta, *bx, samples)?;
        if bx.n1 > big.n1 || bx.n2 > big.n2 {
            return Err(Error::param("schedule", "boxes must be nested"));
        }
    }
    if beta == 0.0 {
        let one = Estimate {
            value: 1.0,
            std_err: 0.0,
            samples,
        };
        return Ok(schedule
            .iter()
            .map(|_| PairedMoments {
                exact: one,
                cs_bound: one,
                proj_bound: one,
                dominated_fraction: 1.0,
            })
            .collect());
    }
    let g = double_point_exponent(slaw, beta)?;
    let chains = chain_table(slaw, beta, big.norm())?;
    let sampler = JumpSampler::new(rlaw, big);
    let per_sample = rng::par_samples(seed, samples, |_, r| {
        let t1 = sampler.free(r);
        let t2 = sampler.free(r);
        schedule
            .iter()
            .map(|bx| pair_weights(&t1, &t2, *bx, g, &chains))
            .collect::<Vec<_>>()
    });
    Ok((0..schedule.len())
        .map(|k| {
            let ex: Vec<f64> = per_sample.iter().map(|v| v[k].exact).collect();
            let cs: Vec<f64> = per_sample.iter().map(|v| v[k].cs).collect();
            let pr: Vec<f64> = per_sample.iter().map(|v| v[k].proj).collect();
            let dom = ex.iter().zip(&cs).filter(|(e, c)| **e <= **c * (1.0 + 1e-12)).count();
            PairedMoments {
                exact: Estimate::from_samples(&ex),
                cs_bound: Estimate::from_samples(&cs),
                proj_bound: Estimate::from_samples(&pr),
                dominated_fraction: dom as f64 / samples as f64,
            }
        })
        .collect())
}

pub fn second_moment_paired(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    bx: BoxSize,
    samples: usize,
    seed: u64,
) -> Result<PairedMoments> {
    Ok(second_moment_schedule(rlaw, slaw, beta, &[bx], samples, seed)?[0])
}

/// Monte Carlo estimate of `E[(Z^{free}_{n,0})²]` over free trajectory pairs.
pub fn second_moment_mc(rlaw: &RenewalLaw, slaw: &StrandLaw, beta: f64, bx: BoxSize, samples: usize, seed: u64) -> Result<Estimate> {
    Ok(second_moment_paired(rlaw, slaw, beta, bx, samples, seed)?.exact)
}

/// Cauchy-Schwarz bounds `(two-projection, single-projection)` on the same
/// pairs as [`second_moment_mc`] with the same seed.
pub fn second_moment_cs_bound(
    rlaw: &RenewalLaw,
    slaw: &StrandLaw,
    beta: f64,
    bx: BoxSize,
    samples: usize,
    seed: u64,
) -> Result<(Estimate, Estimate)> {
    let p = second_moment_paired(rlaw, slaw, beta, bx, samples, seed)?;
    Ok((p.cs_bound, p.proj_bound))
}
