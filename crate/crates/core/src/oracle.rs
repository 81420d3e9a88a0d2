//! Brute-force ground truth on tiny boxes: explicit path and disorder
//! enumeration with no recursion shared with the fast paths.

use crate::disorder::{log_mgf, StrandLaw, StrandSample};
use crate::error::{Error, Result};
use crate::lattice::{BoxSize, Point, Trajectory};
use crate::renewal::{Mode, RenewalLaw};
use crate::replica::{decompose, pair_second_moment_weight};

/// Largest `n1 · n2` accepted for path enumeration.
pub const PATH_CAP: usize = 36;
/// Largest number of disorder configurations accepted.
pub const CONFIG_CAP: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub struct PathEnumeration {
    pub bx: BoxSize,
    pub mode: Mode,
    pub paths: Vec<Trajectory>,
}

fn check_paths(bx: BoxSize) -> Result<()> {
    if bx.n1 == 0 || bx.n2 == 0 {
        return Err(Error::param("box", "both sides must be at least 1"));
    }
    let size = (bx.n1 * bx.n2) as f64;
    if size > PATH_CAP as f64 {
        return Err(Error::EnumerationCap {
            size,
            cap: PATH_CAP as f64,
        });
    }
    Ok(())
}

/// Every strictly increasing point sequence inside the box; constrained
/// sequences end at the corner, free ones include the empty sequence.
pub fn enumerate_trajectories(bx: BoxSize, mode: Mode) -> Result<PathEnumeration> {
    check_paths(bx)?;
    fn walk(bx: BoxSize, mode: Mode, cur: &mut Vec<Point>, out: &mut Vec<Trajectory>) {
        let (a, b) = cur.last().copied().unwrap_or((0, 0));
        match mode {
            Mode::Free => out.push(Trajectory { points: cur.clone() }),
            Mode::Constrained => {
                if (a, b) == (bx.n1, bx.n2) {
                    out.push(Trajectory { points: cur.clone() });
                    return;
                }
            }
        }
        for i in a + 1..=bx.n1 {
            for j in b + 1..=bx.n2 {
                cur.push((i, j));
                walk(bx, mode, cur, out);
                cur.pop();
            }
        }
    }
    let mut paths = Vec::new();
    walk(bx, mode, &mut Vec::new(), &mut paths);
    Ok(PathEnumeration { bx, mode, paths })
}

/// Number of constrained paths to `(n1, n2)` from
/// `c(i, j) = 1 + Σ_{1 ≤ a < i, 1 ≤ b < j} c(a, b)`.
pub fn constrained_path_count(n1: usize, n2: usize) -> u128 {
    let mut c = vec![vec![0u128; n2 + 1]; n1 + 1];
    for i in 1..=n1 {
        for j in 1..=n2 {
            let mut s = 1;
            for row in c.iter().take(i).skip(1) {
                for v in row.iter().take(j).skip(1) {
                    s += v;
                }
            }
            c[i][j] = s;
        }
    }
    c[n1][n2]
}

/// `P(τ₁ ⋠ r)`, the next jump leaving a box with remaining room `r`.
pub fn exit_mass(rlaw: &RenewalLaw, r1: usize, r2: usize) -> f64 {
    let mut inside = 0.0;
    for a in 1..=r1 {
        for b in 1..=r2 {
            inside += rlaw.kernel(a + b);
        }
    }
    1.0 - inside
}

/// `P(τ ∩ ⟦1, n⟧ = path)` in free mode, `P(τ visits exactly path up to n)`
/// in constrained mode.
pub fn path_probability(rlaw: &RenewalLaw, path: &Trajectory, bx: BoxSize, mode: Mode) -> f64 {
    let mut p = 1.0;
    let mut prev = (0, 0);
    for &q in &path.points {
        p *= rlaw.kernel(q.0 - prev.0 + q.1 - prev.1);
        prev = q;
    }
    if mode == Mode::Free {
        p *= exit_mass(rlaw, bx.n1 - prev.0, bx.n2 - prev.1);
    }
    p
}

fn weighted_paths(rlaw: &RenewalLaw, bx: BoxSize, mode: Mode) -> Result<Vec<(Trajectory, f64)>> {
    rlaw.check_box(bx)?;
    let e = enumerate_trajectories(bx, mode)?;
    Ok(e.paths
        .into_iter()
        .map(|t| {
            let p = path_probability(rlaw, &t, bx, mode);
            (t, p)
        })
        .collect())
}

fn sum_paths(paths: &[(Trajectory, f64)], s: &StrandSample, beta: f64, lambda: f64, h: f64) -> Result<f64> {
    let mut z = 0.0;
    for (t, p) in paths {
        let mut e = 0.0;
        for &(i, j) in &t.points {
            e += beta * s.field_value(i, j)? - lambda + h;
        }
        z += p * e.exp();
    }
    Ok(z)
}

/// Literal sum over enumerated paths of the quenched weights.
#[allow(clippy::too_many_arguments)]
pub fn exact_partition_brute(
    rlaw: &RenewalLaw,
    s: &StrandSample,
    slaw: &StrandLaw,
    beta: f64,
    h: f64,
    bx: BoxSize,
    mode: Mode,
) -> Result<f64> {
    let lambda = log_mgf(slaw, beta)?;
    let paths = weighted_paths(rlaw, bx, mode)?;
    sum_paths(&paths, s, beta, lambda, h)
}

/// All strand configurations of a finitely supported law on a box, with
/// their probabilities.
pub fn enumerate_strands(slaw: &StrandLaw, bx: BoxSize) -> Result<Vec<(StrandSample, f64)>> {
    let (vals, probs) = slaw
        .support()
        .ok_or_else(|| Error::Unsupported("disorder enumeration needs a finitely supported law".into()))?;
    let s = vals.len();
    let size = (s as f64).powi((bx.n1 + bx.n2) as i32);
    if size > CONFIG_CAP {
        return Err(Error::EnumerationCap { size, cap: CONFIG_CAP });
    }
    let len = bx.n1 + bx.n2;
    let mut idx = vec![0usize; len];
    let mut out = Vec::with_capacity(size as usize);
    loop {
        let x: Vec<f64> = idx.iter().map(|&k| vals[k]).collect();
        let p: f64 = idx.iter().map(|&k| probs[k]).product();
        out.push((StrandSample::new(x[..bx.n1].to_vec(), x[bx.n1..].to_vec()), p));
        let mut pos = 0;
        loop {
            if pos == len {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < s {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `E[Z^q]` by enumerating every disorder configuration.
pub fn exact_annealed_brute(rlaw: &RenewalLaw, slaw: &StrandLaw, beta: f64, h: f64, bx: BoxSize, mode: Mode) -> Result<f64> {
    let lambda = log_mgf(slaw, beta)?;
    let configs = enumerate_strands(slaw, bx)?;
    let paths = weighted_paths(rlaw, bx, mode)?;
    let mut total = 0.0;
    for (s, p) in &configs {
        total += p * sum_paths(&paths, s, beta, lambda, h)?;
    }
    Ok(total)
}

/// `E[(Z^{q,free}_{n,0})²]` by enumerating every disorder configuration.
pub fn exact_second_moment_brute(rlaw: &RenewalLaw, slaw: &StrandLaw, beta: f64, bx: BoxSize) -> Result<f64> {
    let lambda = log_mgf(slaw, beta)?;
    let configs = enumerate_strands(slaw, bx)?;
    let paths = weighted_paths(rlaw, bx, Mode::Free)?;
    let mut total = 0.0;
    for (s, p) in &configs {
        let z = sum_paths(&paths, s, beta, lambda, 0.0)?;
        total += p * z * z;
    }
    Ok(total)
}

/// `E_{τ,τ'}[f(τ ∩ ⟦1,n⟧, τ' ∩ ⟦1,n⟧)]` over independent free pairs.
pub fn pair_expectation<F: Fn(&Trajectory, &Trajectory) -> Result<f64>>(rlaw: &RenewalLaw, bx: BoxSize, f: F) -> Result<f64> {
    let paths = weighted_paths(rlaw, bx, Mode::Free)?;
    let mut total = 0.0;
    for (a, pa) in &paths {
        for (b, pb) in &paths {
            total += pa * pb * f(a, b)?;
        }
    }
    Ok(total)
}

fn shared_points(a: &Trajectory, b: &Trajectory) -> usize {
    a.points.iter().filter(|p| b.points.contains(p)).count()
}

/// `E_{τ,τ'}[e^{(λ(2β) - 2λ(β)) |τ ∩ τ' ∩ ⟦1,n⟧|}]`.
pub fn replica_overlap_moment(rlaw: &RenewalLaw, slaw: &StrandLaw, beta: f64, bx: BoxSize) -> Result<f64> {
    let g = log_mgf(slaw, 2.0 * beta)? - 2.0 * log_mgf(slaw, beta)?;
    pair_expectation(rlaw, bx, |a, b| Ok((g * shared_points(a, b) as f64).exp()))
}

/// Pair expectation of the factorized chain weight of each decomposition.
pub fn factorized_second_moment(rlaw: &RenewalLaw, slaw: &StrandLaw, beta: f64, bx: BoxSize) -> Result<f64> {
    pair_expectation(rlaw, bx, |a, b| pair_second_moment_weight(&decompose(a, b, bx), slaw, beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let c = |n1, n2| enumerate_trajectories(BoxSize { n1, n2 }, Mode::Constrained).unwrap().paths.len();
        assert_eq!(c(1, 1), 1);
        assert_eq!(c(2, 2), 2);
        assert_eq!(c(3, 3), 6);
        for n1 in 1..=5 {
            for n2 in 1..=5 {
                assert_eq!(c(n1, n2) as u128, constrained_path_count(n1, n2));
            }
        }
    }

    #[test]
    fn free_count_is_central_binomial() {
        let e = enumerate_trajectories(BoxSize::square(4), Mode::Free).unwrap();
        assert_eq!(e.paths.len(), 70);
    }

    #[test]
    fn cap_is_an_error() {
        assert!(matches!(
            enumerate_trajectories(BoxSize { n1: 7, n2: 6 }, Mode::Free),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn free_probabilities_sum_to_one() {
        let r = RenewalLaw::pure(0.5).unwrap();
        let bx = BoxSize { n1: 3, n2: 4 };
        let s: f64 = enumerate_trajectories(bx, Mode::Free)
            .unwrap()
            .paths
            .iter()
            .map(|t| path_probability(&r, t, bx, Mode::Free))
            .sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
