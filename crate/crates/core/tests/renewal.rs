use gpslab::oracle::{enumerate_trajectories, path_probability};
use gpslab::renewal::{
    epoch_mass_grids, intersection_counts, intersection_stats, renewal_mass_grid, sample_trajectory, scaling_sequences, JumpSampler,
};
use gpslab::{rng, BoxSize, Mode, RenewalLaw, SlowVary};
use proptest::prelude::*;

/// `Σ_{t≥2} (t-1) t^{-2-α}`: direct terms up to `n`, then the midpoint
/// integral of the tail from `n + ½`.
fn series(alpha: f64, n: usize) -> f64 {
    let mut s = 0.0;
    for t in (2..=n).rev() {
        let t = t as f64;
        s += (t - 1.0) * t.powf(-2.0 - alpha);
    }
    let x = n as f64 + 0.5;
    s + x.powf(-alpha) / alpha - x.powf(-1.0 - alpha) / (1.0 + alpha)
}

#[test]
fn normalization_matches_series() {
    for alpha in [0.5, 1.5] {
        let r = RenewalLaw::pure(alpha).unwrap();
        let c = 1.0 / series(alpha, 2_000_000);
        assert!((r.norm_const - c).abs() / c < 1e-9, "alpha {alpha}: {} vs {c}", r.norm_const);
    }
}

#[test]
fn interarrival_examples() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let m = r.interarrival_mass(1, 1).unwrap();
    assert!((m - r.norm_const * 2f64.powf(-2.5)).abs() < 1e-15);
    assert_eq!(r.interarrival_mass(1, 2).unwrap(), r.interarrival_mass(2, 1).unwrap());
    assert!(r.interarrival_mass(0, 1).is_err());
}

#[test]
fn doubling_horizon_barely_moves_the_constant() {
    let sv = SlowVary::LogPower { kappa: 0.5 };
    let a = RenewalLaw::with_horizon(0.8, sv.clone(), 1 << 20, 1e-2).unwrap();
    let b = RenewalLaw::with_horizon(0.8, sv, 1 << 21, 1e-2).unwrap();
    assert!((a.norm_const - b.norm_const).abs() < 1e-2);
}

#[test]
fn too_small_horizon_is_rejected() {
    assert!(RenewalLaw::with_horizon(0.3, SlowVary::Constant, 64, 1e-2).is_err());
}

#[test]
fn renewal_mass_matches_enumeration() {
    for alpha in [0.5, 1.5] {
        let r = RenewalLaw::pure(alpha).unwrap();
        let g = renewal_mass_grid(&r, BoxSize::square(4)).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                let bx = BoxSize { n1: i, n2: j };
                let e: f64 = enumerate_trajectories(bx, Mode::Constrained)
                    .unwrap()
                    .paths
                    .iter()
                    .map(|t| path_probability(&r, t, bx, Mode::Constrained))
                    .sum();
                assert!((g.get(i, j) - e).abs() <= 1e-12 * e, "({i},{j})");
            }
        }
        let k = |t| r.kernel(t);
        assert!((g.get(1, 1) - k(2)).abs() < 1e-16);
        assert!((g.get(2, 2) - (k(4) + k(2) * k(2))).abs() < 1e-16);
    }
}

#[test]
fn diagonal_renewal_mass_is_regularly_varying() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let g = renewal_mass_grid(&r, BoxSize::square(256)).unwrap();
    let v: Vec<f64> = [32usize, 64, 128, 256].iter().map(|&m| g.get(m, m) * (2.0 * m as f64).powf(1.5)).collect();
    for w in v.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() < 0.1, "{v:?}");
    }
}

#[test]
fn first_jump_frequency() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let js = JumpSampler::new(&r, BoxSize::square(4));
    let n = 1_000_000;
    let hits: usize = rng::par_samples(11, n, |_, g| (js.jump(g) == Some((1, 1))) as usize).into_iter().sum();
    let p = r.kernel(2);
    let f = hits as f64 / n as f64;
    assert!((f - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "{f} vs {p}");
}

#[test]
fn constrained_sampling_is_exact_on_small_boxes() {
    let r = RenewalLaw::pure(0.75).unwrap();
    let bx = BoxSize { n1: 3, n2: 4 };
    let paths = enumerate_trajectories(bx, Mode::Constrained).unwrap().paths;
    let w: Vec<f64> = paths.iter().map(|t| path_probability(&r, t, bx, Mode::Constrained)).collect();
    let total: f64 = w.iter().sum();
    let n = 200_000;
    let draws = rng::par_samples(12, n, |_, g| sample_trajectory(&r, g, bx, Mode::Constrained).unwrap());
    for (t, wt) in paths.iter().zip(&w) {
        let p = wt / total;
        let f = draws.iter().filter(|d| *d == t).count() as f64 / n as f64;
        assert!((f - p).abs() < 4.5 * (p * (1.0 - p) / n as f64).sqrt() + 1e-9, "{t:?}: {f} vs {p}");
    }
}

#[test]
fn rejection_sampling_hits_the_corner() {
    let r = RenewalLaw::pure(1.5).unwrap();
    let bx = BoxSize::square(12);
    let mut g = rng::stream(13, 0);
    for _ in 0..50 {
        let t = sample_trajectory(&r, &mut g, bx, Mode::Constrained).unwrap();
        assert_eq!(t.points.last(), Some(&(12, 12)));
        assert!(t.is_strictly_increasing());
    }
}

#[test]
fn unit_box_constrained_is_the_single_point() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let mut g = rng::stream(14, 0);
    for _ in 0..20 {
        let t = sample_trajectory(&r, &mut g, BoxSize::square(1), Mode::Constrained).unwrap();
        assert_eq!(t.points, vec![(1, 1)]);
    }
}

#[test]
fn projection_interarrival_checks() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let direct: f64 = (2..2_000_000).map(|t| r.kernel(t)).sum::<f64>()
        + r.norm_const * (2_000_000f64 - 0.5).powf(-1.5) / 1.5;
    assert!((r.projection_interarrival(1) - direct).abs() < 1e-9);
    for a in [128usize, 256] {
        let ratio = r.projection_interarrival(a) * (a as f64).powf(1.5) * 1.5 / r.norm_const;
        assert!((ratio - 1.0).abs() < 0.02, "a={a}: {ratio}");
    }
    // P(τ^{(1)} > A) ≈ c A^{-α} / (α(1+α)) for the rest
    let cut = 2000usize;
    let total: f64 = (1..=cut).map(|a| r.projection_interarrival(a)).sum::<f64>()
        + r.norm_const * (cut as f64 + 0.5).powf(-0.5) / 0.75;
    assert!((total - 1.0).abs() < r.tail_tol);
}

#[test]
fn scaling_sequence_examples() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let mut prev = 0.0;
    for n in [1usize, 10, 100, 1000, 10_000] {
        let s = scaling_sequences(&r, n).unwrap();
        assert_eq!(s.b_n, 0.0);
        assert!(s.mu_n >= prev);
        prev = s.mu_n;
    }
    let r = RenewalLaw::pure(1.5).unwrap();
    let q: Vec<f64> = [100usize, 1000, 10_000].iter().map(|&n| scaling_sequences(&r, n).unwrap().b_n / n as f64).collect();
    assert!(q.windows(2).all(|w| (w[1] - w[0]).abs() < 1e-12 * w[0]));
}

#[test]
fn epoch_masses_obey_one_big_jump_bound() {
    // P(τ_j = n) ≤ C j K(‖n‖) for ‖n‖ ≥ j², with C fitted on a box and its double
    let r = RenewalLaw::pure(0.5).unwrap();
    let fit = |n: usize| {
        let grids = epoch_mass_grids(&r, BoxSize::square(n), 8).unwrap();
        let mut c: f64 = 0.0;
        for (j, g) in grids.iter().enumerate().skip(1) {
            for a in 1..=n {
                for b in 1..=n {
                    if a + b >= j * j {
                        c = c.max(g.get(a, b) / (j as f64 * r.kernel(a + b)));
                    }
                }
            }
        }
        c
    };
    let (c1, c2) = (fit(32), fit(64));
    assert!(c1.is_finite() && c2 / c1 < 1.25, "{c1} {c2}");
}

#[test]
fn intersection_summary() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let s = intersection_stats(&r, BoxSize::square(32), 2000, 15).unwrap();
    assert!(s.bound_holds && !s.empty);
    assert!(s.bivariate.mean <= s.proj1.mean.min(s.proj2.mean));
    let e = intersection_stats(&r, BoxSize::square(8), 0, 15).unwrap();
    assert!(e.empty);
}

#[test]
fn terminating_intersections_saturate() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let small = intersection_stats(&r, BoxSize::square(64), 20_000, 16).unwrap().bivariate;
    let large = intersection_stats(&r, BoxSize::square(256), 20_000, 16).unwrap().bivariate;
    assert!(large.mean - small.mean < 4.0 * (small.std_err + large.std_err) + 0.02, "{small:?} {large:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_trajectories_are_increasing(alpha in 0.2f64..3.0, n1 in 1usize..40, n2 in 1usize..40, seed in any::<u64>()) {
        let r = RenewalLaw::pure(alpha).unwrap();
        let bx = BoxSize { n1, n2 };
        let mut g = rng::stream(seed, 0);
        let t = sample_trajectory(&r, &mut g, bx, Mode::Free).unwrap();
        prop_assert!(t.is_strictly_increasing());
        prop_assert!(t.points.iter().all(|&p| bx.contains(p)));
        let u = sample_trajectory(&r, &mut g, bx, Mode::Free).unwrap();
        let (b, p1, p2) = intersection_counts(&t, &u);
        prop_assert!(b <= p1.min(p2));
    }

    #[test]
    fn renewal_mass_is_a_probability(alpha in 0.2f64..3.0, kappa in -1.0f64..1.0, n in 1usize..24) {
        let r = RenewalLaw::new(alpha, SlowVary::LogPower { kappa }, 1e-2).unwrap();
        let g = renewal_mass_grid(&r, BoxSize::square(n)).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                let v = *g.get(i, j);
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
