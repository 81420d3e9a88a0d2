use gpslab::disorder::{log_mgf, sample_strands};
use gpslab::oracle::{enumerate_strands, exact_annealed_brute, exact_partition_brute};
use gpslab::partition::{
    conditioned_partition, contact_fraction, free_mean_contacts, homogeneous_partition, naive, quenched_partition,
    quenched_partition_with, DpOptions,
};
use gpslab::renewal::renewal_mass_grid;
use gpslab::{rng, BoxSize, Mode, RenewalLaw, SlowVary, StrandLaw, StrandSample};
use proptest::prelude::*;

fn laws() -> Vec<StrandLaw> {
    vec![
        StrandLaw::Gaussian { sigma: 1.0 },
        StrandLaw::Rademacher { x: 1.0 },
        StrandLaw::Discrete {
            values: vec![-1.2, 0.3, 1.5],
            probs: vec![0.3, 0.5, 0.2],
        },
    ]
}

fn renewals() -> Vec<RenewalLaw> {
    vec![
        RenewalLaw::pure(0.5).unwrap(),
        RenewalLaw::new(1.5, SlowVary::LogPower { kappa: 0.7 }, 1e-2).unwrap(),
    ]
}

#[test]
fn dp_matches_path_enumeration_on_all_tiny_instances() {
    let mut g = rng::stream(41, 0);
    for r in renewals() {
        for slaw in laws() {
            for beta in [0.0, 0.3, 0.6] {
                for n1 in 1..=4 {
                    for n2 in 1..=4 {
                        let bx = BoxSize { n1, n2 };
                        let s = sample_strands(&slaw, bx, &mut g);
                        for mode in [Mode::Constrained, Mode::Free] {
                            for h in [-0.4, 0.25] {
                                let dp = quenched_partition(&r, &s, &slaw, beta, h, bx, mode).unwrap().log_value;
                                let brute = exact_partition_brute(&r, &s, &slaw, beta, h, bx, mode).unwrap().ln();
                                assert!((dp - brute).abs() < 1e-12 * brute.abs().max(1.0), "{slaw:?} {bx:?} {mode:?}: {dp} vs {brute}");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn unit_box_value() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let slaw = StrandLaw::Gaussian { sigma: 1.0 };
    let s = StrandSample::new(vec![0.7], vec![-1.1]);
    let (beta, h) = (0.3, 0.2);
    let z = quenched_partition(&r, &s, &slaw, beta, h, BoxSize::square(1), Mode::Constrained).unwrap();
    let expect = r.kernel(2).ln() + beta * 0.7 * -1.1 - log_mgf(&slaw, beta).unwrap() + h;
    assert!((z.log_value - expect).abs() < 1e-14);
}

#[test]
fn untilted_homogeneous_is_renewal_mass() {
    let r = RenewalLaw::pure(0.75).unwrap();
    let bx = BoxSize { n1: 20, n2: 17 };
    let m = renewal_mass_grid(&r, bx).unwrap();
    let z = homogeneous_partition(&r, 0.0, bx, Mode::Constrained).unwrap();
    assert!((z.log_value - m.get(20, 17).ln()).abs() < 1e-12);
    // β = 0 makes the quenched model homogeneous
    let s = sample_strands(&StrandLaw::Gaussian { sigma: 1.0 }, bx, &mut rng::stream(42, 0));
    let q = quenched_partition(&r, &s, &StrandLaw::Gaussian { sigma: 1.0 }, 0.0, 0.3, bx, Mode::Free).unwrap();
    let hz = homogeneous_partition(&r, 0.3, bx, Mode::Free).unwrap();
    assert!((q.log_value - hz.log_value).abs() < 1e-12);
}

#[test]
fn free_partition_at_zero_pinning_is_one() {
    // Σ_A P(τ ∩ box = A) = 1
    for r in renewals() {
        let z = homogeneous_partition(&r, 0.0, BoxSize { n1: 40, n2: 25 }, Mode::Free).unwrap();
        assert!(z.log_value.abs() < 1e-12);
    }
}

#[test]
fn annealed_matches_homogeneous() {
    let r = RenewalLaw::pure(1.2).unwrap();
    for slaw in laws().into_iter().skip(1) {
        for mode in [Mode::Constrained, Mode::Free] {
            let bx = BoxSize { n1: 3, n2: 3 };
            let a = exact_annealed_brute(&r, &slaw, 0.5, 0.2, bx, mode).unwrap();
            let z = homogeneous_partition(&r, 0.2, bx, mode).unwrap().log_value.exp();
            assert!((a - z).abs() < 1e-12 * z);
        }
    }
}

#[test]
fn quenched_below_annealed_on_enumerated_disorder() {
    let r = RenewalLaw::pure(0.8).unwrap();
    let slaw = laws().pop().unwrap();
    let bx = BoxSize { n1: 3, n2: 4 };
    let mut mean_log = 0.0;
    for (s, p) in enumerate_strands(&slaw, bx).unwrap() {
        mean_log += p * quenched_partition(&r, &s, &slaw, 0.7, 0.1, bx, Mode::Constrained).unwrap().log_value;
    }
    let ann = homogeneous_partition(&r, 0.1, bx, Mode::Constrained).unwrap().log_value;
    assert!(mean_log <= ann);
}

#[test]
fn conditioned_partition_is_a_translated_window() {
    let r = RenewalLaw::pure(0.6).unwrap();
    let slaw = StrandLaw::Gaussian { sigma: 1.0 };
    let bx = BoxSize { n1: 10, n2: 12 };
    let s = sample_strands(&slaw, bx, &mut rng::stream(43, 0));
    let (a, b) = ((2, 3), (7, 11));
    let c = conditioned_partition(&r, &s, &slaw, 0.4, 0.1, a, b).unwrap();
    let w = s.window(a.0, a.1, b.0, b.1);
    let sub = BoxSize { n1: b.0 - a.0, n2: b.1 - a.1 };
    let brute = naive::log_partition(&r, &w, &slaw, 0.4, 0.1, sub, Mode::Constrained).unwrap();
    assert!((c.log_value - brute).abs() < 1e-12 * brute.abs().max(1.0));
    let bad = conditioned_partition(&r, &s, &slaw, 0.4, 0.1, (3, 3), (3, 9)).unwrap();
    assert_eq!(bad.log_value, f64::NEG_INFINITY);
}

#[test]
fn contacts_are_the_pinning_derivative() {
    let r = RenewalLaw::pure(0.9).unwrap();
    let slaw = StrandLaw::Rademacher { x: 1.0 };
    let bx = BoxSize { n1: 30, n2: 30 };
    let s = sample_strands(&slaw, bx, &mut rng::stream(44, 0));
    let (beta, h, eps) = (0.3, 0.05, 1e-5);
    for mode in [Mode::Constrained, Mode::Free] {
        let f = |hh| quenched_partition(&r, &s, &slaw, beta, hh, bx, mode).unwrap().log_value;
        let d = (f(h + eps) - f(h - eps)) / (2.0 * eps);
        let c = match mode {
            Mode::Constrained => contact_fraction(&r, &s, &slaw, beta, h, bx).unwrap() * 30.0,
            Mode::Free => free_mean_contacts(&r, &s, &slaw, beta, h, bx).unwrap(),
        };
        assert!((c - d).abs() < 1e-6 * c.max(1.0), "{mode:?}: {c} vs {d}");
    }
}

#[test]
fn large_boxes_stay_finite() {
    let r = RenewalLaw::pure(0.5).unwrap();
    for h in [-5.0, 0.0, 5.0] {
        let z = homogeneous_partition(&r, h, BoxSize::square(400), Mode::Constrained).unwrap().log_value;
        assert!(z.is_finite());
    }
}

#[test]
fn invalid_inputs() {
    let r = RenewalLaw::pure(0.5).unwrap();
    let slaw = StrandLaw::Gaussian { sigma: 1.0 };
    let s = StrandSample::zeros(BoxSize::square(3));
    assert!(quenched_partition(&r, &s, &slaw, 1.0, 0.0, BoxSize::square(3), Mode::Free).is_err());
    assert!(quenched_partition(&r, &s, &slaw, 0.1, 0.0, BoxSize::square(4), Mode::Free).is_err());
    let opts = DpOptions {
        m_cap: 10.0,
        ..DpOptions::default()
    };
    assert!(quenched_partition_with(&r, &s, &slaw, 0.1, 0.0, BoxSize::square(3), Mode::Free, opts).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fast_dp_matches_naive(
        alpha in 0.2f64..2.5,
        n1 in 1usize..20,
        n2 in 1usize..20,
        beta in 0.0f64..0.6,
        h in -2.0f64..2.0,
        law in 0usize..3,
        free in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let r = RenewalLaw::pure(alpha).unwrap();
        let slaw = &laws()[law];
        let bx = BoxSize { n1, n2 };
        let s = sample_strands(slaw, bx, &mut rng::stream(seed, 0));
        let mode = if free { Mode::Free } else { Mode::Constrained };
        let fast = quenched_partition(&r, &s, slaw, beta, h, bx, mode).unwrap().log_value;
        let slow = naive::log_partition(&r, &s, slaw, beta, h, bx, mode).unwrap();
        prop_assert!((fast - slow).abs() < 1e-12 * fast.abs().max(1.0));
    }

    #[test]
    fn log_partition_is_increasing_in_h(alpha in 0.3f64..2.0, n in 1usize..30, h in -1.0f64..1.0, dh in 0.001f64..0.5, seed in any::<u64>()) {
        let r = RenewalLaw::pure(alpha).unwrap();
        let slaw = StrandLaw::Gaussian { sigma: 1.0 };
        let bx = BoxSize::square(n);
        let s = sample_strands(&slaw, bx, &mut rng::stream(seed, 0));
        for mode in [Mode::Constrained, Mode::Free] {
            let a = quenched_partition(&r, &s, &slaw, 0.3, h, bx, mode).unwrap().log_value;
            let b = quenched_partition(&r, &s, &slaw, 0.3, h + dh, bx, mode).unwrap().log_value;
            prop_assert!(b >= a);
        }
    }
}
