//! Bundled oracle suite: tiny instances where the fast routes can be checked
//! against enumeration.

use gpslab::disorder::sample_strands;
use gpslab::oracle::{
    constrained_path_count, enumerate_trajectories, exact_annealed_brute, exact_partition_brute, exact_second_moment_brute,
    factorized_second_moment, path_probability, replica_overlap_moment,
};
use gpslab::partition::{homogeneous_partition, quenched_partition};
use gpslab::replica::chain_weight;
use gpslab::{rng, BoxSize, Mode, RenewalLaw, StrandLaw};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Acc {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    max_error: f64,
    broken: bool,
}

impl Acc {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Acc {
            name,
            tolerance,
            cases: 0,
            max_error: 0.0,
            broken: false,
        }
    }

    fn rel(&mut self, a: f64, b: f64) {
        self.push((a - b).abs() / b.abs().max(1e-300));
    }

    fn push(&mut self, err: f64) {
        self.cases += 1;
        if err.is_nan() {
            self.broken = true;
        }
        self.max_error = self.max_error.max(err);
    }

    fn fail(&mut self) {
        self.cases += 1;
        self.broken = true;
    }

    fn done(self) -> Check {
        Check {
            name: self.name,
            cases: self.cases,
            max_error: self.max_error,
            tolerance: self.tolerance,
            pass: !self.broken && self.cases > 0 && self.max_error <= self.tolerance,
        }
    }
}

fn renewals() -> Vec<RenewalLaw> {
    [0.5, 1.5].iter().map(|a| RenewalLaw::pure(*a).expect("fixed law")).collect()
}

fn laws() -> Vec<StrandLaw> {
    vec![
        StrandLaw::Gaussian { sigma: 1.0 },
        StrandLaw::Rademacher { x: 1.0 },
        StrandLaw::Discrete {
            values: vec![-1.0, 0.5, 2.0],
            probs: vec![0.4, 0.4, 0.2],
        },
    ]
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn suite() -> Vec<Check> {
    let mut out = Vec::new();

    let mut a = Acc::new("constrained-path-count", 0.0);
    for n1 in 1..=4 {
        for n2 in 1..=4 {
            match enumerate_trajectories(BoxSize { n1, n2 }, Mode::Constrained) {
                Ok(e) => {
                    let by_enum = e.paths.len() as u128;
                    let by_rec = constrained_path_count(n1, n2);
                    let closed = binomial((n1 + n2 - 2) as u128, (n1 - 1) as u128);
                    a.push(if by_enum == by_rec && by_rec == closed { 0.0 } else { 1.0 });
                }
                Err(_) => a.fail(),
            }
        }
    }
    out.push(a.done());

    let mut a = Acc::new("free-path-probabilities-sum-to-one", 1e-12);
    for r in renewals() {
        for bx in [BoxSize::square(3), BoxSize { n1: 2, n2: 4 }] {
            match enumerate_trajectories(bx, Mode::Free) {
                Ok(e) => {
                    let total: f64 = e.paths.iter().map(|p| path_probability(&r, p, bx, Mode::Free)).sum();
                    a.push((total - 1.0).abs());
                }
                Err(_) => a.fail(),
            }
        }
    }
    out.push(a.done());

    let mut a = Acc::new("dp-vs-path-enumeration", 1e-12);
    let mut g = rng::stream(7, 0);
    for r in renewals() {
        for slaw in laws() {
            for n1 in 1..=3 {
                for n2 in 1..=3 {
                    let bx = BoxSize { n1, n2 };
                    let s = sample_strands(&slaw, bx, &mut g);
                    for mode in [Mode::Constrained, Mode::Free] {
                        let dp = quenched_partition(&r, &s, &slaw, 0.4, 0.2, bx, mode);
                        let brute = exact_partition_brute(&r, &s, &slaw, 0.4, 0.2, bx, mode);
                        match (dp, brute) {
                            (Ok(d), Ok(b)) => a.rel(d.log_value.exp(), b),
                            _ => a.fail(),
                        }
                    }
                }
            }
        }
    }
    out.push(a.done());

    let mut a = Acc::new("annealed-equals-homogeneous", 1e-12);
    for r in renewals() {
        for slaw in laws().into_iter().skip(1) {
            for mode in [Mode::Constrained, Mode::Free] {
                let bx = BoxSize::square(3);
                let ann = exact_annealed_brute(&r, &slaw, 0.5, 0.1, bx, mode);
                let hom = homogeneous_partition(&r, 0.1, bx, mode);
                match (ann, hom) {
                    (Ok(x), Ok(z)) => a.rel(x, z.log_value.exp()),
                    _ => a.fail(),
                }
            }
        }
    }
    out.push(a.done());

    let mut a = Acc::new("factorized-second-moment", 1e-10);
    for r in renewals() {
        for (slaw, bx) in [
            (laws()[2].clone(), BoxSize { n1: 2, n2: 3 }),
            (StrandLaw::Rademacher { x: 0.7 }, BoxSize::square(3)),
        ] {
            let brute = exact_second_moment_brute(&r, &slaw, 0.4, bx);
            let fact = factorized_second_moment(&r, &slaw, 0.4, bx);
            match (brute, fact) {
                (Ok(x), Ok(y)) => a.rel(y, x),
                _ => a.fail(),
            }
        }
    }
    out.push(a.done());

    let mut a = Acc::new("rademacher-replica-identity", 1e-10);
    for r in renewals() {
        for beta in [0.3, 0.8] {
            let law = StrandLaw::Rademacher { x: 1.0 };
            let bx = BoxSize::square(3);
            match (exact_second_moment_brute(&r, &law, beta, bx), replica_overlap_moment(&r, &law, beta, bx)) {
                (Ok(x), Ok(y)) => a.rel(y, x),
                _ => a.fail(),
            }
        }
    }
    out.push(a.done());

    let mut a = Acc::new("rademacher-chain-weight-one", 0.0);
    for len in 1..=8 {
        match chain_weight(&StrandLaw::Rademacher { x: 1.0 }, 0.6, len) {
            Ok(w) => a.push((w - 1.0).abs()),
            Err(_) => a.fail(),
        }
    }
    out.push(a.done());

    out
}
