use crate::config::{Experiment, Validated};
use crate::verify;
use gpslab::analysis::{
    coarse_grain_constant, coarse_grain_rho, critical_point_bisect, fractional_moment, free_energy_profile,
    homogeneous_exponent_fit, n_beta_estimate, smoothing_curve, tilted_annealed, zhom_negative_check, FracMomentTable,
    RhoOptions,
};
use gpslab::disorder::{log_frac, taylor_residual, TiltKind};
use gpslab::renewal::intersection_stats;
use gpslab::replica::{log_chain_weight, second_moment_schedule};
use gpslab::{rng, BoxSize, Error, Estimate};
use serde_json::json;

/// A numeric failure tagged with the grid point that produced it.
#[derive(Debug, thiserror::Error)]
#[error("{source} (at {context})")]
pub struct RunError {
    pub context: String,
    pub source: Error,
}

trait Context<T> {
    fn at(self, context: impl FnOnce() -> String) -> Result<T, RunError>;
}

impl<T> Context<T> for gpslab::Result<T> {
    fn at(self, context: impl FnOnce() -> String) -> Result<T, RunError> {
        self.map_err(|source| RunError {
            context: context(),
            source,
        })
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: serde_json::Value,
}

/// CSV columns with their meaning, per experiment.
pub fn columns(exp: Experiment) -> &'static [(&'static str, &'static str)] {
    match exp {
        Experiment::FreeEnergyScan => &[
            ("beta", "inverse temperature"),
            ("h", "pinning parameter"),
            ("n", "side of the square box"),
            ("f_hat", "(1/n) E log Z constrained, Monte Carlo mean"),
            ("std_err", "standard error of f_hat"),
            ("samples", "disorder samples"),
            ("lower_bound", "max of f_hat over the box schedule"),
        ],
        Experiment::CriticalPoint => &[
            ("beta", "inverse temperature"),
            ("h_c", "midpoint of the final bisection bracket"),
            ("bracket_lo", "largest h judged delocalized"),
            ("bracket_hi", "smallest h judged localized"),
            ("evaluations", "free-energy evaluations used"),
            ("samples", "disorder samples per evaluation"),
            ("threshold", "absolute localization threshold"),
        ],
        Experiment::ExponentFit => &[
            ("alpha", "renewal exponent"),
            ("h", "pinning parameter"),
            ("f_hat", "homogeneous free energy estimate F(0,h)"),
            ("exponent", "fitted slope of log F against log h"),
            ("r_squared", "coefficient of determination of the fit"),
            ("box_cap", "largest box side used"),
        ],
        Experiment::SecondMomentScan => &[
            ("beta", "inverse temperature"),
            ("n", "side of the square box"),
            ("second_moment", "E[(Z free at h=0)^2]"),
            ("std_err", "standard error of second_moment"),
            ("cs_bound", "two-projection Cauchy-Schwarz bound"),
            ("cs_std_err", "standard error of cs_bound"),
            ("proj_bound", "single-projection bound"),
            ("proj_std_err", "standard error of proj_bound"),
            ("dominated_fraction", "fraction of pairs with exact weight below the cs weight"),
            ("samples", "trajectory pairs"),
        ],
        Experiment::NBeta => &[
            ("beta", "inverse temperature"),
            ("c", "threshold constant"),
            ("n", "side of the square box"),
            ("second_moment", "E[(Z free at h=0)^2]"),
            ("std_err", "standard error of second_moment"),
            ("samples", "trajectory pairs"),
            ("n_hat", "first box exceeding c, empty if none"),
        ],
        Experiment::FractionalMoments => &[
            ("beta", "inverse temperature"),
            ("h", "pinning parameter"),
            ("eta", "fractional exponent"),
            ("n", "side of the square box"),
            ("value", "E[Z^eta] constrained"),
            ("std_err", "standard error of value"),
            ("samples", "disorder samples"),
            ("jensen_bound", "(E Z)^eta"),
        ],
        Experiment::CoarseGrain => &[
            ("beta", "inverse temperature"),
            ("h", "pinning parameter"),
            ("eta", "fractional exponent"),
            ("k", "block size"),
            ("c", "coarse-graining constant"),
            ("rho1", "sum over blocks exiting both sides"),
            ("rho2", "sum over blocks exiting the second side only"),
            ("rho3", "sum over blocks exiting the first side only"),
            ("sum", "rho1 + rho2 + rho3"),
            ("triggers", "sum below 1"),
            ("jensen_violations", "table entries above the Jensen bound by more than 4 se"),
            ("max_std_err", "largest standard error in the table"),
            ("samples", "disorder samples per table entry"),
        ],
        Experiment::ChainWeights => &[
            ("beta", "inverse temperature"),
            ("len", "chain length"),
            ("weight", "expected weight of a chain"),
            ("log_weight", "log of weight"),
        ],
        Experiment::Intersections => &[
            ("n", "side of the square box"),
            ("bivariate_mean", "mean size of the common contact set"),
            ("bivariate_std_err", "standard error of bivariate_mean"),
            ("proj1_mean", "mean first-projection intersection"),
            ("proj1_std_err", "standard error of proj1_mean"),
            ("proj2_mean", "mean second-projection intersection"),
            ("proj2_std_err", "standard error of proj2_mean"),
            ("geometric_p", "geometric parameter matched to bivariate_mean"),
            ("bound_holds", "bivariate count below both projections on every pair"),
            ("samples", "trajectory pairs"),
        ],
        Experiment::TiltChecks => &[
            ("kind", "linear or quadratic tilt"),
            ("beta", "inverse temperature"),
            ("delta", "tilt strength"),
            ("log_frac", "log of the tilt ratio"),
            ("leading_term", "first-order term of the ratio minus one"),
            ("residual", "ratio minus one minus leading_term"),
            ("h", "pinning parameter"),
            ("n", "side of the square box"),
            ("log_tilted_annealed", "log of the tilted annealed partition function"),
        ],
        Experiment::ZhomCheck => &[
            ("alpha", "renewal exponent"),
            ("u", "negative pinning magnitude"),
            ("n", "side of the square box"),
            ("lhs", "Z at h = -u"),
            ("rhs", "fitted bound"),
            ("c1", "fitted constant on the full box"),
            ("c1_half", "fitted constant on the half box"),
            ("c2", "decay constant"),
            ("gamma", "decay exponent"),
            ("holds", "lhs <= rhs"),
        ],
        Experiment::SmoothingCurve => &[
            ("beta", "inverse temperature"),
            ("h_c", "estimated critical point"),
            ("t", "distance above h_c"),
            ("f_hat", "(1/n) E log Z free at h_c + t"),
            ("std_err", "standard error of f_hat"),
            ("samples", "disorder samples"),
            ("local_exponent", "slope of log f_hat against log t"),
            ("exploratory", "always true"),
        ],
        Experiment::OracleVerify => &[
            ("check", "name of the oracle comparison"),
            ("cases", "instances compared"),
            ("max_error", "largest relative or absolute discrepancy"),
            ("tolerance", "allowed discrepancy"),
            ("pass", "max_error within tolerance"),
        ],
    }
}

/// `(x, y, error, series)` column names for the plot data file.
pub fn plot_columns(exp: Experiment) -> (&'static str, &'static str, Option<&'static str>, Option<&'static str>) {
    match exp {
        Experiment::FreeEnergyScan => ("h", "f_hat", Some("std_err"), Some("beta")),
        Experiment::CriticalPoint => ("beta", "h_c", None, None),
        Experiment::ExponentFit => ("h", "f_hat", None, None),
        Experiment::SecondMomentScan => ("n", "second_moment", Some("std_err"), Some("beta")),
        Experiment::NBeta => ("n", "second_moment", Some("std_err"), Some("beta")),
        Experiment::FractionalMoments => ("n", "value", Some("std_err"), Some("beta")),
        Experiment::CoarseGrain => ("h", "sum", None, Some("beta")),
        Experiment::ChainWeights => ("len", "weight", None, Some("beta")),
        Experiment::Intersections => ("n", "bivariate_mean", Some("bivariate_std_err"), None),
        Experiment::TiltChecks => ("delta", "log_frac", None, Some("kind")),
        Experiment::ZhomCheck => ("n", "c1", None, Some("u")),
        Experiment::SmoothingCurve => ("t", "f_hat", Some("std_err"), Some("beta")),
        Experiment::OracleVerify => ("cases", "max_error", None, None),
    }
}

pub fn fmt(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn est(e: &Estimate) -> [String; 3] {
    [fmt(e.value), fmt(e.std_err), e.samples.to_string()]
}

pub fn run(v: &Validated) -> Result<Table, RunError> {
    let cfg = &v.config;
    let g = &cfg.grid;
    let r = &v.renewal;
    let s = &cfg.disorder;
    let exp = cfg.experiment;
    let seed = |tag: usize| rng::derive(cfg.master_seed, tag as u64);
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut summary = json!({});
    match exp {
        Experiment::FreeEnergyScan => {
            let mut tag = 0;
            for &beta in &g.beta {
                for &h in &g.h {
                    let p = free_energy_profile(r, s, beta, h, &g.boxes, g.samples, seed(tag))
                        .at(|| format!("beta = {beta}, h = {h}"))?;
                    tag += 1;
                    for (n, e) in p.boxes.iter().zip(&p.per_box) {
                        let [a, b, c] = est(e);
                        rows.push(vec![fmt(beta), fmt(h), n.to_string(), a, b, c, fmt(p.lower_bound)]);
                    }
                }
            }
        }
        Experiment::CriticalPoint => {
            for (k, &beta) in g.beta.iter().enumerate() {
                let samples = if beta == 0.0 { 1 } else { g.samples };
                let cp = critical_point_bisect(r, s, beta, &g.boxes, g.threshold, samples, seed(k), g.tol)
                    .at(|| format!("beta = {beta}"))?;
                rows.push(vec![
                    fmt(beta),
                    fmt(cp.h_c),
                    fmt(cp.bracket.0),
                    fmt(cp.bracket.1),
                    cp.evaluations.to_string(),
                    samples.to_string(),
                    fmt(g.threshold),
                ]);
            }
        }
        Experiment::ExponentFit => {
            let cap = *g.boxes.iter().max().unwrap();
            let fit = homogeneous_exponent_fit(r, &g.h, cap).at(|| format!("alpha = {}, box_cap = {cap}", r.alpha))?;
            for (h, f) in fit.h.iter().zip(&fit.f_hat) {
                rows.push(vec![
                    fmt(r.alpha),
                    fmt(*h),
                    fmt(*f),
                    fmt(fit.exponent),
                    fmt(fit.r_squared),
                    cap.to_string(),
                ]);
            }
            summary = json!({"exponent": fit.exponent, "r_squared": fit.r_squared});
        }
        Experiment::SecondMomentScan => {
            let boxes: Vec<BoxSize> = g.boxes.iter().map(|&n| BoxSize::square(n)).collect();
            for (k, &beta) in g.beta.iter().enumerate() {
                let m = second_moment_schedule(r, s, beta, &boxes, g.samples, seed(k)).at(|| format!("beta = {beta}"))?;
                for (n, p) in g.boxes.iter().zip(&m) {
                    rows.push(vec![
                        fmt(beta),
                        n.to_string(),
                        fmt(p.exact.value),
                        fmt(p.exact.std_err),
                        fmt(p.cs_bound.value),
                        fmt(p.cs_bound.std_err),
                        fmt(p.proj_bound.value),
                        fmt(p.proj_bound.std_err),
                        fmt(p.dominated_fraction),
                        p.exact.samples.to_string(),
                    ]);
                }
            }
        }
        Experiment::NBeta => {
            for (k, &beta) in g.beta.iter().enumerate() {
                let nb = n_beta_estimate(r, s, beta, g.c, &g.boxes, g.samples, seed(k)).at(|| format!("beta = {beta}"))?;
                let n_hat = nb.n_hat.map(|n| n.to_string()).unwrap_or_default();
                for (n, e) in &nb.estimates {
                    let [a, b, c] = est(e);
                    rows.push(vec![fmt(beta), fmt(g.c), n.to_string(), a, b, c, n_hat.clone()]);
                }
            }
        }
        Experiment::FractionalMoments => {
            let mut tag = 0;
            for &beta in &g.beta {
                for &h in &g.h {
                    for &n in &g.boxes {
                        let bx = BoxSize::square(n);
                        let e = fractional_moment(r, s, beta, h, g.eta, bx, g.samples, seed(tag))
                            .at(|| format!("beta = {beta}, h = {h}, n = {n}"))?;
                        tag += 1;
                        let z = gpslab::partition::homogeneous_partition(r, h, bx, gpslab::Mode::Constrained)
                            .at(|| format!("h = {h}, n = {n}"))?;
                        let [a, b, c] = est(&e);
                        rows.push(vec![fmt(beta), fmt(h), fmt(g.eta), n.to_string(), a, b, c, fmt((g.eta * z.log_value).exp())]);
                    }
                }
            }
        }
        Experiment::CoarseGrain => {
            let mut tag = 0;
            for &beta in &g.beta {
                for &h in &g.h {
                    let here = || format!("beta = {beta}, h = {h}");
                    let table = FracMomentTable::monte_carlo(r, s, beta, h, g.eta, g.k, g.samples, seed(tag)).at(here)?;
                    tag += 1;
                    let c = coarse_grain_constant(s, beta, h, g.eta).at(here)?;
                    let opts = RhoOptions {
                        radius: g.radius,
                        ..RhoOptions::default()
                    };
                    let rho = coarse_grain_rho(r, g.k, g.eta, &table, c, opts).at(here)?;
                    let max_se = table.std_err.as_slice().iter().cloned().fold(0.0, f64::max);
                    rows.push(vec![
                        fmt(beta),
                        fmt(h),
                        fmt(g.eta),
                        g.k.to_string(),
                        fmt(c),
                        fmt(rho.rho[0]),
                        fmt(rho.rho[1]),
                        fmt(rho.rho[2]),
                        fmt(rho.sum),
                        rho.triggers.to_string(),
                        table.jensen_violations().to_string(),
                        fmt(max_se),
                        g.samples.to_string(),
                    ]);
                }
            }
        }
        Experiment::ChainWeights => {
            for &beta in &g.beta {
                for len in 1..=g.max_len {
                    let lw = log_chain_weight(s, beta, len).at(|| format!("beta = {beta}, len = {len}"))?;
                    rows.push(vec![fmt(beta), len.to_string(), fmt(lw.exp()), fmt(lw)]);
                }
            }
        }
        Experiment::Intersections => {
            for (k, &n) in g.boxes.iter().enumerate() {
                let st = intersection_stats(r, BoxSize::square(n), g.samples, seed(k)).at(|| format!("n = {n}"))?;
                rows.push(vec![
                    n.to_string(),
                    fmt(st.bivariate.mean),
                    fmt(st.bivariate.std_err),
                    fmt(st.proj1.mean),
                    fmt(st.proj1.std_err),
                    fmt(st.proj2.mean),
                    fmt(st.proj2.std_err),
                    fmt(st.geometric_p),
                    st.bound_holds.to_string(),
                    st.samples.to_string(),
                ]);
            }
        }
        Experiment::TiltChecks => {
            let n = *g.boxes.iter().max().unwrap();
            for (kind, name) in [(TiltKind::QFrac, "linear"), (TiltKind::RFrac, "quadratic")] {
                for &beta in &g.beta {
                    for &delta in &g.delta {
                        let here = || format!("{name} tilt, beta = {beta}, delta = {delta}");
                        let lf = log_frac(kind, s, delta, beta).at(here)?;
                        let t = taylor_residual(kind, s, delta, beta).at(here)?;
                        for &h in &g.h {
                            let z = tilted_annealed(r, s, delta, beta, h, BoxSize::square(n), kind).at(here)?;
                            rows.push(vec![
                                name.to_string(),
                                fmt(beta),
                                fmt(delta),
                                fmt(lf),
                                fmt(t.leading_term),
                                fmt(t.residual),
                                fmt(h),
                                n.to_string(),
                                fmt(z),
                            ]);
                        }
                    }
                }
            }
        }
        Experiment::ZhomCheck => {
            for &u in &g.u {
                for &n in &g.boxes {
                    let z = zhom_negative_check(r, u, BoxSize::square(n), g.c2).at(|| format!("u = {u}, n = {n}"))?;
                    rows.push(vec![
                        fmt(r.alpha),
                        fmt(u),
                        n.to_string(),
                        fmt(z.lhs),
                        fmt(z.rhs),
                        fmt(z.c1),
                        fmt(z.c1_half),
                        fmt(z.c2),
                        fmt(z.gamma),
                        z.holds.to_string(),
                    ]);
                }
            }
        }
        Experiment::SmoothingCurve => {
            for (k, &beta) in g.beta.iter().enumerate() {
                let sc = smoothing_curve(r, s, beta, &g.t, &g.boxes, g.threshold, g.samples, seed(k))
                    .at(|| format!("beta = {beta}"))?;
                for (t, e) in &sc.rows {
                    let [a, b, c] = est(e);
                    rows.push(vec![
                        fmt(beta),
                        fmt(sc.h_c),
                        fmt(*t),
                        a,
                        b,
                        c,
                        fmt(sc.local_exponent),
                        sc.exploratory.to_string(),
                    ]);
                }
            }
        }
        Experiment::OracleVerify => {
            let checks = verify::suite();
            let failed = checks.iter().filter(|c| !c.pass).count();
            for c in &checks {
                rows.push(vec![
                    c.name.to_string(),
                    c.cases.to_string(),
                    fmt(c.max_error),
                    fmt(c.tolerance),
                    c.pass.to_string(),
                ]);
            }
            summary = json!({"checks": checks.len(), "failed": failed});
        }
    }
    Ok(Table {
        columns: columns(exp).iter().map(|c| c.0).collect(),
        rows,
        summary,
    })
}
