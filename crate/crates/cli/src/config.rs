use gpslab::{BoxSize, RenewalLaw, SlowVary, StrandLaw};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FreeEnergyScan,
    CriticalPoint,
    ExponentFit,
    SecondMomentScan,
    NBeta,
    FractionalMoments,
    CoarseGrain,
    ChainWeights,
    Intersections,
    TiltChecks,
    ZhomCheck,
    SmoothingCurve,
    OracleVerify,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::FreeEnergyScan,
        Experiment::CriticalPoint,
        Experiment::ExponentFit,
        Experiment::SecondMomentScan,
        Experiment::NBeta,
        Experiment::FractionalMoments,
        Experiment::CoarseGrain,
        Experiment::ChainWeights,
        Experiment::Intersections,
        Experiment::TiltChecks,
        Experiment::ZhomCheck,
        Experiment::SmoothingCurve,
        Experiment::OracleVerify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::FreeEnergyScan => "free-energy-scan",
            Experiment::CriticalPoint => "critical-point",
            Experiment::ExponentFit => "exponent-fit",
            Experiment::SecondMomentScan => "second-moment-scan",
            Experiment::NBeta => "n-beta",
            Experiment::FractionalMoments => "fractional-moments",
            Experiment::CoarseGrain => "coarse-grain",
            Experiment::ChainWeights => "chain-weights",
            Experiment::Intersections => "intersections",
            Experiment::TiltChecks => "tilt-checks",
            Experiment::ZhomCheck => "zhom-check",
            Experiment::SmoothingCurve => "smoothing-curve",
            Experiment::OracleVerify => "oracle-verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenewalConfig {
    pub alpha: f64,
    #[serde(default)]
    pub slow_vary: SlowVary,
    /// Explicit truncation horizon; omitted means the library default.
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_tail_tol() -> f64 {
    1e-2
}

impl Default for RenewalConfig {
    fn default() -> Self {
        RenewalConfig {
            alpha: 0.75,
            slow_vary: SlowVary::Constant,
            horizon: None,
            tail_tol: default_tail_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub beta: Vec<f64>,
    pub h: Vec<f64>,
    /// Side lengths of square boxes, increasing.
    pub boxes: Vec<usize>,
    pub samples: usize,
    pub eta: f64,
    /// Threshold constant for `n_β`.
    pub c: f64,
    pub delta: Vec<f64>,
    pub t: Vec<f64>,
    pub threshold: f64,
    pub tol: f64,
    pub u: Vec<f64>,
    pub c2: f64,
    /// Coarse-graining block size.
    pub k: usize,
    pub radius: usize,
    pub max_len: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            beta: vec![0.0],
            h: vec![0.0],
            boxes: vec![64, 128],
            samples: 64,
            eta: 0.9,
            c: 2.0,
            delta: vec![0.01],
            t: vec![0.4, 0.2, 0.1, 0.05],
            threshold: 1e-5,
            tol: 1e-3,
            u: vec![0.1],
            c2: 0.5,
            k: 16,
            radius: 1 << 16,
            max_len: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Tsv => "tsv",
        }
    }

    pub fn delimiter(self) -> u8 {
        match self {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// File stem relative to the output directory; defaults to the
    /// experiment name.
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub renewal: RenewalConfig,
    #[serde(default = "default_disorder")]
    pub disorder: StrandLaw,
    #[serde(default)]
    pub grid: GridConfig,
    pub master_seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_disorder() -> StrandLaw {
    StrandLaw::Gaussian { sigma: 1.0 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

/// Parse JSON text, reporting the path of the offending field on failure.
pub fn parse(text: &str) -> Result<ExperimentConfig, Vec<FieldError>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "<root>".to_string() } else { path };
        vec![FieldError {
            field,
            reason: e.into_inner().to_string(),
        }]
    })
}

/// A config whose every referenced parameter has been checked.
pub struct Validated {
    pub config: ExperimentConfig,
    pub renewal: RenewalLaw,
}

struct Checker {
    errors: Vec<FieldError>,
}

impl Checker {
    fn fail(&mut self, field: impl Into<String>, reason: impl Into<String>) {
        self.errors.push(FieldError {
            field: field.into(),
            reason: reason.into(),
        });
    }

    fn each<F: Fn(f64) -> bool>(&mut self, field: &str, xs: &[f64], ok: F, reason: &str) {
        if xs.is_empty() {
            self.fail(field, "must not be empty");
        }
        for (k, x) in xs.iter().enumerate() {
            if !ok(*x) {
                self.fail(format!("{field}[{k}]"), format!("{reason} (got {x})"));
            }
        }
    }
}

pub fn validate(config: ExperimentConfig) -> Result<Validated, Vec<FieldError>> {
    let mut c = Checker { errors: Vec::new() };
    let g = &config.grid;
    let r = &config.renewal;
    if !(r.alpha.is_finite() && r.alpha > 0.0) {
        c.fail("renewal.alpha", "must be positive and finite");
    }
    if !(r.tail_tol > 0.0 && r.tail_tol < 1.0) {
        c.fail("renewal.tail_tol", "must lie in (0, 1)");
    }
    if let Err(e) = config.disorder.validate() {
        c.fail("disorder", e.to_string());
    }
    let exp = config.experiment;
    if exp == Experiment::OracleVerify {
        return finish(c, config, None);
    }
    if g.samples == 0 {
        c.fail("grid.samples", "must be at least 1");
    }
    let needs_boxes = !matches!(exp, Experiment::ChainWeights | Experiment::CoarseGrain);
    if needs_boxes {
        if g.boxes.is_empty() {
            c.fail("grid.boxes", "must not be empty");
        }
        for (k, n) in g.boxes.iter().enumerate() {
            if *n == 0 {
                c.fail(format!("grid.boxes[{k}]"), "must be at least 1");
            }
        }
        if g.boxes.windows(2).any(|w| w[1] <= w[0]) {
            c.fail("grid.boxes", "must be strictly increasing");
        }
    }
    let uses_beta = !matches!(exp, Experiment::ExponentFit | Experiment::Intersections | Experiment::ZhomCheck);
    if uses_beta {
        c.each("grid.beta", &g.beta, |b| b.is_finite() && b >= 0.0, "must be nonnegative and finite");
    }
    let uses_h = matches!(
        exp,
        Experiment::FreeEnergyScan | Experiment::FractionalMoments | Experiment::CoarseGrain | Experiment::TiltChecks
    );
    if uses_h {
        c.each("grid.h", &g.h, f64::is_finite, "must be finite");
    }
    match exp {
        Experiment::CriticalPoint | Experiment::SmoothingCurve => {
            if g.boxes.len() < 2 {
                c.fail("grid.boxes", "needs at least two boxes");
            }
            if !(g.threshold.is_finite() && g.threshold > 0.0) {
                c.fail("grid.threshold", "must be positive");
            }
            if !(g.tol.is_finite() && g.tol > 0.0) {
                c.fail("grid.tol", "must be positive");
            }
            if exp == Experiment::SmoothingCurve {
                c.each("grid.t", &g.t, |t| t.is_finite() && t > 0.0, "must be positive");
            }
        }
        Experiment::ExponentFit => {
            c.each("grid.h", &g.h, |h| h.is_finite() && h > 0.0, "must be positive");
            if g.h.len() < 3 {
                c.fail("grid.h", "the fit needs at least three values");
            }
            let lo = g.h.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = g.h.iter().cloned().fold(0.0, f64::max);
            if lo > 0.0 && hi / lo < 10.0 {
                c.fail("grid.h", "must span at least one decade");
            }
        }
        Experiment::NBeta => {
            if !(g.c.is_finite() && g.c > 1.0) {
                c.fail("grid.c", "must exceed 1");
            }
        }
        Experiment::FractionalMoments | Experiment::CoarseGrain => {
            if !(g.eta > 0.0 && g.eta < 1.0) {
                c.fail("grid.eta", "must lie in (0, 1)");
            }
            if exp == Experiment::CoarseGrain {
                if g.k < 2 {
                    c.fail("grid.k", "must be at least 2");
                }
                if g.radius < 2 {
                    c.fail("grid.radius", "must be at least 2");
                }
                if r.alpha.is_finite() && (2.0 + r.alpha) * g.eta <= 2.0 {
                    c.fail("grid.eta", format!("(2 + alpha) eta must exceed 2 (got {})", (2.0 + r.alpha) * g.eta));
                }
            }
        }
        Experiment::ChainWeights => {
            if g.max_len == 0 {
                c.fail("grid.max_len", "must be at least 1");
            }
        }
        Experiment::TiltChecks => {
            c.each("grid.delta", &g.delta, f64::is_finite, "must be finite");
        }
        Experiment::ZhomCheck => {
            c.each("grid.u", &g.u, |u| u.is_finite() && u > 0.0, "must be positive");
            if !(g.c2.is_finite() && g.c2 > 0.0) {
                c.fail("grid.c2", "must be positive");
            }
        }
        _ => {}
    }
    if !c.errors.is_empty() {
        return Err(c.errors);
    }
    let law = match r.horizon {
        Some(hz) => RenewalLaw::with_horizon(r.alpha, r.slow_vary.clone(), hz, r.tail_tol),
        None => RenewalLaw::new(r.alpha, r.slow_vary.clone(), r.tail_tol),
    };
    let law = match law {
        Ok(l) => l,
        Err(e) => {
            c.fail("renewal", e.to_string());
            return Err(c.errors);
        }
    };
    if needs_boxes {
        if let Some(&n) = g.boxes.iter().max() {
            // free boxes and pair boxes reach twice the side length
            if let Err(e) = law.check_box(BoxSize::square(2 * n)) {
                c.fail("grid.boxes", e.to_string());
            }
        }
    }
    finish(c, config, Some(law))
}

fn finish(c: Checker, config: ExperimentConfig, law: Option<RenewalLaw>) -> Result<Validated, Vec<FieldError>> {
    if !c.errors.is_empty() {
        return Err(c.errors);
    }
    let renewal = match law {
        Some(l) => l,
        None => RenewalLaw::pure(0.5).expect("fixed law"),
    };
    Ok(Validated { config, renewal })
}

/// Hand-written description of the config format, printed by `gpslab schema`.
pub fn schema() -> serde_json::Value {
    let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
    let d = GridConfig::default();
    serde_json::json!({
        "type": "object",
        "additionalProperties": false,
        "required": ["experiment", "master_seed"],
        "properties": {
            "experiment": {"enum": names},
            "master_seed": {"type": "integer", "minimum": 0, "maximum": u64::MAX},
            "renewal": {
                "type": "object",
                "additionalProperties": false,
                "required": ["alpha"],
                "properties": {
                    "alpha": {"type": "number", "exclusiveMinimum": 0},
                    "slow_vary": {"oneOf": [
                        {"properties": {"kind": {"const": "constant"}}},
                        {"properties": {"kind": {"const": "log_power"}, "kappa": {"type": "number"}}},
                        {"properties": {"kind": {"const": "table"}, "values": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}}}}
                    ], "default": {"kind": "constant"}},
                    "horizon": {"type": ["integer", "null"], "default": null},
                    "tail_tol": {"type": "number", "default": default_tail_tol()}
                }
            },
            "disorder": {"oneOf": [
                {"properties": {"kind": {"const": "gaussian"}, "sigma": {"type": "number", "exclusiveMinimum": 0}}},
                {"properties": {"kind": {"const": "rademacher"}, "x": {"type": "number", "exclusiveMinimum": 0}}},
                {"properties": {"kind": {"const": "discrete"}, "values": {"type": "array", "maxItems": gpslab::disorder::MAX_SUPPORT}, "probs": {"type": "array"}}}
            ], "default": {"kind": "gaussian", "sigma": 1.0}},
            "grid": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "beta": {"type": "array", "items": {"type": "number", "minimum": 0}, "default": d.beta},
                    "h": {"type": "array", "items": {"type": "number"}, "default": d.h},
                    "boxes": {"type": "array", "items": {"type": "integer", "minimum": 1}, "default": d.boxes},
                    "samples": {"type": "integer", "minimum": 1, "default": d.samples},
                    "eta": {"type": "number", "default": d.eta},
                    "c": {"type": "number", "default": d.c},
                    "delta": {"type": "array", "items": {"type": "number"}, "default": d.delta},
                    "t": {"type": "array", "items": {"type": "number"}, "default": d.t},
                    "threshold": {"type": "number", "default": d.threshold},
                    "tol": {"type": "number", "default": d.tol},
                    "u": {"type": "array", "items": {"type": "number"}, "default": d.u},
                    "c2": {"type": "number", "default": d.c2},
                    "k": {"type": "integer", "default": d.k},
                    "radius": {"type": "integer", "default": d.radius},
                    "max_len": {"type": "integer", "default": d.max_len}
                }
            },
            "output": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "path": {"type": ["string", "null"], "default": null},
                    "format": {"enum": ["csv", "tsv"], "default": "csv"}
                }
            }
        }
    })
}
