//! Fitted surrogate models recommending α and β from roadmap features.
//!
//! Both models are order-6 bivariate series with 28 terms. Term `k` of
//! total degree `d` pairs basis index `d − j` on x' with index `j` on y',
//! `j = 0..=d`, in the order the coefficients are named
//! (`a`; `b c`; `d e f`; `g h i j`; … `v aa ab ac ad ae af`).
//!
//! The α model uses Chebyshev polynomials with y' taken from `ln(y)`; the
//! β model uses a sigmoid series with y' taken from raw `y`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::roadmap::RoadmapFeatures;
use crate::{Error, Result};

pub const ORDER: usize = 6;
pub const NUM_TERMS: usize = 28;

/// Coefficient names in term order.
pub const COEFFICIENT_NAMES: [&str; NUM_TERMS] = [
    "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o", "p", "q", "r", "s",
    "t", "u", "v", "aa", "ab", "ac", "ad", "ae", "af",
];

/// Built-in α coefficients (Chebyshev series in x, ln y).
pub const ALPHA_COEFFICIENTS: [f64; NUM_TERMS] = [
    2.094, -5.892, -3.756, 1.813, -8.864, 1.257, 0.697, 2.269, 2.720, 0.1556, 0.9132, 1.722,
    -1.423, 0.232, 0.743, 1.270, 1.345, 0.412, 0.738, 1.575, 0.774, 0.604, 1.323, -0.932, -0.975,
    -0.827, -0.115, 0.124,
];

/// Built-in β coefficients (sigmoid series in x, y).
pub const BETA_COEFFICIENTS: [f64; NUM_TERMS] = [
    1.396, -0.106, 1.427, 1.203, -1.107, 1.115, -0.214, 1.415, -0.413, 0.753, 0.116, -0.360, 1.666,
    -0.867, 0.293, -0.066, 0.274, -0.229, 0.572, -0.191, 0.081, -0.047, -0.158, 0.152, -0.140,
    0.502, -0.272, -0.036,
];

/// Default x domain: the city counts of the fitting corpus.
pub const DEFAULT_X_RANGE: (f64, f64) = (250.0, 350.0);
/// Default y domain, measured over the default feature corpus
/// (see `harness::CorpusSpec::default`).
pub const DEFAULT_Y_RANGE: (f64, f64) = (0.18, 0.28);

/// Logistic slope of the sigmoid basis.
const SIGMOID_SLOPE: f64 = 0.12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Chebyshev,
    Sigmoid,
}

/// `T_n(x') = cos(n · arccos x')`.
pub fn chebyshev_basis(n: usize, xp: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&xp) {
        return Err(Error::Domain(format!(
            "Chebyshev argument {xp} outside [-1, 1]"
        )));
    }
    if n > ORDER {
        return Err(Error::invalid(format!(
            "Chebyshev degree {n} exceeds {ORDER}"
        )));
    }
    Ok((n as f64 * xp.acos()).cos())
}

/// `S_1(x') = x'`; for `i ≥ 2`,
/// `S_i(x') = −1 + 2 / (1 + exp(−(x' + 1 − (i−1)·(2/n)) / 0.12))`.
pub fn sigmoid_basis(i: usize, n: usize, xp: f64) -> Result<f64> {
    if i == 0 || i > n {
        return Err(Error::invalid(format!("sigmoid index {i} outside 1..={n}")));
    }
    if i == 1 {
        return Ok(xp);
    }
    let shift = xp + 1.0 - (i as f64 - 1.0) * (2.0 / n as f64);
    Ok(-1.0 + 2.0 / (1.0 + (-shift / SIGMOID_SLOPE).exp()))
}

/// Linear map from `[lo, hi]` onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub lo: f64,
    pub hi: f64,
}

impl Scaling {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::invalid(format!(
                "degenerate scaling interval [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Scaled value clamped to `[-1, 1]`, and whether clamping happened.
    pub fn apply(&self, v: f64) -> (f64, bool) {
        let s = 2.0 * (v - self.lo) / (self.hi - self.lo) - 1.0;
        if s < -1.0 {
            (-1.0, true)
        } else if s > 1.0 {
            (1.0, true)
        } else {
            (s, false)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitModel {
    pub basis: Basis,
    pub coefficients: [f64; NUM_TERMS],
    /// Domain of raw x.
    pub x_scaling: Scaling,
    /// Domain of raw y; Chebyshev models scale `ln y` over `[ln lo, ln hi]`.
    pub y_scaling: Scaling,
}

/// Result of one model evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitEvaluation {
    pub value: f64,
    pub x_scaled: f64,
    pub y_scaled: f64,
    pub x_out_of_domain: bool,
    pub y_out_of_domain: bool,
}

impl FitEvaluation {
    pub fn out_of_domain(&self) -> bool {
        self.x_out_of_domain || self.y_out_of_domain
    }
}

impl FitModel {
    pub fn new(
        basis: Basis,
        coefficients: [f64; NUM_TERMS],
        x_scaling: Scaling,
        y_scaling: Scaling,
    ) -> Result<Self> {
        if basis == Basis::Chebyshev && y_scaling.lo <= 0.0 {
            return Err(Error::invalid(
                "Chebyshev model needs a positive y domain (ln y)",
            ));
        }
        Ok(Self {
            basis,
            coefficients,
            x_scaling,
            y_scaling,
        })
    }

    /// The built-in α model over the default domains.
    pub fn alpha() -> Self {
        Self {
            basis: Basis::Chebyshev,
            coefficients: ALPHA_COEFFICIENTS,
            x_scaling: Scaling {
                lo: DEFAULT_X_RANGE.0,
                hi: DEFAULT_X_RANGE.1,
            },
            y_scaling: Scaling {
                lo: DEFAULT_Y_RANGE.0,
                hi: DEFAULT_Y_RANGE.1,
            },
        }
    }

    /// The built-in β model over the default domains.
    pub fn beta() -> Self {
        Self {
            basis: Basis::Sigmoid,
            coefficients: BETA_COEFFICIENTS,
            ..Self::alpha()
        }
    }

    pub fn with_domains(self, x: Scaling, y: Scaling) -> Result<Self> {
        Self::new(self.basis, self.coefficients, x, y)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        COEFFICIENT_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.coefficients[i])
    }

    fn basis_value(&self, index: usize, v: f64) -> f64 {
        match self.basis {
            Basis::Chebyshev if index == 0 => 1.0,
            Basis::Chebyshev => (index as f64 * v.acos()).cos(),
            Basis::Sigmoid if index == 0 => 1.0,
            Basis::Sigmoid => sigmoid_basis(index, ORDER, v).expect("index within 1..=ORDER"),
        }
    }

    /// Evaluates the series at already-scaled coordinates in `[-1, 1]`.
    pub fn evaluate_scaled(&self, xp: f64, yp: f64) -> Result<f64> {
        for v in [xp, yp] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("scaled input {v} outside [-1, 1]")));
            }
        }
        let bx: Vec<f64> = (0..=ORDER).map(|k| self.basis_value(k, xp)).collect();
        let by: Vec<f64> = (0..=ORDER).map(|k| self.basis_value(k, yp)).collect();
        let mut sum = 0.0;
        let mut term = 0;
        for degree in 0..=ORDER {
            for j in 0..=degree {
                sum += self.coefficients[term] * bx[degree - j] * by[j];
                term += 1;
            }
        }
        Ok(sum)
    }

    /// Scales raw `(x, y)` into the model domain (clamping and flagging
    /// values outside it) and evaluates the series.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<FitEvaluation> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("non-finite input ({x}, {y})")));
        }
        let (x_scaled, x_out) = self.x_scaling.apply(x);
        let (y_scaled, y_out) = match self.basis {
            Basis::Chebyshev => {
                if y <= 0.0 {
                    return Err(Error::Domain(format!("ln(y) undefined for y = {y}")));
                }
                let log_domain = Scaling {
                    lo: self.y_scaling.lo.ln(),
                    hi: self.y_scaling.hi.ln(),
                };
                log_domain.apply(y.ln())
            }
            Basis::Sigmoid => self.y_scaling.apply(y),
        };
        Ok(FitEvaluation {
            value: self.evaluate_scaled(x_scaled, y_scaled)?,
            x_scaled,
            y_scaled,
            x_out_of_domain: x_out,
            y_out_of_domain: y_out,
        })
    }

    /// Parses `name=value` lines. Coefficient names are required; `basis`,
    /// `x_lo`, `x_hi`, `y_lo`, `y_hi` optionally override `template`.
    pub fn parse(text: &str, template: &FitModel) -> Result<Self> {
        let mut coefficients = [f64::NAN; NUM_TERMS];
        let mut basis = template.basis;
        let (mut x, mut y) = (template.x_scaling, template.y_scaling);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected `name=value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "basis" {
                basis = match v {
                    "chebyshev" => Basis::Chebyshev,
                    "sigmoid" => Basis::Sigmoid,
                    _ => return Err(Error::parse(i + 1, format!("unknown basis `{v}`"))),
                };
                continue;
            }
            let value: f64 = v
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("invalid number `{v}`")))?;
            match k {
                "x_lo" => x.lo = value,
                "x_hi" => x.hi = value,
                "y_lo" => y.lo = value,
                "y_hi" => y.hi = value,
                _ => {
                    let idx = COEFFICIENT_NAMES
                        .iter()
                        .position(|n| *n == k)
                        .ok_or_else(|| Error::parse(i + 1, format!("unknown name `{k}`")))?;
                    if !coefficients[idx].is_nan() {
                        return Err(Error::parse(i + 1, format!("coefficient `{k}` repeated")));
                    }
                    coefficients[idx] = value;
                }
            }
        }
        if let Some(missing) = coefficients.iter().position(|c| c.is_nan()) {
            return Err(Error::invalid(format!(
                "coefficient `{}` missing",
                COEFFICIENT_NAMES[missing]
            )));
        }
        Self::new(
            basis,
            coefficients,
            Scaling::new(x.lo, x.hi)?,
            Scaling::new(y.lo, y.hi)?,
        )
    }

    pub fn load(path: impl AsRef<Path>, template: &FitModel) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, template)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let basis = match self.basis {
            Basis::Chebyshev => "chebyshev",
            Basis::Sigmoid => "sigmoid",
        };
        let _ = writeln!(out, "basis={basis}");
        let _ = writeln!(out, "x_lo={}", self.x_scaling.lo);
        let _ = writeln!(out, "x_hi={}", self.x_scaling.hi);
        let _ = writeln!(out, "y_lo={}", self.y_scaling.lo);
        let _ = writeln!(out, "y_hi={}", self.y_scaling.hi);
        for (name, c) in COEFFICIENT_NAMES.iter().zip(self.coefficients) {
            let _ = writeln!(out, "{name}={c}");
        }
        out
    }
}

/// Where the predictor's x input comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XSource {
    /// `x = node_density` (cities per 200 square units). Equals the city
    /// count for roadmaps spanning 200 square units.
    NodeDensity,
    /// `x = node_density · area / 200`, the raw city count of a roadmap
    /// with the given area.
    CityCount { area: f64 },
}

impl XSource {
    pub fn x_from(&self, features: &RoadmapFeatures) -> f64 {
        match *self {
            XSource::NodeDensity => features.node_density,
            XSource::CityCount { area } => {
                features.node_density * area / crate::roadmap::DENSITY_AREA
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictor {
    pub alpha_model: FitModel,
    pub beta_model: FitModel,
    pub x_source: XSource,
}

impl Default for Predictor {
    fn default() -> Self {
        Self {
            alpha_model: FitModel::alpha(),
            beta_model: FitModel::beta(),
            x_source: XSource::NodeDensity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
    pub y: f64,
    pub alpha_fit: FitEvaluation,
    pub beta_fit: FitEvaluation,
}

impl Recommendation {
    pub fn out_of_domain(&self) -> bool {
        self.alpha_fit.out_of_domain() || self.beta_fit.out_of_domain()
    }
}

impl Predictor {
    pub fn recommend_xy(&self, x: f64, y: f64) -> Result<Recommendation> {
        let alpha_fit = self.alpha_model.evaluate(x, y)?;
        let beta_fit = self.beta_model.evaluate(x, y)?;
        Ok(Recommendation {
            alpha: alpha_fit.value,
            beta: beta_fit.value,
            x,
            y,
            alpha_fit,
            beta_fit,
        })
    }
}

/// Recommends (α, β) for a roadmap with the given features.
pub fn recommend_parameters(
    predictor: &Predictor,
    features: &RoadmapFeatures,
) -> Result<Recommendation> {
    predictor.recommend_xy(predictor.x_source.x_from(features), features.min_arc_stddev)
}
