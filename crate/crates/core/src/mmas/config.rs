use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which time index feeds the exponential deposition rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeIndex {
    /// Position of the arc along the depositing tour, first arc = 1.
    Hop,
    /// Global iteration count, first iteration = 1.
    Iteration,
}

/// Pheromone deposition rule for the depositing ant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Deposition {
    /// `1 / C` on every arc.
    Constant,
    /// `(1 / C) · (1 − e^{−t/T})`.
    Exponential {
        time_constant: f64,
        index: TimeIndex,
    },
}

impl Deposition {
    pub fn exponential(time_constant: f64) -> Self {
        Deposition::Exponential {
            time_constant,
            index: TimeIndex::Hop,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Deposition::Constant => "constant",
            Deposition::Exponential { .. } => "exponential",
        }
    }
}

/// Trail limits: derived from the best-so-far tour, or fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrailLimits {
    /// `τ_max = 1/(ρ·C_bs)` whenever the best-so-far improves and
    /// `τ_min = τ_max / (2n)` with `n` the number of cities.
    Auto,
    Explicit {
        min: f64,
        max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmasConfig {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub q0: f64,
    pub num_ants: usize,
    pub deposition: Deposition,
    pub limits: TrailLimits,
    /// Every this-many iterations the best-so-far ant deposits instead of
    /// the iteration-best one. Zero disables.
    pub use_best_so_far_every: usize,
    /// Iterations without best-so-far improvement before trails reset.
    /// Zero disables.
    pub stagnation_window: usize,
    pub max_iterations: usize,
}

impl Default for MmasConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 2.5,
            rho: 0.1,
            q0: 1.0,
            num_ants: 25,
            deposition: Deposition::exponential(15.0),
            limits: TrailLimits::Auto,
            use_best_so_far_every: 25,
            stagnation_window: 50,
            max_iterations: 200,
        }
    }
}

impl MmasConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::invalid(format!(
                "rho must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!(
                "beta must be >= 0, got {}",
                self.beta
            )));
        }
        if !(0.0..=1.0).contains(&self.q0) {
            return Err(Error::invalid(format!(
                "q0 must lie in [0, 1], got {}",
                self.q0
            )));
        }
        if self.num_ants == 0 {
            return Err(Error::invalid("num_ants must be at least 1"));
        }
        if let Deposition::Exponential { time_constant, .. } = self.deposition {
            if !(time_constant > 0.0 && time_constant.is_finite()) {
                return Err(Error::invalid(format!(
                    "T must be > 0, got {time_constant}"
                )));
            }
        }
        if let TrailLimits::Explicit { min, max } = self.limits {
            if !(min > 0.0 && min < max && max.is_finite()) {
                return Err(Error::invalid(format!(
                    "explicit limits need 0 < tau_min < tau_max, got [{min}, {max}]"
                )));
            }
        }
        Ok(())
    }

    /// Sets one field from its `key=value` spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::invalid(format!("invalid value `{v}` for `{key}`")))
        }
        match key {
            "alpha" => self.alpha = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "rho" => self.rho = num(key, value)?,
            "q0" => self.q0 = num(key, value)?,
            "num_ants" => self.num_ants = num(key, value)?,
            "use_best_so_far_every" => self.use_best_so_far_every = num(key, value)?,
            "stagnation_window" => self.stagnation_window = num(key, value)?,
            "max_iterations" => self.max_iterations = num(key, value)?,
            "deposition" => {
                self.deposition = match value {
                    "constant" => Deposition::Constant,
                    "exponential" => match self.deposition {
                        d @ Deposition::Exponential { .. } => d,
                        Deposition::Constant => Deposition::exponential(15.0),
                    },
                    _ => return Err(Error::invalid(format!("unknown deposition `{value}`"))),
                }
            }
            "T" | "time_constant" => {
                let t = num(key, value)?;
                self.deposition = match self.deposition {
                    Deposition::Exponential { index, .. } => Deposition::Exponential {
                        time_constant: t,
                        index,
                    },
                    Deposition::Constant => Deposition::Constant,
                };
            }
            "time_index" => {
                let idx = match value {
                    "hop" => TimeIndex::Hop,
                    "iteration" => TimeIndex::Iteration,
                    _ => return Err(Error::invalid(format!("unknown time_index `{value}`"))),
                };
                if let Deposition::Exponential { index, .. } = &mut self.deposition {
                    *index = idx;
                }
            }
            "tau_min" | "tau_max" => {
                let bound = if value == "auto" {
                    None
                } else {
                    Some(num::<f64>(key, value)?)
                };
                self.limits = match (bound, self.limits) {
                    (None, _) => TrailLimits::Auto,
                    (Some(v), TrailLimits::Explicit { min, max }) => {
                        if key == "tau_min" {
                            TrailLimits::Explicit { min: v, max }
                        } else {
                            TrailLimits::Explicit { min, max: v }
                        }
                    }
                    // The partner bound is filled in by the caller; use NaN
                    // so validation fails if it never is.
                    (Some(v), TrailLimits::Auto) => {
                        if key == "tau_min" {
                            TrailLimits::Explicit {
                                min: v,
                                max: f64::NAN,
                            }
                        } else {
                            TrailLimits::Explicit {
                                min: f64::NAN,
                                max: v,
                            }
                        }
                    }
                };
            }
            _ => return Err(Error::invalid(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` pairs on top of `self`. Keys are applied in an
    /// order that makes the result independent of input order.
    pub fn apply_pairs<'a>(
        &mut self,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<()> {
        const ORDER: [&str; 14] = [
            "alpha",
            "beta",
            "rho",
            "q0",
            "num_ants",
            "use_best_so_far_every",
            "stagnation_window",
            "max_iterations",
            "deposition",
            "T",
            "time_constant",
            "time_index",
            "tau_min",
            "tau_max",
        ];
        let map: BTreeMap<&str, &str> = pairs.into_iter().collect();
        for key in map.keys() {
            if !ORDER.contains(key) {
                return Err(Error::invalid(format!("unknown config key `{key}`")));
            }
        }
        for key in ORDER {
            if let Some(v) = map.get(key) {
                self.set(key, v)?;
            }
        }
        Ok(())
    }

    /// Parses a `key=value` config file body on top of the defaults.
    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected `key=value`"))?;
            pairs.push((k.trim(), v.trim()));
        }
        let mut cfg = Self::default();
        cfg.apply_pairs(pairs)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_kv(&std::fs::read_to_string(path)?)
    }

    pub fn to_kv(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MmasConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let _ = writeln!(s, "alpha={}", self.alpha);
        let _ = writeln!(s, "beta={}", self.beta);
        let _ = writeln!(s, "rho={}", self.rho);
        let _ = writeln!(s, "q0={}", self.q0);
        let _ = writeln!(s, "num_ants={}", self.num_ants);
        let _ = writeln!(s, "deposition={}", self.deposition.name());
        if let Deposition::Exponential {
            time_constant,
            index,
        } = self.deposition
        {
            let _ = writeln!(s, "T={time_constant}");
            let idx = match index {
                TimeIndex::Hop => "hop",
                TimeIndex::Iteration => "iteration",
            };
            let _ = writeln!(s, "time_index={idx}");
        }
        match self.limits {
            TrailLimits::Auto => {
                let _ = writeln!(s, "tau_min=auto");
                let _ = writeln!(s, "tau_max=auto");
            }
            TrailLimits::Explicit { min, max } => {
                let _ = writeln!(s, "tau_min={min}");
                let _ = writeln!(s, "tau_max={max}");
            }
        }
        let _ = writeln!(s, "use_best_so_far_every={}", self.use_best_so_far_every);
        let _ = writeln!(s, "stagnation_window={}", self.stagnation_window);
        let _ = writeln!(s, "max_iterations={}", self.max_iterations);
        f.write_str(&s)
    }
}
