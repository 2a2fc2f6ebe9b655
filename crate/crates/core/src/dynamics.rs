//! Deterministic trail dynamics of a single edge.
//!
//! Two models are kept side by side: the difference equation
//! `τ(t) = (1−ρ)·τ(t−1) + Σ Δτ_k(t)` and the closed-form solutions of its
//! continuous counterpart `dτ/dt + ρτ = Σ Δτ_k(t+1)`. They agree in the
//! limit and approximately (for small ρ) along the way, not exactly.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `|ρ − 1/T|` at or below this is treated as the resonant case.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// `Δτ_k(t) = C_k`
    Constant,
    /// `Δτ_k(t) = C_k (1 − e^{−t/T})`
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsParams {
    pub tau0: f64,
    pub rho: f64,
    /// Time constant of the exponential rule.
    pub time_constant: Option<f64>,
    /// Per-ant deposit constants `C_k`.
    pub deposits: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    Singular,
}

impl DynamicsParams {
    pub fn new(
        tau0: f64,
        rho: f64,
        time_constant: Option<f64>,
        deposits: Vec<f64>,
    ) -> Result<Self> {
        let p = Self {
            tau0,
            rho,
            time_constant,
            deposits,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::invalid(format!("rho must be > 0, got {}", self.rho)));
        }
        if let Some(t) = self.time_constant {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::invalid(format!("T must be > 0, got {t}")));
            }
        }
        if self.deposits.is_empty() {
            return Err(Error::invalid("at least one deposit constant is required"));
        }
        if let Some(c) = self
            .deposits
            .iter()
            .find(|c| !(**c >= 0.0 && c.is_finite()))
        {
            return Err(Error::invalid(format!(
                "deposit constants must be >= 0, got {c}"
            )));
        }
        if !self.tau0.is_finite() {
            return Err(Error::invalid("tau0 must be finite"));
        }
        Ok(())
    }

    fn total_deposit(&self) -> f64 {
        self.deposits.iter().sum()
    }

    fn require_time_constant(&self) -> Result<f64> {
        self.time_constant
            .ok_or_else(|| Error::invalid("exponential rule needs a time constant T"))
    }
}

/// `Σ C_k / ρ`, the common limit of both rules.
pub fn steady_state(p: &DynamicsParams) -> Result<f64> {
    p.validate()?;
    Ok(p.total_deposit() / p.rho)
}

/// `τ(t) = [τ0 − ΣC/ρ]·e^{−ρt} + ΣC/ρ`
pub fn closed_form_constant(p: &DynamicsParams, t: f64) -> Result<f64> {
    let ss = steady_state(p)?;
    if t < 0.0 {
        return Err(Error::invalid(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(p.tau0);
    }
    Ok((p.tau0 - ss) * (-p.rho * t).exp() + ss)
}

/// `τ(t) = A·e^{−ρt} + ΣC/ρ − ΣC·e^{−(t+1)/T}/(ρ − 1/T)` with `A` fixed by
/// `τ(0) = τ0`.
pub fn closed_form_exponential(p: &DynamicsParams, t: f64) -> Result<f64> {
    let ss = steady_state(p)?;
    let tc = p.require_time_constant()?;
    if t < 0.0 {
        return Err(Error::invalid(format!("t must be >= 0, got {t}")));
    }
    let gap = p.rho - 1.0 / tc;
    if gap.abs() <= SINGULAR_TOLERANCE {
        return Err(Error::SingularParameters {
            rho: p.rho,
            time_constant: tc,
        });
    }
    let c = p.total_deposit();
    let shifted = |s: f64| c * (-(s + 1.0) / tc).exp() / gap;
    let a = p.tau0 - ss + shifted(0.0);
    if t == 0.0 {
        return Ok(p.tau0);
    }
    Ok(a * (-p.rho * t).exp() + ss - shifted(t))
}

pub fn closed_form(p: &DynamicsParams, rule: Rule, t: f64) -> Result<f64> {
    match rule {
        Rule::Constant => closed_form_constant(p, t),
        Rule::Exponential => closed_form_exponential(p, t),
    }
}

/// Total deposit at step `t` under `rule`.
pub fn deposit_at(p: &DynamicsParams, rule: Rule, t: f64) -> Result<f64> {
    let c = p.total_deposit();
    Ok(match rule {
        Rule::Constant => c,
        Rule::Exponential => c * -(-t / p.require_time_constant()?).exp_m1(),
    })
}

/// Iterates the difference equation; returns `τ(1), …, τ(steps)`.
pub fn discrete_trace(p: &DynamicsParams, rule: Rule, steps: usize) -> Result<Vec<f64>> {
    p.validate()?;
    if steps == 0 {
        return Err(Error::invalid("steps must be >= 1"));
    }
    if rule == Rule::Exponential {
        p.require_time_constant()?;
    }
    let keep = 1.0 - p.rho;
    let mut tau = p.tau0;
    let mut out = Vec::with_capacity(steps);
    for t in 1..=steps {
        tau = keep * tau + deposit_at(p, rule, t as f64)?;
        out.push(tau);
    }
    Ok(out)
}

/// Stable iff `ρ > 0` and `T` (if any) is positive and not resonant with ρ.
pub fn stability_verdict(rho: f64, time_constant: Option<f64>) -> Stability {
    if let Some(tc) = time_constant {
        if (rho - 1.0 / tc).abs() <= SINGULAR_TOLERANCE {
            return Stability::Singular;
        }
        if !(tc > 0.0) {
            return Stability::Unstable;
        }
    }
    if rho > 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}
