use serde::{Deserialize, Serialize};

use super::config::{Deposition, MmasConfig, TimeIndex};
use super::Tour;
use crate::roadmap::RoadmapGraph;
use crate::{Error, Result};

/// Per-edge pheromone concentrations, indexed like [`RoadmapGraph::edges`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailState {
    tau: Vec<f64>,
    min: f64,
    max: f64,
}

impl TrailState {
    /// Every edge starts at `max`.
    pub fn new(num_edges: usize, min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min <= max && max.is_finite()) {
            return Err(Error::invalid(format!(
                "trail bounds need 0 < min <= max, got [{min}, {max}]"
            )));
        }
        Ok(Self {
            tau: vec![max; num_edges],
            min,
            max,
        })
    }

    pub fn tau(&self, edge: usize) -> f64 {
        self.tau[edge]
    }

    pub fn values(&self) -> &[f64] {
        &self.tau
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.min, self.max)
    }

    /// Overwrites one value, clamped into the current bounds.
    pub fn set(&mut self, edge: usize, value: f64) {
        self.tau[edge] = value.clamp(self.min, self.max);
    }

    /// Installs new bounds and clamps every stored value into them.
    pub fn set_bounds(&mut self, min: f64, max: f64) -> Result<()> {
        if !(min > 0.0 && min <= max && max.is_finite()) {
            return Err(Error::invalid(format!(
                "trail bounds need 0 < min <= max, got [{min}, {max}]"
            )));
        }
        self.min = min;
        self.max = max;
        self.clamp_all();
        Ok(())
    }

    /// Resets every edge to the upper limit.
    pub fn reinitialize(&mut self) {
        self.tau.fill(self.max);
    }

    fn clamp_all(&mut self) {
        for t in &mut self.tau {
            *t = t.clamp(self.min, self.max);
        }
    }
}

/// Amount deposited on one arc by the depositing ant.
///
/// `t` is the hop index of the arc (first arc = 1) or the iteration count,
/// depending on the rule's [`TimeIndex`]; it is ignored for
/// [`Deposition::Constant`].
pub fn deposition_amount(kind: &Deposition, tour_length: f64, t: f64) -> Result<f64> {
    if !(tour_length > 0.0) {
        return Err(Error::invalid(format!(
            "tour length must be positive, got {tour_length}"
        )));
    }
    let base = 1.0 / tour_length;
    Ok(match *kind {
        Deposition::Constant => base,
        Deposition::Exponential { time_constant, .. } => {
            if !(time_constant > 0.0) {
                return Err(Error::invalid(format!(
                    "T must be > 0, got {time_constant}"
                )));
            }
            if t < 0.0 {
                return Err(Error::invalid(format!("time index must be >= 0, got {t}")));
            }
            // -expm1(-x) = 1 - e^{-x}, accurate for small x
            base * -(-t / time_constant).exp_m1()
        }
    })
}

/// One pheromone update: evaporate every edge, deposit along
/// `depositing_tour`, then clamp into the trail bounds.
pub fn update_trails(
    trails: &mut TrailState,
    g: &RoadmapGraph,
    cfg: &MmasConfig,
    depositing_tour: &Tour,
    iteration: usize,
) -> Result<()> {
    let keep = 1.0 - cfg.rho;
    for t in &mut trails.tau {
        *t *= keep;
    }
    let length = depositing_tour.length;
    for (hop, pair) in depositing_tour.nodes.windows(2).enumerate() {
        let edge = g.edge_between(pair[0], pair[1]).ok_or_else(|| {
            Error::invalid(format!("tour uses missing edge ({}, {})", pair[0], pair[1]))
        })?;
        let t = match cfg.deposition {
            Deposition::Exponential {
                index: TimeIndex::Iteration,
                ..
            } => iteration as f64,
            _ => (hop + 1) as f64,
        };
        trails.tau[edge] += deposition_amount(&cfg.deposition, length, t)?;
    }
    trails.clamp_all();
    Ok(())
}
