//! Max-Min Ant System for source-to-destination search on a roadmap.
//!
//! Only one ant deposits per iteration (the iteration-best, or periodically
//! the best-so-far), trails are clamped to `[τ_min, τ_max]`, start at
//! `τ_max`, and are reset to `τ_max` after a stagnation window.

mod choice;
mod config;
mod trail;

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use choice::{
    construct_path, next_node, transition_distribution, Move, TransitionDistribution,
};
pub use config::{Deposition, MmasConfig, TimeIndex, TrailLimits};
pub use trail::{deposition_amount, update_trails, TrailState};

use crate::roadmap::RoadmapGraph;
use crate::{Error, Result};

/// A simple path from source to destination and its total weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub nodes: Vec<usize>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub iter_best: Option<f64>,
    pub best_so_far: Option<f64>,
    /// Trails were reset to `τ_max` at the end of this iteration.
    pub reinit: bool,
    /// Ants whose construction ran out of options.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    pub best: Option<Tour>,
    pub seed: u64,
}

impl RunTrace {
    pub fn best_length(&self) -> Option<f64> {
        self.best.as_ref().map(|t| t.length)
    }

    /// `iteration,iter_best,best_so_far,reinit`; missing lengths are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,iter_best,best_so_far,reinit\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.iteration,
                opt(r.iter_best),
                opt(r.best_so_far),
                u8::from(r.reinit)
            );
        }
        out
    }
}

/// Hooks into a run, used by tests and diagnostics.
pub trait RunObserver {
    /// Every distribution an ant samples from.
    fn on_distribution(&mut self, _dist: &TransitionDistribution) {}
    /// Trail state after each update or reinitialisation.
    fn on_trails(&mut self, _trails: &TrailState) {}
}

pub struct NoopObserver;

impl RunObserver for NoopObserver {}

/// Runs the colony with a [`ChaCha8Rng`] seeded from `seed`.
pub fn run(g: &RoadmapGraph, cfg: &MmasConfig, seed: u64) -> Result<RunTrace> {
    run_observed(g, cfg, seed, &mut NoopObserver)
}

pub fn run_observed(
    g: &RoadmapGraph,
    cfg: &MmasConfig,
    seed: u64,
    observer: &mut dyn RunObserver,
) -> Result<RunTrace> {
    cfg.validate()?;
    if g.num_cities() < 2 || g.source() == g.destination() {
        return Err(Error::invalid(
            "roadmap needs distinct source and destination",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (src, dst) = (g.source(), g.destination());

    // With automatic limits nothing is known before the first tour; all
    // trails equal means the choice rule is unaffected by their value.
    let mut trails = match cfg.limits {
        TrailLimits::Explicit { min, max } => TrailState::new(g.num_edges(), min, max)?,
        TrailLimits::Auto => TrailState::new(g.num_edges(), 1.0, 1.0)?,
    };
    let mut limits_ready = matches!(cfg.limits, TrailLimits::Explicit { .. });

    let mut best: Option<Tour> = None;
    let mut since_improvement = 0usize;
    let mut records = Vec::with_capacity(cfg.max_iterations);

    for iteration in 1..=cfg.max_iterations {
        let mut iter_best: Option<Tour> = None;
        let mut failures = 0;
        for _ in 0..cfg.num_ants {
            match construct_path(g, &trails, cfg, src, dst, &mut rng, observer) {
                Some(t) => {
                    if iter_best.as_ref().is_none_or(|b| t.length < b.length) {
                        iter_best = Some(t);
                    }
                }
                None => failures += 1,
            }
        }

        let improved = match (&iter_best, &best) {
            (Some(it), Some(b)) => it.length < b.length,
            (Some(_), None) => true,
            _ => false,
        };
        if improved {
            best = iter_best.clone();
            since_improvement = 0;
            if cfg.limits == TrailLimits::Auto {
                let c_bs = best.as_ref().map(|b| b.length).expect("just set");
                let tau_max = 1.0 / (cfg.rho * c_bs);
                let tau_min = tau_max / (2.0 * g.num_cities() as f64);
                trails.set_bounds(tau_min, tau_max)?;
                if !limits_ready {
                    trails.reinitialize();
                    limits_ready = true;
                }
            }
        } else {
            since_improvement += 1;
        }

        let use_best = cfg.use_best_so_far_every > 0 && iteration % cfg.use_best_so_far_every == 0;
        let depositing = if use_best {
            best.as_ref()
        } else {
            iter_best.as_ref().or(best.as_ref())
        };
        if let Some(tour) = depositing {
            update_trails(&mut trails, g, cfg, tour, iteration)?;
            observer.on_trails(&trails);
        }

        let mut reinit = false;
        if cfg.stagnation_window > 0 && since_improvement >= cfg.stagnation_window {
            trails.reinitialize();
            observer.on_trails(&trails);
            since_improvement = 0;
            reinit = true;
        }

        records.push(IterationRecord {
            iteration,
            iter_best: iter_best.map(|t| t.length),
            best_so_far: best.as_ref().map(|t| t.length),
            reinit,
            failures,
        });
    }

    Ok(RunTrace {
        records,
        best,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadmap::generate_roadmap;

    #[test]
    fn two_node_graph_finds_edge_immediately() {
        let g = generate_roadmap(2, 10.0, 10.0, 50.0, 3).unwrap();
        let cfg = MmasConfig {
            max_iterations: 5,
            ..MmasConfig::default()
        };
        let trace = run(&g, &cfg, 9).unwrap();
        let w = g.edge(0).weight;
        assert_eq!(trace.records[0].best_so_far, Some(w));
        assert!(trace.records.iter().all(|r| r.best_so_far == Some(w)));
    }

    #[test]
    fn identical_seed_identical_trace() {
        let g = generate_roadmap(60, 100.0, 100.0, 20.0, 4).unwrap();
        let cfg = MmasConfig {
            max_iterations: 40,
            ..MmasConfig::default()
        };
        assert_eq!(run(&g, &cfg, 17).unwrap(), run(&g, &cfg, 17).unwrap());
    }

    #[test]
    fn stagnation_resets_trails() {
        let g = generate_roadmap(2, 10.0, 10.0, 50.0, 3).unwrap();
        let cfg = MmasConfig {
            max_iterations: 12,
            stagnation_window: 5,
            ..MmasConfig::default()
        };
        let trace = run(&g, &cfg, 1).unwrap();
        let resets: Vec<usize> = trace
            .records
            .iter()
            .filter(|r| r.reinit)
            .map(|r| r.iteration)
            .collect();
        assert_eq!(resets, vec![6, 11]);
    }

    #[test]
    fn csv_header_and_rows() {
        let g = generate_roadmap(2, 3.0, 4.0, 50.0, 0).unwrap();
        let cfg = MmasConfig {
            max_iterations: 2,
            ..MmasConfig::default()
        };
        let csv = run(&g, &cfg, 0).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iteration,iter_best,best_so_far,reinit");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,"));
    }

    #[test]
    fn rejects_coincident_endpoints() {
        let g = generate_roadmap(5, 3.0, 4.0, 50.0, 0)
            .unwrap()
            .with_endpoints(1, 1)
            .unwrap();
        assert!(run(&g, &MmasConfig::default(), 0).is_err());
    }
}
