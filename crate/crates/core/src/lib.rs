//! Max-Min Ant System with constant and exponential pheromone deposition,
//! applied to source-to-destination search on random geometric roadmaps.
//!
//! The crate is organised bottom-up:
//!
//! * [`roadmap`] generates, persists and characterises search environments.
//! * [`oracle`] computes exact shortest paths (Dijkstra) as ground truth.
//! * [`mmas`] is the colony engine itself.
//! * [`dynamics`] holds the closed-form and discrete trail-dynamics models.
//! * [`predictor`] evaluates the fitted (α, β) surrogate models.
//! * [`harness`] runs parameter sweeps, rule comparisons and corpus studies.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
mod error;
pub mod harness;
pub mod mmas;
pub mod oracle;
pub mod predictor;
pub mod roadmap;

pub use error::{Error, Result};
pub use mmas::{Deposition, MmasConfig, RunTrace, TimeIndex, Tour, TrailLimits};
pub use oracle::PathResult;
pub use roadmap::{City, Edge, RoadmapFeatures, RoadmapGraph};
