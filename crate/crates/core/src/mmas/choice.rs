use rand::Rng;

use super::trail::TrailState;
use super::{MmasConfig, RunObserver, Tour};
use crate::roadmap::RoadmapGraph;
use crate::{Error, Result};

/// One feasible move out of the current city.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub node: usize,
    pub edge: usize,
    /// `τ^α · η^β`
    pub score: f64,
    pub probability: f64,
}

/// Feasible moves from a city, ascending by node id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransitionDistribution {
    moves: Vec<Move>,
}

impl TransitionDistribution {
    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn probability_of(&self, node: usize) -> Option<f64> {
        self.moves
            .iter()
            .find(|m| m.node == node)
            .map(|m| m.probability)
    }

    pub fn total_probability(&self) -> f64 {
        self.moves.iter().map(|m| m.probability).sum()
    }
}

/// Random-proportional choice over the unvisited neighbours of `current`:
/// `p(j) ∝ τ_ij^α · (1/w_ij)^β`.
///
/// Returns an empty distribution when `current` is a dead end. If every
/// score underflows to zero the distribution falls back to uniform.
pub fn transition_distribution(
    trails: &TrailState,
    g: &RoadmapGraph,
    current: usize,
    blocked: &[bool],
    alpha: f64,
    beta: f64,
) -> TransitionDistribution {
    let mut moves: Vec<Move> = g
        .neighbors(current)
        .iter()
        .filter(|&&(nb, _)| !blocked[nb])
        .map(|&(nb, e)| {
            let visibility = 1.0 / g.edge(e).weight;
            Move {
                node: nb,
                edge: e,
                score: trails.tau(e).powf(alpha) * visibility.powf(beta),
                probability: 0.0,
            }
        })
        .collect();
    let total: f64 = moves.iter().map(|m| m.score).sum();
    if total > 0.0 && total.is_finite() {
        for m in &mut moves {
            m.probability = m.score / total;
        }
    } else {
        let uniform = 1.0 / moves.len() as f64;
        for m in &mut moves {
            m.probability = uniform;
        }
    }
    TransitionDistribution { moves }
}

/// Picks the next city.
///
/// With `q < q0` (and at `q = q0`) the choice is sampled from the
/// distribution; otherwise the highest-scoring move is taken, ties to the
/// smallest id.
pub fn next_node<R: Rng + ?Sized>(
    dist: &TransitionDistribution,
    q: f64,
    q0: f64,
    rng: &mut R,
) -> Result<Move> {
    let moves = dist.moves();
    if moves.is_empty() {
        return Err(Error::invalid("no feasible move"));
    }
    if q <= q0 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for m in moves {
            acc += m.probability;
            if u < acc {
                return Ok(*m);
            }
        }
        // rounding left u beyond the cumulative sum: take the last move
        // with non-zero mass
        Ok(*moves
            .iter()
            .rev()
            .find(|m| m.probability > 0.0)
            .unwrap_or(&moves[moves.len() - 1]))
    } else {
        let mut best = moves[0];
        for m in &moves[1..] {
            if m.score > best.score {
                best = *m;
            }
        }
        Ok(best)
    }
}

/// Builds one ant's path from `src` to `dst`.
///
/// The ant never revisits a city. When it reaches a city with no unvisited
/// neighbour it steps back one city, leaving the dead end marked so it is
/// not entered again. Returns `None` when backtracking exhausts the source.
pub fn construct_path<R: Rng + ?Sized>(
    g: &RoadmapGraph,
    trails: &TrailState,
    cfg: &MmasConfig,
    src: usize,
    dst: usize,
    rng: &mut R,
    observer: &mut dyn RunObserver,
) -> Option<Tour> {
    let mut blocked = vec![false; g.num_cities()];
    let mut path = vec![src];
    let mut edges: Vec<usize> = Vec::new();
    blocked[src] = true;

    while let Some(&current) = path.last() {
        if current == dst {
            let length = edges.iter().map(|&e| g.edge(e).weight).sum();
            return Some(Tour {
                nodes: path,
                length,
            });
        }
        let dist = transition_distribution(trails, g, current, &blocked, cfg.alpha, cfg.beta);
        if dist.is_empty() {
            path.pop();
            edges.pop();
            continue;
        }
        observer.on_distribution(&dist);
        let q: f64 = rng.random();
        let mv = next_node(&dist, q, cfg.q0, rng).expect("distribution is nonempty");
        blocked[mv.node] = true;
        path.push(mv.node);
        edges.push(mv.edge);
    }
    None
}
