//! Exact shortest paths used as ground truth for the colony.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::roadmap::RoadmapGraph;
use crate::{Error, Result};

/// Relative slack under which two path lengths count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub nodes: Vec<usize>,
    pub length: f64,
}

#[derive(Copy, Clone, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then on id
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source Dijkstra distances from `origin`; unreachable cities get
/// `f64::INFINITY`.
pub fn distances_from(g: &RoadmapGraph, origin: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.num_cities()];
    let mut heap = BinaryHeap::new();
    dist[origin] = 0.0;
    heap.push(Frontier {
        dist: 0.0,
        node: origin,
    });
    while let Some(Frontier { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, eidx) in g.neighbors(node) {
            let nd = d + g.edge(eidx).weight;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Frontier {
                    dist: nd,
                    node: next,
                });
            }
        }
    }
    dist
}

/// Minimum-weight path from `src` to `dst`.
///
/// Among equal-length optima the lexicographically smallest node sequence
/// is returned: distances are computed from `dst`, then the path is walked
/// forward from `src` always taking the smallest-id neighbour that stays on
/// a shortest path.
pub fn shortest_path(g: &RoadmapGraph, src: usize, dst: usize) -> Result<PathResult> {
    let n = g.num_cities();
    if src >= n || dst >= n {
        return Err(Error::invalid(format!(
            "endpoints ({src}, {dst}) out of range for {n} cities"
        )));
    }
    let to_dst = distances_from(g, dst);
    if to_dst[src].is_infinite() {
        return Err(Error::NoPath { src, dst });
    }

    let mut nodes = vec![src];
    let mut on_path = vec![false; n];
    on_path[src] = true;
    let mut length = 0.0;
    let mut cur = src;
    while cur != dst {
        let remaining = to_dst[cur];
        let slack = TIE_TOLERANCE * remaining.max(f64::MIN_POSITIVE);
        let (next, w) = g
            .neighbors(cur)
            .iter()
            .map(|&(nb, e)| (nb, g.edge(e).weight))
            .find(|&(nb, w)| !on_path[nb] && (w + to_dst[nb] - remaining).abs() <= slack)
            .expect("a shortest-path successor exists for every reachable node");
        on_path[next] = true;
        nodes.push(next);
        length += w;
        cur = next;
    }
    Ok(PathResult { nodes, length })
}
