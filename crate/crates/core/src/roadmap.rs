//! Roadmap environments: random geometric graphs of cities, their text
//! format, and the two features consumed by the parameter predictor.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Area (square length units) that node density is normalised to.
pub const DENSITY_AREA: f64 = 200.0;

const FORMAT_TAG: &str = "roadmap";
const FORMAT_VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct City {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl City {
    pub fn distance(&self, other: &City) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Undirected edge, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

impl Edge {
    /// The endpoint opposite `node`.
    pub fn other(&self, node: usize) -> usize {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Weighted undirected graph of cities with a designated query pair.
///
/// Edges are kept sorted by `(a, b)`; the adjacency lists hold
/// `(neighbour, edge index)` pairs sorted by neighbour id.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadmapGraph {
    cities: Vec<City>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
    width: f64,
    height: f64,
    source: usize,
    destination: usize,
}

impl RoadmapGraph {
    /// Builds a graph from coordinates and endpoint pairs. Weights are the
    /// Euclidean distances between endpoints.
    pub fn new(
        coords: &[(f64, f64)],
        pairs: &[(usize, usize)],
        width: f64,
        height: f64,
        source: usize,
        destination: usize,
    ) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::invalid("roadmap needs at least one city"));
        }
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::invalid(format!(
                "degenerate area {width} x {height}"
            )));
        }
        if source >= n || destination >= n {
            return Err(Error::invalid(format!(
                "endpoints ({source}, {destination}) out of range for {n} cities"
            )));
        }
        let cities: Vec<City> = coords
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| City { id, x, y })
            .collect();

        let mut seen = BTreeSet::new();
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::invalid(format!(
                    "edge ({i}, {j}) references a city outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop on city {i}")));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::invalid(format!("duplicate edge ({i}, {j})")));
            }
        }
        let edges: Vec<Edge> = seen
            .into_iter()
            .map(|(a, b)| Edge {
                a,
                b,
                weight: cities[a].distance(&cities[b]),
            })
            .collect();

        let mut adjacency = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, idx));
            adjacency[e.b].push((e.a, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        Ok(Self {
            cities,
            edges,
            adjacency,
            width,
            height,
            source,
            destination,
        })
    }

    pub fn cities(&self) -> &[City] {
        &self.cities
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_cities(&self) -> usize {
        self.cities.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Neighbours of `node` as `(neighbour, edge index)`, ascending by id.
    pub fn neighbors(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    /// Index of the edge joining `i` and `j`, if any.
    pub fn edge_between(&self, i: usize, j: usize) -> Option<usize> {
        let list = self.adjacency.get(i)?;
        list.binary_search_by_key(&j, |&(nb, _)| nb)
            .ok()
            .map(|pos| list[pos].1)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn destination(&self) -> usize {
        self.destination
    }

    /// Same graph with a different query pair.
    pub fn with_endpoints(mut self, source: usize, destination: usize) -> Result<Self> {
        let n = self.num_cities();
        if source >= n || destination >= n {
            return Err(Error::invalid(format!(
                "endpoints ({source}, {destination}) out of range for {n} cities"
            )));
        }
        self.source = source;
        self.destination = destination;
        Ok(self)
    }

    /// Connected-component label for every city (labels are dense, in
    /// order of lowest member id).
    pub fn components(&self) -> Vec<usize> {
        let mut dsu = DisjointSets::new(self.num_cities());
        for e in &self.edges {
            dsu.union(e.a, e.b);
        }
        let mut label = vec![usize::MAX; self.num_cities()];
        let mut next = 0;
        let mut out = Vec::with_capacity(self.num_cities());
        for i in 0..self.num_cities() {
            let root = dsu.find(i);
            if label[root] == usize::MAX {
                label[root] = next;
                next += 1;
            }
            out.push(label[root]);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Parameters of a generated roadmap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadmapSpec {
    pub cities: usize,
    pub width: f64,
    pub height: f64,
    pub connect_radius: f64,
}

/// Places `n` cities uniformly in a `width × height` rectangle, joins every
/// pair closer than `connect_radius`, then adds the shortest cross-component
/// edges until the graph is connected.
///
/// The source is the city nearest `(0, 0)` and the destination the city
/// nearest `(width, height)`; ties go to the lower id.
pub fn generate_roadmap(
    n: usize,
    width: f64,
    height: f64,
    connect_radius: f64,
    seed: u64,
) -> Result<RoadmapGraph> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 cities, got {n}")));
    }
    for (name, v) in [
        ("width", width),
        ("height", height),
        ("connect_radius", connect_radius),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = rng.random::<f64>() * width;
            let y = rng.random::<f64>() * height;
            (x, y)
        })
        .collect();
    let dist = |i: usize, j: usize| {
        let (a, b) = (coords[i], coords[j]);
        (a.0 - b.0).hypot(a.1 - b.1)
    };

    let mut pairs = Vec::new();
    let mut dsu = DisjointSets::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if dist(i, j) <= connect_radius {
                pairs.push((i, j));
                dsu.union(i, j);
            }
        }
    }

    // Kruskal over cross-component pairs yields the minimum augmentation.
    let mut bridges: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if dsu.find(i) != dsu.find(j) {
                bridges.push((dist(i, j), i, j));
            }
        }
    }
    bridges.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    for (_, i, j) in bridges {
        if dsu.union(i, j) {
            pairs.push((i, j));
        }
    }

    let nearest = |tx: f64, ty: f64, exclude: Option<usize>| {
        (0..n)
            .filter(|&i| Some(i) != exclude)
            .min_by(|&i, &j| {
                let di = (coords[i].0 - tx).hypot(coords[i].1 - ty);
                let dj = (coords[j].0 - tx).hypot(coords[j].1 - ty);
                di.total_cmp(&dj).then(i.cmp(&j))
            })
            .expect("n >= 2")
    };
    let source = nearest(0.0, 0.0, None);
    let mut destination = nearest(width, height, None);
    if destination == source {
        destination = nearest(width, height, Some(source));
    }

    RoadmapGraph::new(&coords, &pairs, width, height, source, destination)
}

impl RoadmapSpec {
    pub fn generate(&self, seed: u64) -> Result<RoadmapGraph> {
        generate_roadmap(
            self.cities,
            self.width,
            self.height,
            self.connect_radius,
            seed,
        )
    }
}

/// Features of a roadmap used by the (α, β) predictor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadmapFeatures {
    /// Cities per [`DENSITY_AREA`] square units.
    pub node_density: f64,
    /// Population standard deviation of each city's shortest incident edge.
    pub min_arc_stddev: f64,
}

pub fn compute_features(g: &RoadmapGraph) -> Result<RoadmapFeatures> {
    let n = g.num_cities();
    if n == 0 || g.num_edges() == 0 {
        return Err(Error::invalid("features need a nonempty graph with edges"));
    }
    let mut minima = vec![f64::INFINITY; n];
    for e in g.edges() {
        minima[e.a] = minima[e.a].min(e.weight);
        minima[e.b] = minima[e.b].min(e.weight);
    }
    if let Some(isolated) = minima.iter().position(|m| m.is_infinite()) {
        return Err(Error::invalid(format!(
            "city {isolated} has no incident edge"
        )));
    }
    let mean = minima.iter().sum::<f64>() / n as f64;
    let var = minima.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n as f64;
    Ok(RoadmapFeatures {
        node_density: n as f64 * DENSITY_AREA / (g.width() * g.height()),
        min_arc_stddev: var.sqrt(),
    })
}

/// Serialises a roadmap in the versioned text format.
pub fn format_roadmap(g: &RoadmapGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{FORMAT_TAG} {FORMAT_VERSION} {} {} {} {} {} {}",
        g.num_cities(),
        g.num_edges(),
        g.width(),
        g.height(),
        g.source(),
        g.destination()
    );
    for c in g.cities() {
        let _ = writeln!(out, "{} {} {}", c.id, c.x, c.y);
    }
    for e in g.edges() {
        let _ = writeln!(out, "{} {}", e.a, e.b);
    }
    out
}

pub fn parse_roadmap(text: &str) -> Result<RoadmapGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header line"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&FORMAT_TAG) {
        return Err(Error::parse(hline, "header must start with `roadmap`"));
    }
    match fields.get(1) {
        Some(&FORMAT_VERSION) => {}
        Some(v) => return Err(Error::UnsupportedVersion((*v).to_string())),
        None => return Err(Error::parse(hline, "missing format version")),
    }
    if fields.len() != 8 {
        return Err(Error::parse(
            hline,
            format!("header has {} fields, expected 8", fields.len()),
        ));
    }
    let n: usize = parse_field(fields[2], hline, "city count")?;
    let m: usize = parse_field(fields[3], hline, "edge count")?;
    let width: f64 = parse_field(fields[4], hline, "width")?;
    let height: f64 = parse_field(fields[5], hline, "height")?;
    let source: usize = parse_field(fields[6], hline, "source")?;
    let destination: usize = parse_field(fields[7], hline, "destination")?;
    if source >= n || destination >= n {
        return Err(Error::parse(hline, "endpoint id out of range"));
    }

    let mut coords = Vec::with_capacity(n);
    for expected in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::parse(hline, format!("expected {n} city lines")))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(ln, "city line must be `<id> <x> <y>`"));
        }
        let id: usize = parse_field(f[0], ln, "city id")?;
        if id != expected {
            return Err(Error::parse(
                ln,
                format!("city id {id} out of order, expected {expected}"),
            ));
        }
        let x: f64 = parse_field(f[1], ln, "x")?;
        let y: f64 = parse_field(f[2], ln, "y")?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::parse(ln, "non-finite coordinate"));
        }
        coords.push((x, y));
    }

    let mut pairs = Vec::with_capacity(m);
    let mut seen = BTreeSet::new();
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::parse(hline, format!("expected {m} edge lines")))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(Error::parse(ln, "edge line must be `<i> <j>`"));
        }
        let i: usize = parse_field(f[0], ln, "edge endpoint")?;
        let j: usize = parse_field(f[1], ln, "edge endpoint")?;
        if i >= n || j >= n {
            return Err(Error::parse(
                ln,
                format!("edge ({i}, {j}) references id >= {n}"),
            ));
        }
        if i == j {
            return Err(Error::parse(ln, format!("self-loop on city {i}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::parse(ln, format!("duplicate edge ({i}, {j})")));
        }
        pairs.push((i, j));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(ln, "trailing content after edge list"));
    }

    RoadmapGraph::new(&coords, &pairs, width, height, source, destination)
        .map_err(|e| Error::parse(hline, e.to_string()))
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{s}`")))
}

pub fn save_roadmap(g: &RoadmapGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_roadmap(g))?;
    Ok(())
}

pub fn load_roadmap(path: impl AsRef<Path>) -> Result<RoadmapGraph> {
    parse_roadmap(&fs::read_to_string(path)?)
}
