//! Experiment protocol: (α, β) sweeps, deposition-rule comparisons and
//! multi-roadmap feature corpora, aggregated over seeds.
//!
//! Runs are independent and may execute on a thread pool; results are
//! always collected in input order, so output does not depend on the job
//! count. A run that never reaches the optimum within tolerance counts as
//! converging at `max_iterations + 1` when medians are taken.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mmas::{self, MmasConfig, RunTrace};
use crate::oracle;
use crate::roadmap::{compute_features, RoadmapGraph, RoadmapSpec};
use crate::{Error, Result};

/// Smallest 1-based iteration whose best-so-far length is within
/// `optimum · (1 + tol)`, or `None` if the run never gets there.
pub fn convergence_time(trace: &RunTrace, optimum: f64, tol: f64) -> Option<usize> {
    let threshold = optimum * (1.0 + tol);
    trace
        .records
        .iter()
        .find(|r| r.best_so_far.is_some_and(|b| b <= threshold))
        .map(|r| r.iteration)
}

/// Median of the values (mean of the middle pair for even counts).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Mean taken over the sorted values, so the result is order-independent.
pub fn mean(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

/// Execution settings shared by the experiment drivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Relative tolerance against the oracle optimum.
    pub tolerance: f64,
    /// Worker threads; 1 runs sequentially.
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.0,
            jobs: 1,
        }
    }
}

fn par_map<T, U, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    if jobs <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(f).collect())
}

fn optimum_of(g: &RoadmapGraph) -> Result<f64> {
    Ok(oracle::shortest_path(g, g.source(), g.destination())?.length)
}

/// Outcome of one run reduced to what the aggregations need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub final_length: Option<f64>,
    pub convergence: Option<usize>,
}

impl RunSummary {
    fn from_trace(trace: &RunTrace, optimum: f64, tol: f64) -> Self {
        Self {
            seed: trace.seed,
            final_length: trace.best_length(),
            convergence: convergence_time(trace, optimum, tol),
        }
    }

    fn penalized_convergence(&self, max_iterations: usize) -> f64 {
        self.convergence.unwrap_or(max_iterations + 1) as f64
    }

    fn length_or_inf(&self) -> f64 {
        self.final_length.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub beta: f64,
    pub mean_length: f64,
    pub median_length: f64,
    pub mean_convergence: f64,
    pub median_convergence: f64,
    /// Seeds that reached the optimum within tolerance.
    pub converged: usize,
    pub runs: Vec<RunSummary>,
}

impl SweepCell {
    fn aggregate(alpha: f64, beta: f64, mut runs: Vec<RunSummary>, max_iterations: usize) -> Self {
        runs.sort_by_key(|r| r.seed);
        let lengths: Vec<f64> = runs.iter().map(RunSummary::length_or_inf).collect();
        let conv: Vec<f64> = runs
            .iter()
            .map(|r| r.penalized_convergence(max_iterations))
            .collect();
        Self {
            alpha,
            beta,
            mean_length: mean(&lengths),
            median_length: median(&lengths),
            mean_convergence: mean(&conv),
            median_convergence: median(&conv),
            converged: runs.iter().filter(|r| r.convergence.is_some()).count(),
            runs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub roadmap: String,
    pub alpha_values: Vec<f64>,
    pub beta_values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub optimum: f64,
    /// Row-major: all β for the first α, then the next α.
    pub cells: Vec<SweepCell>,
    /// Index into `cells` of the best cell.
    pub best: usize,
}

impl SweepGrid {
    pub fn cell(&self, alpha_idx: usize, beta_idx: usize) -> &SweepCell {
        &self.cells[alpha_idx * self.beta_values.len() + beta_idx]
    }

    pub fn best_cell(&self) -> &SweepCell {
        &self.cells[self.best]
    }

    pub fn rows(&self) -> Vec<SweepRow> {
        self.cells
            .iter()
            .map(|c| SweepRow {
                alpha: c.alpha,
                beta: c.beta,
                median_length: c.median_length,
                median_convergence: c.median_convergence,
                seeds: c.runs.len(),
            })
            .collect()
    }
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::invalid(format!("{name} axis is empty")));
    }
    if axis.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(format!(
            "{name} axis must be strictly increasing"
        )));
    }
    Ok(())
}

/// Runs the colony for every `(α, β, seed)` and aggregates per cell.
///
/// The best cell minimises median path length, then median convergence
/// time, then α, then β.
pub fn sweep(
    g: &RoadmapGraph,
    base_cfg: &MmasConfig,
    alpha_values: &[f64],
    beta_values: &[f64],
    seeds: &[u64],
    opts: &RunOptions,
    roadmap: &str,
) -> Result<SweepGrid> {
    check_axis("alpha", alpha_values)?;
    check_axis("beta", beta_values)?;
    if seeds.is_empty() {
        return Err(Error::invalid("at least one seed is required"));
    }
    base_cfg.validate()?;
    let optimum = optimum_of(g)?;

    let mut tasks = Vec::with_capacity(alpha_values.len() * beta_values.len() * seeds.len());
    for &alpha in alpha_values {
        for &beta in beta_values {
            for &seed in seeds {
                tasks.push((alpha, beta, seed));
            }
        }
    }
    let summaries = par_map(&tasks, opts.jobs, |&(alpha, beta, seed)| {
        let cfg = MmasConfig {
            alpha,
            beta,
            ..base_cfg.clone()
        };
        let trace = mmas::run(g, &cfg, seed)?;
        Ok(RunSummary::from_trace(&trace, optimum, opts.tolerance))
    })?;

    let cells: Vec<SweepCell> = summaries
        .chunks(seeds.len())
        .zip(tasks.chunks(seeds.len()))
        .map(|(runs, t)| {
            SweepCell::aggregate(t[0].0, t[0].1, runs.to_vec(), base_cfg.max_iterations)
        })
        .collect();

    let best = (0..cells.len())
        .min_by(|&i, &j| {
            let (a, b) = (&cells[i], &cells[j]);
            a.median_length
                .total_cmp(&b.median_length)
                .then(a.median_convergence.total_cmp(&b.median_convergence))
                .then(a.alpha.total_cmp(&b.alpha))
                .then(a.beta.total_cmp(&b.beta))
        })
        .expect("grid is nonempty");

    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    Ok(SweepGrid {
        roadmap: roadmap.to_string(),
        alpha_values: alpha_values.to_vec(),
        beta_values: beta_values.to_vec(),
        seeds,
        optimum,
        cells,
        best,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRun {
    pub seed: u64,
    pub constant: RunTrace,
    pub exponential: RunTrace,
    pub constant_convergence: Option<usize>,
    pub exponential_convergence: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub median_convergence_constant: f64,
    pub median_convergence_exponential: f64,
    pub median_length_constant: f64,
    pub median_length_exponential: f64,
    /// Fraction of seeds converging within tolerance, per rule.
    pub success_rate_constant: f64,
    pub success_rate_exponential: f64,
    /// Fraction of seeds where the exponential rule converges in strictly
    /// fewer iterations (a converged run beats a non-converged one).
    pub fraction_exponential_faster: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub optimum: f64,
    pub tolerance: f64,
    pub runs: Vec<PairedRun>,
    pub summary: ComparisonSummary,
}

impl ComparisonReport {
    pub fn rows(&self) -> Vec<ComparisonRow> {
        let mut rows = Vec::with_capacity(self.runs.len() * 2);
        for r in &self.runs {
            rows.push(ComparisonRow {
                seed: r.seed,
                rule: "constant".into(),
                final_length: r.constant.best_length(),
                convergence_iter: r.constant_convergence,
            });
            rows.push(ComparisonRow {
                seed: r.seed,
                rule: "exponential".into(),
                final_length: r.exponential.best_length(),
                convergence_iter: r.exponential_convergence,
            });
        }
        rows
    }
}

/// Paired runs of two configurations that differ only in deposition rule.
pub fn compare_rules(
    g: &RoadmapGraph,
    cfg_constant: &MmasConfig,
    cfg_exponential: &MmasConfig,
    seeds: &[u64],
    opts: &RunOptions,
) -> Result<ComparisonReport> {
    if seeds.is_empty() {
        return Err(Error::invalid("at least one seed is required"));
    }
    let aligned = MmasConfig {
        deposition: cfg_constant.deposition,
        ..cfg_exponential.clone()
    };
    if &aligned != cfg_constant {
        return Err(Error::invalid(
            "compared configurations must differ only in deposition rule",
        ));
    }
    cfg_constant.validate()?;
    cfg_exponential.validate()?;
    let optimum = optimum_of(g)?;
    let tol = opts.tolerance;

    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let runs = par_map(&sorted, opts.jobs, |&seed| {
        let constant = mmas::run(g, cfg_constant, seed)?;
        let exponential = mmas::run(g, cfg_exponential, seed)?;
        Ok(PairedRun {
            seed,
            constant_convergence: convergence_time(&constant, optimum, tol),
            exponential_convergence: convergence_time(&exponential, optimum, tol),
            constant,
            exponential,
        })
    })?;

    let penalty = cfg_constant.max_iterations + 1;
    let conv = |c: Option<usize>| c.unwrap_or(penalty) as f64;
    let len = |t: &RunTrace| t.best_length().unwrap_or(f64::INFINITY);
    let n = runs.len() as f64;
    let summary = ComparisonSummary {
        median_convergence_constant: median(
            &runs
                .iter()
                .map(|r| conv(r.constant_convergence))
                .collect::<Vec<_>>(),
        ),
        median_convergence_exponential: median(
            &runs
                .iter()
                .map(|r| conv(r.exponential_convergence))
                .collect::<Vec<_>>(),
        ),
        median_length_constant: median(&runs.iter().map(|r| len(&r.constant)).collect::<Vec<_>>()),
        median_length_exponential: median(
            &runs.iter().map(|r| len(&r.exponential)).collect::<Vec<_>>(),
        ),
        success_rate_constant: runs
            .iter()
            .filter(|r| r.constant_convergence.is_some())
            .count() as f64
            / n,
        success_rate_exponential: runs
            .iter()
            .filter(|r| r.exponential_convergence.is_some())
            .count() as f64
            / n,
        fraction_exponential_faster: runs
            .iter()
            .filter(|r| conv(r.exponential_convergence) < conv(r.constant_convergence))
            .count() as f64
            / n,
    };

    Ok(ComparisonReport {
        optimum,
        tolerance: tol,
        runs,
        summary,
    })
}

/// Geometry and seeding of a multi-roadmap feature corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub city_counts: Vec<usize>,
    pub distributions_per_count: usize,
    pub width: f64,
    pub height: f64,
    pub connect_radius: f64,
    /// Roadmap `d` of count `c` uses seed `roadmap_seed + 1000·c + d`.
    pub roadmap_seed: u64,
}

impl Default for CorpusSpec {
    /// Seven city counts, seven roadmaps each, on a 20 × 10 area so that
    /// node density equals the city count. The radius gives a mean degree
    /// near 3.
    fn default() -> Self {
        Self {
            city_counts: vec![250, 265, 280, 295, 310, 325, 350],
            distributions_per_count: 7,
            width: 20.0,
            height: 10.0,
            connect_radius: 0.8,
            roadmap_seed: 1,
        }
    }
}

impl CorpusSpec {
    pub fn roadmap_spec(&self, cities: usize) -> RoadmapSpec {
        RoadmapSpec {
            cities,
            width: self.width,
            height: self.height,
            connect_radius: self.connect_radius,
        }
    }

    pub fn seed_for(&self, cities: usize, distribution: usize) -> u64 {
        self.roadmap_seed
            .wrapping_add(1000 * cities as u64)
            .wrapping_add(distribution as u64)
    }
}

/// Sweeps every roadmap of the corpus and records its features with the
/// best (α, β) found.
pub fn corpus_study(
    spec: &CorpusSpec,
    base_cfg: &MmasConfig,
    alpha_values: &[f64],
    beta_values: &[f64],
    seeds: &[u64],
    opts: &RunOptions,
) -> Result<Vec<CorpusRow>> {
    if spec.city_counts.is_empty() || spec.distributions_per_count == 0 {
        return Err(Error::invalid("corpus needs city counts and distributions"));
    }
    let mut rows = Vec::new();
    for &cities in &spec.city_counts {
        for d in 0..spec.distributions_per_count {
            let seed = spec.seed_for(cities, d);
            let g = spec.roadmap_spec(cities).generate(seed)?;
            let features = compute_features(&g)?;
            let label = format!("cities={cities},roadmap_seed={seed}");
            let grid = sweep(&g, base_cfg, alpha_values, beta_values, seeds, opts, &label)?;
            let best = grid.best_cell();
            rows.push(CorpusRow {
                cities,
                density: features.node_density,
                stddev: features.min_arc_stddev,
                best_alpha: best.alpha,
                best_beta: best.beta,
            });
        }
    }
    Ok(rows)
}

// ---- tabular output -------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub median_length: f64,
    pub median_convergence: f64,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub seed: u64,
    pub rule: String,
    pub final_length: Option<f64>,
    pub convergence_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub cities: usize,
    pub density: f64,
    pub stddev: f64,
    pub best_alpha: f64,
    pub best_beta: f64,
}

/// Rows that can be written to and read back from CSV.
pub trait CsvRow: Sized {
    const HEADER: &'static str;
    fn to_fields(&self) -> Vec<String>;
    fn from_fields(fields: &[&str]) -> std::result::Result<Self, String>;
}

fn opt_field<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("invalid number `{s}`"))
}

fn opt_num<T: std::str::FromStr>(s: &str) -> std::result::Result<Option<T>, String> {
    if s.is_empty() {
        Ok(None)
    } else {
        num(s).map(Some)
    }
}

impl CsvRow for SweepRow {
    const HEADER: &'static str = "alpha,beta,median_length,median_convergence,seeds";

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.alpha.to_string(),
            self.beta.to_string(),
            self.median_length.to_string(),
            self.median_convergence.to_string(),
            self.seeds.to_string(),
        ]
    }

    fn from_fields(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            alpha: num(f[0])?,
            beta: num(f[1])?,
            median_length: num(f[2])?,
            median_convergence: num(f[3])?,
            seeds: num(f[4])?,
        })
    }
}

impl CsvRow for ComparisonRow {
    const HEADER: &'static str = "seed,rule,final_length,convergence_iter";

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.rule.clone(),
            opt_field(&self.final_length),
            opt_field(&self.convergence_iter),
        ]
    }

    fn from_fields(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            seed: num(f[0])?,
            rule: f[1].to_string(),
            final_length: opt_num(f[2])?,
            convergence_iter: opt_num(f[3])?,
        })
    }
}

impl CsvRow for CorpusRow {
    const HEADER: &'static str = "cities,density,stddev,best_alpha,best_beta";

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.cities.to_string(),
            self.density.to_string(),
            self.stddev.to_string(),
            self.best_alpha.to_string(),
            self.best_beta.to_string(),
        ]
    }

    fn from_fields(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            cities: num(f[0])?,
            density: num(f[1])?,
            stddev: num(f[2])?,
            best_alpha: num(f[3])?,
            best_beta: num(f[4])?,
        })
    }
}

pub fn to_csv<R: CsvRow>(rows: &[R]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", R::HEADER);
    for r in rows {
        let _ = writeln!(out, "{}", r.to_fields().join(","));
    }
    out
}

pub fn from_csv<R: CsvRow>(text: &str) -> Result<Vec<R>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == R::HEADER => {}
        _ => return Err(Error::parse(1, format!("expected header `{}`", R::HEADER))),
    }
    let width = R::HEADER.split(',').count();
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != width {
            return Err(Error::parse(i + 1, format!("expected {width} fields")));
        }
        rows.push(R::from_fields(&fields).map_err(|m| Error::parse(i + 1, m))?);
    }
    Ok(rows)
}

pub fn to_json<R: Serialize>(rows: &[R]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)? + "\n")
}
