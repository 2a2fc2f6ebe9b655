//! Acceptance criteria 1-7. Prints one PASS/FAIL line per criterion.
//!
//! Criterion 6 is reported but does not affect the exit status unless
//! `ACCEPTANCE_STRICT=1` is set.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use antpath_core::dynamics::{self, DynamicsParams, Rule, Stability};
use antpath_core::harness::{self, ComparisonReport, RunOptions};
use antpath_core::mmas::{
    self, Deposition, MmasConfig, RunObserver, TrailState, TransitionDistribution,
};
use antpath_core::predictor::{self, FitModel, ALPHA_COEFFICIENTS, BETA_COEFFICIENTS};
use antpath_core::roadmap::{generate_roadmap, RoadmapGraph};
use antpath_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---- criterion 1 ----------------------------------------------------------

fn steady_state_agreement() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for rho in [0.05, 0.1, 0.5] {
        for deposits in [vec![1.0], vec![1.0, 2.0, 3.0]] {
            for tc in [4.0, 15.0] {
                let p = DynamicsParams::new(0.0, rho, Some(tc), deposits.clone()).unwrap();
                let ss = dynamics::steady_state(&p).unwrap();
                // at least 20/ρ steps, and long enough for e^{-t/T} to vanish
                let steps = (20.0 / rho).max(30.0 * tc).ceil() as usize;
                for rule in [Rule::Constant, Rule::Exponential] {
                    let trace = dynamics::discrete_trace(&p, rule, steps).unwrap();
                    let last = *trace.last().unwrap();
                    worst = worst.max((last - ss).abs() / ss);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && elapsed < Duration::from_secs(1),
        format!("max relative gap {worst:.3e}, {elapsed:.2?}"),
    )
}

// ---- criterion 2 ----------------------------------------------------------

fn forcing(p: &DynamicsParams, rule: Rule, t: f64) -> f64 {
    let c: f64 = p.deposits.iter().sum();
    match rule {
        Rule::Constant => c,
        Rule::Exponential => c * (1.0 - (-(t + 1.0) / p.time_constant.unwrap()).exp()),
    }
}

fn closed_form_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut t0_exact = true;
    let mut worst = 0.0f64;
    let mut sets = 0;
    let h = 1e-4;
    while sets < 10 {
        let rho: f64 = rng.random_range(0.01..0.9);
        let tc: f64 = rng.random_range(1.0..50.0);
        if (rho - 1.0 / tc).abs() < 0.01 {
            continue;
        }
        let ants = rng.random_range(1..=3);
        let deposits: Vec<f64> = (0..ants).map(|_| rng.random_range(0.0..3.0)).collect();
        let tau0 = rng.random_range(0.0..10.0);
        let p = DynamicsParams::new(tau0, rho, Some(tc), deposits).unwrap();
        assert_eq!(
            dynamics::stability_verdict(rho, Some(tc)),
            Stability::Stable
        );
        for rule in [Rule::Constant, Rule::Exponential] {
            t0_exact &= dynamics::closed_form(&p, rule, 0.0).unwrap() == tau0;
            for _ in 0..100 {
                let t = rng.random_range(h..100.0);
                let f = |s: f64| dynamics::closed_form(&p, rule, s).unwrap();
                let derivative = (f(t + h) - f(t - h)) / (2.0 * h);
                let residual = derivative + rho * f(t) - forcing(&p, rule, t);
                worst = worst.max(residual.abs());
            }
        }
        sets += 1;
    }
    let p = DynamicsParams::new(0.0, 0.25, Some(4.0), vec![1.0]).unwrap();
    let singular = matches!(
        dynamics::closed_form(&p, Rule::Exponential, 3.0),
        Err(Error::SingularParameters { .. })
    ) && dynamics::stability_verdict(0.25, Some(4.0)) == Stability::Singular;
    let elapsed = start.elapsed();
    outcome(
        t0_exact && worst <= 1e-6 && singular && elapsed < Duration::from_secs(1),
        format!(
            "t=0 exact {t0_exact}, max ODE residual {worst:.3e}, singular rejected {singular}, {elapsed:.2?}"
        ),
    )
}

// ---- criterion 3 ----------------------------------------------------------

fn continuous_discrete_consistency() -> Outcome {
    let mut worst = 0.0f64;
    let mut limits_equal = true;
    for rho in [0.01, 0.05, 0.1] {
        for deposits in [vec![1.0], vec![1.0, 2.0, 3.0]] {
            for tc in [4.0, 15.0] {
                for tau0 in [0.0, 5.0] {
                    let p = DynamicsParams::new(tau0, rho, Some(tc), deposits.clone()).unwrap();
                    let ss = dynamics::steady_state(&p).unwrap();
                    let steps = (40.0 / rho).max(40.0 * tc).ceil() as usize;
                    for rule in [Rule::Constant, Rule::Exponential] {
                        let trace = dynamics::discrete_trace(&p, rule, steps).unwrap();
                        for (i, d) in trace.iter().enumerate() {
                            let c = dynamics::closed_form(&p, rule, (i + 1) as f64).unwrap();
                            worst = worst.max((d - c).abs() / ss);
                        }
                        let last_closed = dynamics::closed_form(&p, rule, steps as f64).unwrap();
                        let last_discrete = *trace.last().unwrap();
                        limits_equal &= (last_closed - ss).abs() / ss <= 1e-6
                            && (last_discrete - ss).abs() / ss <= 1e-6;
                    }
                }
            }
        }
    }
    outcome(
        worst <= 0.05 && limits_equal,
        format!("max |discrete - closed| / steady_state {worst:.4}, limits equal {limits_equal}"),
    )
}

// ---- criterion 4 ----------------------------------------------------------

#[derive(Default)]
struct Checker {
    distributions: usize,
    worst_sum_error: f64,
    trail_checks: usize,
    bound_violations: usize,
}

impl RunObserver for Checker {
    fn on_distribution(&mut self, dist: &TransitionDistribution) {
        self.distributions += 1;
        let sum: f64 = dist.moves().iter().map(|m| m.probability).sum();
        self.worst_sum_error = self.worst_sum_error.max((sum - 1.0).abs());
    }

    fn on_trails(&mut self, trails: &TrailState) {
        self.trail_checks += 1;
        let (lo, hi) = trails.bounds();
        self.bound_violations += trails
            .values()
            .iter()
            .filter(|&&v| v < lo || v > hi)
            .count();
    }
}

fn mmas_properties() -> Outcome {
    let start = Instant::now();
    let g = generate_roadmap(100, 100.0, 100.0, 10.0, 1).unwrap();
    let mut checker = Checker::default();
    let mut monotone = true;
    for seed in 1..=3 {
        for deposition in [Deposition::Constant, Deposition::exponential(15.0)] {
            let cfg = MmasConfig {
                deposition,
                max_iterations: 200,
                ..MmasConfig::default()
            };
            let trace = mmas::run_observed(&g, &cfg, seed, &mut checker).unwrap();
            monotone &= trace.records.len() == 200;
            let best: Vec<f64> = trace.records.iter().filter_map(|r| r.best_so_far).collect();
            monotone &= best.windows(2).all(|w| w[1] <= w[0]);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        checker.worst_sum_error <= 1e-12
            && checker.bound_violations == 0
            && checker.trail_checks > 0
            && monotone
            && elapsed < Duration::from_secs(30),
        format!(
            "{} distributions (max |sum-1| {:.1e}), {} trail snapshots with {} out of bounds, best-so-far non-increasing {monotone}, {elapsed:.2?}",
            checker.distributions, checker.worst_sum_error, checker.trail_checks, checker.bound_violations
        ),
    )
}

// ---- criteria 5 and 6 -----------------------------------------------------

const ROADMAP_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const RUN_SEEDS: std::ops::RangeInclusive<u64> = 1..=20;

fn quality_roadmaps() -> Vec<RoadmapGraph> {
    ROADMAP_SEEDS
        .iter()
        .map(|&s| generate_roadmap(100, 100.0, 100.0, 10.0, s).unwrap())
        .collect()
}

fn quality_configs() -> (MmasConfig, MmasConfig) {
    let exponential = MmasConfig {
        alpha: 0.5,
        beta: 2.5,
        rho: 0.1,
        deposition: Deposition::exponential(15.0),
        ..MmasConfig::default()
    };
    let constant = MmasConfig {
        deposition: Deposition::Constant,
        ..exponential.clone()
    };
    (constant, exponential)
}

fn run_comparisons() -> (Vec<ComparisonReport>, Duration) {
    let start = Instant::now();
    let (constant, exponential) = quality_configs();
    let seeds: Vec<u64> = RUN_SEEDS.collect();
    let opts = RunOptions {
        tolerance: 0.01,
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let reports = quality_roadmaps()
        .iter()
        .map(|g| harness::compare_rules(g, &constant, &exponential, &seeds, &opts).unwrap())
        .collect();
    (reports, start.elapsed())
}

fn solution_quality(reports: &[ComparisonReport], elapsed: Duration) -> Outcome {
    let mut within = 0;
    let mut total = 0;
    for r in reports {
        for run in &r.runs {
            total += 1;
            if let Some(len) = run.exponential.best_length() {
                if len <= 1.05 * r.optimum {
                    within += 1;
                }
            }
        }
    }
    let rate = within as f64 / total as f64;
    outcome(
        rate >= 0.9 && elapsed < Duration::from_secs(600),
        format!(
            "{within}/{total} exponential runs within 5% of optimum ({rate:.2}), {elapsed:.2?}"
        ),
    )
}

fn rule_comparison(reports: &[ComparisonReport]) -> Outcome {
    let (constant, _) = quality_configs();
    let penalty = (constant.max_iterations + 1) as f64;
    let conv = |c: Option<usize>| c.map_or(penalty, |v| v as f64);
    let mut c_times = Vec::new();
    let mut e_times = Vec::new();
    let mut faster = 0;
    for r in reports {
        for run in &r.runs {
            let (c, e) = (
                conv(run.constant_convergence),
                conv(run.exponential_convergence),
            );
            c_times.push(c);
            e_times.push(e);
            if e < c {
                faster += 1;
            }
        }
    }
    let median_c = harness::median(&c_times);
    let median_e = harness::median(&e_times);
    let fraction = faster as f64 / c_times.len() as f64;
    outcome(
        median_e <= median_c && fraction >= 0.5,
        format!(
            "median convergence exponential {median_e} vs constant {median_c}, exponential strictly faster on {fraction:.2} of pairs"
        ),
    )
}

// ---- criterion 7 ----------------------------------------------------------

/// Term order of the printed order-6 expansions as (x degree, y degree).
const TERMS: [(usize, usize); 28] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 4),
    (5, 0),
    (4, 1),
    (3, 2),
    (2, 3),
    (1, 4),
    (0, 5),
    (6, 0),
    (5, 1),
    (4, 2),
    (3, 3),
    (2, 4),
    (1, 5),
    (0, 6),
];

/// Chebyshev polynomials in power form.
fn chebyshev_poly(n: usize, x: f64) -> f64 {
    let x2 = x * x;
    match n {
        0 => 1.0,
        1 => x,
        2 => 2.0 * x2 - 1.0,
        3 => 4.0 * x2 * x - 3.0 * x,
        4 => 8.0 * x2 * x2 - 8.0 * x2 + 1.0,
        5 => 16.0 * x2 * x2 * x - 20.0 * x2 * x + 5.0 * x,
        6 => 32.0 * x2 * x2 * x2 - 48.0 * x2 * x2 + 18.0 * x2 - 1.0,
        _ => unreachable!(),
    }
}

fn sigmoid_term(i: usize, x: f64) -> f64 {
    match i {
        0 => 1.0,
        1 => x,
        _ => {
            (1.0 - (-(x + 1.0 - (i as f64 - 1.0) / 3.0) / 0.12).exp())
                / (1.0 + (-(x + 1.0 - (i as f64 - 1.0) / 3.0) / 0.12).exp())
        }
    }
}

fn enumerate(coefficients: &[f64; 28], basis: fn(usize, f64) -> f64, xp: f64, yp: f64) -> f64 {
    TERMS
        .iter()
        .zip(coefficients)
        .map(|(&(dx, dy), c)| c * basis(dx, xp) * basis(dy, yp))
        .sum()
}

fn coefficient_digest() -> String {
    let mut text = String::new();
    for (name, table) in [("alpha", &ALPHA_COEFFICIENTS), ("beta", &BETA_COEFFICIENTS)] {
        for (k, v) in predictor::COEFFICIENT_NAMES.iter().zip(table.iter()) {
            text.push_str(&format!("{name}.{k}={v}\n"));
        }
    }
    hex::encode(Sha256::digest(text.as_bytes()))
}

const COEFFICIENT_SHA256: &str = "397436e7bf146f713483b25e717f55dc9a155b7056b1241db04a826d91201d23";

fn predictor_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alpha = FitModel::alpha();
    let beta = FitModel::beta();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let xp = rng.random_range(-1.0..=1.0);
        let yp = rng.random_range(-1.0..=1.0);
        let a = alpha.evaluate_scaled(xp, yp).unwrap();
        let b = beta.evaluate_scaled(xp, yp).unwrap();
        worst = worst.max((a - enumerate(&ALPHA_COEFFICIENTS, chebyshev_poly, xp, yp)).abs());
        worst = worst.max((b - enumerate(&BETA_COEFFICIENTS, sigmoid_term, xp, yp)).abs());
    }

    let mut recurrence = 0.0f64;
    let mut sigmoid_ok = true;
    for k in 0..=200 {
        let x = -1.0 + 2.0 * k as f64 / 200.0;
        for n in 1..6 {
            let lhs = predictor::chebyshev_basis(n + 1, x).unwrap();
            let rhs = 2.0 * x * predictor::chebyshev_basis(n, x).unwrap()
                - predictor::chebyshev_basis(n - 1, x).unwrap();
            recurrence = recurrence.max((lhs - rhs).abs());
        }
        let x_next = x + 0.01;
        for i in 1..=6 {
            let s = predictor::sigmoid_basis(i, 6, x).unwrap();
            let s_next = predictor::sigmoid_basis(i, 6, x_next.min(1.0)).unwrap();
            sigmoid_ok &= (-1.0..=1.0).contains(&s) && s_next >= s;
        }
    }
    let digest = coefficient_digest();
    let checksum = digest == COEFFICIENT_SHA256;
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9
            && recurrence <= 1e-12
            && sigmoid_ok
            && checksum
            && elapsed < Duration::from_secs(1),
        format!(
            "max enumerator gap {worst:.2e}, recurrence gap {recurrence:.2e}, sigmoid monotone and bounded {sigmoid_ok}, checksum {}, {elapsed:.2?}",
            if checksum { "ok".to_string() } else { format!("mismatch {digest}") }
        ),
    )
}

fn main() -> ExitCode {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut results: Vec<(u32, Outcome, bool)> = vec![
        (1, steady_state_agreement(), true),
        (2, closed_form_correctness(), true),
        (3, continuous_discrete_consistency(), true),
        (4, mmas_properties(), true),
    ];
    let (reports, elapsed) = run_comparisons();
    results.push((5, solution_quality(&reports, elapsed), true));
    results.push((6, rule_comparison(&reports), strict));
    results.push((7, predictor_fidelity(), true));

    let mut failed = false;
    for (n, o, counts) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if !counts { " (reported only)" } else { "" };
        println!("criterion {n}: {verdict}{note} - {}", o.detail);
        failed |= !o.pass && *counts;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
