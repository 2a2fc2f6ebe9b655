//! `antpath` command-line frontend.

mod args;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use antpath_core::dynamics::{self, DynamicsParams, Rule};
use antpath_core::harness::{self, CorpusSpec, RunOptions};
use antpath_core::mmas::{self, Deposition, MmasConfig};
use antpath_core::predictor::{self, FitModel, Predictor, Scaling, XSource};
use antpath_core::roadmap::{self, compute_features};
use antpath_core::{oracle, Error};
use clap::Parser;

use args::{
    Cli, Command, CompareArgs, CorpusArgs, DynamicsArgs, Format, GenerateArgs, PredictArgs,
    RuleArg, SolveArgs, SweepArgs, XSourceArg,
};

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 on --help
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Dynamics(a) => run_dynamics(a),
        Command::Sweep(a) => sweep(a),
        Command::Compare(a) => compare(a),
        Command::Corpus(a) => corpus(a),
        Command::Predict(a) => predict(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render<R: harness::CsvRow + serde::Serialize>(
    rows: &[R],
    format: Format,
) -> Result<String, Error> {
    match format {
        Format::Csv => Ok(harness::to_csv(rows)),
        Format::Json => harness::to_json(rows),
    }
}

fn generate(a: GenerateArgs) -> Result<(), Error> {
    let g = roadmap::generate_roadmap(a.cities, a.width, a.height, a.connect_radius, a.seed)?;
    emit(a.out.as_deref(), &roadmap::format_roadmap(&g))
}

fn solve(a: SolveArgs) -> Result<(), Error> {
    let g = roadmap::load_roadmap(&a.roadmap)?;
    let cfg = a.mmas.resolve()?;
    let trace = mmas::run(&g, &cfg, a.seed)?;
    let optimum = oracle::shortest_path(&g, g.source(), g.destination())?;
    if let Some(path) = &a.trace {
        fs::write(path, trace.to_csv())?;
    }

    let mut s = String::new();
    let _ = writeln!(s, "seed={}", a.seed);
    let _ = writeln!(s, "optimum={}", optimum.length);
    match &trace.best {
        Some(best) => {
            let path: Vec<String> = best.nodes.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "best_length={}", best.length);
            let _ = writeln!(s, "relative_gap={}", best.length / optimum.length - 1.0);
            let _ = writeln!(s, "path={}", path.join(" "));
        }
        None => {
            let _ = writeln!(s, "best_length=");
        }
    }
    match harness::convergence_time(&trace, optimum.length, a.tolerance) {
        Some(it) => {
            let _ = writeln!(s, "convergence_iter={it}");
        }
        None => {
            let _ = writeln!(s, "convergence_iter=");
        }
    }
    emit(a.out.as_deref(), &s)
}

fn run_dynamics(a: DynamicsArgs) -> Result<(), Error> {
    let rule = match a.rule {
        Some(RuleArg::Constant) => Rule::Constant,
        Some(RuleArg::Exponential) => Rule::Exponential,
        None if a.time_constant.is_some() => Rule::Exponential,
        None => Rule::Constant,
    };
    let params = DynamicsParams::new(a.tau0, a.rho, a.time_constant, a.deposits.clone())?;
    // surface resonance before producing any output
    dynamics::closed_form(&params, rule, 0.0)?;
    let trace = dynamics::discrete_trace(&params, rule, a.steps)?;

    let mut s = String::from("t,discrete,closed_form\n");
    let _ = writeln!(
        s,
        "0,{},{}",
        params.tau0,
        dynamics::closed_form(&params, rule, 0.0)?
    );
    for (i, v) in trace.iter().enumerate() {
        let t = (i + 1) as f64;
        let _ = writeln!(
            s,
            "{},{},{}",
            i + 1,
            v,
            dynamics::closed_form(&params, rule, t)?
        );
    }
    emit(a.out.as_deref(), &s)
}

fn sweep(a: SweepArgs) -> Result<(), Error> {
    let g = roadmap::load_roadmap(&a.roadmap)?;
    let cfg = a.mmas.resolve()?;
    let opts = RunOptions {
        tolerance: a.runs.tolerance,
        jobs: a.runs.jobs,
    };
    let label = a.roadmap.display().to_string();
    let grid = harness::sweep(
        &g,
        &cfg,
        &a.alphas,
        &a.betas,
        &a.runs.seeds(),
        &opts,
        &label,
    )?;
    emit(a.out.as_deref(), &render(&grid.rows(), a.format)?)
}

fn compare(a: CompareArgs) -> Result<(), Error> {
    let g = roadmap::load_roadmap(&a.roadmap)?;
    let mut exponential = a.mmas.resolve()?;
    if exponential.deposition == Deposition::Constant {
        exponential.deposition = MmasConfig::default().deposition;
    }
    let constant = MmasConfig {
        deposition: Deposition::Constant,
        ..exponential.clone()
    };
    let opts = RunOptions {
        tolerance: a.runs.tolerance,
        jobs: a.runs.jobs,
    };
    let report = harness::compare_rules(&g, &constant, &exponential, &a.runs.seeds(), &opts)?;
    emit(a.out.as_deref(), &render(&report.rows(), a.format)?)?;
    if let Some(path) = &a.summary {
        fs::write(path, serde_json::to_string_pretty(&report.summary)? + "\n")?;
    }
    Ok(())
}

fn corpus(a: CorpusArgs) -> Result<(), Error> {
    let cfg = a.mmas.resolve()?;
    let spec = CorpusSpec {
        city_counts: a.cities.clone(),
        distributions_per_count: a.distributions,
        width: a.width,
        height: a.height,
        connect_radius: a.connect_radius,
        roadmap_seed: a.roadmap_seed,
    };
    let opts = RunOptions {
        tolerance: a.runs.tolerance,
        jobs: a.runs.jobs,
    };
    let rows = harness::corpus_study(&spec, &cfg, &a.alphas, &a.betas, &a.runs.seeds(), &opts)?;
    emit(a.out.as_deref(), &render(&rows, a.format)?)
}

fn predict(a: PredictArgs) -> Result<(), Error> {
    let mut alpha_model = match &a.alpha_model {
        Some(p) => FitModel::load(p, &FitModel::alpha())?,
        None => FitModel::alpha(),
    };
    let mut beta_model = match &a.beta_model {
        Some(p) => FitModel::load(p, &FitModel::beta())?,
        None => FitModel::beta(),
    };
    if let Some(r) = &a.x_range {
        let x = Scaling::new(r[0], r[1])?;
        alpha_model = alpha_model.clone().with_domains(x, alpha_model.y_scaling)?;
        beta_model = beta_model.clone().with_domains(x, beta_model.y_scaling)?;
    }
    if let Some(r) = &a.y_range {
        let y = Scaling::new(r[0], r[1])?;
        alpha_model = alpha_model.clone().with_domains(alpha_model.x_scaling, y)?;
        beta_model = beta_model.clone().with_domains(beta_model.x_scaling, y)?;
    }

    let (x_source, rec) = match (&a.roadmap, a.x, a.y) {
        (Some(path), None, None) => {
            let g = roadmap::load_roadmap(path)?;
            let x_source = match a.x_source {
                XSourceArg::Density => XSource::NodeDensity,
                XSourceArg::Count => XSource::CityCount {
                    area: g.width() * g.height(),
                },
            };
            let p = Predictor {
                alpha_model,
                beta_model,
                x_source,
            };
            let features = compute_features(&g)?;
            (
                Some(x_source),
                predictor::recommend_parameters(&p, &features)?,
            )
        }
        (None, Some(x), Some(y)) => {
            let p = Predictor {
                alpha_model,
                beta_model,
                x_source: XSource::NodeDensity,
            };
            (None, p.recommend_xy(x, y)?)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "give either --roadmap or both --x and --y".into(),
            ))
        }
    };

    let p_alpha = &rec.alpha_fit;
    let p_beta = &rec.beta_fit;
    let mut s = String::new();
    if let Some(src) = x_source {
        let name = match src {
            XSource::NodeDensity => "density",
            XSource::CityCount { .. } => "count",
        };
        let _ = writeln!(s, "x_source={name}");
    }
    let _ = writeln!(s, "x={}", rec.x);
    let _ = writeln!(s, "y={}", rec.y);
    let _ = writeln!(s, "alpha={}", rec.alpha);
    let _ = writeln!(s, "beta={}", rec.beta);
    let _ = writeln!(s, "alpha_x_scaled={}", p_alpha.x_scaled);
    let _ = writeln!(s, "alpha_y_scaled={}", p_alpha.y_scaled);
    let _ = writeln!(s, "beta_x_scaled={}", p_beta.x_scaled);
    let _ = writeln!(s, "beta_y_scaled={}", p_beta.y_scaled);
    let _ = writeln!(s, "x_out_of_domain={}", p_alpha.x_out_of_domain);
    let _ = writeln!(
        s,
        "y_out_of_domain={}",
        p_alpha.y_out_of_domain || p_beta.y_out_of_domain
    );
    emit(a.out.as_deref(), &s)
}
