use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use gsvt::data::image::{mask_uniform, Image};
use gsvt::data::io::{read_matrix_csv, read_problem, write_matrix_csv};
use gsvt::data::metrics::{nmae, psnr_channels, rel_err};
use gsvt::data::movielens::load_movielens;
use gsvt::experiment::{LambdaSchedule, SyntheticExperiment};
use gsvt::solvers::solve;
use gsvt::{gsvt, prox, CompletionProblem, Error, FixedPointConfig, Matrix, Penalty, ProxOutcome, Result};

use crate::manifest::RunManifest;
use crate::{Cli, Command, Lambdas};

fn write_file(dir: &Path, name: &str, contents: impl AsRef<[u8]>, manifest: &mut RunManifest) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    manifest.outputs.push(name.to_string());
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

/// JSON numbers cannot be infinite; an exact reconstruction reports `"inf"`.
fn json_db(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

#[derive(Serialize)]
struct ProxLine {
    b: f64,
    #[serde(flatten)]
    outcome: ProxOutcome,
}

pub fn run(cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.out).map_err(|e| Error::Io(format!("{}: {e}", cli.out.display())))?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Prox { penalty, b } => {
            let pen: Penalty = penalty.parse()?;
            let cfg = FixedPointConfig::default();
            let mut manifest = RunManifest::new(
                "prox",
                cli.seed,
                json!({ "penalty": pen, "b": b, "fixed_point": cfg }),
            );
            let mut lines = String::new();
            for &v in b {
                let outcome = prox(&pen, v, &cfg)?;
                let _ = writeln!(lines, "{}", serde_json::to_string(&ProxLine { b: v, outcome }).unwrap());
            }
            print!("{lines}");
            write_file(out, "prox.jsonl", &lines, &mut manifest)?;
            manifest.write(out)?;
        }

        Command::Gsvt { penalty, input } => {
            let pen: Penalty = penalty.parse()?;
            let cfg = FixedPointConfig::default();
            let mut manifest = RunManifest::new("gsvt", cli.seed, json!({ "penalty": pen, "fixed_point": cfg }));
            manifest.add_input(input)?;
            let b = read_matrix_csv(input)?;
            let r = gsvt(&pen, &b, &cfg)?;
            write_matrix_csv(out.join("X.csv"), &r.x)?;
            manifest.outputs.push("X.csv".into());
            let summary = to_json(&json!({
                "input_sigma": r.input_sigma,
                "shrunk_sigma": r.shrunk_sigma,
            }));
            print!("{summary}");
            write_file(out, "gsvt.json", &summary, &mut manifest)?;
            manifest.write(out)?;
        }

        Command::Complete {
            omega,
            shape,
            truth,
            solver,
            solver_args,
        } => {
            let resolved = solver_args.resolve(LambdaSchedule::NOISE_FREE)?;
            let mut manifest = RunManifest::new(
                "complete",
                cli.seed,
                json!({ "solver": solver, "shape": shape, "resolved": resolved }),
            );
            manifest.add_input(omega)?;
            let problem = read_problem(omega, *shape)?;
            let truth = match truth {
                Some(p) => {
                    manifest.add_input(p)?;
                    Some(read_matrix_csv(p)?)
                }
                None => None,
            };
            let config = resolved.config(&problem)?;
            let (x, trace) = solve(*solver, &problem, &config, None, truth.as_ref())?;
            write_matrix_csv(out.join("X.csv"), &x)?;
            manifest.outputs.push("X.csv".into());
            let mut lines = String::new();
            for rec in trace.records() {
                let _ = writeln!(lines, "{}", serde_json::to_string(&rec).unwrap());
            }
            write_file(out, "trace.jsonl", &lines, &mut manifest)?;
            let summary = to_json(&json!({
                "solver": solver,
                "shape": problem.shape(),
                "observed": problem.len(),
                "lambda0": config.lambda0,
                "lambda_target": config.lambda_target,
                "iterations": trace.iterations,
                "converged": trace.converged,
                "final_objective": trace.objective.last(),
                "final_step_norm": trace.final_step_norm(),
                "rel_err": trace.rel_err.as_ref().and_then(|r| r.last()),
            }));
            print!("{summary}");
            write_file(out, "summary.json", &summary, &mut manifest)?;
            manifest.write(out)?;
        }

        Command::BenchSynthetic {
            m,
            n,
            ranks,
            observe,
            noise,
            seeds,
            solver,
            success_threshold,
            solver_args,
        } => {
            let default = if *noise > 0.0 {
                LambdaSchedule::NOISY
            } else {
                LambdaSchedule::NOISE_FREE
            };
            let resolved = solver_args.resolve(default)?;
            let Lambdas::Relative(schedule) = resolved.lambdas else {
                return Err(Error::InvalidParameter(
                    "bench-synthetic sets λ per instance; use --lambda0-factor and --target-ratio".into(),
                ));
            };
            let exp = SyntheticExperiment {
                m: *m,
                n: n.unwrap_or(*m),
                ranks: ranks.clone(),
                observe_fraction: *observe,
                noise_sigma: *noise,
                seeds: *seeds,
                master_seed: cli.seed,
                solvers: solver.clone(),
                schedule,
                settings: resolved.settings,
                success_threshold: *success_threshold,
            };
            let mut manifest = RunManifest::new("bench-synthetic", cli.seed, json!({ "experiment": exp, "jobs": cli.jobs }));
            let res = exp.run(cli.jobs)?;
            write_file(out, "records.csv", res.records_csv(), &mut manifest)?;
            write_file(out, "aggregate.json", to_json(&res.aggregates), &mut manifest)?;
            println!("solver,rank,trials,fos,mean_rel_err");
            for a in &res.aggregates {
                println!("{},{},{},{},{:e}", a.solver, a.rank, a.trials, a.fos, a.mean_rel_err);
            }
            manifest.write(out)?;
        }

        Command::Inpaint {
            image,
            missing,
            solver,
            solver_args,
        } => {
            let resolved = solver_args.resolve(LambdaSchedule::NOISY)?;
            let mut manifest = RunManifest::new(
                "inpaint",
                cli.seed,
                json!({ "missing": missing, "solver": solver, "resolved": resolved }),
            );
            manifest.add_input(image)?;
            let img = Image::load(image)?;
            let report = inpaint(&img, *missing, cli.seed, *solver, &resolved)?;
            report.recovered.save(out.join("recovered.ppm"))?;
            report.masked.save(out.join("masked.ppm"))?;
            manifest.outputs.extend(["recovered.ppm".to_string(), "masked.ppm".to_string()]);
            let metrics = to_json(&json!({
                "psnr": json_db(report.psnr),
                "rel_err": report.rel_err,
                "observed_pixels": report.observed,
                "channels": img.channels.len(),
                "iterations": report.iterations,
            }));
            print!("{metrics}");
            write_file(out, "metrics.json", &metrics, &mut manifest)?;
            manifest.write(out)?;
        }

        Command::Movielens {
            ratings,
            holdout,
            solver,
            solver_args,
        } => {
            let resolved = solver_args.resolve(LambdaSchedule::NOISY)?;
            let mut manifest = RunManifest::new(
                "movielens",
                cli.seed,
                json!({ "holdout": holdout, "solver": solver, "resolved": resolved }),
            );
            manifest.add_input(ratings)?;
            let split = load_movielens(ratings, *holdout, cli.seed)?;
            if split.duplicates > 0 {
                eprintln!("gsvt: warning: {} duplicate ratings, last one kept", split.duplicates);
            }
            let config = resolved.config(&split.train)?;
            let (x, trace) = solve(*solver, &split.train, &config, None, None)?;
            let (on, value) = if split.test_omega.is_empty() {
                ("train", nmae(&x, split.train.observed(), split.train.omega())?)
            } else {
                ("test", nmae(&x, &split.test_values, &split.test_omega)?)
            };
            let summary = to_json(&json!({
                "solver": solver,
                "nmae": value,
                "evaluated_on": on,
                "shape": split.train.shape(),
                "train_ratings": split.train.len(),
                "test_ratings": split.test_omega.len(),
                "duplicates": split.duplicates,
                "iterations": trace.iterations,
                "converged": trace.converged,
            }));
            print!("{summary}");
            write_file(out, "nmae.json", &summary, &mut manifest)?;
            manifest.write(out)?;
        }
    }
    Ok(())
}

pub struct InpaintReport {
    pub recovered: Image,
    pub masked: Image,
    pub psnr: f64,
    pub rel_err: f64,
    pub observed: usize,
    pub iterations: Vec<usize>,
}

/// Drops the same pixels from every channel, completes each channel
/// independently and keeps the observed pixels as given.
pub fn inpaint(
    img: &Image,
    missing: f64,
    seed: u64,
    solver: gsvt::SolverKind,
    resolved: &crate::Resolved,
) -> Result<InpaintReport> {
    let shape = (img.height, img.width);
    let omega = mask_uniform(shape, missing, seed)?;
    let mut observed = Matrix::zeros(shape.0, shape.1);
    for &(i, j) in &omega {
        observed[(i, j)] = 1.0;
    }
    let mut recovered = Vec::new();
    let mut masked = Vec::new();
    let mut iterations = Vec::new();
    for ch in &img.channels {
        let values = omega.iter().map(|&ij| ch[ij]).collect();
        let problem = CompletionProblem::new(shape, omega.clone(), values)?;
        let config = resolved.config(&problem)?;
        let (x, trace) = solve(solver, &problem, &config, None, None)?;
        iterations.push(trace.iterations);
        let filled = Matrix::from_fn(shape.0, shape.1, |i, j| {
            if observed[(i, j)] == 1.0 {
                ch[(i, j)]
            } else {
                x[(i, j)].clamp(0.0, 255.0)
            }
        });
        recovered.push(filled);
        masked.push(ch.component_mul(&observed));
    }
    let psnr = psnr_channels(&img.channels, &recovered)?;
    let stack = |chs: &[Matrix]| {
        Matrix::from_fn(shape.0, shape.1 * chs.len(), |i, j| chs[j / shape.1][(i, j % shape.1)])
    };
    let rel = rel_err(&stack(&recovered), &stack(&img.channels))?;
    Ok(InpaintReport {
        recovered: Image::from_channels(recovered)?,
        masked: Image::from_channels(masked)?,
        psnr,
        rel_err: rel,
        observed: omega.len(),
        iterations,
    })
}
