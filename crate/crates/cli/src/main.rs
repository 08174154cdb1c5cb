use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gsvt::experiment::{LambdaSchedule, SolverSettings};
use gsvt::{Error, Penalty, SolverKind};

mod commands;
mod manifest;

#[derive(Parser, Debug)]
#[command(name = "gsvt", version, about = "Scalar prox, generalized singular value thresholding and nonconvex matrix completion")]
struct Cli {
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for independent benchmark trials.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output directory; receives `manifest.json` and the result files.
    #[arg(long, global = true, default_value = "gsvt-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scalar prox `argmin_{x≥0} g(x) + ½(x−b)²` for each `b`.
    Prox {
        /// Penalty, e.g. `logarithm:lambda=1,gamma=1.5`.
        penalty: String,
        #[arg(required = true)]
        b: Vec<f64>,
    },
    /// Applies the GSVT operator to a dense CSV matrix.
    Gsvt {
        #[arg(long)]
        penalty: String,
        #[arg(long)]
        input: PathBuf,
    },
    /// Completes a matrix from `row,col,value` observations.
    Complete {
        #[arg(long)]
        omega: PathBuf,
        /// `m,n`; defaults to one past the largest observed indices.
        #[arg(long, value_parser = parse_shape)]
        shape: Option<(usize, usize)>,
        /// Dense CSV ground truth for per-iteration relative error.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value = "gpg")]
        solver: SolverKind,
        #[command(flatten)]
        solver_args: SolverArgs,
    },
    /// Seeded recovery sweep on synthetic low-rank matrices.
    BenchSynthetic {
        #[arg(long, default_value_t = 150)]
        m: usize,
        /// Defaults to `m`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        observe: f64,
        /// Scale of the additive Gaussian noise on observations.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, value_delimiter = ',', default_value = "gpg,irnn,convex")]
        solver: Vec<SolverKind>,
        #[arg(long, default_value_t = gsvt::experiment::SUCCESS_THRESHOLD)]
        success_threshold: f64,
        #[command(flatten)]
        solver_args: SolverArgs,
    },
    /// Per-channel completion of a PPM/PGM image with pixels removed.
    Inpaint {
        #[arg(long)]
        image: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        missing: f64,
        #[arg(long, default_value = "gpg")]
        solver: SolverKind,
        #[command(flatten)]
        solver_args: SolverArgs,
    },
    /// NMAE of a completion on held-out MovieLens ratings.
    Movielens {
        #[arg(long)]
        ratings: PathBuf,
        /// Fraction of ratings held out; 0 evaluates on the training set.
        #[arg(long, default_value_t = 0.2)]
        holdout: f64,
        #[arg(long, default_value = "gpg")]
        solver: SolverKind,
        #[command(flatten)]
        solver_args: SolverArgs,
    },
}

/// Solver flags shared by the completion subcommands. Unset values fall
/// back to the library defaults, which the manifest records.
#[derive(Args, Debug, Clone, Serialize)]
struct SolverArgs {
    /// Penalty family and shape; `lambda` is set by the schedule.
    #[arg(long, default_value = "logarithm:gamma=1.5")]
    penalty: String,
    #[arg(long)]
    mu: Option<f64>,
    /// Absolute initial λ; overrides `--lambda0-factor`.
    #[arg(long)]
    lambda0: Option<f64>,
    /// Absolute final λ; overrides `--target-ratio`.
    #[arg(long)]
    lambda_target: Option<f64>,
    /// `λ₀ = factor · max|observed|`.
    #[arg(long)]
    lambda0_factor: Option<f64>,
    /// `λ_t = ratio · λ₀`.
    #[arg(long)]
    target_ratio: Option<f64>,
    #[arg(long)]
    decay: Option<f64>,
    /// Cap on outer (λ-level) iterations.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Proximal steps per λ level.
    #[arg(long)]
    inner_iters: Option<usize>,
    /// Relative step tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

/// `λ` choice resolved against the data.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum Lambdas {
    Relative(LambdaSchedule),
    Absolute { lambda0: f64, lambda_target: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Resolved {
    pub settings: SolverSettings,
    pub lambdas: Lambdas,
}

impl Resolved {
    pub fn config(&self, problem: &gsvt::CompletionProblem) -> gsvt::Result<gsvt::SolverConfig> {
        match self.lambdas {
            Lambdas::Relative(s) => self.settings.config_for(problem, &s),
            Lambdas::Absolute {
                lambda0,
                lambda_target,
            } => self.settings.config(lambda0, lambda_target),
        }
    }
}

impl SolverArgs {
    fn resolve(&self, default_schedule: LambdaSchedule) -> gsvt::Result<Resolved> {
        let penalty = parse_shape_penalty(&self.penalty)?;
        let d = SolverSettings::new(penalty);
        let settings = SolverSettings {
            penalty,
            mu: self.mu.unwrap_or(d.mu),
            decay: self.decay.unwrap_or(d.decay),
            inner_iterations: self.inner_iters.unwrap_or(d.inner_iterations),
            max_iterations: self.max_iters.unwrap_or(d.max_iterations),
            step_tolerance: self.tol.unwrap_or(d.step_tolerance),
            prox: d.prox,
        };
        let schedule = LambdaSchedule {
            lambda0_factor: self.lambda0_factor.unwrap_or(default_schedule.lambda0_factor),
            target_ratio: self.target_ratio.unwrap_or(default_schedule.target_ratio),
        };
        let lambdas = match (self.lambda0, self.lambda_target) {
            (Some(l0), Some(lt)) => Lambdas::Absolute {
                lambda0: l0,
                lambda_target: lt,
            },
            (Some(l0), None) => Lambdas::Absolute {
                lambda0: l0,
                lambda_target: schedule.target_ratio * l0,
            },
            (None, Some(_)) => {
                return Err(Error::InvalidParameter(
                    "--lambda-target needs --lambda0".into(),
                ))
            }
            (None, None) => Lambdas::Relative(schedule),
        };
        let resolved = Resolved { settings, lambdas };
        // surface invalid combinations before any data is read
        match lambdas {
            Lambdas::Absolute {
                lambda0,
                lambda_target,
            } => settings.config(lambda0, lambda_target).map(|_| ())?,
            Lambdas::Relative(s) => {
                if !(s.lambda0_factor > 0.0 && s.target_ratio > 0.0 && s.target_ratio <= 1.0) {
                    return Err(Error::InvalidParameter(
                        "need lambda0-factor > 0 and target-ratio in (0, 1]".into(),
                    ));
                }
                settings.config(1.0, s.target_ratio).map(|_| ())?
            }
        }
        Ok(resolved)
    }
}

/// Solver penalties take their `λ` from the schedule, so `lambda` may be
/// omitted from the spec.
fn parse_shape_penalty(spec: &str) -> gsvt::Result<Penalty> {
    let spec = if spec.contains("lambda=") {
        spec.to_string()
    } else {
        match spec.split_once(':') {
            Some((fam, rest)) if !rest.trim().is_empty() => format!("{fam}:lambda=1,{rest}"),
            Some((fam, _)) => format!("{fam}:lambda=1"),
            None => format!("{spec}:lambda=1"),
        }
    };
    spec.parse()
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once(',').ok_or("expected m,n")?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v}: {e}"));
    Ok((parse(m)?, parse(n)?))
}

/// 2 usage, 3 data, 4 numerical.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Data { .. } | Error::Io(_) | Error::ShapeMismatch { .. } => 3,
        e if e.is_numerical() => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gsvt: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
