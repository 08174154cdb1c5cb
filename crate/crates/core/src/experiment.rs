//! Seeded recovery benchmarks on synthetic low-rank data: per-trial relative
//! error and the frequency of success (FoS) across trials.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::metrics::rel_err;
use crate::data::synthetic::{gen_lowrank, trial_seed, SyntheticSpec};
use crate::error::{Error, Result};
use crate::penalty::Penalty;
use crate::scalar_prox::FixedPointConfig;
use crate::solvers::{solve, CompletionProblem, SolverConfig, SolverKind};

/// Trials with a relative error below this count as recovered.
pub const SUCCESS_THRESHOLD: f64 = 1e-3;

/// `γ` of the Logarithm penalty used by the recovery presets.
pub const LOG_GAMMA: f64 = 1.5;

/// `λ₀ = lambda0_factor · ‖P_Ω(M)‖_∞` and `λ_t = target_ratio · λ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSchedule {
    pub lambda0_factor: f64,
    pub target_ratio: f64,
}

impl LambdaSchedule {
    pub const NOISE_FREE: LambdaSchedule = LambdaSchedule {
        lambda0_factor: 0.9,
        target_ratio: 1e-5,
    };
    pub const NOISY: LambdaSchedule = LambdaSchedule {
        lambda0_factor: 10.0,
        target_ratio: 0.1,
    };

    pub fn lambdas(&self, problem: &CompletionProblem) -> (f64, f64) {
        let l0 = self.lambda0_factor * problem.max_abs_observed();
        (l0, self.target_ratio * l0)
    }
}

/// Solver parameters that do not depend on the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Family and shape parameters; `λ` comes from the schedule.
    pub penalty: Penalty,
    pub mu: f64,
    pub decay: f64,
    pub inner_iterations: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub prox: FixedPointConfig,
}

impl SolverSettings {
    pub fn new(penalty: Penalty) -> Self {
        let d = SolverConfig::new(penalty, 1.0, 1.0);
        SolverSettings {
            penalty,
            mu: d.mu,
            decay: d.decay,
            inner_iterations: d.inner_iterations,
            max_iterations: d.max_iterations,
            step_tolerance: d.step_tolerance,
            prox: d.prox,
        }
    }

    pub fn config(&self, lambda0: f64, lambda_target: f64) -> Result<SolverConfig> {
        let config = SolverConfig {
            mu: self.mu,
            lambda0,
            lambda_target,
            decay: self.decay,
            inner_iterations: self.inner_iterations,
            max_iterations: self.max_iterations,
            step_tolerance: self.step_tolerance,
            penalty: self.penalty.with_lambda(lambda0)?,
            prox: self.prox,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn config_for(&self, problem: &CompletionProblem, schedule: &LambdaSchedule) -> Result<SolverConfig> {
        let (l0, lt) = schedule.lambdas(problem);
        self.config(l0, lt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticExperiment {
    pub m: usize,
    pub n: usize,
    pub ranks: Vec<usize>,
    pub observe_fraction: f64,
    pub noise_sigma: f64,
    pub seeds: usize,
    pub master_seed: u64,
    pub solvers: Vec<SolverKind>,
    pub schedule: LambdaSchedule,
    pub settings: SolverSettings,
    pub success_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub solver: SolverKind,
    pub rank: usize,
    pub trial: usize,
    pub seed: u64,
    pub rel_err: f64,
    pub success: bool,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub solver: SolverKind,
    pub rank: usize,
    pub trials: usize,
    pub successes: usize,
    pub fos: f64,
    pub mean_rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl ExperimentResult {
    /// Sorts records canonically and recomputes the aggregates.
    pub fn from_records(mut records: Vec<TrialRecord>) -> Self {
        records.sort_by(|a, b| (a.solver, a.rank, a.trial).cmp(&(b.solver, b.rank, b.trial)));
        let mut aggregates: Vec<Aggregate> = Vec::new();
        for r in &records {
            match aggregates.last_mut() {
                Some(a) if a.solver == r.solver && a.rank == r.rank => {
                    a.trials += 1;
                    a.successes += r.success as usize;
                    a.mean_rel_err += r.rel_err;
                }
                _ => aggregates.push(Aggregate {
                    solver: r.solver,
                    rank: r.rank,
                    trials: 1,
                    successes: r.success as usize,
                    fos: 0.0,
                    mean_rel_err: r.rel_err,
                }),
            }
        }
        for a in &mut aggregates {
            a.fos = a.successes as f64 / a.trials as f64;
            a.mean_rel_err /= a.trials as f64;
        }
        ExperimentResult {
            records,
            aggregates,
        }
    }

    pub fn aggregate(&self, solver: SolverKind, rank: usize) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.solver == solver && a.rank == rank)
    }

    pub fn records_csv(&self) -> String {
        let mut out = String::from("solver,rank,trial,seed,rel_err,success,iterations,converged,wall_time\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{:e},{},{},{},{:.3}",
                r.solver, r.rank, r.trial, r.seed, r.rel_err, r.success, r.iterations, r.converged, r.wall_time
            );
        }
        out
    }
}

impl SyntheticExperiment {
    /// Half-observed noise-free recovery with the Logarithm penalty and the
    /// [`LambdaSchedule::NOISE_FREE`] schedule, all solvers.
    pub fn noise_free(size: usize, ranks: Vec<usize>, seeds: usize, master_seed: u64) -> Self {
        SyntheticExperiment {
            m: size,
            n: size,
            ranks,
            observe_fraction: 0.5,
            noise_sigma: 0.0,
            seeds,
            master_seed,
            solvers: SolverKind::ALL.to_vec(),
            schedule: LambdaSchedule::NOISE_FREE,
            settings: SolverSettings::new(Penalty::logarithm(1.0, LOG_GAMMA).expect("valid gamma")),
            success_threshold: SUCCESS_THRESHOLD,
        }
    }

    /// As [`noise_free`](Self::noise_free) with `0.1·E` added to the
    /// observations and the [`LambdaSchedule::NOISY`] schedule.
    pub fn noisy(size: usize, ranks: Vec<usize>, seeds: usize, master_seed: u64) -> Self {
        SyntheticExperiment {
            noise_sigma: 0.1,
            schedule: LambdaSchedule::NOISY,
            ..Self::noise_free(size, ranks, seeds, master_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ranks.is_empty() || self.solvers.is_empty() || self.seeds == 0 {
            return Err(Error::param("need at least one rank, solver and seed"));
        }
        for &rank in &self.ranks {
            self.spec(rank, 0).validate()?;
        }
        self.settings.config(1.0, 1e-3)?;
        Ok(())
    }

    /// Data seed of trial `trial` at `rank`; shared by every solver so the
    /// comparison is paired.
    pub fn spec(&self, rank: usize, trial: usize) -> SyntheticSpec {
        SyntheticSpec {
            m: self.m,
            n: self.n,
            rank,
            observe_fraction: self.observe_fraction,
            noise_sigma: self.noise_sigma,
            seed: trial_seed(self.master_seed, ((rank as u64) << 32) | trial as u64),
        }
    }

    fn run_unit(&self, rank: usize, trial: usize) -> Result<Vec<TrialRecord>> {
        let spec = self.spec(rank, trial);
        let (truth, problem) = gen_lowrank(&spec)?;
        let config = self.settings.config_for(&problem, &self.schedule)?;
        self.solvers
            .iter()
            .map(|&solver| {
                let start = Instant::now();
                let (x, trace) = solve(solver, &problem, &config, None, None)?;
                let err = rel_err(&x, &truth)?;
                Ok(TrialRecord {
                    solver,
                    rank,
                    trial,
                    seed: spec.seed,
                    rel_err: err,
                    success: err < self.success_threshold,
                    iterations: trace.iterations,
                    converged: trace.converged,
                    wall_time: start.elapsed().as_secs_f64(),
                })
            })
            .collect()
    }

    /// Runs every (rank, trial) unit on up to `jobs` threads. Output order
    /// and values do not depend on `jobs`.
    pub fn run(&self, jobs: usize) -> Result<ExperimentResult> {
        self.validate()?;
        let units: Vec<(usize, usize)> = self
            .ranks
            .iter()
            .flat_map(|&r| (0..self.seeds).map(move |t| (r, t)))
            .collect();
        let per_unit = map_units(&units, jobs, |&(r, t)| self.run_unit(r, t))?;
        Ok(ExperimentResult::from_records(per_unit.into_iter().flatten().collect()))
    }
}

#[cfg(feature = "parallel")]
fn map_units<T, U, F>(units: &[T], jobs: usize, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    use rayon::prelude::*;
    if jobs <= 1 {
        return units.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::param(format!("cannot build thread pool: {e}")))?;
    pool.install(|| units.par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
fn map_units<T, U, F>(units: &[T], _jobs: usize, f: F) -> Result<Vec<U>>
where
    F: Fn(&T) -> Result<U>,
{
    units.iter().map(f).collect()
}
