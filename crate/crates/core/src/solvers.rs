//! Proximal gradient solvers for matrix completion,
//! `min_X Σᵢ g(σᵢ(X)) + ½‖P_Ω(X) − P_Ω(M)‖²_F`.
//!
//! * GPG keeps `g` exact and linearizes only the loss, so every step is a GSVT.
//! * IRNN also linearizes `g` at the current singular values, so every step is
//!   a weighted SVT with weights `∇g(σᵢ(Xᵏ))`.
//! * The convex baseline is GPG with the ℓ1 penalty (plain SVT steps).
//!
//! All three share a geometric continuation on `λ`, from `lambda0` down to
//! `lambda_target`, and stop once `λ` is at its target and the relative step
//! falls under `step_tolerance`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_shape, singular_values, Matrix};
use crate::penalty::{ExtendedReal, Penalty};
use crate::scalar_prox::FixedPointConfig;
use crate::spectral::{gsvt, weighted_svt_detailed};

/// Observed entries `P_Ω(M)` of an `m × n` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionProblem {
    shape: (usize, usize),
    omega: Vec<(usize, usize)>,
    observed: Vec<f64>,
}

impl CompletionProblem {
    pub fn new(shape: (usize, usize), omega: Vec<(usize, usize)>, observed: Vec<f64>) -> Result<Self> {
        let (m, n) = shape;
        if m == 0 || n == 0 {
            return Err(Error::param(format!("matrix shape must be positive, got {m}x{n}")));
        }
        if omega.is_empty() {
            return Err(Error::param("observation set is empty"));
        }
        if omega.len() != observed.len() {
            return Err(Error::param(format!(
                "{} indices but {} observed values",
                omega.len(),
                observed.len()
            )));
        }
        let mut seen = HashSet::with_capacity(omega.len());
        for &(i, j) in &omega {
            if i >= m || j >= n {
                return Err(Error::param(format!("index ({i}, {j}) outside {m}x{n}")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::param(format!("duplicate index ({i}, {j})")));
            }
        }
        if let Some(v) = observed.iter().find(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite observed value {v}")));
        }
        Ok(CompletionProblem {
            shape,
            omega,
            observed,
        })
    }

    /// Observes `truth` on `omega`.
    pub fn from_truth(truth: &Matrix, omega: Vec<(usize, usize)>) -> Result<Self> {
        let observed = omega
            .iter()
            .map(|&(i, j)| truth.get((i, j)).copied().unwrap_or(f64::NAN))
            .collect();
        Self::new(truth.shape(), omega, observed)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn omega(&self) -> &[(usize, usize)] {
        &self.omega
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// `P_Ω(M)`: observed values, zeros elsewhere.
    pub fn zero_filled(&self) -> Matrix {
        let mut x = Matrix::zeros(self.shape.0, self.shape.1);
        for (&(i, j), &v) in self.omega.iter().zip(&self.observed) {
            x[(i, j)] = v;
        }
        x
    }

    /// `‖P_Ω(M)‖_∞`.
    pub fn max_abs_observed(&self) -> f64 {
        self.observed.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `h(X) = ½‖P_Ω(X) − P_Ω(M)‖²_F`.
    pub fn loss(&self, x: &Matrix) -> Result<f64> {
        check_shape(self.shape, x.shape())?;
        Ok(self.loss_unchecked(x))
    }

    fn loss_unchecked(&self, x: &Matrix) -> f64 {
        0.5 * self
            .omega
            .iter()
            .zip(&self.observed)
            .map(|(&(i, j), &v)| (x[(i, j)] - v).powi(2))
            .sum::<f64>()
    }

    /// `X − ∇h(X)/μ`.
    fn gradient_step(&self, x: &Matrix, mu: f64) -> Matrix {
        let mut y = x.clone();
        for (&(i, j), &v) in self.omega.iter().zip(&self.observed) {
            y[(i, j)] -= (x[(i, j)] - v) / mu;
        }
        y
    }
}

/// `∇h(X) = P_Ω(X) − P_Ω(M)`.
pub fn grad_h(problem: &CompletionProblem, x: &Matrix) -> Result<Matrix> {
    check_shape(problem.shape, x.shape())?;
    let mut g = Matrix::zeros(problem.shape.0, problem.shape.1);
    for (&(i, j), &v) in problem.omega.iter().zip(&problem.observed) {
        g[(i, j)] = x[(i, j)] - v;
    }
    Ok(g)
}

/// `F(X) = Σᵢ g(σᵢ(X)) + ½‖P_Ω(X) − P_Ω(M)‖²_F`.
pub fn objective_f(problem: &CompletionProblem, penalty: &Penalty, x: &Matrix) -> Result<f64> {
    check_shape(problem.shape, x.shape())?;
    let s = singular_values(x)?;
    Ok(spectral_penalty(penalty, &s) + problem.loss_unchecked(x))
}

fn spectral_penalty(penalty: &Penalty, sigma: &[f64]) -> f64 {
    sigma.iter().map(|&s| penalty.value_unchecked(s)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Gpg,
    Irnn,
    Convex,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Gpg, SolverKind::Irnn, SolverKind::Convex];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Gpg => "gpg",
            SolverKind::Irnn => "irnn",
            SolverKind::Convex => "convex",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gpg" => Ok(SolverKind::Gpg),
            "irnn" => Ok(SolverKind::Irnn),
            "convex" | "svt" => Ok(SolverKind::Convex),
            _ => Err(Error::Parse {
                token: s.to_string(),
                message: "expected gpg, irnn or convex".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Proximal weight; must exceed the loss gradient's Lipschitz constant 1.
    pub mu: f64,
    pub lambda0: f64,
    pub lambda_target: f64,
    /// Multiplier applied to `λ` after each outer iteration until it reaches
    /// its target.
    pub decay: f64,
    /// Proximal steps per outer iteration at a fixed `λ`; an outer
    /// iteration ends early once a step falls below `step_tolerance`.
    pub inner_iterations: usize,
    /// Cap on outer iterations.
    pub max_iterations: usize,
    /// Threshold on `‖Xᵏ − Xᵏ⁺¹‖_F / max(1, ‖Xᵏ‖_F)`.
    pub step_tolerance: f64,
    /// Penalty family and shape; its `λ` is replaced by the schedule.
    pub penalty: Penalty,
    pub prox: FixedPointConfig,
}

impl SolverConfig {
    pub fn new(penalty: Penalty, lambda0: f64, lambda_target: f64) -> Self {
        SolverConfig {
            mu: 1.1,
            lambda0,
            lambda_target,
            decay: 0.9,
            inner_iterations: 25,
            max_iterations: 500,
            step_tolerance: 1e-5,
            penalty,
            prox: FixedPointConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 1.0 && self.mu.is_finite()) {
            return Err(Error::param(format!("mu must exceed 1, got {}", self.mu)));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::param(format!("decay must lie in (0, 1), got {}", self.decay)));
        }
        if !(self.lambda_target > 0.0 && self.lambda_target <= self.lambda0 && self.lambda0.is_finite()) {
            return Err(Error::param(format!(
                "need 0 < lambda_target <= lambda0, got {} and {}",
                self.lambda_target, self.lambda0
            )));
        }
        if self.max_iterations == 0 || self.inner_iterations == 0 || !(self.step_tolerance > 0.0) {
            return Err(Error::param(
                "max_iterations, inner_iterations and step_tolerance must be positive",
            ));
        }
        self.prox.validate()
    }

    /// The same configuration with the penalty family forced to ℓ1.
    pub fn as_convex(&self) -> Self {
        SolverConfig {
            penalty: Penalty::l1(self.penalty.lambda()).expect("lambda already validated"),
            ..*self
        }
    }
}

/// Per-iteration record of a solve. Entry `k` describes the step from `Xᵏ`
/// to `Xᵏ⁺¹` taken with `λ = lambda[k]`: `objective[k]` is `F(Xᵏ⁺¹)` under
/// that `λ`, and `step_norm[k] = ‖Xᵏ − Xᵏ⁺¹‖_F`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub objective: Vec<f64>,
    pub step_norm: Vec<f64>,
    pub lambda: Vec<f64>,
    pub rel_err: Option<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

/// One line of the JSON-lines trace output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub lambda: f64,
    pub objective: f64,
    pub step_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_err: Option<f64>,
}

impl SolveTrace {
    pub fn records(&self) -> impl Iterator<Item = TraceRecord> + '_ {
        (0..self.objective.len()).map(move |k| TraceRecord {
            k,
            lambda: self.lambda[k],
            objective: self.objective[k],
            step_norm: self.step_norm[k],
            rel_err: self.rel_err.as_ref().map(|r| r[k]),
        })
    }

    pub fn final_step_norm(&self) -> Option<f64> {
        self.step_norm.last().copied()
    }

    /// Iterations at which the sufficient-decrease inequality
    /// `F(Xᵏ) − F(Xᵏ⁺¹) ≥ ((μ−1)/2)‖Xᵏ − Xᵏ⁺¹‖² − tol·max(1, F(Xᵏ))`
    /// fails. Only consecutive entries sharing the same `λ` are compared.
    pub fn descent_violations(&self, mu: f64, tol: f64) -> Vec<usize> {
        (1..self.objective.len())
            .filter(|&k| self.lambda[k] == self.lambda[k - 1])
            .filter(|&k| {
                let before = self.objective[k - 1];
                let gap = before - self.objective[k];
                let margin = 0.5 * (mu - 1.0) * self.step_norm[k].powi(2);
                gap < margin - tol * before.abs().max(1.0)
            })
            .collect()
    }

    fn push(&mut self, objective: f64, step: f64, lambda: f64, rel_err: Option<f64>) {
        self.objective.push(objective);
        self.step_norm.push(step);
        self.lambda.push(lambda);
        if let (Some(v), Some(r)) = (self.rel_err.as_mut(), rel_err) {
            v.push(r);
        }
        self.iterations += 1;
    }
}

/// Output of a single proximal step.
#[derive(Debug, Clone)]
pub struct Step {
    pub x: Matrix,
    /// Singular values of `x`, nonincreasing.
    pub sigma: Vec<f64>,
}

/// `Xᵏ⁺¹ = Prox^σ_{g/μ}(Xᵏ − ∇h(Xᵏ)/μ)`.
pub fn gpg_step(
    problem: &CompletionProblem,
    penalty: &Penalty,
    mu: f64,
    x: &Matrix,
    prox: &FixedPointConfig,
) -> Result<Step> {
    check_shape(problem.shape, x.shape())?;
    let y = problem.gradient_step(x, mu);
    let scaled = penalty.with_scale(penalty.scale() / mu)?;
    let r = gsvt(&scaled, &y, prox)?;
    Ok(Step {
        x: r.x,
        sigma: r.shrunk_sigma,
    })
}

/// IRNN weights `∇g(σᵢ)/μ`; an infinite gradient at zero stays `+∞` so the
/// matching output singular value is forced to zero.
pub fn irnn_weights(penalty: &Penalty, sigma: &[f64], mu: f64) -> Vec<f64> {
    sigma
        .iter()
        .map(|&s| {
            if s > 0.0 {
                penalty.grad_unchecked(s) / mu
            } else {
                match penalty.grad_at_zero() {
                    ExtendedReal::Finite(g) => g / mu,
                    ExtendedReal::Infinite => f64::INFINITY,
                }
            }
        })
        .collect()
}

/// `Xᵏ⁺¹ = argmin Σᵢ wᵢσᵢ(X) + (μ/2)‖X − (Xᵏ − ∇h(Xᵏ)/μ)‖²` with
/// `wᵢ = ∇g(σᵢ(Xᵏ))`; `sigma_x` must be the singular values of `x`.
pub fn irnn_step(
    problem: &CompletionProblem,
    penalty: &Penalty,
    mu: f64,
    x: &Matrix,
    sigma_x: &[f64],
) -> Result<Step> {
    check_shape(problem.shape, x.shape())?;
    let weights = irnn_weights(penalty, sigma_x, mu);
    let y = problem.gradient_step(x, mu);
    let r = weighted_svt_detailed(&weights, &y)?;
    Ok(Step {
        x: r.x,
        sigma: r.shrunk_sigma,
    })
}

pub fn solve(
    kind: SolverKind,
    problem: &CompletionProblem,
    config: &SolverConfig,
    init: Option<&Matrix>,
    truth: Option<&Matrix>,
) -> Result<(Matrix, SolveTrace)> {
    match kind {
        SolverKind::Gpg => gpg_solve(problem, config, init, truth),
        SolverKind::Irnn => irnn_solve(problem, config, init, truth),
        SolverKind::Convex => convex_pg_solve(problem, config, init, truth),
    }
}

pub fn gpg_solve(
    problem: &CompletionProblem,
    config: &SolverConfig,
    init: Option<&Matrix>,
    truth: Option<&Matrix>,
) -> Result<(Matrix, SolveTrace)> {
    run(problem, config, init, truth, |x, _sigma, pen| {
        gpg_step(problem, pen, config.mu, x, &config.prox)
    })
}

pub fn irnn_solve(
    problem: &CompletionProblem,
    config: &SolverConfig,
    init: Option<&Matrix>,
    truth: Option<&Matrix>,
) -> Result<(Matrix, SolveTrace)> {
    run(problem, config, init, truth, |x, sigma, pen| {
        irnn_step(problem, pen, config.mu, x, sigma)
    })
}

pub fn convex_pg_solve(
    problem: &CompletionProblem,
    config: &SolverConfig,
    init: Option<&Matrix>,
    truth: Option<&Matrix>,
) -> Result<(Matrix, SolveTrace)> {
    gpg_solve(problem, &config.as_convex(), init, truth)
}

fn run<F>(
    problem: &CompletionProblem,
    config: &SolverConfig,
    init: Option<&Matrix>,
    truth: Option<&Matrix>,
    mut step: F,
) -> Result<(Matrix, SolveTrace)>
where
    F: FnMut(&Matrix, &[f64], &Penalty) -> Result<Step>,
{
    config.validate()?;
    let mut x = match init {
        Some(m) => {
            check_shape(problem.shape, m.shape())?;
            m.clone()
        }
        None => problem.zero_filled(),
    };
    let truth_norm = match truth {
        Some(t) => {
            check_shape(problem.shape, t.shape())?;
            let n = t.norm();
            if n == 0.0 {
                return Err(Error::domain("ground truth has zero norm"));
            }
            Some(n)
        }
        None => None,
    };
    let mut sigma = singular_values(&x)?;
    let mut trace = SolveTrace {
        rel_err: truth.map(|_| Vec::new()),
        ..SolveTrace::default()
    };
    let mut lambda = config.lambda0;

    'outer: for _ in 0..config.max_iterations {
        let pen = config.penalty.with_lambda(lambda)?;
        for _ in 0..config.inner_iterations {
            let next = step(&x, &sigma, &pen)?;
            let objective = spectral_penalty(&pen, &next.sigma) + problem.loss_unchecked(&next.x);
            let step_norm = (&x - &next.x).norm();
            if !objective.is_finite() || !step_norm.is_finite() {
                return Err(Error::NonFinite(format!(
                    "objective {objective}, step {step_norm} at iteration {}",
                    trace.iterations
                )));
            }
            let rel = truth
                .zip(truth_norm)
                .map(|(t, tn)| (&next.x - t).norm() / tn);
            trace.push(objective, step_norm, lambda, rel);

            let small = step_norm / x.norm().max(1.0) < config.step_tolerance;
            x = next.x;
            sigma = next.sigma;
            if small {
                if lambda <= config.lambda_target {
                    trace.converged = true;
                    break 'outer;
                }
                break;
            }
        }
        lambda = (lambda * config.decay).max(config.lambda_target);
    }
    Ok((x, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn lowrank(m: usize, n: usize, r: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let a = Matrix::from_fn(m, r, |_, _| rng.sample(StandardNormal));
        let b = Matrix::from_fn(r, n, |_, _| rng.sample(StandardNormal));
        a * b
    }

    fn half_mask(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
        let mut all: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        use rand::seq::SliceRandom;
        all.shuffle(rng);
        all.truncate(m * n / 2);
        all.sort();
        all
    }

    fn full_omega(m: usize, n: usize) -> Vec<(usize, usize)> {
        (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    }

    fn log_config(problem: &CompletionProblem) -> SolverConfig {
        let l0 = 0.9 * problem.max_abs_observed();
        SolverConfig::new(Penalty::logarithm(l0, 1.5).unwrap(), l0, 1e-5 * l0)
    }

    #[test]
    fn problem_validation() {
        assert!(CompletionProblem::new((2, 2), vec![], vec![]).is_err());
        assert!(CompletionProblem::new((2, 2), vec![(2, 0)], vec![1.0]).is_err());
        assert!(CompletionProblem::new((2, 2), vec![(0, 0), (0, 0)], vec![1.0, 2.0]).is_err());
        assert!(CompletionProblem::new((2, 2), vec![(0, 0)], vec![1.0, 2.0]).is_err());
        assert!(CompletionProblem::new((2, 2), vec![(0, 1)], vec![f64::NAN]).is_err());
        assert!(CompletionProblem::new((2, 2), vec![(0, 1)], vec![3.0]).is_ok());
    }

    #[test]
    fn grad_h_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = lowrank(4, 5, 2, &mut rng);
        let omega = half_mask(4, 5, &mut rng);
        let p = CompletionProblem::from_truth(&m, omega.clone()).unwrap();
        // data fit on Ω ⇒ zero gradient
        let mut x = Matrix::from_fn(4, 5, |_, _| rng.random::<f64>());
        for &(i, j) in &omega {
            x[(i, j)] = m[(i, j)];
        }
        assert_eq!(grad_h(&p, &x).unwrap(), Matrix::zeros(4, 5));

        let full = CompletionProblem::from_truth(&m, full_omega(4, 5)).unwrap();
        let x = Matrix::from_fn(4, 5, |_, _| rng.random::<f64>());
        assert!((grad_h(&full, &x).unwrap() - (&x - &m)).amax() < 1e-15);

        // central differences of h
        let g = grad_h(&p, &x).unwrap();
        let h = 1e-6;
        for i in 0..4 {
            for j in 0..5 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[(i, j)] += h;
                xm[(i, j)] -= h;
                let fd = (p.loss(&xp).unwrap() - p.loss(&xm).unwrap()) / (2.0 * h);
                assert!((fd - g[(i, j)]).abs() < 1e-6);
            }
        }
        assert!(grad_h(&p, &Matrix::zeros(5, 4)).is_err());
    }

    #[test]
    fn objective_examples() {
        let p = CompletionProblem::new((3, 3), vec![(0, 0), (1, 2)], vec![0.0, 0.0]).unwrap();
        let pen = Penalty::mcp(1.0, 2.0).unwrap();
        assert_eq!(objective_f(&p, &pen, &Matrix::zeros(3, 3)).unwrap(), 0.0);

        let p = CompletionProblem::new((3, 3), vec![(0, 0), (1, 2)], vec![3.0, -4.0]).unwrap();
        assert_eq!(objective_f(&p, &pen, &Matrix::zeros(3, 3)).unwrap(), 12.5);

        // nuclear norm against trace(√(XᵀX)) from an eigendecomposition
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = Matrix::from_fn(3, 3, |_, _| rng.random::<f64>() - 0.5);
        let eig = (x.transpose() * &x).symmetric_eigen();
        let nuclear: f64 = eig.eigenvalues.iter().map(|e| e.max(0.0).sqrt()).sum();
        let l1 = Penalty::l1(1.0).unwrap();
        let f = objective_f(&p, &l1, &x).unwrap();
        assert!((f - nuclear - p.loss(&x).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn gpg_recovers_fully_observed_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = lowrank(20, 15, 3, &mut rng);
        let p = CompletionProblem::from_truth(&m, full_omega(20, 15)).unwrap();
        let (x, trace) = gpg_solve(&p, &log_config(&p), None, Some(&m)).unwrap();
        let rel = (&x - &m).norm() / m.norm();
        assert!(rel < 1e-3, "rel err {rel}");
        assert_eq!(trace.rel_err.as_ref().unwrap().len(), trace.iterations);
        assert!(trace.converged);
    }

    #[test]
    fn gpg_descent_at_fixed_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = lowrank(30, 30, 3, &mut rng);
        let p = CompletionProblem::from_truth(&m, half_mask(30, 30, &mut rng)).unwrap();
        let l = 0.05 * p.max_abs_observed();
        let mut cfg = SolverConfig::new(Penalty::logarithm(l, 1.5).unwrap(), l, l);
        cfg.max_iterations = 5000;
        let (x, trace) = gpg_solve(&p, &cfg, None, None).unwrap();
        assert!(trace.iterations > 5);
        assert!(trace.descent_violations(cfg.mu, 1e-8).is_empty());
        assert!(trace.converged);
        let last = trace.final_step_norm().unwrap();
        // ‖Xᵏ‖ ≤ ‖Xᵏ⁺¹‖ + step bounds the relative stopping rule
        assert!(last < cfg.step_tolerance * (x.norm() + last).max(1.0));
    }

    #[test]
    fn convex_is_gpg_with_l1() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = lowrank(12, 10, 2, &mut rng);
        let p = CompletionProblem::from_truth(&m, half_mask(12, 10, &mut rng)).unwrap();
        let mut cfg = log_config(&p);
        cfg.max_iterations = 60;
        let (a, ta) = convex_pg_solve(&p, &cfg, None, Some(&m)).unwrap();
        let (b, tb) = gpg_solve(&p, &cfg.as_convex(), None, Some(&m)).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
    }

    #[test]
    fn convex_recovers_fully_observed_in_the_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = lowrank(10, 12, 2, &mut rng);
        let p = CompletionProblem::from_truth(&m, full_omega(10, 12)).unwrap();
        let (x, _) = convex_pg_solve(&p, &log_config(&p), None, None).unwrap();
        assert!((&x - &m).norm() / m.norm() < 1e-3);
    }

    #[test]
    fn irnn_with_zero_weights_is_gradient_descent() {
        // MCP gradient vanishes beyond γλ: with every σᵢ(X⁰) ≥ γλ and no rank
        // deficiency, the step is X − ∇h(X)/μ.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = Matrix::from_fn(4, 4, |i, j| if i == j { 10.0 + i as f64 } else { 0.0 })
            + Matrix::from_fn(4, 4, |_, _| 0.1 * rng.random::<f64>());
        let omega = half_mask(4, 4, &mut rng);
        let p = CompletionProblem::from_truth(&m, omega).unwrap();
        let x0 = m.clone() + Matrix::from_fn(4, 4, |_, _| 0.2 * rng.random::<f64>());
        let pen = Penalty::mcp(1.0, 1.5).unwrap();
        let sigma = singular_values(&x0).unwrap();
        assert!(sigma.iter().all(|&s| s >= 1.5));
        let step = irnn_step(&p, &pen, 1.1, &x0, &sigma).unwrap();
        let expected = &x0 - grad_h(&p, &x0).unwrap() / 1.1;
        assert!((step.x - expected).amax() < 1e-10);
    }

    #[test]
    fn irnn_weights_are_nondecreasing() {
        let pen = Penalty::lp(1.0, 0.5).unwrap();
        let w = irnn_weights(&pen, &[5.0, 2.0, 0.3, 0.0], 1.1);
        for k in 1..w.len() {
            assert!(w[k] >= w[k - 1]);
        }
        assert!(w[3].is_infinite());
    }

    #[test]
    fn gpg_surrogate_is_tighter_than_irnn() {
        // From a common Xᵏ, the GPG step minimizes the surrogate
        // Q(X) = Σ g(σ(X)) + ⟨∇h(Xᵏ), X − Xᵏ⟩ + (μ/2)‖X − Xᵏ‖² exactly,
        // so Q(X_gpg) ≤ Q(X_irnn).
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = lowrank(15, 12, 3, &mut rng);
        let p = CompletionProblem::from_truth(&m, half_mask(15, 12, &mut rng)).unwrap();
        let mu = 1.1;
        let pen = Penalty::logarithm(2.0, 1.5).unwrap();
        let mut x = p.zero_filled();
        for _ in 0..15 {
            let sigma = singular_values(&x).unwrap();
            let g = grad_h(&p, &x).unwrap();
            let q = |z: &Matrix| {
                let s = singular_values(z).unwrap();
                spectral_penalty(&pen, &s) + g.dot(&(z - &x)) + 0.5 * mu * (z - &x).norm_squared()
            };
            let a = gpg_step(&p, &pen, mu, &x, &FixedPointConfig::default()).unwrap();
            let b = irnn_step(&p, &pen, mu, &x, &sigma).unwrap();
            assert!(q(&a.x) <= q(&b.x) + 1e-9, "{} > {}", q(&a.x), q(&b.x));
            x = b.x;
        }
    }

    #[test]
    fn traces_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = lowrank(14, 14, 2, &mut rng);
        let p = CompletionProblem::from_truth(&m, half_mask(14, 14, &mut rng)).unwrap();
        let cfg = log_config(&p);
        for kind in SolverKind::ALL {
            let a = solve(kind, &p, &cfg, None, Some(&m)).unwrap();
            let b = solve(kind, &p, &cfg, None, Some(&m)).unwrap();
            assert_eq!(a.0, b.0);
            assert_eq!(a.1, b.1);
        }
    }

    #[test]
    fn config_validation() {
        let pen = Penalty::logarithm(1.0, 1.5).unwrap();
        let good = SolverConfig::new(pen, 1.0, 0.1);
        assert!(good.validate().is_ok());
        assert!(SolverConfig { mu: 1.0, ..good }.validate().is_err());
        assert!(SolverConfig { decay: 1.0, ..good }.validate().is_err());
        assert!(SolverConfig { lambda_target: 2.0, ..good }.validate().is_err());
        assert!(SolverConfig { max_iterations: 0, ..good }.validate().is_err());
        assert_eq!("IRNN".parse::<SolverKind>().unwrap(), SolverKind::Irnn);
        assert!("admm".parse::<SolverKind>().is_err());
    }
}
