//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Every export is a thin wrapper over a plain function returning
//! `Result<_, String>`, so the logic is tested natively.

use wasm_bindgen::prelude::*;

use gsvt::data::synthetic::{gen_lowrank, SyntheticSpec};
use gsvt::experiment::{LambdaSchedule, SolverSettings, LOG_GAMMA};
use gsvt::solvers::solve;
use gsvt::{gsvt, prox, FixedPointConfig, Penalty, SolverKind};

const MAX_DIM: usize = 120;
const MAX_POINTS: usize = 2000;

fn penalty(spec: &str) -> Result<Penalty, String> {
    spec.parse().map_err(|e: gsvt::Error| e.to_string())
}

/// `Prox_g(b)` at `points` evenly spaced `b` in `[0, b_max]`.
pub fn prox_curve_values(spec: &str, b_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let pen = penalty(spec)?;
    if !(b_max.is_finite() && b_max > 0.0) || !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("need b_max > 0 and 2..={MAX_POINTS} points"));
    }
    let cfg = FixedPointConfig::default();
    (0..points)
        .map(|i| {
            let b = b_max * i as f64 / (points - 1) as f64;
            prox(&pen, b, &cfg).map(|o| o.minimizer).map_err(|e| e.to_string())
        })
        .collect()
}

/// Singular values of a noisy rank-`rank` matrix and of its GSVT, as
/// `[σ(B)…, σ(X)…]`.
pub fn gsvt_spectrum_values(
    spec: &str,
    size: usize,
    rank: usize,
    noise: f64,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let pen = penalty(spec)?;
    if size > MAX_DIM {
        return Err(format!("size is capped at {MAX_DIM} in the browser"));
    }
    let (_, problem) = gen_lowrank(&SyntheticSpec {
        m: size,
        n: size,
        rank,
        observe_fraction: 1.0,
        noise_sigma: noise,
        seed,
    })
    .map_err(|e| e.to_string())?;
    let r = gsvt(&pen, &problem.zero_filled(), &FixedPointConfig::default()).map_err(|e| e.to_string())?;
    Ok(r.input_sigma.into_iter().chain(r.shrunk_sigma).collect())
}

/// Per-iteration relative error of GPG and IRNN on one shared instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub gpg: Vec<f64>,
    pub irnn: Vec<f64>,
}

pub fn completion_traces(
    size: usize,
    rank: usize,
    observe: f64,
    noise: f64,
    seed: u64,
) -> Result<Traces, String> {
    if size > MAX_DIM {
        return Err(format!("size is capped at {MAX_DIM} in the browser"));
    }
    let (truth, problem) = gen_lowrank(&SyntheticSpec {
        m: size,
        n: size,
        rank,
        observe_fraction: observe,
        noise_sigma: noise,
        seed,
    })
    .map_err(|e| e.to_string())?;
    let schedule = if noise > 0.0 {
        LambdaSchedule::NOISY
    } else {
        LambdaSchedule::NOISE_FREE
    };
    let pen = Penalty::logarithm(1.0, LOG_GAMMA).map_err(|e| e.to_string())?;
    let config = SolverSettings::new(pen)
        .config_for(&problem, &schedule)
        .map_err(|e| e.to_string())?;
    let run = |kind| {
        solve(kind, &problem, &config, None, Some(&truth))
            .map(|(_, t)| t.rel_err.unwrap_or_default())
            .map_err(|e| e.to_string())
    };
    Ok(Traces {
        gpg: run(SolverKind::Gpg)?,
        irnn: run(SolverKind::Irnn)?,
    })
}

#[wasm_bindgen]
pub fn prox_curve(spec: &str, b_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    prox_curve_values(spec, b_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn gsvt_spectrum(spec: &str, size: usize, rank: usize, noise: f64, seed: u64) -> Result<Vec<f64>, JsError> {
    gsvt_spectrum_values(spec, size, rank, noise, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct CompletionTrace {
    inner: Traces,
}

#[wasm_bindgen]
impl CompletionTrace {
    #[wasm_bindgen(constructor)]
    pub fn new(size: usize, rank: usize, observe: f64, noise: f64, seed: u64) -> Result<CompletionTrace, JsError> {
        completion_traces(size, rank, observe, noise, seed)
            .map(|inner| CompletionTrace { inner })
            .map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(getter)]
    pub fn gpg(&self) -> Vec<f64> {
        self.inner.gpg.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn irnn(&self) -> Vec<f64> {
        self.inner.irnn.clone()
    }
}
