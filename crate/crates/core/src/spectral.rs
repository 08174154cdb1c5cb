//! Generalized singular value thresholding and weighted SVT.
//!
//! `gsvt` solves `min_X Σᵢ g(σᵢ(X)) + ½‖X − B‖²_F` by applying the scalar prox
//! to every singular value of `B`. Because the deterministic prox is monotone
//! in its argument, the shrunk values stay nonincreasing and pair with the
//! singular vectors of `B`.
//!
//! `weighted_svt` solves `min_X Σᵢ wᵢσᵢ(X) + ½‖X − B‖²_F` by soft-thresholding
//! `σᵢ(B)` with `wᵢ`. That formula is only optimal when the weights are
//! nondecreasing, so anything else is rejected.

use crate::error::{Error, Result};
use crate::linalg::{check_shape, compose, singular_values, svd, Matrix};
use crate::penalty::Penalty;
use crate::scalar_prox::{prox, FixedPointConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct GsvtResult {
    pub x: Matrix,
    /// Singular values of `x`, nonincreasing.
    pub shrunk_sigma: Vec<f64>,
    pub input_sigma: Vec<f64>,
}

/// Allowed upward drift between consecutive shrunk values before it counts
/// as a broken ordering rather than fixed-point round-off.
fn order_slack(top: f64) -> f64 {
    1e-9 * top.max(1.0)
}

/// Checks `values` is nonincreasing up to round-off, then removes the
/// round-off so the output is exactly nonincreasing.
fn enforce_nonincreasing(values: &mut [f64], what: &str) -> Result<()> {
    let slack = order_slack(values.first().copied().unwrap_or(0.0));
    for i in 1..values.len() {
        if values[i] > values[i - 1] + slack {
            return Err(Error::Invariant(format!(
                "{what} not nonincreasing at index {i}: {} > {}",
                values[i],
                values[i - 1]
            )));
        }
        values[i] = values[i].min(values[i - 1]);
    }
    Ok(())
}

/// `Prox^σ_g(B) = U·Diag(Prox_g(σ(B)))·Vᵀ`.
pub fn gsvt(penalty: &Penalty, b: &Matrix, config: &FixedPointConfig) -> Result<GsvtResult> {
    let factors = svd(b)?;
    let mut shrunk = Vec::with_capacity(factors.sigma.len());
    let mut last: Option<(f64, f64)> = None;
    for &s in &factors.sigma {
        // equal inputs share one prox evaluation
        let x = match last {
            Some((prev_in, prev_out)) if prev_in == s => prev_out,
            _ => prox(penalty, s, config)?.minimizer,
        };
        last = Some((s, x));
        shrunk.push(x);
    }
    enforce_nonincreasing(&mut shrunk, "GSVT shrunk singular values")?;
    let x = factors.compose(&shrunk);
    Ok(GsvtResult {
        x,
        shrunk_sigma: shrunk,
        input_sigma: factors.sigma,
    })
}

/// `Σᵢ g(σᵢ(X)) + ½‖X − B‖²_F`.
pub fn gsvt_objective(penalty: &Penalty, x: &Matrix, b: &Matrix) -> Result<f64> {
    check_shape(b.shape(), x.shape())?;
    let s = singular_values(x)?;
    let reg: f64 = s.iter().map(|&v| penalty.value_unchecked(v)).sum();
    Ok(reg + 0.5 * (x - b).norm_squared())
}

fn check_weights(weights: &[f64], k: usize) -> Result<()> {
    if weights.len() != k {
        return Err(Error::Precondition(format!(
            "expected {k} weights, got {}",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::Precondition(format!("weights must be >= 0, got {w}")));
    }
    if let Some(i) = (1..k).find(|&i| weights[i] < weights[i - 1]) {
        return Err(Error::Precondition(format!(
            "weights must be nondecreasing; w[{}] = {} > w[{i}] = {}",
            i - 1,
            weights[i - 1],
            weights[i]
        )));
    }
    Ok(())
}

/// Weighted SVT with the shrunk spectrum. Weights pair with the singular
/// values of `b` in nonincreasing order and may be `+∞`, which zeroes the
/// corresponding component.
pub fn weighted_svt_detailed(weights: &[f64], b: &Matrix) -> Result<GsvtResult> {
    let k = b.nrows().min(b.ncols());
    check_weights(weights, k)?;
    let factors = svd(b)?;
    let mut shrunk: Vec<f64> = factors
        .sigma
        .iter()
        .zip(weights)
        .map(|(&s, &w)| if w.is_infinite() { 0.0 } else { (s - w).max(0.0) })
        .collect();
    enforce_nonincreasing(&mut shrunk, "weighted SVT shrunk singular values")?;
    Ok(GsvtResult {
        x: compose(&factors.u, &shrunk, &factors.v),
        shrunk_sigma: shrunk,
        input_sigma: factors.sigma,
    })
}

/// `U·Diag(max(σᵢ(B) − wᵢ, 0))·Vᵀ` for nondecreasing `w`.
pub fn weighted_svt(weights: &[f64], b: &Matrix) -> Result<Matrix> {
    weighted_svt_detailed(weights, b).map(|r| r.x)
}

/// `Σᵢ wᵢσᵢ(X) + ½‖X − B‖²_F` with `σ(X)` nonincreasing.
pub fn weighted_objective(weights: &[f64], x: &Matrix, b: &Matrix) -> Result<f64> {
    check_shape(b.shape(), x.shape())?;
    let s = singular_values(x)?;
    if weights.len() != s.len() {
        return Err(Error::Precondition(format!(
            "expected {} weights, got {}",
            s.len(),
            weights.len()
        )));
    }
    let reg: f64 = s.iter().zip(weights).map(|(s, w)| s * w).sum();
    Ok(reg + 0.5 * (x - b).norm_squared())
}
