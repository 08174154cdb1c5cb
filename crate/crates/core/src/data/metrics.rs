use crate::error::{Error, Result};
use crate::linalg::{check_shape, Matrix};

/// `‖X − M‖_F / ‖M‖_F`.
pub fn rel_err(x: &Matrix, truth: &Matrix) -> Result<f64> {
    check_shape(truth.shape(), x.shape())?;
    let denom = truth.norm();
    if denom == 0.0 {
        return Err(Error::domain("relative error against a zero matrix"));
    }
    Ok((x - truth).norm() / denom)
}

pub fn mse(a: &Matrix, b: &Matrix) -> Result<f64> {
    check_shape(a.shape(), b.shape())?;
    if a.is_empty() {
        return Err(Error::domain("mean squared error of an empty matrix"));
    }
    Ok((a - b).norm_squared() / a.len() as f64)
}

/// Peak signal-to-noise ratio in dB for 8-bit data; `+∞` for identical inputs.
pub fn psnr(original: &Matrix, recovered: &Matrix) -> Result<f64> {
    let e = mse(original, recovered)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / e).log10())
}

/// PSNR over several channels, pooling the squared error.
pub fn psnr_channels(original: &[Matrix], recovered: &[Matrix]) -> Result<f64> {
    if original.len() != recovered.len() || original.is_empty() {
        return Err(Error::domain("channel counts differ or are zero"));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (a, b) in original.iter().zip(recovered) {
        check_shape(a.shape(), b.shape())?;
        total += (a - b).norm_squared();
        count += a.len();
    }
    let e = total / count as f64;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / e).log10())
}

/// `‖P_Ω(X) − P_Ω(M)‖₁ / |Ω|` over the evaluation set.
pub fn nmae(x: &Matrix, truth_values: &[f64], eval_omega: &[(usize, usize)]) -> Result<f64> {
    if eval_omega.is_empty() {
        return Err(Error::domain("NMAE over an empty index set"));
    }
    if truth_values.len() != eval_omega.len() {
        return Err(Error::domain(format!(
            "{} values for {} indices",
            truth_values.len(),
            eval_omega.len()
        )));
    }
    let mut total = 0.0;
    for (&(i, j), &t) in eval_omega.iter().zip(truth_values) {
        let v = x.get((i, j)).ok_or_else(|| {
            Error::domain(format!("index ({i}, {j}) outside {:?}", x.shape()))
        })?;
        total += (v - t).abs();
    }
    Ok(total / eval_omega.len() as f64)
}
