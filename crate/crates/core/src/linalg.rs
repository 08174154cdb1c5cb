//! Dense SVD kernel. Matrices are `nalgebra::DMatrix<f64>`; the decomposition
//! itself runs on `faer`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Thin SVD `B = U·Diag(σ)·Vᵀ` with `σ` nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    /// `m × k`, orthonormal columns, `k = min(m, n)`.
    pub u: Matrix,
    pub sigma: Vec<f64>,
    /// `n × k`, orthonormal columns.
    pub v: Matrix,
}

impl SvdFactors {
    pub fn rank_tol(&self, rel: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel * top).count()
    }

    /// `U·Diag(values)·Vᵀ`, skipping zero entries of `values`.
    pub fn compose(&self, values: &[f64]) -> Matrix {
        compose(&self.u, values, &self.v)
    }

    pub fn reconstruct(&self) -> Matrix {
        self.compose(&self.sigma)
    }
}

/// `U·Diag(values)·Vᵀ` using only the columns with nonzero weight.
pub(crate) fn compose(u: &Matrix, values: &[f64], v: &Matrix) -> Matrix {
    let (m, n) = (u.nrows(), v.nrows());
    let active: Vec<usize> = (0..values.len()).filter(|&i| values[i] != 0.0).collect();
    if active.is_empty() {
        return Matrix::zeros(m, n);
    }
    let us = Matrix::from_fn(m, active.len(), |r, c| u[(r, active[c])] * values[active[c]]);
    let vs = Matrix::from_fn(n, active.len(), |r, c| v[(r, active[c])]);
    us * vs.transpose()
}

fn to_faer(b: &Matrix) -> Result<faer::Mat<f64>> {
    if let Some(bad) = b.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(format!("matrix has a non-finite entry ({bad})")));
    }
    Ok(faer::Mat::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)]))
}

/// Thin SVD of `b`. Fails on non-finite input or if the decomposition does
/// not converge.
pub fn svd(b: &Matrix) -> Result<SvdFactors> {
    let (m, n) = b.shape();
    let k = m.min(n);
    if k == 0 {
        return Ok(SvdFactors {
            u: Matrix::zeros(m, 0),
            sigma: Vec::new(),
            v: Matrix::zeros(n, 0),
        });
    }
    let fb = to_faer(b)?;
    let dec = fb.thin_svd().map_err(|_| Error::Svd)?;
    let (fu, fs, fv) = (dec.U(), dec.S(), dec.V());
    let s = fs.column_vector();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    let sigma: Vec<f64> = order.iter().map(|&i| s[i].max(0.0)).collect();
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err(Error::Svd);
    }
    let u = Matrix::from_fn(m, k, |r, c| fu[(r, order[c])]);
    let v = Matrix::from_fn(n, k, |r, c| fv[(r, order[c])]);
    Ok(SvdFactors { u, sigma, v })
}

/// Singular values only, nonincreasing.
pub fn singular_values(b: &Matrix) -> Result<Vec<f64>> {
    if b.nrows().min(b.ncols()) == 0 {
        return Ok(Vec::new());
    }
    let fb = to_faer(b)?;
    let mut s = fb.singular_values().map_err(|_| Error::Svd)?;
    s.sort_by(|a, b| b.total_cmp(a));
    for x in s.iter_mut() {
        *x = x.max(0.0);
    }
    Ok(s)
}

pub(crate) fn check_shape(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(m, n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    fn max_abs(m: &Matrix) -> f64 {
        m.iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    fn check_contracts(b: &Matrix) {
        let f = svd(b).unwrap();
        let k = b.nrows().min(b.ncols());
        assert_eq!(f.sigma.len(), k);
        for w in f.sigma.windows(2) {
            assert!(w[0] >= w[1] && w[1] >= 0.0);
        }
        let eye = Matrix::identity(k, k);
        assert!(max_abs(&(f.u.transpose() * &f.u - &eye)) <= 1e-10);
        assert!(max_abs(&(f.v.transpose() * &f.v - &eye)) <= 1e-10);
        let resid = (f.reconstruct() - b).norm();
        assert!(resid <= 1e-8 * b.norm().max(1.0), "residual {resid}");
    }

    #[test]
    fn diagonal_input() {
        let b = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0]));
        let f = svd(&b).unwrap();
        assert_eq!(f.sigma.len(), 2);
        assert!((f.sigma[0] - 3.0).abs() < 1e-14 && (f.sigma[1] - 1.0).abs() < 1e-14);
        // U = V = I up to a permutation and column signs
        assert!((f.u[(1, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((f.v[(1, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((f.u[(0, 1)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let f = svd(&Matrix::zeros(3, 4)).unwrap();
        assert_eq!(f.sigma, vec![0.0; 3]);
    }

    #[test]
    fn random_shapes_meet_contracts() {
        check_contracts(&random(5, 7, 1));
        check_contracts(&random(7, 5, 2));
        check_contracts(&random(1, 9, 3));
        check_contracts(&random(30, 40, 4));
        // rank deficient
        let a = random(12, 3, 5);
        check_contracts(&(&a * a.transpose()));
    }

    #[test]
    fn deterministic() {
        let b = random(9, 6, 11);
        assert_eq!(svd(&b).unwrap(), svd(&b).unwrap());
    }

    #[test]
    fn rejects_non_finite() {
        let mut b = random(3, 3, 0);
        b[(1, 1)] = f64::NAN;
        assert!(matches!(svd(&b), Err(Error::Domain(_))));
        b[(1, 1)] = f64::INFINITY;
        assert!(singular_values(&b).is_err());
    }

    #[test]
    fn singular_values_agree_with_full_decomposition() {
        let b = random(8, 13, 21);
        let s = singular_values(&b).unwrap();
        let f = svd(&b).unwrap();
        for (a, c) in s.iter().zip(&f.sigma) {
            assert!((a - c).abs() < 1e-12);
        }
    }
}
