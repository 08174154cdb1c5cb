use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::solvers::CompletionProblem;

/// Parameters of a random rank-`r` completion instance `M = M₁M₂` with
/// optional additive noise on the observed entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    pub observe_fraction: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::param("matrix dimensions must be positive"));
        }
        if self.rank == 0 || self.rank > self.m.min(self.n) {
            return Err(Error::param(format!(
                "rank {} outside 1..={}",
                self.rank,
                self.m.min(self.n)
            )));
        }
        if !(self.observe_fraction > 0.0 && self.observe_fraction <= 1.0) {
            return Err(Error::param(format!(
                "observe_fraction must lie in (0, 1], got {}",
                self.observe_fraction
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::param("noise_sigma must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn observed_count(&self) -> usize {
        ((self.observe_fraction * (self.m * self.n) as f64).round() as usize).max(1)
    }
}

/// SplitMix64 finalizer; derives independent per-trial seeds from a master.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A named ChaCha stream under a master seed.
pub fn substream(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

const STREAM_FACTORS: u64 = 1;
const STREAM_MASK: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// Returns the noise-free ground truth `M` and the observed problem.
///
/// `M₁`, `M₂` and the noise have i.i.d. standard normal entries; `Ω` is drawn
/// uniformly without replacement and sorted row-major.
pub fn gen_lowrank(spec: &SyntheticSpec) -> Result<(Matrix, CompletionProblem)> {
    spec.validate()?;
    let (m, n, r) = (spec.m, spec.n, spec.rank);

    let mut rng = substream(spec.seed, STREAM_FACTORS);
    let left = Matrix::from_fn(m, r, |_, _| rng.sample(StandardNormal));
    let right = Matrix::from_fn(r, n, |_, _| rng.sample(StandardNormal));
    let truth = left * right;

    let mut rng = substream(spec.seed, STREAM_MASK);
    let mut flat = index::sample(&mut rng, m * n, spec.observed_count()).into_vec();
    flat.sort_unstable();
    let omega: Vec<(usize, usize)> = flat.iter().map(|&k| (k / n, k % n)).collect();

    let mut rng = substream(spec.seed, STREAM_NOISE);
    let observed = omega
        .iter()
        .map(|&(i, j)| {
            let e: f64 = rng.sample(StandardNormal);
            truth[(i, j)] + spec.noise_sigma * e
        })
        .collect();
    let problem = CompletionProblem::new((m, n), omega, observed)?;
    Ok((truth, problem))
}
