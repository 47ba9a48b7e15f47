//! Seeded synthetic matrices: a Gaussian low-rank product plus Gaussian noise.

use serde::{Deserialize, Serialize};

use crate::error::{CurError, Result};
use crate::matrix::{gemm, DenseMatrix, Op};
use crate::rng::SeededRng;

/// Shape, intrinsic rank, absolute noise level and seed of a synthetic matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(n: usize, m: usize, rank: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            n,
            m,
            rank,
            noise_sigma,
            seed,
        }
    }

    /// Noise scaled so that `‖noise‖_F / ‖A Bᵀ‖_F ≈ relative_noise`.
    ///
    /// Entries of `A Bᵀ` have variance `rank`, so the noise standard deviation
    /// is `relative_noise · √rank`.
    pub fn with_relative_noise(n: usize, m: usize, rank: usize, relative_noise: f64, seed: u64) -> Self {
        Self::new(n, m, rank, relative_noise * (rank as f64).sqrt(), seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 || self.rank > self.n.min(self.m) {
            return Err(CurError::Config(format!(
                "rank {} must lie in 1..={} for a {}x{} matrix",
                self.rank,
                self.n.min(self.m),
                self.n,
                self.m
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(CurError::Config(format!(
                "noise level must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// `X = A Bᵀ + noise_sigma · G` with standard normal `A` (n×r), `B` (m×r), `G` (n×m).
///
/// Draws come from one [`SeededRng`] stream in the order `A` (row-major),
/// then `B` (row-major), then `G` (row-major). `G` is not drawn when the noise
/// level is zero.
pub fn low_rank_plus_noise(spec: &SynthSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let a = rng.gaussian_matrix(spec.n, spec.rank);
    let b = rng.gaussian_matrix(spec.m, spec.rank);
    let mut x = gemm(&a, Op::N, &b, Op::T);
    if spec.noise_sigma > 0.0 {
        for v in x.as_mut_slice() {
            *v += spec.noise_sigma * rng.standard_normal();
        }
    }
    Ok(x)
}
