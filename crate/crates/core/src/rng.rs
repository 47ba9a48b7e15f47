//! Seeded random stream shared by initialization, slot redraws, and the
//! synthetic generators.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `SeedableRng::seed_from_u64`, which expands the 64-bit seed into the
//! 256-bit ChaCha key with PCG32. ChaCha output is specified independently of
//! the platform, so every draw below is reproducible across builds that pin
//! the same crate versions.
//!
//! Draw discipline:
//! - [`SeededRng::below`] is `random_range(0..k)` (widening-multiply rejection).
//! - [`SeededRng::sample_without_replacement`] is a partial Fisher–Yates
//!   shuffle: for `t in 0..k` swap position `t` with `t + below(n - t)`.
//! - [`SeededRng::standard_normal`] uses the `rand_distr` ziggurat sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;

#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform integer in `0..k`. Panics if `k == 0`.
    pub fn below(&mut self, k: usize) -> usize {
        assert!(k > 0, "cannot draw from an empty range");
        self.inner.random_range(0..k)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Draws `k` distinct elements of `pool`, in draw order.
    pub fn sample_without_replacement(&mut self, pool: &[usize], k: usize) -> Result<Vec<usize>> {
        if k > pool.len() {
            return Err(CurError::Config(format!(
                "cannot draw {k} distinct items from a pool of {}",
                pool.len()
            )));
        }
        let mut items = pool.to_vec();
        let n = items.len();
        for t in 0..k {
            let j = t + self.below(n - t);
            items.swap(t, j);
        }
        items.truncate(k);
        Ok(items)
    }

    /// Draws `k` distinct indices with probability proportional to `weights`,
    /// renormalizing over the remaining indices after each draw.
    pub fn weighted_without_replacement(&mut self, weights: &[f64], k: usize) -> Result<Vec<usize>> {
        let mut w: Vec<f64> = weights.iter().map(|&x| x.max(0.0)).collect();
        let positive = w.iter().filter(|&&x| x > 0.0).count();
        if k > positive {
            return Err(CurError::Config(format!(
                "cannot draw {k} distinct items: only {positive} have positive weight"
            )));
        }
        let mut picked = Vec::with_capacity(k);
        for _ in 0..k {
            let total: f64 = w.iter().sum();
            let target = self.uniform() * total;
            let mut acc = 0.0;
            let mut choice = None;
            for (idx, &wi) in w.iter().enumerate() {
                if wi <= 0.0 {
                    continue;
                }
                acc += wi;
                choice = Some(idx);
                if target < acc {
                    break;
                }
            }
            // `choice` is the last positive weight if rounding left `target >= acc`.
            let idx = choice.expect("at least one positive weight remains");
            picked.push(idx);
            w[idx] = 0.0;
        }
        Ok(picked)
    }

    /// A `rows × cols` matrix of standard normal entries drawn in row-major order.
    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| self.standard_normal()).collect();
        DenseMatrix::from_raw(rows, cols, data)
    }
}
