//! Leading singular triplet by power iteration on the smaller Gram matrix.

use crate::error::{CurError, Result};
use crate::matrix::{dot, gemm, norm2, DenseMatrix, Op};

/// Iteration cap for the power method.
pub const POWER_MAX_ITER: usize = 1000;
/// Stop once successive singular-value estimates differ by less than this
/// fraction of the current estimate.
pub const POWER_REL_TOL: f64 = 1e-12;
/// Entries at or below this magnitude are skipped by the sign convention.
const SIGN_EPS: f64 = 1e-12;

/// A unit left vector `u`, unit right vector `v` and `sigma ≥ 0` with `A v ≈ sigma u`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularTriplet {
    pub u: Vec<f64>,
    pub sigma: f64,
    pub v: Vec<f64>,
}

impl SingularTriplet {
    fn swapped(self) -> Self {
        Self {
            u: self.v,
            sigma: self.sigma,
            v: self.u,
        }
    }
}

/// Dominant left singular vector of `a` (the unit `u` maximizing `‖aᵀu‖`).
///
/// The power method runs on `a aᵀ` when `rows ≤ cols` and on `aᵀ a`
/// otherwise. It starts from the column (or row) of `a` with the largest
/// norm, lowest index on ties, so the result depends on `a` alone. The
/// returned `u` has its first entry above `1e-12` in magnitude non-negative.
///
/// When the top singular value is repeated, `u` is some unit vector of the
/// top singular subspace.
pub fn leading_left_singular_vector(a: &DenseMatrix) -> Result<SingularTriplet> {
    if a.is_empty() {
        return Err(CurError::Dimension("leading singular vector of an empty matrix".into()));
    }
    if a.as_slice().iter().all(|&x| x == 0.0) {
        return Err(CurError::Degenerate("leading singular vector of an all-zero matrix".into()));
    }
    let (n, m) = a.shape();
    let (mut u, mut v, sigma) = if n <= m {
        let gram = gemm(a, Op::N, a, Op::T);
        let start = a.column(argmax_lowest(&a.column_norms()));
        let u = power_iterate(&gram, start);
        let w = a.tr_mul_vec(&u);
        let sigma = norm2(&w);
        let v: Vec<f64> = w.iter().map(|x| x / sigma).collect();
        (u, v, sigma)
    } else {
        let gram = gemm(a, Op::T, a, Op::N);
        let start = a.row(argmax_lowest(&a.row_norms())).to_vec();
        let v = power_iterate(&gram, start);
        let w = a.mul_vec(&v);
        let sigma = norm2(&w);
        let u: Vec<f64> = w.iter().map(|x| x / sigma).collect();
        (u, v, sigma)
    };
    if let Some(first) = u.iter().find(|x| x.abs() > SIGN_EPS) {
        if *first < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(SingularTriplet { u, sigma, v })
}

/// Dominant right singular vector; computed as the left vector of `aᵀ`.
pub fn leading_right_singular_vector(a: &DenseMatrix) -> Result<SingularTriplet> {
    leading_left_singular_vector(&a.transpose()).map(SingularTriplet::swapped)
}

fn power_iterate(gram: &DenseMatrix, start: Vec<f64>) -> Vec<f64> {
    let mut x = start;
    let nx = norm2(&x);
    x.iter_mut().for_each(|e| *e /= nx);
    let mut prev: Option<f64> = None;
    for _ in 0..POWER_MAX_ITER {
        let y = gram.mul_vec(&x);
        let sigma = dot(&x, &y).max(0.0).sqrt();
        let ny = norm2(&y);
        if ny == 0.0 {
            break;
        }
        x = y.into_iter().map(|e| e / ny).collect();
        if let Some(p) = prev {
            if (sigma - p).abs() < POWER_REL_TOL * sigma {
                break;
            }
        }
        prev = Some(sigma);
    }
    x
}

/// Index of the largest value, lowest index among exact ties.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
