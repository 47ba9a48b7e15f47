//! Thin SVD by one-sided (Hestenes) Jacobi rotations.
//!
//! Columns of a working copy are orthogonalized pairwise until every pair is
//! numerically orthogonal; the column norms are then the singular values.
//! The method is slow for big matrices but accurate to working precision,
//! even for small singular values.

use crate::error::{CurError, Result};
use crate::matrix::{dot, DenseMatrix};

const MAX_SWEEPS: usize = 100;

/// Thin singular value decomposition `A = U · diag(s) · Vᵀ`.
///
/// With `p = min(rows, cols)`: `u` is `rows × p`, `v` is `cols × p`, and
/// `singular_values` is non-increasing. Columns of `u` paired with a zero
/// singular value are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl Svd {
    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().take_while(|&&s| s > tol).count()
    }

    /// Default rank cut-off: `max(rows, cols) · ε · σ_max`.
    pub fn default_tolerance(&self) -> f64 {
        let dim = self.u.nrows().max(self.v.nrows()) as f64;
        dim * f64::EPSILON * self.singular_values.first().copied().unwrap_or(0.0)
    }
}

pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    if a.is_empty() {
        return Err(CurError::Dimension(format!(
            "svd of an empty {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() >= a.ncols() {
        Ok(jacobi_tall(a))
    } else {
        let t = jacobi_tall(&a.transpose());
        Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        })
    }
}

/// Jacobi SVD for `rows >= cols`.
fn jacobi_tall(a: &DenseMatrix) -> Svd {
    let (m, n) = a.shape();
    // Column-major working copies.
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let tol = f64::EPSILON * m as f64;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = w.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                let (lo, hi) = v.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = w.iter().map(|col| dot(col, col).sqrt()).enumerate().collect();
    // Stable sort keeps the original order among equal values.
    order.sort_by(|x, y| y.1.total_cmp(&x.1));

    let mut u = DenseMatrix::zeros(m, n);
    let mut vm = DenseMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            for (i, &wi) in w[j].iter().enumerate().take(m) {
                u.set(i, k, wi / sigma);
            }
        }
        for (i, &vi) in v[j].iter().enumerate().take(n) {
            vm.set(i, k, vi);
        }
    }
    Svd {
        u,
        singular_values: s,
        v: vm,
    }
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}
