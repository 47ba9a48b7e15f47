//! Dense linear-algebra primitives used by every selector: pseudo-inverse,
//! singular spectrum, leading singular vectors, norms, and orthonormal range
//! bases for projections.

mod power;
mod svd;

pub use power::{
    leading_left_singular_vector, leading_right_singular_vector, SingularTriplet, POWER_MAX_ITER,
    POWER_REL_TOL,
};
pub use svd::{svd, Svd};

use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;

/// Moore–Penrose pseudo-inverse.
///
/// Singular values at or below `rank_tol` are treated as zero. `None` selects
/// `max(rows, cols) · ε · σ_max`.
pub fn pseudo_inverse(a: &DenseMatrix, rank_tol: Option<f64>) -> Result<DenseMatrix> {
    let dec = svd(a)?;
    let tol = resolve_tol(&dec, rank_tol)?;
    let (m, n) = a.shape();
    let r = dec.rank(tol);
    // A† = V_r Σ_r⁻¹ U_rᵀ
    let mut out = DenseMatrix::zeros(n, m);
    for k in 0..r {
        let inv = 1.0 / dec.singular_values[k];
        for i in 0..n {
            let vik = dec.v.get(i, k) * inv;
            if vik == 0.0 {
                continue;
            }
            let row = &mut out.as_mut_slice()[i * m..(i + 1) * m];
            for (j, o) in row.iter_mut().enumerate() {
                *o += vik * dec.u.get(j, k);
            }
        }
    }
    Ok(out)
}

/// Full singular spectrum, non-increasing, of length `min(rows, cols)`.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.singular_values)
}

pub fn fro_norm(a: &DenseMatrix) -> f64 {
    a.fro_norm()
}

/// Orthonormal basis (as columns) for the column space of `a`.
///
/// The basis has one column per singular value above the rank tolerance
/// (`None` = automatic, as in [`pseudo_inverse`]), so `Q Qᵀ = a a†`.
/// An `a` with no columns yields an empty `rows × 0` basis.
pub fn column_space_basis(a: &DenseMatrix, rank_tol: Option<f64>) -> Result<DenseMatrix> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(DenseMatrix::zeros(a.nrows(), 0));
    }
    let dec = svd(a)?;
    let tol = resolve_tol(&dec, rank_tol)?;
    let r = dec.rank(tol);
    let keep: Vec<usize> = (0..r).collect();
    dec.u.select_columns(&keep)
}

fn resolve_tol(dec: &Svd, rank_tol: Option<f64>) -> Result<f64> {
    match rank_tol {
        None => Ok(dec.default_tolerance()),
        Some(t) if t >= 0.0 => Ok(t),
        Some(t) => Err(CurError::Config(format!("rank tolerance must be >= 0, got {t}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn rel(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.sub(b).unwrap().fro_norm() / b.fro_norm().max(f64::MIN_POSITIVE)
    }

    fn mp_residuals(a: &DenseMatrix, p: &DenseMatrix) -> [f64; 4] {
        let apa = a.matmul(p).unwrap().matmul(a).unwrap();
        let pap = p.matmul(a).unwrap().matmul(p).unwrap();
        let ap = a.matmul(p).unwrap();
        let pa = p.matmul(a).unwrap();
        [rel(&apa, a), rel(&pap, p), rel(&ap.transpose(), &ap), rel(&pa.transpose(), &pa)]
    }

    #[test]
    fn pinv_identity() {
        let p = pseudo_inverse(&DenseMatrix::identity(3), None).unwrap();
        assert!(rel(&p, &DenseMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn pinv_singular_diagonal() {
        let a = DenseMatrix::diag(&[2.0, 0.0]).unwrap();
        let p = pseudo_inverse(&a, None).unwrap();
        assert_eq!(p, DenseMatrix::diag(&[0.5, 0.0]).unwrap());
    }

    #[test]
    fn pinv_random_satisfies_moore_penrose() {
        let a = SeededRng::new(7).gaussian_matrix(5, 3);
        let p = pseudo_inverse(&a, None).unwrap();
        assert_eq!(p.shape(), (3, 5));
        for r in mp_residuals(&a, &p) {
            assert!(r < 1e-8, "residual {r}");
        }
    }

    #[test]
    fn pinv_rank_deficient_wide() {
        let mut rng = SeededRng::new(70);
        let l = rng.gaussian_matrix(4, 2);
        let r = rng.gaussian_matrix(2, 9);
        let a = l.matmul(&r).unwrap();
        let p = pseudo_inverse(&a, None).unwrap();
        for res in mp_residuals(&a, &p) {
            assert!(res < 1e-8, "residual {res}");
        }
    }

    #[test]
    fn pinv_errors() {
        assert!(matches!(pseudo_inverse(&DenseMatrix::zeros(0, 3), None), Err(CurError::Dimension(_))));
        assert!(matches!(
            pseudo_inverse(&DenseMatrix::identity(2), Some(-1.0)),
            Err(CurError::Config(_))
        ));
    }

    #[test]
    fn pinv_explicit_tolerance_truncates() {
        let a = DenseMatrix::diag(&[4.0, 1e-3]).unwrap();
        let p = pseudo_inverse(&a, Some(1e-2)).unwrap();
        assert_eq!(p, DenseMatrix::diag(&[0.25, 0.0]).unwrap());
    }

    #[test]
    fn left_vector_of_rank_one() {
        let a = DenseMatrix::outer(&[0.6, 0.8], &[1.0, 0.0, 0.0]).unwrap();
        let t = leading_left_singular_vector(&a).unwrap();
        assert!((t.u[0] - 0.6).abs() < 1e-14 && (t.u[1] - 0.8).abs() < 1e-14);
        assert!((t.sigma - 1.0).abs() < 1e-14);
        let r = leading_right_singular_vector(&a).unwrap();
        assert!((r.v[0] - 1.0).abs() < 1e-14 && r.v[1].abs() < 1e-14 && r.v[2].abs() < 1e-14);
        assert!((r.sigma - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vectors_of_diagonal() {
        let a = DenseMatrix::diag(&[5.0, 2.0]).unwrap();
        let t = leading_left_singular_vector(&a).unwrap();
        assert_eq!(t.u, vec![1.0, 0.0]);
        assert_eq!(t.sigma, 5.0);
        let r = leading_right_singular_vector(&a).unwrap();
        assert_eq!(r.v, vec![1.0, 0.0]);
        assert_eq!(r.sigma, 5.0);
    }

    #[test]
    fn sign_convention_flips_negative_leading_entry() {
        let a = DenseMatrix::outer(&[-0.6, 0.8], &[1.0, 2.0]).unwrap();
        let t = leading_left_singular_vector(&a).unwrap();
        assert!(t.u[0] > 0.0);
        assert!((t.u[0] - 0.6).abs() < 1e-14 && (t.u[1] + 0.8).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let err = leading_left_singular_vector(&DenseMatrix::zeros(2, 2)).unwrap_err();
        assert!(matches!(err, CurError::Degenerate(_)));
        assert!(matches!(
            leading_right_singular_vector(&DenseMatrix::zeros(0, 2)),
            Err(CurError::Dimension(_))
        ));
    }

    #[test]
    fn leading_sigma_matches_spectrum() {
        let a = SeededRng::new(11).gaussian_matrix(6, 4);
        let t = leading_left_singular_vector(&a).unwrap();
        let s = singular_values(&a).unwrap();
        assert!((t.sigma - s[0]).abs() <= 1e-9 * s[0], "{} vs {}", t.sigma, s[0]);
        let unit = |x: &[f64]| (crate::matrix::norm2(x) - 1.0).abs() < 1e-12;
        assert!(unit(&t.u) && unit(&t.v));
    }

    #[test]
    fn right_vector_agrees_with_left_of_transpose() {
        let a = SeededRng::new(13).gaussian_matrix(4, 6);
        let r = leading_right_singular_vector(&a).unwrap();
        let l = leading_left_singular_vector(&a.transpose()).unwrap();
        for (x, y) in r.v.iter().zip(&l.u) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((r.sigma - l.sigma).abs() < 1e-9 * l.sigma);
    }

    #[test]
    fn spectrum_examples() {
        let a = DenseMatrix::diag(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(singular_values(&a).unwrap(), vec![3.0, 2.0, 1.0]);
        assert_eq!(singular_values(&DenseMatrix::zeros(2, 3)).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn spectrum_frobenius_identity() {
        let a = SeededRng::new(3).gaussian_matrix(5, 5);
        let s = singular_values(&a).unwrap();
        let sum: f64 = s.iter().map(|x| x * x).sum();
        let f2 = fro_norm(&a).powi(2);
        assert!((sum - f2).abs() <= 1e-10 * f2);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn fro_norm_examples() {
        assert_eq!(fro_norm(&DenseMatrix::from_rows(&[[3.0, 4.0]]).unwrap()), 5.0);
        assert_eq!(fro_norm(&DenseMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn range_basis_is_orthonormal_and_spans() {
        let mut rng = SeededRng::new(5);
        let base = rng.gaussian_matrix(7, 2);
        // third column is a combination of the first two
        let a = DenseMatrix::from_fn(7, 3, |i, j| match j {
            0 | 1 => base.get(i, j),
            _ => base.get(i, 0) - 2.0 * base.get(i, 1),
        })
        .unwrap();
        let q = column_space_basis(&a, None).unwrap();
        assert_eq!(q.shape(), (7, 2));
        let qtq = q.transpose().matmul(&q).unwrap();
        assert!(rel(&qtq, &DenseMatrix::identity(2)) < 1e-12);
        let proj = q.matmul(&q.transpose().matmul(&a).unwrap()).unwrap();
        assert!(rel(&proj, &a) < 1e-12);
        assert_eq!(column_space_basis(&DenseMatrix::zeros(4, 0), None).unwrap().shape(), (4, 0));
    }
}
