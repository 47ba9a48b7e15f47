//! Assembling and scoring CUR decompositions.
//!
//! For a selection of columns `C = X(:, cols)` and rows `R = X(rows, :)` the
//! core is `U = C† X R†`, the least-squares minimizer of `‖X − C U R‖_F`.
//! Errors are evaluated through orthonormal range bases, so that
//! `X − C U R = X − Q_c Q_cᵀ X Q_r Q_rᵀ`. Rank-deficient selections are
//! handled by the automatic rank tolerance of the pseudo-inverse.

use serde::{Deserialize, Serialize};

use crate::error::{CurError, Result};
use crate::matrix::{gemm, DenseMatrix, Op};
use crate::numkit::{column_space_basis, pseudo_inverse};

/// Selected column indices, selected row indices (both 0-based), and the
/// `cols.len() × rows.len()` core matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CurDecomposition {
    pub col_indices: Vec<usize>,
    pub row_indices: Vec<usize>,
    pub core: DenseMatrix,
}

impl CurDecomposition {
    /// Selects the given columns and rows of `x` and fits the core.
    pub fn fit(x: &DenseMatrix, cols: &[usize], rows: &[usize]) -> Result<Self> {
        Ok(Self {
            core: core_matrix(x, cols, rows)?,
            col_indices: cols.to_vec(),
            row_indices: rows.to_vec(),
        })
    }

    /// Checks index validity against an `n × m` matrix and the core shape.
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        validate_indices(&self.col_indices, m, "column")?;
        validate_indices(&self.row_indices, n, "row")?;
        if self.core.shape() != (self.col_indices.len(), self.row_indices.len()) {
            return Err(CurError::Dimension(format!(
                "core is {:?} but selection is {}x{}",
                self.core.shape(),
                self.col_indices.len(),
                self.row_indices.len()
            )));
        }
        Ok(())
    }
}

/// Serializable copy of a matrix: shape plus row-major data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&DenseMatrix> for MatrixData {
    fn from(m: &DenseMatrix) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.as_slice().to_vec(),
        }
    }
}

impl TryFrom<MatrixData> for DenseMatrix {
    type Error = CurError;

    fn try_from(m: MatrixData) -> Result<Self> {
        DenseMatrix::new(m.rows, m.cols, m.data)
    }
}

/// Non-empty, in range, no duplicates.
pub fn validate_indices(indices: &[usize], bound: usize, what: &str) -> Result<()> {
    if indices.is_empty() {
        return Err(CurError::Index(format!("empty {what} selection")));
    }
    let mut seen = vec![false; bound];
    for &i in indices {
        if i >= bound {
            return Err(CurError::Index(format!("{what} index {i} out of range (< {bound})")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(CurError::Index(format!("duplicate {what} index {i}")));
        }
    }
    Ok(())
}

/// `U = C† X R†` for `C = X(:, cols)`, `R = X(rows, :)`.
pub fn core_matrix(x: &DenseMatrix, cols: &[usize], rows: &[usize]) -> Result<DenseMatrix> {
    validate_indices(cols, x.ncols(), "column")?;
    validate_indices(rows, x.nrows(), "row")?;
    let c_pinv = pseudo_inverse(&x.select_columns(cols)?, None)?;
    let r_pinv = pseudo_inverse(&x.select_rows(rows)?, None)?;
    let cx = gemm(&c_pinv, Op::N, x, Op::N);
    Ok(gemm(&cx, Op::N, &r_pinv, Op::N))
}

/// `‖X − C U R‖_F` with the optimal core.
pub fn reconstruction_error(x: &DenseMatrix, cols: &[usize], rows: &[usize]) -> Result<f64> {
    validate_indices(cols, x.ncols(), "column")?;
    validate_indices(rows, x.nrows(), "row")?;
    Ok(selection_residual(x, cols, rows)?.fro_norm())
}

/// `‖X − C U R‖_F² / ‖X‖_F²`.
pub fn normalized_error(x: &DenseMatrix, cols: &[usize], rows: &[usize]) -> Result<f64> {
    let total = x.fro_norm();
    if total == 0.0 {
        return Err(CurError::Degenerate("normalized error of an all-zero matrix".into()));
    }
    let e = reconstruction_error(x, cols, rows)?;
    Ok((e / total).powi(2))
}

/// `C U R`, shaped like `x`.
pub fn reconstruct(x: &DenseMatrix, dec: &CurDecomposition) -> Result<DenseMatrix> {
    dec.validate(x.nrows(), x.ncols())?;
    let c = x.select_columns(&dec.col_indices)?;
    let r = x.select_rows(&dec.row_indices)?;
    let cu = gemm(&c, Op::N, &dec.core, Op::N);
    Ok(gemm(&cu, Op::N, &r, Op::N))
}

/// `X − C U R` for unchecked (but in-range) index lists.
pub(crate) fn selection_residual(x: &DenseMatrix, cols: &[usize], rows: &[usize]) -> Result<DenseMatrix> {
    let q_c = column_space_basis(&x.select_columns(cols)?, None)?;
    let q_r = column_space_basis(&x.select_rows(rows)?.transpose(), None)?;
    Ok(projected_residual(x, &q_c, &q_r))
}

/// `X − Q_c Q_cᵀ X Q_r Q_rᵀ` for orthonormal bases `q_c` (N×a) and `q_r` (M×b).
pub(crate) fn projected_residual(x: &DenseMatrix, q_c: &DenseMatrix, q_r: &DenseMatrix) -> DenseMatrix {
    let mut out = x.clone();
    if q_c.ncols() == 0 || q_r.ncols() == 0 {
        return out;
    }
    let z = gemm(x, Op::N, q_r, Op::N);
    let t = gemm(q_c, Op::T, &z, Op::N);
    let l = gemm(q_c, Op::N, &t, Op::N);
    let approx = gemm(&l, Op::N, q_r, Op::T);
    for (o, a) in out.as_mut_slice().iter_mut().zip(approx.as_slice()) {
        *o -= a;
    }
    out
}
