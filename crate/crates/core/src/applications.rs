//! Uses of the core matrix and of cross-class kernels.

use serde::{Deserialize, Serialize};

use crate::error::{CurError, Result};
use crate::matrix::{gemm, DenseMatrix, Op};

/// One pick: a column label, its core entry and that entry's magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelPick {
    pub col_id: usize,
    pub value: f64,
    pub weight: f64,
}

/// Top-`f` column labels for one labelled row of the core.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowAssignment {
    pub row_id: usize,
    /// Descending by weight.
    pub picks: Vec<ChannelPick>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelAssignment {
    pub rows: Vec<RowAssignment>,
}

/// For each row of `core`, the `f` column labels whose entries have the
/// largest magnitude; equal magnitudes go to the lower column label.
///
/// `row_ids` and `col_ids` label the axes of `core`. For sensor/channel
/// selection the core is laid out as sensors × channels, i.e. the transpose
/// of the `U` in `X ≈ C U R` when rows of `X` are locations and columns are
/// channels.
pub fn assign_top_f(
    core: &DenseMatrix,
    f: usize,
    row_ids: &[usize],
    col_ids: &[usize],
) -> Result<ChannelAssignment> {
    if f == 0 || f > core.ncols() {
        return Err(CurError::Config(format!(
            "f = {f} must lie in 1..={}",
            core.ncols()
        )));
    }
    if row_ids.len() != core.nrows() || col_ids.len() != core.ncols() {
        return Err(CurError::Dimension(format!(
            "labels ({} rows, {} cols) do not match a {}x{} core",
            row_ids.len(),
            col_ids.len(),
            core.nrows(),
            core.ncols()
        )));
    }
    let rows = row_ids
        .iter()
        .enumerate()
        .map(|(i, &row_id)| {
            let mut picks: Vec<ChannelPick> = core
                .row(i)
                .iter()
                .zip(col_ids)
                .map(|(&value, &col_id)| ChannelPick {
                    col_id,
                    value,
                    weight: value.abs(),
                })
                .collect();
            picks.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.col_id.cmp(&b.col_id)));
            picks.truncate(f);
            RowAssignment { row_id, picks }
        })
        .collect();
    Ok(ChannelAssignment { rows })
}

/// `X2ᵀ X1`: columns index class-1 samples, rows index class-2 samples.
pub fn cross_class_kernel(x1: &DenseMatrix, x2: &DenseMatrix) -> Result<DenseMatrix> {
    if x1.nrows() != x2.nrows() {
        return Err(CurError::Dimension(format!(
            "feature dimensions differ: {} vs {}",
            x1.nrows(),
            x2.nrows()
        )));
    }
    Ok(gemm(x2, Op::T, x1, Op::N))
}

/// Side-by-side concatenation of matrices with equal row counts.
pub fn hconcat(parts: &[&DenseMatrix]) -> Result<DenseMatrix> {
    let Some(first) = parts.first() else {
        return Err(CurError::Dimension("nothing to concatenate".into()));
    };
    let n = first.nrows();
    if let Some(bad) = parts.iter().find(|p| p.nrows() != n) {
        return Err(CurError::Dimension(format!(
            "row counts differ: {n} vs {}",
            bad.nrows()
        )));
    }
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut data = Vec::with_capacity(n * cols);
    for i in 0..n {
        for p in parts {
            data.extend_from_slice(p.row(i));
        }
    }
    Ok(DenseMatrix::from_raw(n, cols, data))
}

/// One kernel per class for one-versus-all selection: class `c` is `X1`, and
/// the remaining classes, concatenated in order, are `X2`.
pub fn one_vs_all_kernels(classes: &[DenseMatrix]) -> Result<Vec<DenseMatrix>> {
    if classes.len() < 2 {
        return Err(CurError::Config("one-versus-all needs at least two classes".into()));
    }
    (0..classes.len())
        .map(|c| {
            let rest: Vec<&DenseMatrix> = classes
                .iter()
                .enumerate()
                .filter_map(|(k, m)| (k != c).then_some(m))
                .collect();
            cross_class_kernel(&classes[c], &hconcat(&rest)?)
        })
        .collect()
}
