//! Comparison selectors: one-way spectrum pursuit applied to `X` and `Xᵀ`,
//! leverage-score sampling, uniform sampling, and exhaustive search.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cur::{projected_residual, CurDecomposition};
use crate::error::{CurError, Result};
use crate::matrix::{gemm, DenseMatrix, Op};
use crate::numkit::{column_space_basis, leading_left_singular_vector, svd, Svd};
use crate::rng::SeededRng;
use crate::twsp::{
    best_match, nonzero_indices, MatchingTarget, EXACT_RESIDUAL, IN_SPAN_FRACTION, ZERO_NORM,
};

/// Largest number of (column subset, row subset) pairs the exhaustive search visits.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    SpIndependent,
    Leverage,
    Random,
    BruteForce,
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::SpIndependent => "sp",
            BaselineKind::Leverage => "leverage",
            BaselineKind::Random => "random",
            BaselineKind::BruteForce => "brute",
        })
    }
}

impl FromStr for BaselineKind {
    type Err = CurError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp" | "sp_independent" => Ok(BaselineKind::SpIndependent),
            "leverage" => Ok(BaselineKind::Leverage),
            "random" => Ok(BaselineKind::Random),
            "brute" | "brute_force" => Ok(BaselineKind::BruteForce),
            other => Err(CurError::Config(format!("unknown baseline '{other}'"))),
        }
    }
}

/// Settings for one-way spectrum pursuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpConfig {
    pub seed: u64,
    /// `None` = `30·k`.
    pub max_iter: Option<usize>,
    pub matching_target: MatchingTarget,
}

impl SpConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            max_iter: None,
            matching_target: MatchingTarget::Residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpSelection {
    pub indices: Vec<usize>,
    pub iterations: usize,
    /// A full cycle over all slots left the selection unchanged.
    pub saturated: bool,
}

/// One-way spectrum pursuit column selection.
///
/// Slots are visited cyclically. For slot `k`, the other selected columns are
/// normalized, `X` is projected onto the orthogonal complement of their span,
/// and the leading left singular vector of that residual is matched to a
/// column (by default the best-correlated normalized residual column). The
/// run stops after a full cycle without any change, or at `max_iter`.
pub fn sp_select(x: &DenseMatrix, k: usize, cfg: &SpConfig) -> Result<SpSelection> {
    let norms = x.column_norms();
    let pool = nonzero_indices(&norms);
    if k == 0 || k > pool.len() {
        return Err(CurError::Config(format!(
            "k = {k} must lie in 1..={} (nonzero columns)",
            pool.len()
        )));
    }
    let fro = x.fro_norm();
    let max_iter = cfg.max_iter.unwrap_or(30 * k);
    let mut rng = SeededRng::new(cfg.seed);
    let mut sel = rng.sample_without_replacement(&pool, k)?;

    let mut unchanged = 0;
    let mut iterations = 0;
    let mut saturated = false;
    while iterations < max_iter {
        let slot = iterations % k;
        iterations += 1;
        let kept: Vec<usize> = sel
            .iter()
            .enumerate()
            .filter_map(|(t, &c)| (t != slot).then_some(c))
            .collect();
        let normalized = DenseMatrix::from_fn(x.nrows(), kept.len(), |i, t| {
            x.get(i, kept[t]) / norms[kept[t]]
        })?;
        let q = column_space_basis(&normalized, None)?;
        let residual = column_residual(x, &q);

        let old = sel[slot];
        if residual.fro_norm() > EXACT_RESIDUAL * fro {
            let u = leading_left_singular_vector(&residual)?.u;
            let mut blocked = vec![false; x.ncols()];
            kept.iter().for_each(|&c| blocked[c] = true);
            let admissible = |m: usize| !blocked[m] && norms[m] > ZERO_NORM;
            let scores: Vec<Option<f64>> = match cfg.matching_target {
                MatchingTarget::Residual => {
                    let proj = residual.tr_mul_vec(&u);
                    let res_norms = residual.column_norms();
                    proj.iter()
                        .enumerate()
                        .map(|(m, p)| {
                            (admissible(m) && res_norms[m] > IN_SPAN_FRACTION * norms[m])
                                .then(|| p.abs() / res_norms[m])
                        })
                        .collect()
                }
                MatchingTarget::Data => {
                    let proj = x.tr_mul_vec(&u);
                    proj.iter()
                        .enumerate()
                        .map(|(m, p)| admissible(m).then(|| p.abs() / norms[m]))
                        .collect()
                }
            };
            if let Some(best) = best_match(&scores) {
                sel[slot] = best;
            }
        }
        if sel[slot] == old {
            unchanged += 1;
            if unchanged >= k {
                saturated = true;
                break;
            }
        } else {
            unchanged = 0;
        }
    }
    Ok(SpSelection {
        indices: sel,
        iterations,
        saturated,
    })
}

/// `X − Q Qᵀ X`.
fn column_residual(x: &DenseMatrix, q: &DenseMatrix) -> DenseMatrix {
    if q.ncols() == 0 {
        return x.clone();
    }
    let t = gemm(q, Op::T, x, Op::N);
    let proj = gemm(q, Op::N, &t, Op::N);
    x.sub(&proj).expect("equal shapes")
}

/// Columns by spectrum pursuit on `X`, rows by spectrum pursuit on `Xᵀ`,
/// both with the same settings, and the optimal core for that pair.
pub fn sp_independent_cur(x: &DenseMatrix, k1: usize, k2: usize, cfg: &SpConfig) -> Result<(CurDecomposition, usize)> {
    let cols = sp_select(x, k1, cfg)?;
    let rows = sp_select(&x.transpose(), k2, cfg)?;
    let dec = CurDecomposition::fit(x, &cols.indices, &rows.indices)?;
    Ok((dec, cols.iterations + rows.iterations))
}

/// Leverage-score sampling probabilities at target rank `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeverageScores {
    pub col_probs: Vec<f64>,
    pub row_probs: Vec<f64>,
}

/// Column scores `‖V_r(j,:)‖²` and row scores `‖U_r(i,:)‖²`, each normalized to sum to one.
pub fn leverage_scores(x: &DenseMatrix, r: usize) -> Result<LeverageScores> {
    leverage_scores_from_svd(&svd(x)?, r)
}

/// As [`leverage_scores`], reusing a precomputed thin SVD of the matrix.
pub fn leverage_scores_from_svd(dec: &Svd, r: usize) -> Result<LeverageScores> {
    let p = dec.singular_values.len();
    if r == 0 || r > p {
        return Err(CurError::Config(format!("target rank {r} must lie in 1..={p}")));
    }
    let scores = |basis: &DenseMatrix| -> Result<Vec<f64>> {
        let raw: Vec<f64> = (0..basis.nrows())
            .map(|i| basis.row(i)[..r].iter().map(|v| v * v).sum::<f64>())
            .collect();
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(CurError::Degenerate("leverage scores of a zero matrix".into()));
        }
        Ok(raw.into_iter().map(|v| v / total).collect())
    };
    Ok(LeverageScores {
        col_probs: scores(&dec.v)?,
        row_probs: scores(&dec.u)?,
    })
}

/// Samples `k1` columns and `k2` rows without replacement proportionally to
/// leverage scores (columns first, then rows, from one stream) and fits the core.
pub fn leverage_cur(x: &DenseMatrix, k1: usize, k2: usize, r: usize, seed: u64) -> Result<CurDecomposition> {
    leverage_cur_with_scores(x, &leverage_scores(x, r)?, k1, k2, seed)
}

pub fn leverage_cur_with_scores(
    x: &DenseMatrix,
    scores: &LeverageScores,
    k1: usize,
    k2: usize,
    seed: u64,
) -> Result<CurDecomposition> {
    let mut rng = SeededRng::new(seed);
    let cols = rng.weighted_without_replacement(&scores.col_probs, k1)?;
    let rows = rng.weighted_without_replacement(&scores.row_probs, k2)?;
    CurDecomposition::fit(x, &cols, &rows)
}

/// Uniform sampling without replacement over nonzero columns, then nonzero rows.
pub fn random_cur(x: &DenseMatrix, k1: usize, k2: usize, seed: u64) -> Result<CurDecomposition> {
    let mut rng = SeededRng::new(seed);
    let cols = rng.sample_without_replacement(&nonzero_indices(&x.column_norms()), k1)?;
    let rows = rng.sample_without_replacement(&nonzero_indices(&x.row_norms()), k2)?;
    CurDecomposition::fit(x, &cols, &rows)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Visits all `k`-subsets of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return Ok(());
        };
        idx[pos] += 1;
        for t in pos + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Exhaustive minimization of `‖X − CUR‖_F` over all column and row subsets.
///
/// Ties keep the lexicographically smallest pair (columns compared first).
/// Refuses when `C(M, k1) · C(N, k2)` exceeds [`BRUTE_FORCE_LIMIT`].
pub fn brute_force_cur(x: &DenseMatrix, k1: usize, k2: usize) -> Result<(CurDecomposition, f64)> {
    let (n, m) = x.shape();
    if k1 == 0 || k1 > m || k2 == 0 || k2 > n {
        return Err(CurError::Config(format!(
            "k1 = {k1}, k2 = {k2} out of range for a {n}x{m} matrix"
        )));
    }
    let pairs = binomial(m, k1) * binomial(n, k2);
    if pairs > BRUTE_FORCE_LIMIT {
        return Err(CurError::SearchTooLarge {
            pairs,
            bound: BRUTE_FORCE_LIMIT,
        });
    }
    let xt = x.transpose();
    let mut row_sets = Vec::new();
    for_each_combination(n, k2, |rows| {
        let q = column_space_basis(&xt.select_columns(rows)?, None)?;
        row_sets.push((rows.to_vec(), q));
        Ok(())
    })?;

    let mut best: Option<(Vec<usize>, Vec<usize>, f64)> = None;
    for_each_combination(m, k1, |cols| {
        let q_c = column_space_basis(&x.select_columns(cols)?, None)?;
        for (rows, q_r) in &row_sets {
            let e = projected_residual(x, &q_c, q_r).fro_norm();
            if best.as_ref().is_none_or(|b| e < b.2) {
                best = Some((cols.to_vec(), rows.clone(), e));
            }
        }
        Ok(())
    })?;
    let (cols, rows, e) = best.expect("at least one subset pair");
    Ok((CurDecomposition::fit(x, &cols, &rows)?, e))
}
