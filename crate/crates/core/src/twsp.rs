//! Two-way spectrum pursuit: joint column/row subset selection for CUR.
//!
//! The solver keeps `k1` selected columns and `k2` selected rows, each held in
//! a numbered slot. Every iteration it proposes two single-slot replacements:
//!
//! * column move: drop the column in slot `i`, form the residual
//!   `Eᶜ = X − C_i C_i† X R† R`, take its leading left singular vector `c`,
//!   and snap `c` to the best-matching actual column;
//! * row move: the mirror image on slot `j` with the leading right singular
//!   vector of `Eʳ = X − C C† X R_j† R_j`.
//!
//! Both proposals are scored with the exact CUR error and the better one is
//! accepted (ties, up to [`ERROR_TIE_TOL`], go to the column move). The accepted side then redraws its
//! slot uniformly. Runs stop once the best error seen has stalled over a
//! window of iterations, or at an iteration cap, and return the best
//! selection seen.
//!
//! Random draws come from one [`SeededRng`] stream per run, in this order:
//! initial columns, initial rows, slot `i`, slot `j`, then one slot redraw per
//! iteration for the accepted side.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cur::{projected_residual, validate_indices, CurDecomposition};
use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;
use crate::numkit::{column_space_basis, leading_left_singular_vector};
use crate::rng::SeededRng;

/// Columns (rows) with norm at or below this are never selected.
pub const ZERO_NORM: f64 = 1e-300;
/// Matching scores within this distance of the best are ties, resolved to the lowest index.
pub const MATCH_TIE_TOL: f64 = 1e-9;
/// Residual below this fraction of `‖X‖_F` means the selection is already exact.
pub const EXACT_RESIDUAL: f64 = 1e-12;
/// Errors closer than this fraction of `‖X‖_F` are treated as equal when
/// comparing the two proposals and when updating the best selection seen.
pub const ERROR_TIE_TOL: f64 = 1e-10;
/// In residual matching, a residual column shorter than this fraction of the
/// original column lies in the retained span and is skipped.
pub const IN_SPAN_FRACTION: f64 = 1e-6;

/// What the leading singular vector is matched against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingTarget {
    /// Normalized columns (rows) of the data matrix.
    Data,
    /// Normalized columns (rows) of the residual.
    #[default]
    Residual,
}

impl fmt::Display for MatchingTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchingTarget::Data => "data",
            MatchingTarget::Residual => "residual",
        })
    }
}

impl FromStr for MatchingTarget {
    type Err = CurError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "data" => Ok(MatchingTarget::Data),
            "residual" => Ok(MatchingTarget::Residual),
            other => Err(CurError::Config(format!(
                "unknown matching target '{other}' (expected data or residual)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub k1: usize,
    pub k2: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub saturation_tol: f64,
    pub saturation_window: usize,
    pub matching_target: MatchingTarget,
    pub restarts: usize,
}

impl SolverConfig {
    /// Defaults: `max_iter = 30·max(k1, k2)`, `saturation_tol = 1e-8`,
    /// `saturation_window = max(k1, k2)`, residual matching, one run, seed 0.
    pub fn new(k1: usize, k2: usize) -> Self {
        let k = k1.max(k2);
        Self {
            k1,
            k2,
            seed: 0,
            max_iter: 30 * k,
            saturation_tol: 1e-8,
            saturation_window: k.max(1),
            matching_target: MatchingTarget::Residual,
            restarts: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_matching_target(mut self, target: MatchingTarget) -> Self {
        self.matching_target = target;
        self
    }

    /// Checks the configuration against an `n × m` data matrix.
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.k1 == 0 || self.k1 > m {
            return Err(CurError::Config(format!("k1 = {} must lie in 1..={m}", self.k1)));
        }
        if self.k2 == 0 || self.k2 > n {
            return Err(CurError::Config(format!("k2 = {} must lie in 1..={n}", self.k2)));
        }
        if self.max_iter == 0 {
            return Err(CurError::Config("max_iter must be at least 1".into()));
        }
        if self.saturation_tol.is_nan() || self.saturation_tol < 0.0 {
            return Err(CurError::Config(format!(
                "saturation_tol must be >= 0, got {}",
                self.saturation_tol
            )));
        }
        if self.saturation_window == 0 {
            return Err(CurError::Config("saturation_window must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(CurError::Config("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Current slot contents and the active slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionState {
    pub s_c: Vec<usize>,
    pub s_r: Vec<usize>,
    /// Active column slot.
    pub i: usize,
    /// Active row slot.
    pub j: usize,
}

impl SelectionState {
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        validate_indices(&self.s_c, m, "column")?;
        validate_indices(&self.s_r, n, "row")?;
        if self.i >= self.s_c.len() || self.j >= self.s_r.len() {
            return Err(CurError::Index(format!(
                "active slots ({}, {}) outside {} column / {} row slots",
                self.i,
                self.j,
                self.s_c.len(),
                self.s_r.len()
            )));
        }
        Ok(())
    }
}

/// A proposed replacement for the active slot and the resulting CUR error `‖X − CUR‖_F`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub index: usize,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    Column,
    Row,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Column => "column",
            Move::Row => "row",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Saturated,
    MaxIter,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Saturated => "saturated",
            Termination::MaxIter => "max_iter",
        })
    }
}

/// One iteration. `e_c`/`e_r` are unnormalized errors of the two proposals;
/// `current_error`/`best_error` are normalized by `‖X‖_F²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `‖X − CUR‖_F` of the column candidate.
    pub e_c: f64,
    /// `‖X − CUR‖_F` of the row candidate.
    pub e_r: f64,
    pub accepted: Move,
    /// Normalized error `‖X − CUR‖_F² / ‖X‖_F²` after the move.
    pub current_error: f64,
    /// Lowest normalized error seen so far.
    pub best_error: f64,
    /// Selection after the accepted move.
    pub col_indices: Vec<usize>,
    pub row_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    /// Seed of this run (the configured seed plus the restart number).
    pub seed: u64,
    pub initial_error: f64,
    pub initial_col_indices: Vec<usize>,
    pub initial_row_indices: Vec<usize>,
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Best normalized error seen, including the initial selection.
    pub fn best_error(&self) -> f64 {
        self.records.last().map_or(self.initial_error, |r| r.best_error)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwspSolution {
    pub decomposition: CurDecomposition,
    /// `‖X − CUR‖_F² / ‖X‖_F²` of the returned selection.
    pub normalized_error: f64,
    /// Trace of the winning run.
    pub trace: ConvergenceTrace,
    /// Which restart won (0-based).
    pub restart: usize,
}

/// The data matrix with everything the iterations reuse.
struct Problem<'a> {
    x: &'a DenseMatrix,
    xt: DenseMatrix,
    col_norms: Vec<f64>,
    row_norms: Vec<f64>,
    fro: f64,
}

impl<'a> Problem<'a> {
    fn new(x: &'a DenseMatrix) -> Result<Self> {
        let fro = x.fro_norm();
        if fro == 0.0 {
            return Err(CurError::Degenerate("data matrix is all zero".into()));
        }
        Ok(Self {
            x,
            xt: x.transpose(),
            col_norms: x.column_norms(),
            row_norms: x.row_norms(),
            fro,
        })
    }

    fn column_candidate(&self, st: &SelectionState, target: MatchingTarget) -> Result<Candidate> {
        let index = side_match(self.x, &self.col_norms, self.fro, &st.s_c, &st.s_r, st.i, target)?;
        let mut cols = st.s_c.clone();
        cols[st.i] = index;
        Ok(Candidate {
            index,
            error: self.error(&cols, &st.s_r)?,
        })
    }

    /// Row moves are matched as column moves on `Xᵀ`. Both sides are scored
    /// by [`Problem::error`] so that equal selections get bit-identical errors.
    fn row_candidate(&self, st: &SelectionState, target: MatchingTarget) -> Result<Candidate> {
        let index = side_match(&self.xt, &self.row_norms, self.fro, &st.s_r, &st.s_c, st.j, target)?;
        let mut rows = st.s_r.clone();
        rows[st.j] = index;
        Ok(Candidate {
            index,
            error: self.error(&st.s_c, &rows)?,
        })
    }

    fn error(&self, cols: &[usize], rows: &[usize]) -> Result<f64> {
        let q_c = column_space_basis(&self.x.select_columns(cols)?, None)?;
        let q_r = column_space_basis(&self.xt.select_columns(rows)?, None)?;
        Ok(projected_residual(self.x, &q_c, &q_r).fro_norm())
    }
}

/// Replacement index for slot `slot` of the column selection `sel` of `data`,
/// with `other` the (fixed) row selection.
fn side_match(
    data: &DenseMatrix,
    norms: &[f64],
    fro: f64,
    sel: &[usize],
    other: &[usize],
    slot: usize,
    target: MatchingTarget,
) -> Result<usize> {
    let removed = sel[slot];
    let kept: Vec<usize> = sel
        .iter()
        .enumerate()
        .filter_map(|(t, &c)| (t != slot).then_some(c))
        .collect();
    let q_r = column_space_basis(&data.select_rows(other)?.transpose(), None)?;
    let q_kept = column_space_basis(&data.select_columns(&kept)?, None)?;
    let residual = projected_residual(data, &q_kept, &q_r);
    if residual.fro_norm() <= EXACT_RESIDUAL * fro {
        return Ok(removed);
    }
    let direction = leading_left_singular_vector(&residual)?.u;

    let mut blocked = vec![false; data.ncols()];
    for &c in &kept {
        blocked[c] = true;
    }
    let admissible = |m: usize| !blocked[m] && norms[m] > ZERO_NORM;
    let scores = match target {
        MatchingTarget::Data => {
            let proj = data.tr_mul_vec(&direction);
            proj.iter()
                .enumerate()
                .map(|(m, p)| admissible(m).then(|| p.abs() / norms[m]))
                .collect::<Vec<_>>()
        }
        MatchingTarget::Residual => {
            let proj = residual.tr_mul_vec(&direction);
            let res_norms = residual.column_norms();
            proj.iter()
                .enumerate()
                .map(|(m, p)| {
                    (admissible(m) && res_norms[m] > IN_SPAN_FRACTION * norms[m])
                        .then(|| p.abs() / res_norms[m])
                })
                .collect::<Vec<_>>()
        }
    };
    Ok(best_match(&scores).unwrap_or(removed))
}

/// Highest-scoring admissible index; scores within [`MATCH_TIE_TOL`] of the
/// maximum count as ties and the lowest index wins.
pub(crate) fn best_match(scores: &[Option<f64>]) -> Option<usize> {
    let max = scores.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    scores
        .iter()
        .position(|s| matches!(s, Some(v) if *v >= max - MATCH_TIE_TOL))
}

/// Column proposal for the active column slot `state.i`.
pub fn column_candidate(x: &DenseMatrix, state: &SelectionState, cfg: &SolverConfig) -> Result<Candidate> {
    state.validate(x.nrows(), x.ncols())?;
    Problem::new(x)?.column_candidate(state, cfg.matching_target)
}

/// Row proposal for the active row slot `state.j`.
pub fn row_candidate(x: &DenseMatrix, state: &SelectionState, cfg: &SolverConfig) -> Result<Candidate> {
    state.validate(x.nrows(), x.ncols())?;
    Problem::new(x)?.row_candidate(state, cfg.matching_target)
}

/// Indices whose norm exceeds [`ZERO_NORM`].
pub(crate) fn nonzero_indices(norms: &[f64]) -> Vec<usize> {
    norms
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v > ZERO_NORM).then_some(i))
        .collect()
}

/// Runs the solver; with `cfg.restarts > 1`, independent runs use seeds
/// `cfg.seed, cfg.seed + 1, …` and the lowest error wins (earliest restart on ties).
pub fn solve(x: &DenseMatrix, cfg: &SolverConfig) -> Result<TwspSolution> {
    cfg.validate(x.nrows(), x.ncols())?;
    let problem = Problem::new(x)?;
    let nonzero_cols = nonzero_indices(&problem.col_norms);
    let nonzero_rows = nonzero_indices(&problem.row_norms);
    if cfg.k1 > nonzero_cols.len() || cfg.k2 > nonzero_rows.len() {
        return Err(CurError::Config(format!(
            "need {} nonzero columns and {} nonzero rows, matrix has {} and {}",
            cfg.k1,
            cfg.k2,
            nonzero_cols.len(),
            nonzero_rows.len()
        )));
    }

    let mut best: Option<(ConvergenceTrace, Vec<usize>, Vec<usize>, usize)> = None;
    for restart in 0..cfg.restarts {
        let seed = cfg.seed.wrapping_add(restart as u64);
        let (trace, cols, rows) = run_once(&problem, cfg, seed, &nonzero_cols, &nonzero_rows)?;
        // square roots are errors in units of ‖X‖_F
        let better = best
            .as_ref()
            .is_none_or(|(t, ..)| trace.best_error().sqrt() < t.best_error().sqrt() - ERROR_TIE_TOL);
        if better {
            best = Some((trace, cols, rows, restart));
        }
    }
    let (trace, cols, rows, restart) = best.expect("at least one restart");
    let decomposition = CurDecomposition::fit(x, &cols, &rows)?;
    Ok(TwspSolution {
        normalized_error: trace.best_error(),
        decomposition,
        trace,
        restart,
    })
}

fn run_once(
    problem: &Problem<'_>,
    cfg: &SolverConfig,
    seed: u64,
    nonzero_cols: &[usize],
    nonzero_rows: &[usize],
) -> Result<(ConvergenceTrace, Vec<usize>, Vec<usize>)> {
    let mut rng = SeededRng::new(seed);
    let s_c = rng.sample_without_replacement(nonzero_cols, cfg.k1)?;
    let s_r = rng.sample_without_replacement(nonzero_rows, cfg.k2)?;
    let i = rng.below(cfg.k1);
    let j = rng.below(cfg.k2);
    let initial_col_indices = s_c.clone();
    let initial_row_indices = s_r.clone();
    let mut state = SelectionState { s_c, s_r, i, j };

    let fro2 = problem.fro * problem.fro;
    let tie = ERROR_TIE_TOL * problem.fro;
    let initial_raw = problem.error(&state.s_c, &state.s_r)?;
    let initial_error = initial_raw.powi(2) / fro2;
    let mut best_raw = initial_raw;
    let mut best_error = initial_error;
    let mut best_sel = (state.s_c.clone(), state.s_r.clone());
    // best-so-far after each iteration, index 0 = initial selection
    let mut history = vec![initial_error];
    let mut records = Vec::new();
    let mut termination = Termination::MaxIter;

    for iteration in 1..=cfg.max_iter {
        let col = problem.column_candidate(&state, cfg.matching_target)?;
        let row = problem.row_candidate(&state, cfg.matching_target)?;
        let (accepted, error) = if col.error <= row.error + tie {
            state.s_c[state.i] = col.index;
            state.i = rng.below(cfg.k1);
            (Move::Column, col.error)
        } else {
            state.s_r[state.j] = row.index;
            state.j = rng.below(cfg.k2);
            (Move::Row, row.error)
        };
        let current_error = error * error / fro2;
        if error < best_raw - tie {
            best_raw = error;
            best_error = current_error;
            best_sel = (state.s_c.clone(), state.s_r.clone());
        }
        records.push(IterationRecord {
            iteration,
            e_c: col.error,
            e_r: row.error,
            accepted,
            current_error,
            best_error,
            col_indices: state.s_c.clone(),
            row_indices: state.s_r.clone(),
        });
        history.push(best_error);
        if iteration >= cfg.saturation_window {
            let old = history[iteration - cfg.saturation_window];
            if old - best_error <= cfg.saturation_tol * old {
                termination = Termination::Saturated;
                break;
            }
        }
    }

    let trace = ConvergenceTrace {
        seed,
        initial_error,
        initial_col_indices,
        initial_row_indices,
        records,
        termination,
    };
    Ok((trace, best_sel.0, best_sel.1))
}
