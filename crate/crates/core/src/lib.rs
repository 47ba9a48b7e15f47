//! Joint column/row subset selection for CUR matrix decomposition.
//!
//! The main entry point is [`twsp::solve`], a two-way spectrum pursuit solver
//! that picks `k1` actual columns and `k2` actual rows of a data matrix and
//! fits the least-squares core between them. [`baselines`] holds the
//! comparison selectors, [`synth`] the seeded benchmark data, and
//! [`applications`] the core-matrix channel assignment and cross-class kernels.
//!
//! All indices are 0-based.

pub mod applications;
pub mod baselines;
pub mod cur;
pub mod error;
pub mod io;
pub mod matrix;
pub mod numkit;
pub mod rng;
pub mod synth;
pub mod twsp;

pub use cur::{core_matrix, normalized_error, reconstruct, reconstruction_error, CurDecomposition};
pub use error::{CurError, Result};
pub use matrix::DenseMatrix;
pub use rng::SeededRng;
pub use twsp::{solve, MatchingTarget, SolverConfig, TwspSolution};
