//! The triple `(X, Q, D)` and its generalized eigendecomposition.

mod decomposition;
mod metric;
mod triple;

pub use decomposition::{
    decompose, transition_check, Decomposition, TransitionResiduals, TIE_THRESHOLD, ZERO_THRESHOLD,
};
pub use metric::{Metric, PIVOT_TOLERANCE, SYMMETRY_TOLERANCE};
pub use triple::Triple;

pub(crate) use decomposition::{find_ties, orient_columns};
pub(crate) use metric::{spd_inverse, spd_solve, symmetrize};
pub(crate) use triple::center_with;

use nalgebra::DMatrix;

use crate::error::Result;

/// Builds a validated [`Triple`].
pub fn make_triple(x: DMatrix<f64>, q: DMatrix<f64>, d: DMatrix<f64>) -> Result<Triple> {
    Triple::new(x, q, d)
}

pub fn center_columns(t: &Triple) -> Triple {
    t.center_columns()
}

/// `(VQ, WD)`; both share the same nonzero eigenvalues.
pub fn characterizing_operators(t: &Triple) -> (DMatrix<f64>, DMatrix<f64>) {
    t.characterizing_operators()
}
