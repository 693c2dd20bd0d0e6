use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative asymmetry tolerated (and then averaged away) on metric input.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// A Cholesky pivot at or below this fraction of the largest diagonal entry
/// is treated as non-positive.
pub const PIVOT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PivotFailure {
    pub pivot: usize,
    pub value: f64,
}

/// Lower Cholesky factor `G` with `G Gᵗ = m`. Only the lower triangle of `m` is read.
pub(crate) fn cholesky_lower(m: &DMatrix<f64>) -> std::result::Result<DMatrix<f64>, PivotFailure> {
    let n = m.nrows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
    let mut g = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot -= g[(j, k)] * g[(j, k)];
        }
        if !pivot.is_finite() || pivot <= PIVOT_TOLERANCE * scale || pivot <= 0.0 {
            return Err(PivotFailure { pivot: j, value: pivot });
        }
        let root = pivot.sqrt();
        g[(j, j)] = root;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= g[(i, k)] * g[(j, k)];
            }
            g[(i, j)] = s / root;
        }
    }
    Ok(g)
}

/// Inverse of a symmetric positive-definite matrix, or `Error::Singular` naming `which`.
pub(crate) fn spd_inverse(m: &DMatrix<f64>, which: &str) -> Result<DMatrix<f64>> {
    let g = cholesky_lower(m).map_err(|f| Error::Singular {
        which: which.to_string(),
        pivot: f.pivot,
    })?;
    let n = m.nrows();
    let ginv = g
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::NumericalBreakdown(format!("triangular solve for {which}")))?;
    Ok(symmetrize(&(ginv.transpose() * ginv)))
}

/// Solve `m x = b` for symmetric positive-definite `m`.
pub(crate) fn spd_solve(m: &DMatrix<f64>, b: &DMatrix<f64>, which: &str) -> Result<DMatrix<f64>> {
    let g = cholesky_lower(m).map_err(|f| Error::Singular {
        which: which.to_string(),
        pivot: f.pivot,
    })?;
    let y = g
        .solve_lower_triangular(b)
        .ok_or_else(|| Error::NumericalBreakdown(format!("triangular solve for {which}")))?;
    g.transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::NumericalBreakdown(format!("triangular solve for {which}")))
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[derive(Debug, Clone)]
enum Factor {
    /// Square roots of the diagonal.
    Diagonal(DVector<f64>),
    /// Lower Cholesky factor.
    Lower(DMatrix<f64>),
}

/// A symmetric positive-definite metric together with its square-root factor `G`
/// (`G Gᵗ = M`). Diagonal metrics keep only the square roots of their entries.
#[derive(Debug, Clone)]
pub struct Metric {
    matrix: DMatrix<f64>,
    factor: Factor,
}

impl Metric {
    /// Validates a dense metric: square, symmetric within tolerance (then averaged),
    /// and positive definite. `name` is used in error messages.
    pub fn new(m: DMatrix<f64>, name: &str) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims(name, "a square matrix", format!("{}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} has non-finite entries")));
        }
        let asym = max_abs(&(&m - m.transpose()));
        if asym > SYMMETRY_TOLERANCE * max_abs(&m) {
            return Err(Error::NotSymmetric {
                which: name.to_string(),
                asymmetry: asym,
            });
        }
        let m = symmetrize(&m);
        let n = m.nrows();
        let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == 0.0));
        if is_diagonal {
            return Self::diagonal(m.diagonal(), name);
        }
        let g = cholesky_lower(&m).map_err(|f| Error::NotPositiveDefinite {
            which: name.to_string(),
            pivot: f.pivot,
            value: f.value,
        })?;
        Ok(Metric {
            matrix: m,
            factor: Factor::Lower(g),
        })
    }

    /// Diagonal metric from its (strictly positive) entries.
    pub fn diagonal(weights: DVector<f64>, name: &str) -> Result<Self> {
        if let Some((pivot, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::NotPositiveDefinite {
                which: name.to_string(),
                pivot,
                value,
            });
        }
        Ok(Metric {
            matrix: DMatrix::from_diagonal(&weights),
            factor: Factor::Diagonal(weights.map(f64::sqrt)),
        })
    }

    pub fn identity(n: usize) -> Self {
        Metric {
            matrix: DMatrix::identity(n, n),
            factor: Factor::Diagonal(DVector::from_element(n, 1.0)),
        }
    }

    /// `(1/n) I_n`, the default observation weights.
    pub fn uniform(n: usize) -> Self {
        let w = 1.0 / n as f64;
        Metric {
            matrix: DMatrix::from_diagonal_element(n, n, w),
            factor: Factor::Diagonal(DVector::from_element(n, w.sqrt())),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.factor, Factor::Diagonal(_))
    }

    /// Returns the diagonal entries if the metric is diagonal.
    pub fn diagonal_entries(&self) -> Option<DVector<f64>> {
        match self.factor {
            Factor::Diagonal(_) => Some(self.matrix.diagonal()),
            Factor::Lower(_) => None,
        }
    }

    /// `M a`
    pub fn apply(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.factor {
            Factor::Diagonal(root) => {
                let mut out = a.clone();
                for (i, mut row) in out.row_iter_mut().enumerate() {
                    row *= root[i] * root[i];
                }
                out
            }
            Factor::Lower(_) => &self.matrix * a,
        }
    }

    /// `Gᵗ a`
    pub(crate) fn factor_t_apply(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.factor {
            Factor::Diagonal(root) => {
                let mut out = a.clone();
                for (i, mut row) in out.row_iter_mut().enumerate() {
                    row *= root[i];
                }
                out
            }
            Factor::Lower(g) => g.tr_mul(a),
        }
    }

    /// `G⁻ᵗ a`
    pub(crate) fn factor_t_solve(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match &self.factor {
            Factor::Diagonal(root) => {
                let mut out = a.clone();
                for (i, mut row) in out.row_iter_mut().enumerate() {
                    row /= root[i];
                }
                Ok(out)
            }
            Factor::Lower(g) => g
                .transpose()
                .solve_upper_triangular(a)
                .ok_or_else(|| Error::NumericalBreakdown("triangular solve with metric factor".into())),
        }
    }

    /// `M⁻¹`
    pub fn inverse(&self) -> DMatrix<f64> {
        match &self.factor {
            Factor::Diagonal(root) => DMatrix::from_diagonal(&root.map(|r| 1.0 / (r * r))),
            Factor::Lower(g) => {
                let n = self.dim();
                let ginv = g
                    .solve_lower_triangular(&DMatrix::identity(n, n))
                    .expect("Cholesky factor has a nonzero diagonal");
                symmetrize(&(ginv.transpose() * ginv))
            }
        }
    }

    /// `aᵗ M b`
    pub fn inner(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        a.tr_mul(&self.apply(b))
    }
}
