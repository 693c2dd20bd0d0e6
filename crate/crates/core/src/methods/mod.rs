//! Classical methods, each expressed as a particular triple handed to [`decompose`].
//!
//! [`decompose`]: crate::linalg::decompose

mod ca;
mod cca;
mod lda;
mod pca;
mod pcaiv;

pub use ca::{ca, chi_square, ContingencyTable};
pub use cca::cca;
pub use lda::{huyghens, lda, GroupCoding, Huyghens};
pub use pca::{pca, PcaOptions};
pub use pcaiv::{pcaiv, pcaiv_with_metrics};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{Decomposition, Metric};
use crate::scree::ScreeTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pca,
    Ca,
    Lda,
    Pcaiv,
    Cca,
    GraphRegression,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Ca => "ca",
            Method::Lda => "lda",
            Method::Pcaiv => "pcaiv",
            Method::Cca => "cca",
            Method::GraphRegression => "graph-regress",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PcaExtras {
    /// `D`-weighted column means removed before the analysis.
    pub means: Vec<f64>,
    /// Column standard deviations used for standardization (all 1 otherwise).
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CaExtras {
    pub chi_square: f64,
    pub dof: usize,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct LdaExtras {
    /// Eigenvectors of `T⁻¹B`, normalized `aᵗTa = 1`, p × k.
    pub discriminant_vectors: DMatrix<f64>,
    /// Discriminating ratios `aᵗBa / aᵗTa` (the full nonzero spectrum).
    pub ratios: Vec<f64>,
    /// Group coordinates (principal components of the group-means triple), g × k.
    pub group_coords: DMatrix<f64>,
    pub split: Huyghens,
}

#[derive(Debug, Clone)]
pub struct PcaivExtras {
    /// `R = Sxx⁻¹ Sxy Q Syx Sxx⁻¹`.
    pub r: DMatrix<f64>,
    /// `XRXᵗD`.
    pub fitted_operator: DMatrix<f64>,
    /// The rank-q metric `M = RBBᵗR`.
    pub constrained_metric: DMatrix<f64>,
    /// Regression coefficients `Sxx⁻¹ Sxy`, p × s.
    pub coefficients: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct CcaExtras {
    /// All `min(p₁, p₂)` canonical correlations, nonincreasing.
    pub correlations: Vec<f64>,
    /// Canonical weights of the first block (unit-variance variates), p₁ × k.
    pub x1_weights: DMatrix<f64>,
    /// Canonical weights of the second block, p₂ × k.
    pub x2_weights: DMatrix<f64>,
    /// Canonical variates of the second block, n × k.
    pub x2_scores: DMatrix<f64>,
    /// Spectrum of the merged triple `([X₁|X₂], blockdiag(S₁₁⁻¹, S₂₂⁻¹), D)`.
    pub merged_eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GraphRegressionExtras {
    pub pcaiv: PcaivExtras,
    /// Laplacian eigenvalues of the response eigenvectors.
    pub mu: Vec<f64>,
    /// Share of each graph eigenvector's variance explained by the covariates.
    pub explained: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum MethodExtras {
    Pca(PcaExtras),
    Ca(CaExtras),
    Lda(LdaExtras),
    Pcaiv(PcaivExtras),
    Cca(CcaExtras),
    GraphRegression(GraphRegressionExtras),
}

#[derive(Debug, Clone)]
pub struct MethodResult {
    pub method: Method,
    pub decomposition: Decomposition,
    pub scree: ScreeTable,
    pub row_coords: DMatrix<f64>,
    pub col_coords: DMatrix<f64>,
    pub extras: MethodExtras,
}

impl MethodResult {
    pub(crate) fn new(
        method: Method,
        decomposition: Decomposition,
        row_coords: DMatrix<f64>,
        col_coords: DMatrix<f64>,
        extras: MethodExtras,
    ) -> Self {
        MethodResult {
            method,
            scree: ScreeTable::from_eigenvalues(&decomposition.eigenvalues),
            decomposition,
            row_coords,
            col_coords,
            extras,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.decomposition.eigenvalues
    }
}

/// Observation weights as a diagonal metric normalized to sum to one; uniform `1/n`
/// when absent.
pub(crate) fn observation_weights(n: usize, weights: Option<&[f64]>) -> Result<Metric> {
    match weights {
        None => Ok(Metric::uniform(n)),
        Some(w) => {
            if w.len() != n {
                return Err(Error::dims("weights", n, w.len()));
            }
            let total: f64 = w.iter().sum();
            if !(total.is_finite() && total > 0.0) {
                return Err(Error::InvalidInput("weights must have a positive finite sum".into()));
            }
            Metric::diagonal(DVector::from_iterator(n, w.iter().map(|v| v / total)), "D")
        }
    }
}

pub(crate) fn check_rows(what: &str, m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.nrows() != n {
        return Err(Error::dims(format!("rows of {what}"), n, m.nrows()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} has non-finite entries")));
    }
    Ok(())
}

pub(crate) fn scale_columns(m: &DMatrix<f64>, s: &[f64]) -> DMatrix<f64> {
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= s[j];
    }
    out
}

/// Centers `x` under `d` and returns it with `XᵗDX`. A column whose centered
/// variance vanishes relative to its raw second moment is reported as a singular
/// pivot of `which`, since rounding residue would otherwise pass Cholesky.
pub(crate) fn centered_cross_product(
    x: &DMatrix<f64>,
    d: &Metric,
    which: &str,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let xc = crate::linalg::center_with(x, d);
    let dxc = d.apply(&xc);
    let dx = d.apply(x);
    for j in 0..x.ncols() {
        let var = xc.column(j).dot(&dxc.column(j));
        let raw = x.column(j).dot(&dx.column(j));
        if var <= 1e-24 * raw || var <= 0.0 {
            return Err(Error::Singular {
                which: which.to_string(),
                pivot: j,
            });
        }
    }
    let s = crate::linalg::symmetrize(&xc.tr_mul(&dxc));
    Ok((xc, s))
}
