use nalgebra::DMatrix;

use super::metric::Metric;
use crate::error::{Error, Result};

/// The data matrix `X` (n observations by p variables) with its variable metric
/// `Q` (p×p) and observation weights `D` (n×n).
#[derive(Debug, Clone)]
pub struct Triple {
    x: DMatrix<f64>,
    q: Metric,
    d: Metric,
}

impl Triple {
    /// Validates dimensions, symmetry and positive definiteness of both metrics.
    pub fn new(x: DMatrix<f64>, q: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        check_dims(&x, q.nrows(), q.ncols(), d.nrows(), d.ncols())?;
        Self::from_metrics(x, Metric::new(q, "Q")?, Metric::new(d, "D")?)
    }

    pub fn from_metrics(x: DMatrix<f64>, q: Metric, d: Metric) -> Result<Self> {
        check_dims(&x, q.dim(), q.dim(), d.dim(), d.dim())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("X has non-finite entries".into()));
        }
        Ok(Triple { x, q, d })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn q(&self) -> &Metric {
        &self.q
    }

    pub fn d(&self) -> &Metric {
        &self.d
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of variables.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Same triple with `X` replaced by its `D`-centered version (`XᵗD1 = 0`).
    pub fn center_columns(&self) -> Triple {
        Triple {
            x: center_with(&self.x, &self.d),
            q: self.q.clone(),
            d: self.d.clone(),
        }
    }

    /// `(VQ, WD)` with `V = XᵗDX` and `W = XQXᵗ`.
    pub fn characterizing_operators(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let dx = self.d.apply(&self.x);
        let vq = self.x.tr_mul(&dx) * self.q.matrix();
        let qxt = self.q.apply(&self.x.transpose());
        let wd = &self.x * qxt * self.d.matrix();
        (vq, wd)
    }

    /// `WD = XQXᵗD`, the observation-space operator compared by the RV coefficient.
    pub fn operator(&self) -> DMatrix<f64> {
        self.characterizing_operators().1
    }
}

fn check_dims(x: &DMatrix<f64>, qr: usize, qc: usize, dr: usize, dc: usize) -> Result<()> {
    let (n, p) = x.shape();
    if n == 0 || p == 0 {
        return Err(Error::InvalidInput(format!("X is empty ({n}x{p})")));
    }
    if qr != p || qc != p {
        return Err(Error::dims("Q", format!("{p}x{p}"), format!("{qr}x{qc}")));
    }
    if dr != n || dc != n {
        return Err(Error::dims("D", format!("{n}x{n}"), format!("{dr}x{dc}")));
    }
    Ok(())
}

/// Subtract the `D`-weighted column means: `X − 1 mᵗ` with `m = XᵗD1 / 1ᵗD1`.
pub(crate) fn center_with(x: &DMatrix<f64>, d: &Metric) -> DMatrix<f64> {
    let n = x.nrows();
    let d1 = d.apply(&DMatrix::from_element(n, 1, 1.0));
    let total: f64 = d1.sum();
    let means = x.tr_mul(&d1) / total;
    let mut out = x.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col.add_scalar_mut(-means[j]);
    }
    out
}
