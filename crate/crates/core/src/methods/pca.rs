use nalgebra::{DMatrix, DVector};

use super::{observation_weights, Method, MethodExtras, MethodResult, PcaExtras};
use crate::error::{Error, Result};
use crate::linalg::{center_with, decompose, Metric, Triple};

#[derive(Debug, Clone, Default)]
pub struct PcaOptions {
    /// Use `Q = diag(1/σⱼ²)` instead of the identity.
    pub standardize: bool,
    /// Row weights (normalized to sum to one); uniform when `None`.
    pub weights: Option<Vec<f64>>,
    /// Keep only the first `q` axes.
    pub rank: Option<usize>,
    /// Names used in error messages.
    pub column_labels: Option<Vec<String>>,
}

/// Weighted principal component analysis: the triple `(X_c, Q, D)` with `X_c`
/// centered under `D`, `Q = I` or `diag(1/σⱼ²)`.
pub fn pca(x: &DMatrix<f64>, opts: &PcaOptions) -> Result<MethodResult> {
    let (n, p) = x.shape();
    if n < 2 {
        return Err(Error::InvalidInput(format!("PCA needs at least 2 observations, got {n}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("X has non-finite entries".into()));
    }
    let d = observation_weights(n, opts.weights.as_deref())?;
    let xc = center_with(x, &d);
    let means: Vec<f64> = (0..p).map(|j| x[(0, j)] - xc[(0, j)]).collect();

    let (q, scales) = if opts.standardize {
        let dx = d.apply(&xc);
        let draw = d.apply(x);
        let mut scales = Vec::with_capacity(p);
        for j in 0..p {
            let var = xc.column(j).dot(&dx.column(j));
            // relative to the raw second moment, so a constant column is caught
            // even when centering leaves rounding residue
            let raw = x.column(j).dot(&draw.column(j));
            if var <= 1e-24 * raw || var <= 0.0 {
                let column = opts
                    .column_labels
                    .as_ref()
                    .and_then(|l| l.get(j).cloned())
                    .unwrap_or_else(|| format!("#{}", j + 1));
                return Err(Error::ZeroVariance { column });
            }
            scales.push(var.sqrt());
        }
        let inv = DVector::from_iterator(p, scales.iter().map(|s| 1.0 / (s * s)));
        (Metric::diagonal(inv, "Q")?, scales)
    } else {
        (Metric::identity(p), vec![1.0; p])
    };

    let triple = Triple::from_metrics(xc, q, d)?;
    let dec = decompose(&triple, opts.rank)?;
    let rows = dec.c.clone();
    let cols = dec.a.clone();
    Ok(MethodResult::new(
        Method::Pca,
        dec,
        rows,
        cols,
        MethodExtras::Pca(PcaExtras { means, scales }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_axis_example() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]);
        let r = pca(&x, &PcaOptions::default()).unwrap();
        assert_eq!(r.decomposition.rank, 1);
        assert!((r.eigenvalues()[0] - 1.0).abs() < 1e-15);
        // population variance of column 1 is 1, column 2 is 0
        assert!((r.decomposition.inertia - 1.0).abs() < 1e-15);
        let axis = r.decomposition.z.column(0);
        assert!((axis[0] - 1.0).abs() < 1e-15 && axis[1].abs() < 1e-15);
    }

    #[test]
    fn identical_rows_have_rank_zero() {
        let x = DMatrix::from_row_slice(3, 2, &[0.3, 2.0, 0.3, 2.0, 0.3, 2.0]);
        let r = pca(&x, &PcaOptions::default()).unwrap();
        assert_eq!(r.decomposition.rank, 0);
        assert!(r.scree.is_empty());
    }

    #[test]
    fn zero_variance_column_is_named() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 5.0, 2.0, 5.0, 3.0, 5.0]);
        let opts = PcaOptions {
            standardize: true,
            column_labels: Some(vec!["height".into(), "const".into()]),
            ..Default::default()
        };
        match pca(&x, &opts) {
            Err(Error::ZeroVariance { column }) => assert_eq!(column, "const"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn standardized_inertia_is_number_of_variables() {
        let x = DMatrix::from_fn(10, 4, |i, j| ((i * 7 + j * 3) % 11) as f64 + (i * j) as f64 * 0.1);
        let r = pca(&x, &PcaOptions { standardize: true, ..Default::default() }).unwrap();
        assert!((r.decomposition.inertia - 4.0).abs() < 1e-12);
        let s: f64 = r.eigenvalues().iter().sum();
        assert!((s - 4.0).abs() < 1e-12);
    }

    #[test]
    fn weights_are_normalized() {
        let x = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 4.0]);
        let a = pca(&x, &PcaOptions { weights: Some(vec![1.0, 1.0, 2.0]), ..Default::default() }).unwrap();
        let b = pca(&x, &PcaOptions { weights: Some(vec![0.25, 0.25, 0.5]), ..Default::default() }).unwrap();
        assert!((a.eigenvalues()[0] - b.eigenvalues()[0]).abs() < 1e-15);
        match &a.extras {
            MethodExtras::Pca(e) => assert!((e.means[0] - 2.75).abs() < 1e-15),
            _ => unreachable!(),
        }
    }
}
