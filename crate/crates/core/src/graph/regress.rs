use nalgebra::DMatrix;

use super::{spectrum, Graph};
use crate::error::Result;
use crate::linalg::{center_with, Metric};
use crate::methods::{pcaiv_with_metrics, GraphRegressionExtras, Method, MethodExtras, MethodResult};

/// Regresses the `k` smoothest nontrivial graph eigenvectors on node covariates
/// by PCA on instrumental variables (response metric `I`, uniform weights),
/// keeping `q` axes.
pub fn regress_on_covariates(g: &Graph, x: &DMatrix<f64>, k: usize, q: Option<usize>) -> Result<MethodResult> {
    let eig = spectrum(g, k)?;
    let n = g.n();
    let d = Metric::uniform(n);
    let y = eig.vectors.clone();
    let fit = pcaiv_with_metrics(x, &y, &Metric::identity(k), &d, q)?;
    let pcaiv = match fit.extras {
        MethodExtras::Pcaiv(e) => e,
        _ => unreachable!("pcaiv returns pcaiv extras"),
    };

    // share of each response column's D-variance reproduced by the fitted values
    let yc = center_with(&y, &d);
    let xc = center_with(x, &d);
    let fitted = &xc * &pcaiv.coefficients;
    let explained = (0..k)
        .map(|j| {
            let total = yc.column(j).norm_squared();
            if total == 0.0 {
                0.0
            } else {
                fitted.column(j).norm_squared() / total
            }
        })
        .collect();

    Ok(MethodResult::new(
        Method::GraphRegression,
        fit.decomposition,
        fit.row_coords,
        fit.col_coords,
        MethodExtras::GraphRegression(GraphRegressionExtras {
            pcaiv,
            mu: eig.mu,
            explained,
        }),
    ))
}
