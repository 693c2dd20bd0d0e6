use nalgebra::DMatrix;

use super::{centered_cross_product, check_rows, observation_weights, CcaExtras, Method, MethodExtras, MethodResult};
use crate::error::{Error, Result};
use crate::linalg::{decompose, spd_inverse, Metric, Triple};

/// Canonical correlation analysis of two blocks measured on the same observations.
///
/// The decomposition is that of the cross triple `(S₂₁, S₁₁⁻¹, S₂₂⁻¹)`, whose
/// eigenvalues are the squared canonical correlations. The merged triple
/// `([X₁|X₂], blockdiag(S₁₁⁻¹, S₂₂⁻¹), D)` is decomposed too; its eigenvalues
/// come in pairs `1 ± ρ` and are reported in the extras.
pub fn cca(
    x1: &DMatrix<f64>,
    x2: &DMatrix<f64>,
    weights: Option<&[f64]>,
    rank: Option<usize>,
) -> Result<MethodResult> {
    let n = x1.nrows();
    check_rows("X1", x1, n)?;
    check_rows("X2", x2, n)?;
    if x1.ncols() == 0 || x2.ncols() == 0 {
        return Err(Error::InvalidInput("both blocks need at least one column".into()));
    }
    let d = observation_weights(n, weights)?;
    let (c1, s11) = centered_cross_product(x1, &d, "covariance of the first block")?;
    let (c2, s22) = centered_cross_product(x2, &d, "covariance of the second block")?;
    let s21 = c2.tr_mul(&d.apply(&c1));
    let s11_inv = spd_inverse(&s11, "covariance of the first block")?;
    let s22_inv = spd_inverse(&s22, "covariance of the second block")?;

    let cross = Triple::from_metrics(
        s21,
        Metric::new(s11_inv.clone(), "S11⁻¹")?,
        Metric::new(s22_inv.clone(), "S22⁻¹")?,
    )?;
    let dec = decompose(&cross, rank)?;

    let (p1, p2) = (x1.ncols(), x2.ncols());
    let mut correlations: Vec<f64> = dec.eigenvalues.iter().map(|l| l.sqrt().min(1.0)).collect();
    correlations.resize(p1.min(p2), 0.0);

    let x1_weights = &s11_inv * &dec.z;
    let x2_weights = &s22_inv * &dec.l;
    let x1_scores = &c1 * &x1_weights;
    let x2_scores = &c2 * &x2_weights;

    let mut block = DMatrix::zeros(p1 + p2, p1 + p2);
    block.view_mut((0, 0), (p1, p1)).copy_from(&s11_inv);
    block.view_mut((p1, p1), (p2, p2)).copy_from(&s22_inv);
    let mut merged_x = DMatrix::zeros(n, p1 + p2);
    merged_x.columns_mut(0, p1).copy_from(&c1);
    merged_x.columns_mut(p1, p2).copy_from(&c2);
    let merged = Triple::from_metrics(merged_x, Metric::new(block, "blockdiag(S11⁻¹, S22⁻¹)")?, d)?;
    let merged_eigenvalues = decompose(&merged, None)?.eigenvalues;

    let extras = CcaExtras {
        correlations,
        x1_weights: x1_weights.clone(),
        x2_weights,
        x2_scores,
        merged_eigenvalues,
    };
    Ok(MethodResult::new(Method::Cca, dec, x1_scores, x1_weights, MethodExtras::Cca(extras)))
}
