use nalgebra::DMatrix;

use super::{
    centered_cross_product, check_rows, observation_weights, scale_columns, Method, MethodExtras, MethodResult, PcaivExtras,
};
use crate::error::{Error, Result};
use crate::linalg::{
    center_with, decompose, find_ties, orient_columns, spd_solve, symmetrize, Decomposition, Metric, Triple,
};

/// PCA of `X` with respect to the instrumental response `(Y, Q, D)`.
///
/// Equivalent to the rank-q PCA of the triple `(X, R, D)` with
/// `R = Sxx⁻¹ Sxy Q Syx Sxx⁻¹`. Both blocks are centered under `D` first.
pub fn pcaiv(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    q: &DMatrix<f64>,
    weights: Option<&[f64]>,
    rank: Option<usize>,
) -> Result<MethodResult> {
    let d = observation_weights(x.nrows(), weights)?;
    if q.nrows() != y.ncols() {
        return Err(Error::dims("response metric Q", format!("{0}x{0}", y.ncols()), format!("{}x{}", q.nrows(), q.ncols())));
    }
    let q = Metric::new(q.clone(), "Q")?;
    pcaiv_with_metrics(x, y, &q, &d, rank)
}

/// [`pcaiv`] with explicit metrics (`d` is used as given, not renormalized).
pub fn pcaiv_with_metrics(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    q: &Metric,
    d: &Metric,
    rank: Option<usize>,
) -> Result<MethodResult> {
    let n = x.nrows();
    check_rows("X", x, d.dim())?;
    check_rows("Y", y, n)?;
    if q.dim() != y.ncols() {
        return Err(Error::dims("response metric Q", y.ncols(), q.dim()));
    }
    let (xc, sxx) = centered_cross_product(x, d, "Sxx = XᵗDX")?;
    let yc = center_with(y, d);
    let sxy = d.apply(&xc).tr_mul(&yc);
    let coefficients = spd_solve(&sxx, &sxy, "Sxx = XᵗDX")?;
    let r = symmetrize(&(&coefficients * q.apply(&coefficients.transpose())));

    if let Some(k) = rank {
        let y_rank = decompose(&Triple::from_metrics(yc.clone(), Metric::identity(y.ncols()), d.clone())?, None)?.rank;
        let max = x.ncols().min(y_rank);
        if k > max {
            return Err(Error::RankOutOfRange { requested: k, max });
        }
    }

    // The fitted response Ŷ = X Sxx⁻¹ Sxy carries the same observation-space
    // operator as (X, R, D): ŶQŶᵗD = XRXᵗD. R itself is only semidefinite.
    let fitted = &xc * &coefficients;
    let inner = decompose(&Triple::from_metrics(fitted, q.clone(), d.clone())?, rank)?;
    let dec = lift_to_predictors(&xc, d, inner);

    let fitted_operator = &xc * &r * xc.transpose() * d.matrix();
    let rz = &r * &dec.z;
    let constrained_metric = symmetrize(&(&rz * rz.transpose()));

    let rows = dec.c.clone();
    let cols = dec.a.clone();
    let extras = PcaivExtras {
        r,
        fitted_operator,
        constrained_metric,
        coefficients,
    };
    Ok(MethodResult::new(Method::Pcaiv, dec, rows, cols, MethodExtras::Pcaiv(extras)))
}

/// Re-expresses a decomposition of the fitted-response triple in the predictor
/// space: `A = XᵗDL`, `Z = AS⁻¹`, which satisfy `ZᵗRZ = I` and `Sxx R Z = ZΛ`.
fn lift_to_predictors(xc: &DMatrix<f64>, d: &Metric, inner: Decomposition) -> Decomposition {
    let s: Vec<f64> = inner.retained_eigenvalues().iter().map(|l| l.sqrt()).collect();
    let inv_s: Vec<f64> = s.iter().map(|v| 1.0 / v).collect();
    let a = xc.tr_mul(&d.apply(&inner.l));
    let mut z = scale_columns(&a, &inv_s);
    let mut l = inner.l;
    orient_columns(&mut z, Some(&mut l));
    let a = scale_columns(&z, &s);
    let c = scale_columns(&l, &s);
    Decomposition {
        ties: find_ties(&inner.eigenvalues),
        eigenvalues: inner.eigenvalues,
        rank: inner.rank,
        z,
        a,
        l,
        c,
        inertia: inner.inertia,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> DMatrix<f64> {
        DMatrix::from_row_slice(
            6,
            2,
            &[1.0, 0.3, -0.5, 1.2, 2.0, -1.0, 0.1, 0.4, -1.5, -0.2, 0.7, 0.9],
        )
    }

    #[test]
    fn response_equal_to_predictors_gives_identity_r() {
        let x = data();
        let res = pcaiv(&x, &x, &DMatrix::identity(2, 2), None, None).unwrap();
        match &res.extras {
            MethodExtras::Pcaiv(e) => assert!((&e.r - DMatrix::identity(2, 2)).abs().max() < 1e-12),
            _ => unreachable!(),
        }
    }

    #[test]
    fn uncorrelated_response_gives_zero() {
        // y is D-orthogonal to both centered predictor columns
        let x = DMatrix::from_row_slice(4, 1, &[1.0, -1.0, 1.0, -1.0]);
        let y = DMatrix::from_row_slice(4, 1, &[1.0, 1.0, -1.0, -1.0]);
        let res = pcaiv(&x, &y, &DMatrix::identity(1, 1), None, None).unwrap();
        assert_eq!(res.decomposition.rank, 0);
        match &res.extras {
            MethodExtras::Pcaiv(e) => assert!(e.r.abs().max() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn singular_predictors_are_rejected() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0, 5.0, 10.0]);
        let y = DMatrix::from_row_slice(4, 1, &[1.0, 0.0, 2.0, 1.0]);
        assert!(matches!(
            pcaiv(&x, &y, &DMatrix::identity(1, 1), None, None),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn rank_above_response_rank_is_rejected() {
        let x = data();
        let y = DMatrix::from_column_slice(6, 1, x.column(0).as_slice());
        assert!(matches!(
            pcaiv(&x, &y, &DMatrix::identity(1, 1), None, Some(2)),
            Err(Error::RankOutOfRange { max: 1, .. })
        ));
    }

    #[test]
    fn constrained_metric_reproduces_rank_q_truncation() {
        let x = DMatrix::from_row_slice(
            7,
            3,
            &[
                1.0, 0.2, -0.3, 0.5, -1.0, 0.8, -0.7, 0.4, 1.1, 1.3, 0.9, -0.2, -0.4, -0.6, 0.1, 0.2, 1.5, -1.2,
                -1.9, -1.4, -0.3,
            ],
        );
        let y = DMatrix::from_row_slice(
            7,
            2,
            &[0.9, 0.1, 0.2, -0.8, -0.5, 1.0, 1.4, 0.3, -0.6, -0.2, 0.8, 1.1, -2.2, -0.5],
        );
        let res = pcaiv(&x, &y, &DMatrix::identity(2, 2), None, Some(1)).unwrap();
        let e = match &res.extras {
            MethodExtras::Pcaiv(e) => e,
            _ => unreachable!(),
        };
        let dec = &res.decomposition;
        let d = Metric::uniform(7);
        let xc = center_with(&x, &d);
        let xmx = &xc * &e.constrained_metric * xc.transpose() * d.matrix();
        let truncated = &dec.c * dec.c.transpose() * d.matrix();
        assert!((xmx - truncated).abs().max() < 1e-12);
        // ZᵗRZ = I and Sxx R Z = ZΛ
        let ztrz = dec.z.transpose() * &e.r * &dec.z;
        assert!((ztrz[(0, 0)] - 1.0).abs() < 1e-12);
        let sxx = xc.transpose() * d.matrix() * &xc;
        let lhs = sxx * &e.r * &dec.z;
        assert!((lhs - &dec.z * dec.eigenvalues[0]).abs().max() < 1e-12);
    }
}
