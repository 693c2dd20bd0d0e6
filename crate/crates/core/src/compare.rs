//! Vector covariance and the RV coefficient between characterizing operators.
//!
//! For two triples sharing the observation weights `D`, the operators `WD` are
//! compared through the `D`-symmetric inner product `Tr(W₁D W₂D)`, computed on
//! the symmetric representatives `GᵗWG` (`GGᵗ = D`). Under uniform weights this
//! coincides with the plain `Tr(O₁ᵗO₂)` of [`covv`].

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::Triple;

/// Two operators of equal size acting on the same observation set.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    first: DMatrix<f64>,
    second: DMatrix<f64>,
}

impl OperatorPair {
    pub fn new(first: DMatrix<f64>, second: DMatrix<f64>) -> Result<Self> {
        check_pair(&first, &second)?;
        Ok(OperatorPair { first, second })
    }

    pub fn covv(&self) -> f64 {
        trace_product(&self.first, &self.second)
    }

    pub fn rv(&self) -> Result<f64> {
        rv(&self.first, &self.second)
    }
}

fn check_pair(o1: &DMatrix<f64>, o2: &DMatrix<f64>) -> Result<()> {
    if !o1.is_square() {
        return Err(Error::dims("operator", "a square matrix", format!("{}x{}", o1.nrows(), o1.ncols())));
    }
    if o1.shape() != o2.shape() {
        return Err(Error::dims(
            "operator pair",
            format!("{}x{}", o1.nrows(), o1.ncols()),
            format!("{}x{}", o2.nrows(), o2.ncols()),
        ));
    }
    Ok(())
}

/// `Tr(AᵗB)` as an entrywise dot product.
fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `covV(O₁, O₂) = Tr(O₁ᵗO₂)`.
pub fn covv(o1: &DMatrix<f64>, o2: &DMatrix<f64>) -> Result<f64> {
    check_pair(o1, o2)?;
    Ok(trace_product(o1, o2))
}

/// `RV(O₁, O₂) = Tr(O₁ᵗO₂) / √(Tr(O₁ᵗO₁) Tr(O₂ᵗO₂))`.
///
/// Lies in `[0, 1]` for positive-semidefinite operators; other inputs may give
/// negative values, which are returned unchanged.
pub fn rv(o1: &DMatrix<f64>, o2: &DMatrix<f64>) -> Result<f64> {
    check_pair(o1, o2)?;
    let n1 = trace_product(o1, o1);
    let n2 = trace_product(o2, o2);
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroOperator);
    }
    Ok(trace_product(o1, o2) / (n1.sqrt() * n2.sqrt()))
}

/// Symmetric representative `GᵗXQXᵗG` of the operator `XQXᵗD`.
fn symmetric_operator(t: &Triple) -> DMatrix<f64> {
    let gx = t.d().factor_t_apply(t.x());
    let qgx = t.q().apply(&gx.transpose());
    let s = &gx * qgx;
    (&s + s.transpose()) * 0.5
}

/// RV coefficient between the operators `X₁Q₁X₁ᵗD` and `X₂Q₂X₂ᵗD` of two
/// triples on the same observations with the same weights.
pub fn rv_triples(t1: &Triple, t2: &Triple) -> Result<f64> {
    if t1.n() != t2.n() {
        return Err(Error::dims("observations of second triple", t1.n(), t2.n()));
    }
    let d1 = t1.d().matrix();
    let d2 = t2.d().matrix();
    let scale = d1.abs().max();
    if (d1 - d2).abs().max() > 1e-12 * scale {
        return Err(Error::InvalidInput("triples must share the same observation weights D".into()));
    }
    rv(&symmetric_operator(t1), &symmetric_operator(t2))
}

/// Closed-form optimum of the RV coefficient over rank-`q` approximations:
/// `√(Σᵢ≤q λᵢ² / Σᵢ λᵢ²)`.
pub fn rv_max(eigenvalues: &[f64], q: usize) -> Result<f64> {
    if q == 0 || q > eigenvalues.len() {
        return Err(Error::RankOutOfRange {
            requested: q,
            max: eigenvalues.len(),
        });
    }
    if eigenvalues.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidInput("eigenvalues must be finite and nonnegative".into()));
    }
    if eigenvalues.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidInput("eigenvalues must be nonincreasing".into()));
    }
    let total: f64 = eigenvalues.iter().map(|l| l * l).sum();
    if total == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let head: f64 = eigenvalues[..q].iter().map(|l| l * l).sum();
    Ok((head / total).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn covv_examples() {
        let i3 = DMatrix::<f64>::identity(3, 3);
        assert_eq!(covv(&i3, &i3).unwrap(), 3.0);
        let e1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let e2 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(covv(&e1, &e2).unwrap(), 0.0);
        let o = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(covv(&o, &DMatrix::identity(2, 2)).unwrap(), 5.0);
        assert!(covv(&o, &i3).is_err());
    }

    #[test]
    fn rv_of_zero_operator_is_an_error() {
        let z = DMatrix::zeros(2, 2);
        assert!(matches!(rv(&z, &DMatrix::identity(2, 2)), Err(Error::ZeroOperator)));
    }

    fn single_variable(v: &[f64]) -> Triple {
        let n = v.len();
        Triple::from_metrics(
            DMatrix::from_column_slice(n, 1, v),
            crate::linalg::Metric::identity(1),
            crate::linalg::Metric::uniform(n),
        )
        .unwrap()
    }

    #[test]
    fn two_variables_give_squared_correlation() {
        let x = single_variable(&[-1.0, 0.0, 1.0]);
        let y = single_variable(&[1.0, 0.0, -1.0]);
        assert!((rv_triples(&x, &y).unwrap() - 1.0).abs() < 1e-15);

        // ρ = √3/2 by hand
        let y = single_variable(&[-1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0]);
        assert!((rv_triples(&x, &y).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn different_weights_are_rejected() {
        let x = single_variable(&[-1.0, 0.0, 1.0]);
        let y = Triple::from_metrics(
            DMatrix::from_column_slice(3, 1, &[1.0, 0.0, -1.0]),
            crate::linalg::Metric::identity(1),
            crate::linalg::Metric::diagonal(DVector::from_vec(vec![0.5, 0.25, 0.25]), "D").unwrap(),
        )
        .unwrap();
        assert!(rv_triples(&x, &y).is_err());
    }

    #[test]
    fn rv_max_examples() {
        assert_eq!(rv_max(&[3.0, 2.0, 1.0], 3).unwrap(), 1.0);
        assert!((rv_max(&[1.0; 4], 1).unwrap() - 0.5).abs() < 1e-15);
        // Frozen from the printed CA spectrum: √((0.0917² + 0.0212²) / Σλ²)
        let plato = [0.09170, 0.02120, 0.00911, 0.00603, 0.00276, 0.00217];
        assert!((rv_max(&plato, 2).unwrap() - 0.992_649_326_354_064_4).abs() < 1e-12);
        assert!(rv_max(&plato, 0).is_err());
        assert!(rv_max(&plato, 7).is_err());
    }
}
