use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::{centered_cross_product, check_rows, observation_weights, LdaExtras, Method, MethodExtras, MethodResult};
use crate::error::{Error, Result};
use crate::linalg::{decompose, spd_inverse, Metric, Triple};

/// Zero/one group coding `Y` (n × g), exactly one 1 per row, no empty group.
#[derive(Debug, Clone)]
pub struct GroupCoding {
    y: DMatrix<f64>,
    labels: Vec<String>,
}

impl GroupCoding {
    pub fn new(y: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != y.ncols() {
            return Err(Error::dims("group labels", y.ncols(), labels.len()));
        }
        for (i, row) in y.row_iter().enumerate() {
            let ones = row.iter().filter(|&&v| v == 1.0).count();
            let zeros = row.iter().filter(|&&v| v == 0.0).count();
            if ones != 1 || ones + zeros != row.len() {
                return Err(Error::InvalidInput(format!(
                    "group coding row {} must contain exactly one 1 and zeros elsewhere",
                    i + 1
                )));
            }
        }
        for (k, label) in labels.iter().enumerate() {
            if y.column(k).sum() == 0.0 {
                return Err(Error::InvalidInput(format!("group {label} has no members")));
            }
        }
        Ok(GroupCoding { y, labels })
    }

    /// Builds the coding from one group label per observation; groups are
    /// numbered in order of first appearance.
    pub fn from_labels<S: AsRef<str>>(observations: &[S]) -> Self {
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut labels = Vec::new();
        let assignment: Vec<usize> = observations
            .iter()
            .map(|s| {
                let s = s.as_ref();
                *index.entry(s).or_insert_with(|| {
                    labels.push(s.to_string());
                    labels.len() - 1
                })
            })
            .collect();
        let y = DMatrix::from_fn(observations.len(), labels.len(), |i, k| {
            if assignment[i] == k {
                1.0
            } else {
                0.0
            }
        });
        GroupCoding { y, labels }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_groups(&self) -> usize {
        self.y.ncols()
    }

    pub fn n_observations(&self) -> usize {
        self.y.nrows()
    }
}

/// Total, between-group and within-group covariance of `D`-centered data.
#[derive(Debug, Clone)]
pub struct Huyghens {
    /// `T = XᵗDX`
    pub total: DMatrix<f64>,
    /// `B = AᵗΔ_Y A`
    pub between: DMatrix<f64>,
    /// `W = (X − YA)ᵗD(X − YA)`
    pub within: DMatrix<f64>,
    /// Group means `A` (g × p) with `YᵗDX = Δ_Y A`.
    pub group_means: DMatrix<f64>,
    /// Diagonal of `Δ_Y = YᵗDY`.
    pub group_weights: Vec<f64>,
}

struct Prepared {
    xc: DMatrix<f64>,
    split: Huyghens,
}

fn prepare(x: &DMatrix<f64>, groups: &GroupCoding, weights: Option<&[f64]>) -> Result<Prepared> {
    let n = x.nrows();
    check_rows("X", x, groups.n_observations())?;
    let d = observation_weights(n, weights)?;
    let (xc, total) = centered_cross_product(x, &d, "total covariance T")?;
    let y = groups.matrix();
    let dy = d.apply(y);
    let group_weights: Vec<f64> = (0..groups.n_groups()).map(|k| dy.column(k).sum()).collect();
    let mut group_means = dy.tr_mul(&xc);
    for (k, mut row) in group_means.row_iter_mut().enumerate() {
        row /= group_weights[k];
    }
    let delta = DMatrix::from_diagonal(&DVector::from_row_slice(&group_weights));
    let between = group_means.transpose() * &delta * &group_means;
    let resid = &xc - y * &group_means;
    let within = resid.tr_mul(&d.apply(&resid));
    Ok(Prepared {
        xc,
        split: Huyghens {
            total,
            between,
            within,
            group_means,
            group_weights,
        },
    })
}

/// The generalized Huyghens split `T = B + W` of the centered data.
pub fn huyghens(x: &DMatrix<f64>, groups: &GroupCoding, weights: Option<&[f64]>) -> Result<Huyghens> {
    Ok(prepare(x, groups, weights)?.split)
}

/// Linear discriminant analysis as the triple `(A, T⁻¹, Δ_Y)`.
///
/// Row coordinates are the discriminant scores of the observations; column
/// coordinates the principal axes of the triple (p × k).
pub fn lda(
    x: &DMatrix<f64>,
    groups: &GroupCoding,
    weights: Option<&[f64]>,
    rank: Option<usize>,
) -> Result<MethodResult> {
    if groups.n_groups() < 2 {
        return Err(Error::InvalidInput("discriminant analysis needs at least 2 groups".into()));
    }
    let Prepared { xc, split } = prepare(x, groups, weights)?;
    let t_inv = spd_inverse(&split.total, "total covariance T")?;
    let triple = Triple::from_metrics(
        split.group_means.clone(),
        Metric::new(t_inv.clone(), "T⁻¹")?,
        Metric::diagonal(DVector::from_row_slice(&split.group_weights), "Δ_Y")?,
    )?;
    let dec = decompose(&triple, rank)?;
    let discriminant_vectors = &t_inv * &dec.z;
    let scores = &xc * &discriminant_vectors;
    let cols = dec.a.clone();
    let extras = LdaExtras {
        discriminant_vectors,
        ratios: dec.eigenvalues.clone(),
        group_coords: dec.c.clone(),
        split,
    };
    Ok(MethodResult::new(Method::Lda, dec, scores, cols, MethodExtras::Lda(extras)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coding_from_labels() {
        let g = GroupCoding::from_labels(&["b", "a", "b", "c"]);
        assert_eq!(g.labels(), &["b".to_string(), "a".to_string(), "c".to_string()]);
        assert_eq!(g.matrix().row(2).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn invalid_coding() {
        let y = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(GroupCoding::new(y, vec!["a".into(), "b".into()]).is_err());
        let y = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0]);
        assert!(GroupCoding::new(y, vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn equal_means_have_no_discrimination() {
        // both groups have mean (0, 0)
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0]);
        let g = GroupCoding::from_labels(&["a", "a", "b", "b"]);
        let r = lda(&x, &g, None, None).unwrap();
        assert_eq!(r.decomposition.rank, 0);
    }

    #[test]
    fn singular_total_is_rejected() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0, 4.0, 8.0]);
        let g = GroupCoding::from_labels(&["a", "a", "b", "b"]);
        assert!(matches!(lda(&x, &g, None, None), Err(Error::Singular { .. })));
    }

    #[test]
    fn single_group_is_rejected() {
        let x = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 4.0]);
        let g = GroupCoding::from_labels(&["a", "a", "a"]);
        assert!(lda(&x, &g, None, None).is_err());
    }
}
