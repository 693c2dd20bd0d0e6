use nalgebra::{DMatrix, DVector};

use super::triple::Triple;
use crate::error::{Error, Result};

/// An eigenvalue counts toward the rank iff `λ > ZERO_THRESHOLD · max(λ₁, 1)`.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Consecutive eigenvalues closer than this (relative to the larger) are flagged as tied.
pub const TIE_THRESHOLD: f64 = 1e-9;

/// Eigendecomposition of a triple.
///
/// `eigenvalues` holds the whole nonzero spectrum (length `rank`). The axis and
/// component matrices carry only the retained columns: all of them, or the first
/// `q` when a rank was requested.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    /// `Q`-orthonormal axis basis, p × k.
    pub z: DMatrix<f64>,
    /// Principal axes `A = ZS`, p × k.
    pub a: DMatrix<f64>,
    /// `D`-orthonormal component basis, n × k.
    pub l: DMatrix<f64>,
    /// Principal components `C = LS`, n × k.
    pub c: DMatrix<f64>,
    /// Trace of `VQ` (all eigenvalues, including truncated ones).
    pub inertia: f64,
    /// Indices `i` such that `λᵢ` and `λᵢ₊₁` are tied.
    pub ties: Vec<usize>,
}

impl Decomposition {
    pub(crate) fn empty(n: usize, p: usize, inertia: f64) -> Self {
        Decomposition {
            eigenvalues: Vec::new(),
            rank: 0,
            z: DMatrix::zeros(p, 0),
            a: DMatrix::zeros(p, 0),
            l: DMatrix::zeros(n, 0),
            c: DMatrix::zeros(n, 0),
            inertia,
            ties: Vec::new(),
        }
    }

    /// Number of retained columns.
    pub fn retained(&self) -> usize {
        self.z.ncols()
    }

    pub fn retained_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[..self.retained()]
    }

    /// `S = Λ^(1/2)` over the retained columns.
    pub fn singular_values(&self) -> DVector<f64> {
        DVector::from_iterator(self.retained(), self.retained_eigenvalues().iter().map(|l| l.sqrt()))
    }

    /// True when the cut after `q` axes separates two tied eigenvalues.
    pub fn splits_tie(&self, q: usize) -> bool {
        q > 0 && self.ties.contains(&(q - 1))
    }
}

pub(crate) fn find_ties(eigenvalues: &[f64]) -> Vec<usize> {
    eigenvalues
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > 0.0 && (w[0] - w[1]) / w[0] < TIE_THRESHOLD)
        .map(|(i, _)| i)
        .collect()
}

/// Flip columns so that each column's largest-magnitude entry is positive; the
/// same flips are applied to `partner`.
pub(crate) fn orient_columns(m: &mut DMatrix<f64>, mut partner: Option<&mut DMatrix<f64>>) {
    for j in 0..m.ncols() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for v in m.column(j).iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            m.column_mut(j).neg_mut();
            if let Some(p) = partner.as_deref_mut() {
                p.column_mut(j).neg_mut();
            }
        }
    }
}

fn scale_columns(m: &DMatrix<f64>, s: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= s[j];
    }
    out
}

/// Generalized PCA of a triple.
///
/// With `HᵗH = Q` and `KᵗK = D` (Cholesky), the SVD `KXHᵗ = USTᵗ` gives
/// `Z = H⁻¹T`, `L = K⁻¹U`, `Λ = S²`, `A = ZS`, `C = LS`.
pub fn decompose(t: &Triple, rank: Option<usize>) -> Result<Decomposition> {
    let (n, p) = (t.n(), t.p());
    if let Some(q) = rank {
        if q > n.min(p) {
            return Err(Error::RankOutOfRange {
                requested: q,
                max: n.min(p),
            });
        }
    }

    // K X Hᵗ = (G_D)ᵗ X G_Q
    let kx = t.d().factor_t_apply(t.x());
    let kxh = t.q().factor_t_apply(&kx.transpose()).transpose();
    let inertia = kxh.norm_squared();

    // nalgebra's bidiagonal SVD can lose accuracy on exactly rank-deficient
    // input (every CA triple is one), so the factorization is done by faer.
    let svd = faer::Mat::<f64>::from_fn(n, p, |i, j| kxh[(i, j)])
        .thin_svd()
        .map_err(|_| Error::NumericalBreakdown("SVD did not converge".into()))?;
    let m = n.min(p);
    let sv: Vec<f64> = (0..m).map(|i| svd.S().column_vector()[i]).collect();
    let u = DMatrix::from_fn(n, m, |i, j| svd.U()[(i, j)]);
    let v = DMatrix::from_fn(p, m, |i, j| svd.V()[(i, j)]);

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let spectrum: Vec<f64> = order.iter().map(|&i| sv[i] * sv[i]).collect();

    let cutoff = ZERO_THRESHOLD * spectrum.first().copied().unwrap_or(0.0).max(1.0);
    let r = spectrum.iter().take_while(|&&l| l > cutoff).count();
    if r == 0 {
        return Ok(Decomposition::empty(n, p, inertia));
    }
    let eigenvalues = spectrum[..r].to_vec();
    let k = rank.map_or(r, |q| q.min(r));

    let mut tk = DMatrix::from_fn(p, k, |i, j| v[(i, order[j])]);
    let mut uk = DMatrix::from_fn(n, k, |i, j| u[(i, order[j])]);
    orient_columns(&mut tk, Some(&mut uk));

    let s = DVector::from_iterator(k, eigenvalues[..k].iter().map(|l| l.sqrt()));
    let z = t.q().factor_t_solve(&tk)?;
    let l = t.d().factor_t_solve(&uk)?;
    let a = scale_columns(&z, &s);
    let c = scale_columns(&l, &s);

    Ok(Decomposition {
        ties: find_ties(&eigenvalues),
        eigenvalues,
        rank: r,
        z,
        a,
        l,
        c,
        inertia,
    })
}

/// Max-norm residuals of the transition formulæ over retained columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionResiduals {
    /// `‖XQZ − C‖_max`
    pub components: f64,
    /// `‖XᵗDL − A‖_max`
    pub axes: f64,
}

impl TransitionResiduals {
    pub fn max(&self) -> f64 {
        self.components.max(self.axes)
    }
}

pub fn transition_check(t: &Triple, d: &Decomposition) -> TransitionResiduals {
    if d.retained() == 0 {
        return TransitionResiduals {
            components: 0.0,
            axes: 0.0,
        };
    }
    let xqz = t.x() * t.q().apply(&d.z);
    let xtdl = t.x().tr_mul(&t.d().apply(&d.l));
    TransitionResiduals {
        components: (xqz - &d.c).abs().max(),
        axes: (xtdl - &d.a).abs().max(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(v))
    }

    #[test]
    fn two_by_two_example() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let t = Triple::new(x, DMatrix::identity(2, 2), diag(&[0.5, 0.5])).unwrap();
        let d = decompose(&t, None).unwrap();
        assert_eq!(d.rank, 1);
        assert!((d.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((d.inertia - 2.0).abs() < 1e-14);
        // sign convention: largest-magnitude entry of each axis column is positive
        let col = d.z.column(0);
        let imax = col.iamax();
        assert!(col[imax] > 0.0);
    }

    #[test]
    fn zero_data_has_rank_zero() {
        let t = Triple::new(DMatrix::zeros(3, 2), DMatrix::identity(2, 2), diag(&[1.0 / 3.0; 3])).unwrap();
        let d = decompose(&t, None).unwrap();
        assert_eq!(d.rank, 0);
        assert!(d.eigenvalues.is_empty());
        assert_eq!(d.inertia, 0.0);
        let res = transition_check(&t, &d);
        assert_eq!(res.max(), 0.0);
    }

    #[test]
    fn rank_request_truncates_columns_but_not_inertia() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 1.0, 0.0, -2.0, 3.0, 0.0, -0.5, -4.0]);
        let t = Triple::new(x, DMatrix::identity(3, 3), diag(&[0.25; 4])).unwrap();
        let full = decompose(&t, None).unwrap();
        let one = decompose(&t, Some(1)).unwrap();
        assert_eq!(one.retained(), 1);
        assert_eq!(one.eigenvalues, full.eigenvalues);
        assert!((one.inertia - full.inertia).abs() < 1e-14);
        assert!((one.c.column(0) - full.c.column(0)).abs().max() < 1e-14);
        assert!(matches!(decompose(&t, Some(4)), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn corrupted_components_show_residual() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.5, -1.0, -1.5, -1.0]);
        let t = Triple::new(x, DMatrix::identity(2, 2), diag(&[1.0 / 3.0; 3])).unwrap();
        let mut d = decompose(&t, None).unwrap();
        assert!(transition_check(&t, &d).max() < 1e-12);
        d.c *= 2.0;
        let res = transition_check(&t, &d);
        assert!(res.components > 0.1);
        assert!(res.axes < 1e-12);
    }

    #[test]
    fn ties_are_flagged() {
        assert_eq!(find_ties(&[2.0, 2.0, 1.0, 1.0 - 1e-12, 0.5]), vec![0, 2]);
        assert!(find_ties(&[3.0, 2.0, 1.0]).is_empty());
    }
}
