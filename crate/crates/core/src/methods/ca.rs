use nalgebra::{DMatrix, DVector};

use super::{CaExtras, Method, MethodExtras, MethodResult};
use crate::error::{Error, Result};
use crate::linalg::{decompose, Metric, Triple};

/// Nonnegative count table with labelled rows and columns and no empty margin.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    counts: DMatrix<f64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    total: f64,
}

impl ContingencyTable {
    pub fn new(counts: DMatrix<f64>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let (m, p) = counts.shape();
        if m == 0 || p == 0 {
            return Err(Error::InvalidInput("contingency table is empty".into()));
        }
        if row_labels.len() != m {
            return Err(Error::dims("row labels", m, row_labels.len()));
        }
        if col_labels.len() != p {
            return Err(Error::dims("column labels", p, col_labels.len()));
        }
        if let Some(v) = counts.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!("counts must be finite and nonnegative, found {v}")));
        }
        for (i, label) in row_labels.iter().enumerate() {
            if counts.row(i).sum() == 0.0 {
                return Err(Error::ZeroMarginal { axis: "row", label: label.clone() });
            }
        }
        for (j, label) in col_labels.iter().enumerate() {
            if counts.column(j).sum() == 0.0 {
                return Err(Error::ZeroMarginal { axis: "column", label: label.clone() });
            }
        }
        let total = counts.sum();
        Ok(ContingencyTable {
            counts,
            row_labels,
            col_labels,
            total,
        })
    }

    /// Labels `r1..rm`, `c1..cp`.
    pub fn from_counts(counts: DMatrix<f64>) -> Result<Self> {
        let rows = (1..=counts.nrows()).map(|i| format!("r{i}")).collect();
        let cols = (1..=counts.ncols()).map(|j| format!("c{j}")).collect();
        Self::new(counts, rows, cols)
    }

    /// Drops all-zero rows and columns first; returns one warning per dropped line.
    pub fn dropping_empty(
        counts: DMatrix<f64>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<(Self, Vec<String>)> {
        if row_labels.len() != counts.nrows() || col_labels.len() != counts.ncols() {
            return Self::new(counts, row_labels, col_labels).map(|t| (t, Vec::new()));
        }
        let mut warnings = Vec::new();
        let keep_rows: Vec<usize> = (0..counts.nrows())
            .filter(|&i| {
                let keep = counts.row(i).sum() != 0.0;
                if !keep {
                    warnings.push(format!("dropping all-zero row {}", row_labels[i]));
                }
                keep
            })
            .collect();
        let keep_cols: Vec<usize> = (0..counts.ncols())
            .filter(|&j| {
                let keep = counts.column(j).sum() != 0.0;
                if !keep {
                    warnings.push(format!("dropping all-zero column {}", col_labels[j]));
                }
                keep
            })
            .collect();
        let kept = DMatrix::from_fn(keep_rows.len(), keep_cols.len(), |i, j| counts[(keep_rows[i], keep_cols[j])]);
        let rows = keep_rows.iter().map(|&i| row_labels[i].clone()).collect();
        let cols = keep_cols.iter().map(|&j| col_labels[j].clone()).collect();
        Ok((Self::new(kept, rows, cols)?, warnings))
    }

    pub fn counts(&self) -> &DMatrix<f64> {
        &self.counts
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// `n = Σᵢⱼ nᵢⱼ`
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Row masses `r = N1/n`.
    pub fn row_masses(&self) -> DVector<f64> {
        DVector::from_iterator(self.counts.nrows(), self.counts.row_iter().map(|r| r.sum() / self.total))
    }

    /// Column masses `c = Nᵗ1/n`.
    pub fn col_masses(&self) -> DVector<f64> {
        DVector::from_iterator(self.counts.ncols(), self.counts.column_iter().map(|c| c.sum() / self.total))
    }

    /// Each count as a percentage of its column total (columns sum to 100).
    pub fn column_percentages(&self) -> DMatrix<f64> {
        let mut out = self.counts.clone();
        for mut col in out.column_iter_mut() {
            let s = col.sum();
            col *= 100.0 / s;
        }
        out
    }

    /// The doubly centered profile matrix `D_r⁻¹ F D_c⁻¹ − 11ᵗ`.
    pub fn centered_profiles(&self) -> DMatrix<f64> {
        let r = self.row_masses();
        let c = self.col_masses();
        DMatrix::from_fn(self.counts.nrows(), self.counts.ncols(), |i, j| {
            self.counts[(i, j)] / self.total / (r[i] * c[j]) - 1.0
        })
    }

    /// The CA triple `(D_r⁻¹FD_c⁻¹ − 11ᵗ, D_c, D_r)`.
    pub fn triple(&self) -> Result<Triple> {
        Triple::from_metrics(
            self.centered_profiles(),
            Metric::diagonal(self.col_masses(), "D_c")?,
            Metric::diagonal(self.row_masses(), "D_r")?,
        )
    }
}

/// Pearson χ² statistic of independence and its degrees of freedom `(m−1)(p−1)`.
pub fn chi_square(table: &ContingencyTable) -> (f64, usize) {
    let n = table.total;
    let counts = &table.counts;
    let row_sums: Vec<f64> = counts.row_iter().map(|r| r.sum()).collect();
    let col_sums: Vec<f64> = counts.column_iter().map(|c| c.sum()).collect();
    let mut chi2 = 0.0;
    for (i, ri) in row_sums.iter().enumerate() {
        for (j, cj) in col_sums.iter().enumerate() {
            let expected = ri * cj / n;
            let diff = counts[(i, j)] - expected;
            chi2 += diff * diff / expected;
        }
    }
    let dof = (counts.nrows() - 1) * (counts.ncols() - 1);
    (chi2, dof)
}

/// Correspondence analysis. Row coordinates are the principal components `C`
/// (`CᵗD_rC = Λ`), column coordinates the principal axes `A` (`AᵗD_cA = Λ`).
pub fn ca(table: &ContingencyTable, rank: Option<usize>) -> Result<MethodResult> {
    let triple = table.triple()?;
    let dec = decompose(&triple, rank)?;
    let (chi2, dof) = chi_square(table);
    let rows = dec.c.clone();
    let cols = dec.a.clone();
    Ok(MethodResult::new(
        Method::Ca,
        dec,
        rows,
        cols,
        MethodExtras::Ca(CaExtras {
            chi_square: chi2,
            dof,
            total: table.total,
        }),
    ))
}
