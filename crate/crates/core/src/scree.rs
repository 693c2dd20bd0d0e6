use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreeRow {
    /// 1-based axis number.
    pub index: usize,
    pub eigenvalue: f64,
    pub inertia_pct: f64,
    pub cumulative_pct: f64,
}

/// Eigenvalue / inertia % / cumulative % report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScreeTable {
    pub rows: Vec<ScreeRow>,
}

impl ScreeTable {
    pub const HEADER: &'static str = "\tEigenvalue\tinertia %\tcumulative %";

    /// Percentages are relative to the sum of the given (nonincreasing) eigenvalues.
    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Self {
        let total: f64 = eigenvalues.iter().sum();
        if total <= 0.0 {
            return ScreeTable::default();
        }
        let mut running = 0.0;
        let rows = eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                running += l;
                ScreeRow {
                    index: i + 1,
                    eigenvalue: l,
                    inertia_pct: 100.0 * l / total,
                    cumulative_pct: 100.0 * running / total,
                }
            })
            .collect();
        ScreeTable { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| r.eigenvalue).sum()
    }

    /// Cumulative percentage after `q` axes (0 for `q = 0`).
    pub fn cumulative_at(&self, q: usize) -> f64 {
        match q {
            0 => 0.0,
            q => self.rows[q.min(self.rows.len()) - 1].cumulative_pct,
        }
    }
}

/// Eigenvalues to 5 decimals, percentages to 2, tab separated.
impl fmt::Display for ScreeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::HEADER)?;
        for r in &self.rows {
            writeln!(
                f,
                "{}\t{:.5}\t{:.2}\t{:.2}",
                r.index, r.eigenvalue, r.inertia_pct, r.cumulative_pct
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plato_format() {
        let t = ScreeTable::from_eigenvalues(&[0.09170, 0.02120, 0.00911, 0.00603, 0.00276, 0.00217]);
        let text = t.to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], ScreeTable::HEADER);
        assert_eq!(lines[1], "1\t0.09170\t68.96\t68.96");
        // the printed eigenvalues are themselves rounded, so the cumulative
        // percentage can only be matched to the rounding of its inputs
        assert!(lines[2].starts_with("2\t0.02120\t15.94\t"));
        assert!((t.rows[1].cumulative_pct - 84.90).abs() < 0.01);
        assert_eq!(lines.len(), 7);
        assert!((t.rows[5].cumulative_pct - 100.0).abs() < 1e-12);
    }

    #[test]
    fn empty_spectrum() {
        assert!(ScreeTable::from_eigenvalues(&[]).is_empty());
        assert_eq!(ScreeTable::from_eigenvalues(&[]).to_string(), format!("{}\n", ScreeTable::HEADER));
    }
}
