//! Local/global variance decomposition over a neighborhood graph, the Geary
//! ratio, the spectrum of `(D − M)x = μDx` and its use for layout and for
//! regression of graph structure on node covariates.
//!
//! `D` here is the degree matrix, not observation weights.

mod regress;
mod spectrum;

pub use regress::regress_on_covariates;
pub use spectrum::{
    layout, layout_axes, spectrum, spectrum_per_component, ComponentSpectrum, GraphSpectrum, Layout, PerComponent,
    DEGENERACY_THRESHOLD,
};

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Simple undirected graph stored as a symmetric 0/1 adjacency matrix.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: DMatrix<f64>,
    degrees: Vec<usize>,
    labels: Vec<String>,
}

impl Graph {
    /// Validates symmetry, zero diagonal and 0/1 entries.
    pub fn new(adjacency: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        let n = adjacency.nrows();
        if !adjacency.is_square() {
            return Err(Error::dims("adjacency", format!("{n}x{n}"), format!("{}x{}", n, adjacency.ncols())));
        }
        if labels.len() != n {
            return Err(Error::dims("node labels", n, labels.len()));
        }
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(Error::SelfLoop {
                    label: labels[i].clone(),
                    line: 0,
                });
            }
            for j in 0..n {
                let v = adjacency[(i, j)];
                if v != 0.0 && v != 1.0 {
                    return Err(Error::InvalidInput(format!("adjacency entry ({i}, {j}) = {v} is not 0/1")));
                }
                if v != adjacency[(j, i)] {
                    return Err(Error::InvalidInput(format!("adjacency is not symmetric at ({i}, {j})")));
                }
            }
        }
        let degrees = adjacency.row_iter().map(|r| r.sum() as usize).collect();
        Ok(Graph {
            adjacency,
            degrees,
            labels,
        })
    }

    /// Builds a graph on `labels` from index pairs; repeated edges collapse,
    /// self loops are rejected.
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut adjacency = DMatrix::zeros(n, n);
        for (line, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!("edge ({a}, {b}) references a missing node")));
            }
            if a == b {
                return Err(Error::SelfLoop {
                    label: labels[a].clone(),
                    line: line + 1,
                });
            }
            adjacency[(a, b)] = 1.0;
            adjacency[(b, a)] = 1.0;
        }
        Graph::new(adjacency, labels)
    }

    /// Nodes named `0..n`.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Graph::from_edges((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `m = Σᵢᵢ' mᵢᵢ'`, twice the number of edges.
    pub fn total_degree(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn edge_count(&self) -> usize {
        self.total_degree() / 2
    }

    pub fn degree_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(self.n(), self.degrees.iter().map(|&d| d as f64)))
    }

    /// `D − M`
    pub fn laplacian(&self) -> DMatrix<f64> {
        self.degree_matrix() - &self.adjacency
    }

    /// Normalized Laplacian `D⁻¹(D − M)`; rows of isolated nodes are zero.
    pub fn normalized_laplacian(&self) -> DMatrix<f64> {
        let mut l = self.laplacian();
        for (i, mut row) in l.row_iter_mut().enumerate() {
            if self.degrees[i] > 0 {
                row /= self.degrees[i] as f64;
            }
        }
        l
    }

    /// Connected components as sorted node index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut members = BTreeSet::new();
            while let Some(v) = stack.pop() {
                members.insert(v);
                for w in 0..n {
                    if self.adjacency[(v, w)] != 0.0 && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            out.push(members.into_iter().collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Induced subgraph on `nodes` (in the given order).
    pub fn subgraph(&self, nodes: &[usize]) -> Graph {
        let adjacency = DMatrix::from_fn(nodes.len(), nodes.len(), |i, j| self.adjacency[(nodes[i], nodes[j])]);
        let labels = nodes.iter().map(|&i| self.labels[i].clone()).collect();
        Graph::new(adjacency, labels).expect("induced subgraph of a valid graph")
    }

    fn check_rows(&self, x: &DMatrix<f64>) -> Result<()> {
        if x.nrows() != self.n() {
            return Err(Error::dims("rows of node covariates", self.n(), x.nrows()));
        }
        Ok(())
    }
}

/// `var_loc(xⱼ) = (1/2m) Σᵢ Σᵢ' mᵢᵢ' (xᵢⱼ − xᵢ'ⱼ)²` for every column.
pub fn local_variance(g: &Graph, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    g.check_rows(x)?;
    let m = g.total_degree();
    if m == 0 {
        return Err(Error::EdgelessGraph);
    }
    let lx = g.laplacian() * x;
    // Σᵢᵢ' mᵢᵢ'(xᵢ − xᵢ')² = 2 xᵗ(D − M)x
    Ok((0..x.ncols())
        .map(|j| x.column(j).dot(&lx.column(j)) / m as f64)
        .collect())
}

/// Uniform-weight variance `(1/2n²) Σᵢ Σᵢ' (xᵢⱼ − xᵢ'ⱼ)²` for every column.
pub fn total_variance(x: &DMatrix<f64>) -> Vec<f64> {
    let n = x.nrows() as f64;
    x.column_iter()
        .map(|c| {
            let mean = c.mean();
            c.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
        })
        .collect()
}

/// Generalized Geary ratio `c(x) = xᵗ(D − M)x / xᵗDx` with `D` the degree matrix.
pub fn geary(g: &Graph, x: &DVector<f64>) -> Result<f64> {
    if x.len() != g.n() {
        return Err(Error::dims("node vector", g.n(), x.len()));
    }
    if g.total_degree() == 0 {
        return Err(Error::EdgelessGraph);
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    let num = x.dot(&(g.laplacian() * x));
    let den: f64 = x.iter().zip(g.degrees()).map(|(v, &d)| d as f64 * v * v).sum();
    if den == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(num / den)
}

/// Per-variable Geary report.
#[derive(Debug, Clone, PartialEq)]
pub struct GearyRow {
    pub local_variance: f64,
    pub variance: f64,
    /// `var_loc / var`; `None` for a constant column.
    pub classical: Option<f64>,
    /// Degree-weighted `xᵗ(D − M)x / xᵗDx`; `None` for the zero column.
    pub generalized: Option<f64>,
}

pub fn geary_columns(g: &Graph, x: &DMatrix<f64>) -> Result<Vec<GearyRow>> {
    let loc = local_variance(g, x)?;
    let var = total_variance(x);
    Ok((0..x.ncols())
        .map(|j| {
            let generalized = match geary(g, &x.column(j).into_owned()) {
                Ok(c) => Some(c),
                Err(_) => None,
            };
            GearyRow {
                local_variance: loc[j],
                variance: var[j],
                classical: (var[j] > 0.0).then(|| loc[j] / var[j]),
                generalized,
            }
        })
        .collect())
}

/// Local covariance `V = (1/2m) Xᵗ(D − M)X`.
pub fn local_covariance(g: &Graph, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    g.check_rows(x)?;
    let m = g.total_degree();
    if m == 0 {
        return Err(Error::EdgelessGraph);
    }
    Ok(x.tr_mul(&(g.laplacian() * x)) / (2.0 * m as f64))
}
