//! Python bindings. Matrices cross the boundary as lists of rows.

use ::duality as core;
use core::graph;
use core::linalg::{self, Metric};
use core::methods::{self, ContingencyTable, GroupCoding, MethodExtras, PcaOptions};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Rows = Vec<Vec<f64>>;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: &Rows, name: &str) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != p) {
        return Err(PyValueError::new_err(format!("{name}: row {i} has {} values, expected {p}", rows[i].len())));
    }
    Ok(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
}

fn to_rows(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Eigendecomposition of a triple.
#[pyclass(name = "Decomposition", frozen)]
struct PyDecomposition(linalg::Decomposition);

#[pymethods]
impl PyDecomposition {
    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues.clone()
    }
    #[getter]
    fn rank(&self) -> usize {
        self.0.rank
    }
    #[getter]
    fn inertia(&self) -> f64 {
        self.0.inertia
    }
    /// `Q`-orthonormal axes.
    #[getter]
    fn z(&self) -> Rows {
        to_rows(&self.0.z)
    }
    /// Principal axes.
    #[getter]
    fn a(&self) -> Rows {
        to_rows(&self.0.a)
    }
    /// `D`-orthonormal components.
    #[getter]
    fn l(&self) -> Rows {
        to_rows(&self.0.l)
    }
    /// Principal components.
    #[getter]
    fn c(&self) -> Rows {
        to_rows(&self.0.c)
    }
    #[getter]
    fn ties(&self) -> Vec<usize> {
        self.0.ties.clone()
    }
    fn __repr__(&self) -> String {
        format!("Decomposition(rank={}, inertia={})", self.0.rank, self.0.inertia)
    }
}

/// Statistical study `(X, Q, D)`.
#[pyclass(name = "Triple", frozen)]
struct PyTriple(linalg::Triple);

#[pymethods]
impl PyTriple {
    #[new]
    fn new(x: Rows, q: Rows, d: Rows) -> PyResult<Self> {
        let t = linalg::Triple::new(to_matrix(&x, "X")?, to_matrix(&q, "Q")?, to_matrix(&d, "D")?).map_err(err)?;
        Ok(PyTriple(t))
    }

    /// Triple with `D = diag(weights)`.
    #[staticmethod]
    fn with_weights(x: Rows, q: Rows, weights: Vec<f64>) -> PyResult<Self> {
        let q = Metric::new(to_matrix(&q, "Q")?, "Q").map_err(err)?;
        let d = Metric::diagonal(DVector::from_vec(weights), "D").map_err(err)?;
        Ok(PyTriple(linalg::Triple::from_metrics(to_matrix(&x, "X")?, q, d).map_err(err)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }
    #[getter]
    fn p(&self) -> usize {
        self.0.p()
    }

    fn centered(&self) -> Self {
        PyTriple(self.0.center_columns())
    }

    /// The operator `XQXᵗD`.
    fn operator(&self) -> Rows {
        to_rows(&self.0.operator())
    }

    #[pyo3(signature = (rank=None))]
    fn decompose(&self, rank: Option<usize>) -> PyResult<PyDecomposition> {
        Ok(PyDecomposition(linalg::decompose(&self.0, rank).map_err(err)?))
    }
}

/// Output of one of the analyses.
#[pyclass(name = "MethodResult", frozen)]
struct PyMethodResult(methods::MethodResult);

#[pymethods]
impl PyMethodResult {
    #[getter]
    fn method(&self) -> &'static str {
        self.0.method.name()
    }
    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues().to_vec()
    }
    #[getter]
    fn inertia(&self) -> f64 {
        self.0.decomposition.inertia
    }
    #[getter]
    fn rank(&self) -> usize {
        self.0.decomposition.rank
    }
    #[getter]
    fn row_coords(&self) -> Rows {
        to_rows(&self.0.row_coords)
    }
    #[getter]
    fn col_coords(&self) -> Rows {
        to_rows(&self.0.col_coords)
    }
    #[getter]
    fn decomposition(&self) -> PyDecomposition {
        PyDecomposition(self.0.decomposition.clone())
    }
    /// `(eigenvalue, inertia %, cumulative %)` per axis.
    #[getter]
    fn scree(&self) -> Vec<(f64, f64, f64)> {
        self.0.scree.rows.iter().map(|r| (r.eigenvalue, r.inertia_pct, r.cumulative_pct)).collect()
    }

    /// Method-specific values as a dict.
    #[getter]
    fn extras<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        match &self.0.extras {
            MethodExtras::Pca(e) => {
                d.set_item("means", e.means.clone())?;
                d.set_item("scales", e.scales.clone())?;
            }
            MethodExtras::Ca(e) => {
                d.set_item("chi_square", e.chi_square)?;
                d.set_item("dof", e.dof)?;
                d.set_item("total", e.total)?;
            }
            MethodExtras::Lda(e) => {
                d.set_item("ratios", e.ratios.clone())?;
                d.set_item("discriminant_vectors", to_rows(&e.discriminant_vectors))?;
                d.set_item("group_coords", to_rows(&e.group_coords))?;
            }
            MethodExtras::Pcaiv(e) => {
                d.set_item("coefficients", to_rows(&e.coefficients))?;
                d.set_item("r", to_rows(&e.r))?;
            }
            MethodExtras::Cca(e) => {
                d.set_item("correlations", e.correlations.clone())?;
                d.set_item("merged_eigenvalues", e.merged_eigenvalues.clone())?;
                d.set_item("x1_weights", to_rows(&e.x1_weights))?;
                d.set_item("x2_weights", to_rows(&e.x2_weights))?;
            }
            MethodExtras::GraphRegression(e) => {
                d.set_item("mu", e.mu.clone())?;
                d.set_item("explained", e.explained.clone())?;
                d.set_item("coefficients", to_rows(&e.pcaiv.coefficients))?;
            }
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("MethodResult(method={:?}, rank={})", self.0.method.name(), self.0.decomposition.rank)
    }
}

/// Undirected unweighted graph on labelled nodes.
#[pyclass(name = "Graph", frozen)]
struct PyGraph(graph::Graph);

#[pymethods]
impl PyGraph {
    /// Nodes `0..n` joined by `edges` (index pairs).
    #[new]
    #[pyo3(signature = (n, edges, labels=None))]
    fn new(n: usize, edges: Vec<(usize, usize)>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let g = match labels {
            Some(l) if l.len() != n => {
                return Err(PyValueError::new_err(format!("expected {n} labels, got {}", l.len())));
            }
            Some(l) => graph::Graph::from_edges(l, &edges),
            None => graph::Graph::from_index_edges(n, &edges),
        };
        Ok(PyGraph(g.map_err(err)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }
    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }
    #[getter]
    fn degrees(&self) -> Vec<usize> {
        self.0.degrees().to_vec()
    }
    fn is_connected(&self) -> bool {
        self.0.is_connected()
    }
    fn components(&self) -> Vec<Vec<usize>> {
        self.0.components()
    }

    /// `(mu, vectors)`: the `k` smallest nontrivial pencil eigenvalues and their
    /// `D`-orthonormal eigenvectors.
    fn spectrum(&self, k: usize) -> PyResult<(Vec<f64>, Rows)> {
        let s = graph::spectrum(&self.0, k).map_err(err)?;
        Ok((s.mu, to_rows(&s.vectors)))
    }

    /// Geary ratio of one variable.
    fn geary(&self, x: Vec<f64>) -> PyResult<f64> {
        graph::geary(&self.0, &DVector::from_vec(x)).map_err(err)
    }

    fn local_variance(&self, x: Rows) -> PyResult<Vec<f64>> {
        graph::local_variance(&self.0, &to_matrix(&x, "X")?).map_err(err)
    }

    fn local_covariance(&self, x: Rows) -> PyResult<Rows> {
        Ok(to_rows(&graph::local_covariance(&self.0, &to_matrix(&x, "X")?).map_err(err)?))
    }

    /// Node coordinates on the first `axes` nontrivial eigenvectors.
    #[pyo3(signature = (axes=2))]
    fn layout(&self, axes: usize) -> PyResult<Rows> {
        Ok(to_rows(&graph::layout_axes(&self.0, axes).map_err(err)?.coordinates))
    }

    /// Covariates regressed on the first `k` graph eigenvectors.
    #[pyo3(signature = (x, k=2, rank=None))]
    fn regress(&self, x: Rows, k: usize, rank: Option<usize>) -> PyResult<PyMethodResult> {
        let r = graph::regress_on_covariates(&self.0, &to_matrix(&x, "X")?, k, rank).map_err(err)?;
        Ok(PyMethodResult(r))
    }
}

#[pyfunction]
#[pyo3(signature = (x, standardize=false, weights=None, rank=None))]
fn pca(x: Rows, standardize: bool, weights: Option<Vec<f64>>, rank: Option<usize>) -> PyResult<PyMethodResult> {
    let opts = PcaOptions {
        standardize,
        weights,
        rank,
        column_labels: None,
    };
    Ok(PyMethodResult(methods::pca(&to_matrix(&x, "X")?, &opts).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (counts, rank=None))]
fn ca(counts: Rows, rank: Option<usize>) -> PyResult<PyMethodResult> {
    let t = ContingencyTable::from_counts(to_matrix(&counts, "counts")?).map_err(err)?;
    Ok(PyMethodResult(methods::ca(&t, rank).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (x, groups, weights=None, rank=None))]
fn lda(x: Rows, groups: Vec<String>, weights: Option<Vec<f64>>, rank: Option<usize>) -> PyResult<PyMethodResult> {
    let g = GroupCoding::from_labels(&groups);
    Ok(PyMethodResult(methods::lda(&to_matrix(&x, "X")?, &g, weights.as_deref(), rank).map_err(err)?))
}

/// PCA on instrumental variables; `q` defaults to the identity.
#[pyfunction]
#[pyo3(signature = (x, y, q=None, weights=None, rank=None))]
fn pcaiv(x: Rows, y: Rows, q: Option<Rows>, weights: Option<Vec<f64>>, rank: Option<usize>) -> PyResult<PyMethodResult> {
    let y = to_matrix(&y, "Y")?;
    let q = match q {
        Some(q) => to_matrix(&q, "Q")?,
        None => DMatrix::identity(y.ncols(), y.ncols()),
    };
    let r = methods::pcaiv(&to_matrix(&x, "X")?, &y, &q, weights.as_deref(), rank).map_err(err)?;
    Ok(PyMethodResult(r))
}

#[pyfunction]
#[pyo3(signature = (x1, x2, weights=None, rank=None))]
fn cca(x1: Rows, x2: Rows, weights: Option<Vec<f64>>, rank: Option<usize>) -> PyResult<PyMethodResult> {
    let r = methods::cca(&to_matrix(&x1, "X1")?, &to_matrix(&x2, "X2")?, weights.as_deref(), rank).map_err(err)?;
    Ok(PyMethodResult(r))
}

/// RV coefficient of two operators on the same observations.
#[pyfunction]
fn rv(o1: Rows, o2: Rows) -> PyResult<f64> {
    core::compare::rv(&to_matrix(&o1, "O1")?, &to_matrix(&o2, "O2")?).map_err(err)
}

#[pyfunction]
fn rv_triples(t1: &PyTriple, t2: &PyTriple) -> PyResult<f64> {
    core::compare::rv_triples(&t1.0, &t2.0).map_err(err)
}

/// Best RV attainable by a rank-`q` approximation.
#[pyfunction]
fn rv_max(eigenvalues: Vec<f64>, q: usize) -> PyResult<f64> {
    core::compare::rv_max(&eigenvalues, q).map_err(err)
}

#[pymodule]
fn duality_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTriple>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_class::<PyMethodResult>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(pca, m)?)?;
    m.add_function(wrap_pyfunction!(ca, m)?)?;
    m.add_function(wrap_pyfunction!(lda, m)?)?;
    m.add_function(wrap_pyfunction!(pcaiv, m)?)?;
    m.add_function(wrap_pyfunction!(cca, m)?)?;
    m.add_function(wrap_pyfunction!(rv, m)?)?;
    m.add_function(wrap_pyfunction!(rv_triples, m)?)?;
    m.add_function(wrap_pyfunction!(rv_max, m)?)?;
    Ok(())
}
