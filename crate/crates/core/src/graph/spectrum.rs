use nalgebra::{DMatrix, SymmetricEigen};

use super::Graph;
use crate::error::{Error, Result};
use crate::linalg::orient_columns;

/// Gap below which two graph eigenvalues are reported as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// Nontrivial solutions of `(D − M)x = μDx`, smallest `μ` first.
#[derive(Debug, Clone)]
pub struct GraphSpectrum {
    /// The `k` returned eigenvalues, nondecreasing.
    pub mu: Vec<f64>,
    /// Eigenvectors, n × k, `D`-orthonormal.
    pub vectors: DMatrix<f64>,
    /// The constant solution (`μ = 0`) was removed.
    pub trivial_dropped: bool,
    /// Every eigenvalue of the pencil, trivial one included, nondecreasing.
    pub all_mu: Vec<f64>,
    /// Indices `i` with `mu[i]` tied to the next nontrivial eigenvalue.
    pub degenerate: Vec<usize>,
}

impl GraphSpectrum {
    pub fn k(&self) -> usize {
        self.mu.len()
    }

    /// Nontrivial part of the full spectrum.
    pub fn nontrivial_mu(&self) -> &[f64] {
        &self.all_mu[1..]
    }
}

/// All eigenpairs of `(D − M)x = μDx` for a graph without isolated nodes, via the
/// symmetric matrix `D^(-1/2)(D − M)D^(-1/2)`. Returns `μ` ascending and the
/// `D`-orthonormal eigenvectors.
fn full_pencil(g: &Graph) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = g.n();
    if let Some(i) = g.degrees().iter().position(|&d| d == 0) {
        return Err(Error::InvalidInput(format!("node {} is isolated", g.labels()[i])));
    }
    let inv_root: Vec<f64> = g.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let lap = g.laplacian();
    let sym = DMatrix::from_fn(n, n, |i, j| inv_root[i] * lap[(i, j)] * inv_root[j]);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalBreakdown("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mu = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| inv_root[i] * eig.eigenvectors[(i, order[j])]);
    Ok((mu, vectors))
}

/// The `k` smallest nontrivial eigenpairs of `(D − M)x = μDx`; these are also the
/// leading nontrivial correspondence-analysis axes of `M`, since
/// `(1 − μ)x = D⁻¹Mx`.
pub fn spectrum(g: &Graph, k: usize) -> Result<GraphSpectrum> {
    let n = g.n();
    if g.total_degree() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let components = g.components().len();
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    if k == 0 || k >= n {
        return Err(Error::RankOutOfRange {
            requested: k,
            max: n - 1,
        });
    }
    let (all_mu, all_vectors) = full_pencil(g)?;
    let mut vectors = all_vectors.columns(1, k).into_owned();
    orient_columns(&mut vectors, None);
    let nontrivial = &all_mu[1..];
    let degenerate = (0..k)
        .filter(|&i| {
            i + 1 < nontrivial.len()
                && nontrivial[i + 1] - nontrivial[i] < DEGENERACY_THRESHOLD * nontrivial[i].max(1.0)
        })
        .collect();
    Ok(GraphSpectrum {
        mu: nontrivial[..k].to_vec(),
        vectors,
        trivial_dropped: true,
        all_mu,
        degenerate,
    })
}

#[derive(Debug, Clone)]
pub struct ComponentSpectrum {
    /// Node indices of the component in the parent graph.
    pub nodes: Vec<usize>,
    pub spectrum: GraphSpectrum,
}

#[derive(Debug, Clone)]
pub struct PerComponent {
    pub components: Vec<ComponentSpectrum>,
    /// Nodes without any edge; they have no spectrum.
    pub isolated: Vec<usize>,
}

/// Analyzes every connected component separately, asking each for
/// `min(k, size − 1)` axes.
pub fn spectrum_per_component(g: &Graph, k: usize) -> Result<PerComponent> {
    if k == 0 {
        return Err(Error::RankOutOfRange { requested: 0, max: g.n().saturating_sub(1) });
    }
    let mut components = Vec::new();
    let mut isolated = Vec::new();
    for nodes in g.components() {
        if nodes.len() < 2 {
            isolated.extend(nodes);
            continue;
        }
        let sub = g.subgraph(&nodes);
        let spectrum = spectrum(&sub, k.min(nodes.len() - 1))?;
        components.push(ComponentSpectrum { nodes, spectrum });
    }
    Ok(PerComponent { components, isolated })
}

/// Planar (or k-dimensional) graph layout.
#[derive(Debug, Clone)]
pub struct Layout {
    /// n × k coordinates: the `D`-orthonormal eigenvectors.
    pub coordinates: DMatrix<f64>,
    /// Eigenvectors scaled by `|1 − μ|`, the correspondence-analysis singular
    /// values of `M`. Collapses to zero on axes with `μ = 1`.
    pub principal: DMatrix<f64>,
    pub spectrum: GraphSpectrum,
}

impl Layout {
    /// The chosen axes split or contain a degenerate eigenvalue.
    pub fn is_degenerate(&self) -> bool {
        !self.spectrum.degenerate.is_empty()
    }
}

/// Two-dimensional layout from the two smallest nontrivial eigenvectors.
pub fn layout(g: &Graph) -> Result<Layout> {
    if g.n() < 3 {
        return Err(Error::InvalidInput(format!("layout needs at least 3 nodes, got {}", g.n())));
    }
    layout_axes(g, 2)
}

/// Layout on the `k` smallest nontrivial eigenvectors.
pub fn layout_axes(g: &Graph, k: usize) -> Result<Layout> {
    let spectrum = spectrum(g, k)?;
    Ok(layout_from(spectrum))
}

pub(crate) fn layout_from(spectrum: GraphSpectrum) -> Layout {
    let coordinates = spectrum.vectors.clone();
    let mut principal = spectrum.vectors.clone();
    for (j, mut col) in principal.column_iter_mut().enumerate() {
        col *= (1.0 - spectrum.mu[j]).abs();
    }
    Layout {
        coordinates,
        principal,
        spectrum,
    }
}
