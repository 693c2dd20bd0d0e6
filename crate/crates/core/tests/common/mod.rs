//! Test oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cyclic Jacobi eigensolver for a symmetric matrix. Eigenvalues come back in
/// decreasing order with unit eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Symmetric square root through the Jacobi decomposition.
pub fn sqrt_spd(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = jacobi_eigen(a);
    let root = DMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0).sqrt())));
    &vecs * root * vecs.transpose()
}

/// Nonzero eigenvalues of `XQXᵗD` via `Q^(1/2) XᵗDX Q^(1/2)`, decreasing.
pub fn triple_spectrum(x: &DMatrix<f64>, q: &DMatrix<f64>, d: &DMatrix<f64>) -> Vec<f64> {
    let h = sqrt_spd(q);
    let s = &h * x.transpose() * d * x * &h;
    let s = (&s + s.transpose()) * 0.5;
    let (vals, _) = jacobi_eigen(&s);
    let top = vals.first().copied().unwrap_or(0.0).max(1.0);
    vals.into_iter().filter(|&v| v > 1e-10 * top).collect()
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0))
}

/// Well-conditioned SPD matrix `BᵗB + εI`.
pub fn random_spd(rng: &mut impl Rng, p: usize) -> DMatrix<f64> {
    let b = random_matrix(rng, p + 2, p);
    b.transpose() * b + DMatrix::identity(p, p) * 0.1
}

/// Positive weights summing to one.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

pub fn diag(w: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(w))
}

/// Counts in `1..=max` so that no margin vanishes.
pub fn random_counts(rng: &mut impl Rng, n: usize, p: usize, max: u32) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| rng.random_range(1..=max) as f64)
}

/// Group labels covering every one of `g` groups at least once.
pub fn random_groups(rng: &mut impl Rng, n: usize, g: usize) -> Vec<String> {
    (0..n)
        .map(|i| if i < g { i } else { rng.random_range(0..g) })
        .map(|k| format!("g{k}"))
        .collect()
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_edges(rng: &mut impl Rng, n: usize, extra: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.random_range(0..i), i));
    }
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    edges
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Cosine of two vectors in the inner product `⟨a, b⟩ = aᵗWb`, `W` diagonal.
pub fn weighted_cosine(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).zip(w).map(|((p, q), r)| p * q * r).sum::<f64>();
    dot(a, b) / (dot(a, a) * dot(b, b)).sqrt()
}
