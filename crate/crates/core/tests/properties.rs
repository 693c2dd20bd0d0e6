mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use common::*;
use duality::compare::{rv, rv_max, rv_triples};
use duality::graph::{self, Graph};
use duality::io;
use duality::linalg::{decompose, transition_check, Metric, Triple};
use duality::methods::{self, ContingencyTable, GroupCoding, PcaOptions};
use duality::ScreeTable;

fn random_triple(seed: u64) -> Triple {
    let mut rng = rng(seed);
    let n = rng.random_range(1..=15);
    let p = rng.random_range(1..=6);
    // low-rank data now and then
    let x = if rng.random_bool(0.3) && n > 1 && p > 1 {
        let k = rng.random_range(1..n.min(p));
        random_matrix(&mut rng, n, k) * random_matrix(&mut rng, k, p)
    } else {
        random_matrix(&mut rng, n, p)
    };
    let q = random_spd(&mut rng, p);
    let w = random_weights(&mut rng, n);
    Triple::new(x, q, diag(&w)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coordinates_round_trip(
        values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..40),
        cols in 1usize..5,
    ) {
        let rows = values.len().div_ceil(cols);
        let m = DMatrix::from_fn(rows, cols, |i, j| values.get(i * cols + j).copied().unwrap_or(0.0));
        let labels: Vec<String> = (0..rows).map(|i| format!("row {i}")).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.tsv");
        io::write_coordinates(&path, &labels, &m).unwrap();
        let (back_labels, back) = io::read_coordinates(&path).unwrap();
        prop_assert_eq!(back_labels, labels);
        for (a, b) in m.iter().zip(back.iter()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn decomposition_invariants(seed in any::<u64>()) {
        let t = random_triple(seed);
        let dec = decompose(&t, None).unwrap();
        let k = dec.rank;
        prop_assert!(k <= t.n().min(t.p()));
        prop_assert!(dec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let q = t.q().matrix();
        let d = t.d().matrix();
        let ztqz = dec.z.transpose() * q * &dec.z;
        prop_assert!(max_abs(&(ztqz - DMatrix::identity(k, k))) < 1e-9);
        let ltdl = dec.l.transpose() * d * &dec.l;
        prop_assert!(max_abs(&(ltdl - DMatrix::identity(k, k))) < 1e-9);
        prop_assert!(transition_check(&t, &dec).max() < 1e-9 * dec.eigenvalues.first().copied().unwrap_or(1.0).max(1.0));
        let sum: f64 = dec.eigenvalues.iter().sum();
        prop_assert!((dec.inertia - sum).abs() <= 1e-10 * dec.inertia.max(1.0));
        // sign convention: the largest entry of every column of T = HZ is positive
        let h = q.clone().cholesky().unwrap().l().transpose();
        for col in (h * &dec.z).column_iter() {
            let top = col.iter().copied().fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
            prop_assert!(top >= 0.0);
        }
    }

    #[test]
    fn truncation_keeps_leading_columns(seed in any::<u64>()) {
        let t = random_triple(seed);
        let full = decompose(&t, None).unwrap();
        prop_assume!(full.rank >= 2);
        let part = decompose(&t, Some(1)).unwrap();
        prop_assert_eq!(part.z.ncols(), 1);
        prop_assert_eq!(&part.eigenvalues, &full.eigenvalues);
        prop_assert!((part.z.column(0) - full.z.column(0)).amax() < 1e-12);
    }

    #[test]
    fn centering_is_idempotent(seed in any::<u64>()) {
        let t = random_triple(seed);
        let once = t.center_columns();
        let twice = once.center_columns();
        prop_assert!(max_abs(&(once.x() - twice.x())) < 1e-12);
        let weighted_mean = once.x().tr_mul(&t.d().apply(&DMatrix::from_element(t.n(), 1, 1.0)));
        prop_assert!(max_abs(&weighted_mean) < 1e-12);
    }

    #[test]
    fn scree_table_invariants(values in prop::collection::vec(1e-6f64..10.0, 1..12)) {
        let mut values = values;
        values.sort_by(|a, b| b.total_cmp(a));
        let s = ScreeTable::from_eigenvalues(&values);
        prop_assert_eq!(s.len(), values.len());
        prop_assert!(s.rows.windows(2).all(|w| w[0].cumulative_pct <= w[1].cumulative_pct));
        prop_assert!((s.rows.last().unwrap().cumulative_pct - 100.0).abs() < 0.01);
        let pct: f64 = s.rows.iter().map(|r| r.inertia_pct).sum();
        prop_assert!((pct - 100.0).abs() < 1e-9);
    }

    #[test]
    fn rv_is_a_bounded_symmetric_cosine(a in any::<u64>(), b in any::<u64>()) {
        let mut rng = rng(a ^ b.rotate_left(17));
        let n = rng.random_range(2..=12);
        let w = random_weights(&mut rng, n);
        let make = |rng: &mut rand_chacha::ChaCha8Rng| {
            let p = rng.random_range(1..=4);
            Triple::new(random_matrix(rng, n, p), random_spd(rng, p), diag(&w)).unwrap()
        };
        let t1 = make(&mut rng);
        let t2 = make(&mut rng);
        let r12 = rv_triples(&t1, &t2).unwrap();
        let r21 = rv_triples(&t2, &t1).unwrap();
        prop_assert!((r12 - r21).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&r12));
        let o = t1.operator();
        prop_assert!((rv(&o, &(&o * 3.5)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rv_max_is_monotone(values in prop::collection::vec(1e-3f64..5.0, 2..8)) {
        let mut values = values;
        values.sort_by(|a, b| b.total_cmp(a));
        let all: Vec<f64> = (1..=values.len()).map(|q| rv_max(&values, q).unwrap()).collect();
        prop_assert!(all.windows(2).all(|w| w[0] <= w[1] + 1e-15));
        prop_assert!((all.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ca_inertia_and_percentages(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (m, p) = (rng.random_range(2..=8), rng.random_range(2..=6));
        let counts = random_counts(&mut rng, m, p, 30);
        let t = ContingencyTable::from_counts(counts).unwrap();
        let (chi2, dof) = methods::chi_square(&t);
        prop_assert_eq!(dof, (t.counts().nrows() - 1) * (t.counts().ncols() - 1));
        let res = methods::ca(&t, None).unwrap();
        prop_assert!((res.decomposition.inertia * t.total() - chi2).abs() <= 1e-10 * chi2.max(1.0));
        prop_assert!(res.decomposition.rank < t.counts().nrows().min(t.counts().ncols()));
        for col in t.column_percentages().column_iter() {
            prop_assert!((col.sum() - 100.0).abs() < 1e-10);
        }
    }

    #[test]
    fn lda_ratios_are_correlation_ratios(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.random_range(6..=30);
        let p = rng.random_range(1..=4);
        let g = rng.random_range(2..=4);
        let x = random_matrix(&mut rng, n, p);
        let groups = GroupCoding::from_labels(&random_groups(&mut rng, n, g));
        let res = methods::lda(&x, &groups, None, None).unwrap();
        prop_assert!(res.eigenvalues().len() <= (g - 1).min(p));
        prop_assert!(res.eigenvalues().iter().all(|&r| r > 0.0 && r <= 1.0 + 1e-12));
    }

    #[test]
    fn standardized_pca_inertia_is_p(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.random_range(3..=20);
        let p = rng.random_range(1..=6);
        let x = random_matrix(&mut rng, n, p);
        let res = methods::pca(&x, &PcaOptions { standardize: true, ..Default::default() }).unwrap();
        prop_assert!((res.decomposition.inertia - p as f64).abs() < 1e-10);
    }

    #[test]
    fn geary_lies_in_the_pencil_range(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.random_range(3..=15);
        let extra = rng.random_range(0..=n);
        let edges = random_connected_edges(&mut rng, n, extra);
        let g = Graph::from_index_edges(n, &edges).unwrap();
        let s = graph::spectrum(&g, n - 1).unwrap();
        let x = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let c = graph::geary(&g, &x).unwrap();
        prop_assert!(c >= -1e-12 && c <= s.all_mu[n - 1] + 1e-12);
        prop_assert!(s.all_mu[n - 1] <= 2.0 + 1e-12);
        // constants have ratio zero
        let ones = DVector::from_element(n, 2.0);
        prop_assert!(graph::geary(&g, &ones).unwrap().abs() < 1e-12);
    }

    #[test]
    fn metric_inverse_and_inner_product(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = rng.random_range(1..=6);
        let q = random_spd(&mut rng, p);
        let m = Metric::new(q.clone(), "Q").unwrap();
        prop_assert!(max_abs(&(m.inverse() * &q - DMatrix::identity(p, p))) < 1e-9);
        let a = random_matrix(&mut rng, p, 2);
        prop_assert!(max_abs(&(m.inner(&a, &a) - a.transpose() * &q * &a)) < 1e-12);
    }
}
