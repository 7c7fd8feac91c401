use lwc::generators::{recursive_tree, AttachmentFn};
use lwc::graph::{RootedTree, NO_PARENT};
use lwc::pagerank::{
    exponent_targets, exponent_targets_from_rates, limit_root_pagerank_sample, pagerank_linear, pagerank_path_counts,
    root_cluster_pagerank, tail_exponent, Digraph, TailOptions,
};
use lwc::rng::seeded;
use lwc::stats::{ks_two_sample, mean_se};
use rand::Rng;

#[test]
fn hand_computed_scores() {
    let c = 0.6;
    // chain 2 -> 1 -> 0
    let g = Digraph::from_edges(3, &[(2, 1), (1, 0)]).unwrap();
    let s = pagerank_linear(&g, c).unwrap();
    let base = (1.0 - c) / 3.0;
    let want = [base * (1.0 + c + c * c), base * (1.0 + c), base];
    for v in 0..3 {
        assert!((s.raw[v] - want[v]).abs() < 1e-12);
        assert!((s.normalized[v] - 3.0 * want[v]).abs() < 1e-11);
    }
    // star with leaves pointing at the centre
    let g = Digraph::from_edges(4, &[(1, 0), (2, 0), (3, 0)]).unwrap();
    let s = pagerank_linear(&g, c).unwrap();
    assert!((s.raw[0] - (1.0 - c) / 4.0 * (1.0 + 3.0 * c)).abs() < 1e-12);
    // a directed cycle has no dangling vertex: uniform scores summing to one
    let g = Digraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
    let s = pagerank_linear(&g, c).unwrap();
    assert!(s.raw.iter().all(|&r| (r - 1.0 / 3.0).abs() < 1e-12));
    // split out-degree
    let g = Digraph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
    let s = pagerank_linear(&g, c).unwrap();
    assert!((s.raw[1] - (1.0 - c) / 3.0 * (1.0 + c / 2.0)).abs() < 1e-12);
}

#[test]
fn dangling_mass_leaks() {
    let t = recursive_tree(500, &AttachmentFn::uniform(), &mut seeded(61)).unwrap();
    let s = pagerank_linear(&Digraph::from_tree(&t), 0.5).unwrap();
    assert!(s.raw.iter().sum::<f64>() < 1.0);
    assert!(s.residual <= 1e-10);
}

#[test]
fn path_counts_agree_with_the_linear_solve() {
    let mut rng = seeded(62);
    for _ in 0..50 {
        let n = rng.random_range(1..400);
        let f = AttachmentFn::linear(rng.random_range(0.0..2.0));
        let t = recursive_tree(n, &f, &mut rng).unwrap();
        let g = Digraph::from_tree(&t);
        let c = rng.random_range(0.1..0.9);
        let a = pagerank_linear(&g, c).unwrap();
        let b = pagerank_path_counts(&g, c, 1e-15).unwrap();
        for v in 0..n {
            assert!((a.normalized[v] - b.normalized[v]).abs() < 1e-10);
        }
    }
}

#[test]
fn root_cluster_pagerank_sums_depth_weights() {
    // root with two children, one grandchild
    let t = RootedTree::from_growth(vec![NO_PARENT, 0, 0, 1]);
    let c = 0.5;
    assert!((root_cluster_pagerank(&t, c) - (1.0 - c) * (1.0 + 2.0 * c + c * c)).abs() < 1e-15);
}

#[test]
fn hill_estimator_calibrates_on_pareto() {
    let mut rng = seeded(63);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| rng.random_range(f64::EPSILON..1.0f64).powf(-1.0 / 2.0))
        .collect();
    let est = tail_exponent(&xs, &TailOptions::default(), &mut rng).unwrap();
    assert!((est.exponent - 2.0).abs() < 0.1, "{est:?}");
    assert!(est.stable);
}

#[test]
fn exponential_data_have_no_stable_power_tail() {
    let mut rng = seeded(64);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| -rng.random_range(f64::EPSILON..1.0f64).ln())
        .collect();
    let est = tail_exponent(&xs, &TailOptions::default(), &mut rng).unwrap();
    let first = est.path.first().unwrap().1;
    let last = est.path.last().unwrap().1;
    assert!(last > 2.0 * first, "{:?}", est.path);
}

#[test]
fn tail_estimator_rejects_small_samples() {
    assert!(tail_exponent(&[1.0; 999], &TailOptions::default(), &mut seeded(65)).is_err());
}

#[test]
fn exponent_targets_by_formula_and_by_growth_rates() {
    let t = exponent_targets(1.0, 0.5);
    assert_eq!((t.degree, t.pagerank), (3.0, 1.5));
    let t = exponent_targets(0.0, 0.5);
    assert!((t.pagerank - 4.0 / 3.0).abs() < 1e-15);
    for beta in [0.0, 0.5, 1.0, 3.0] {
        for c in [0.1, 0.5, 0.85] {
            let a = exponent_targets(beta, c);
            let b = exponent_targets_from_rates(&AttachmentFn::custom(move |k| k as f64 + 1.0 + beta), c).unwrap();
            assert!((a.pagerank - a.lambda / a.lambda_thinned).abs() < 1e-12);
            assert!((a.pagerank - b.pagerank).abs() < 1e-6, "beta={beta} c={c}");
        }
    }
    assert!((exponent_targets(1.0, 1e-9).pagerank - 3.0).abs() < 1e-8);
}

#[test]
fn limit_root_pagerank_matches_large_tree_scores() {
    let mut rng = seeded(66);
    let f = AttachmentFn::uniform();
    let c = 0.3;
    let samples: Vec<f64> = (0..100_000)
        .map(|_| limit_root_pagerank_sample(&f, c, 10_000_000, &mut rng).unwrap())
        .collect();
    let t = recursive_tree(100_000, &f, &mut rng).unwrap();
    let scores = pagerank_path_counts(&Digraph::from_tree(&t), c, 1e-15).unwrap();
    assert!(ks_two_sample(&samples, &scores.normalized) <= 0.02);
    let (m, _) = mean_se(&samples);
    let tree_mean = scores.normalized.iter().sum::<f64>() / t.n() as f64;
    assert!((m - tree_mean).abs() < 0.01, "{m} vs {tree_mean}");
}
