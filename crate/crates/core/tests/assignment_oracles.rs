use lwc::assignment::{
    greedy_root_weight, logistic_cdf, logistic_density, logistic_rde_solve, logistic_sum_tail, optimal_assignment,
    random_assignment_experiment, zeta2_integral, CostMatrix, CostScaling, LogisticOptions, ZetaSource, ZETA2,
};
use lwc::rng::seeded;
use lwc::stats::ks_one_sample;
use rand::Rng;

mod common;
use common::{brute_force, permutations};

#[test]
fn solver_matches_exhaustive_search_on_seven_by_seven() {
    let perms = permutations(7);
    assert_eq!(perms.len(), 5040);
    let mut rng = seeded(51);
    for _ in 0..50 {
        let m = CostMatrix::exponential(7, 7.0, &mut rng).unwrap();
        let (perm, cost) = brute_force(&m, &perms);
        let a = optimal_assignment(&m);
        assert!((a.total_cost - cost).abs() < 1e-9);
        assert_eq!(a.perm, perm);
        assert!(a.slackness_residual(&m) < 1e-9);
    }
}

#[test]
fn ties_resolve_to_the_lexicographically_smallest_optimum() {
    let perms = permutations(5);
    let mut rng = seeded(52);
    for _ in 0..200 {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..5).map(|_| f64::from(rng.random_range(0u8..3))).collect())
            .collect();
        let m = CostMatrix::from_rows(&rows).unwrap();
        let (perm, cost) = brute_force(&m, &perms);
        let a = optimal_assignment(&m);
        assert_eq!(a.total_cost, cost);
        assert_eq!(a.perm, perm, "{rows:?}");
    }
}

#[test]
fn finite_n_mean_cost_is_the_partial_zeta_sum() {
    // E A_n = Σ_{k≤n} 1/k² for Exp(1) costs; with mean-n costs A_n/n has that mean
    let mut rng = seeded(53);
    for n in [1usize, 3, 8] {
        let est = random_assignment_experiment(n, 20_000, CostScaling::MeanN, &mut rng).unwrap();
        let want: f64 = (1..=n).map(|k| 1.0 / (k * k) as f64).sum();
        assert!(
            (est.mean - want).abs() < 4.0 * est.se,
            "n={n}: {} ± {} vs {want}",
            est.mean,
            est.se
        );
    }
}

#[test]
fn logistic_density_and_cdf_are_consistent() {
    let h = 1e-5;
    for x in [-5.0, -1.0, 0.0, 0.3, 4.0] {
        let d = (logistic_cdf(x + h) - logistic_cdf(x - h)) / (2.0 * h);
        assert!((d - logistic_density(x)).abs() < 1e-8);
    }
    assert!((logistic_sum_tail(0.0) - 0.5).abs() < 1e-12);
    assert!((logistic_sum_tail(1.7) + logistic_sum_tail(-1.7) - 1.0).abs() < 1e-12);
}

#[test]
fn logistic_sum_tail_matches_monte_carlo() {
    let mut rng = seeded(54);
    let draw = |rng: &mut lwc::rng::StreamRng| {
        let u: f64 = rng.random_range(f64::EPSILON..1.0);
        (u / (1.0 - u)).ln()
    };
    let n = 400_000;
    let sums: Vec<f64> = (0..n).map(|_| draw(&mut rng) + draw(&mut rng)).collect();
    for x in [-2.0, 0.5, 3.0] {
        let frac = sums.iter().filter(|&&s| s > x).count() as f64 / n as f64;
        assert!((frac - logistic_sum_tail(x)).abs() < 4e-3, "x={x}");
    }
}

#[test]
fn analytic_integral_is_zeta_two() {
    let (v, _) = zeta2_integral(ZetaSource::Analytic, &mut seeded(55)).unwrap();
    assert!((v - ZETA2).abs() < 1e-6);
}

#[test]
fn cavity_pool_is_logistic() {
    let opts = LogisticOptions {
        pool_size: 20_000,
        ..Default::default()
    };
    let mut rng = seeded(56);
    let pool = logistic_rde_solve(&opts, &mut rng).unwrap();
    assert!(pool.converged);
    assert!(ks_one_sample(&pool.values, logistic_cdf) < 0.02);
    let (z, se) = zeta2_integral(
        ZetaSource::Pool {
            pool: &pool,
            pairs: 200_000,
        },
        &mut rng,
    )
    .unwrap();
    assert!((z - ZETA2).abs() < 0.05 + 4.0 * se, "{z} ± {se}");
}

#[test]
fn greedy_root_edge_is_the_lightest_poisson_point() {
    let (m, se) = greedy_root_weight(20_000, 2, &mut seeded(57)).unwrap();
    assert!((m - 1.0).abs() < 4.0 * se.max(1e-3));
}
