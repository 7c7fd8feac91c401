//! Random assignment with exponential costs: the optimal cost per row tends
//! to π²/6, the cavity equation has the logistic law as its fixed point, and
//! greedy matching on the PWIT only reaches mean edge weight 1 at the root.
//!
//! cargo run --release --example random_assignment -- [n] [replicas] [seed]

use lwc::assignment::{
    greedy_root_weight, logistic_cdf, logistic_rde_solve, random_assignment_experiment, zeta2_integral, CostScaling,
    LogisticOptions, ZetaSource, ZETA2,
};
use lwc::{rng, stats};

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let replicas: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut r = rng::stream(seed, "assign", 0);

    for m in [10, 50, n] {
        let est = random_assignment_experiment(m, replicas, CostScaling::MeanN, &mut r)?;
        println!("n = {m:>4}: mean A_n/n = {:.4} ± {:.4}", est.mean, est.se);
    }
    println!("pi^2/6 = {ZETA2:.6}");

    let pool = logistic_rde_solve(&LogisticOptions::default(), &mut r)?;
    println!(
        "cavity pool: KS to logistic {:.4}, median {:.4}, cutoff hits {}",
        stats::ks_one_sample(&pool.values, logistic_cdf),
        stats::median(&pool.values),
        pool.cutoff_hits
    );
    let (mc, se) = zeta2_integral(
        ZetaSource::Pool {
            pool: &pool,
            pairs: 1_000_000,
        },
        &mut r,
    )?;
    let (exact, _) = zeta2_integral(ZetaSource::Analytic, &mut r)?;
    println!("integral of x P(X1 + X2 > x): pool {mc:.4} ± {se:.4}, quadrature {exact:.6}");

    let (g, gse) = greedy_root_weight(10_000, 3, &mut r)?;
    println!("greedy PWIT matching: root edge weight {g:.4} ± {gse:.4}");
    Ok(())
}
