//! Erdős–Rényi graphs look locally like a Poisson Galton–Watson tree: the
//! degree of a uniform vertex is Poisson(λ) and its radius-1 ball is a star.
//!
//! cargo run --release --example er_local_limit -- [n] [lambda] [seed]

use lwc::generators::{erdos_renyi, DegreePmf};
use lwc::graph::{empirical_neighborhoods, tree_code, tv_distance, EmpiricalMeasure, RootedTree, NO_PARENT};
use lwc::rng;

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let lambda: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let g = erdos_renyi(n, lambda, &mut rng::stream(seed, "er", 0))?;
    let poisson = DegreePmf::poisson(lambda, 60)?;

    let degrees = EmpiricalMeasure::from_counts(g.degrees()).normalized()?;
    println!("{:>3} {:>10} {:>10}", "k", "empirical", "poisson");
    for k in 0..8 {
        println!("{k:>3} {:>10.5} {:>10.5}", degrees.prob(&k), poisson.prob(k));
    }

    let mut deg_law = EmpiricalMeasure::new();
    let mut star_law = EmpiricalMeasure::new();
    for (k, &p) in poisson.probs().iter().enumerate() {
        deg_law.add(k, p);
        let mut parent = vec![NO_PARENT];
        parent.resize(k + 1, 0);
        star_law.add(tree_code(&RootedTree::from_growth(parent)), p);
    }
    println!("degree TV: {:.4}", tv_distance(&degrees, &deg_law)?);
    let balls = empirical_neighborhoods(&g, 1)?;
    println!("radius-1 neighbourhood TV: {:.4}", tv_distance(&balls, &star_law)?);
    let balls2 = empirical_neighborhoods(&g, 2)?;
    println!("distinct radius-2 neighbourhoods: {}", balls2.len());
    Ok(())
}
