//! A rate-one Yule process stopped when it reaches k individuals has the same
//! genealogy law as the uniform random recursive tree on k vertices; general
//! attachment functions embed the same way into branching processes.
//!
//! cargo run --release --example yule_embedding -- [replicas] [seed]

use lwc::branching::{ctbp_sample, malthusian_rate, yule_sample, Stop, DEFAULT_CAP};
use lwc::generators::{recursive_tree, AttachmentFn};
use lwc::graph::{tree_code, tv_distance, EmpiricalMeasure};
use lwc::rng;

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let reps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut r = rng::stream(seed, "yule", 0);

    let mut yule = EmpiricalMeasure::new();
    let mut rrt = EmpiricalMeasure::new();
    for _ in 0..reps {
        yule.add(tree_code(&yule_sample(Stop::Population(5), 5, &mut r)?.tree), 1.0);
        rrt.add(tree_code(&recursive_tree(5, &AttachmentFn::uniform(), &mut r)?), 1.0);
    }
    println!("{:<16} {:>8} {:>8}", "shape", "yule", "rrt");
    for (code, w) in yule.normalized()?.iter() {
        println!("{:<16} {w:>8.4} {:>8.4}", code.as_str(), rrt.prob(code));
    }
    println!("TV over {reps} replicas: {:.4}", tv_distance(&yule, &rrt)?);

    // preferential attachment grows like e^{λt} with λ = 2 + β
    let f = AttachmentFn::linear(0.5);
    let lambda = malthusian_rate(&f)?.lambda;
    let t = 3.0;
    let mut total = 0.0;
    let runs = 2000;
    for _ in 0..runs {
        total += ctbp_sample(&f, Stop::Time(t), DEFAULT_CAP, &mut r)?.size() as f64;
    }
    println!(
        "f(k) = k + 1.5: Malthusian rate {lambda}, log(mean size)/t at t = {t}: {:.3}",
        (total / runs as f64).ln() / t
    );
    Ok(())
}
