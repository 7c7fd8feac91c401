//! Fringe of the uniform random recursive tree: the subtree below a uniform
//! vertex has size k with limiting probability 1/(k(k+1)), and the fringe
//! law is a fixed point of the subtree-count matrix.
//!
//! cargo run --release --example rrt_fringe -- [n] [seed]

use lwc::fringe::{empirical_fringe, fringe_size_pmf, stationarity_residual, ExtendedFringeSampler, FringeLaw};
use lwc::generators::{recursive_tree, AttachmentFn};
use lwc::graph::MeasureKey;
use lwc::rng;

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut r = rng::stream(seed, "rrt", 0);

    let t = recursive_tree(n, &AttachmentFn::uniform(), &mut r)?;
    let sizes = fringe_size_pmf(&t);
    println!("{:>3} {:>10} {:>10}", "k", "empirical", "1/(k(k+1))");
    for k in 1..=8usize {
        println!("{k:>3} {:>10.5} {:>10.5}", sizes.prob(&k), 1.0 / (k * (k + 1)) as f64);
    }

    let law = FringeLaw::of_tree(&t);
    println!(
        "stationarity residual (trees up to 5 vertices): {:.2e}",
        stationarity_residual(&law, 5)?
    );

    println!("most common depth-1 fringe stacks:");
    let stacks = empirical_fringe(&t, 1);
    let mut top: Vec<_> = stacks.iter().collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (key, w) in top.into_iter().take(5) {
        println!("  {:<24} {w:.4}", key.key_string());
    }

    let mut sampler = ExtendedFringeSampler::new(&law, 2)?;
    let stack = sampler.sample(&mut r)?;
    println!("one extended-fringe draw of depth 2: {}", stack.key().key_string());
    Ok(())
}
