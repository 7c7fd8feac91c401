//! PageRank on preferential attachment trees: in-degree tail exponent 2 + β,
//! PageRank tail exponent (2 + β)/(1 + (1 + β)c), estimated from a large tree
//! and from samples of the limiting root PageRank.
//!
//! cargo run --release --example pagerank_tails -- [n] [beta] [c] [seed]

use lwc::generators::{recursive_tree, AttachmentFn};
use lwc::pagerank::{
    exponent_targets, limit_root_pagerank_sample, pagerank_path_counts, tail_exponent, Digraph, TailOptions,
};
use lwc::rng;

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let beta: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let c: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let seed: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut r = rng::stream(seed, "pagerank", 0);
    let f = AttachmentFn::linear(beta);
    let targets = exponent_targets(beta, c);
    println!(
        "targets: degree {:.3}, pagerank {:.3}",
        targets.degree, targets.pagerank
    );

    let t = recursive_tree(n, &f, &mut r)?;
    let degrees: Vec<f64> = (0..n).map(|v| t.children(v).len() as f64).collect();
    let est = tail_exponent(&degrees, &TailOptions::default(), &mut r)?;
    println!(
        "in-degree Hill: {:.3} ± {:.3} at k >= {} (stable: {})",
        est.exponent, est.stderr, est.k_min, est.stable
    );
    let pr = pagerank_path_counts(&Digraph::from_tree(&t), c, 1e-15)?;
    let est = tail_exponent(&pr.normalized, &TailOptions::default(), &mut r)?;
    println!(
        "tree PageRank Hill: {:.3} ± {:.3} at r >= {:.3} (stable: {})",
        est.exponent, est.stderr, est.k_min, est.stable
    );

    let samples = (0..100_000)
        .map(|_| limit_root_pagerank_sample(&f, c, 10_000_000, &mut r))
        .collect::<lwc::Result<Vec<f64>>>()?;
    let est = tail_exponent(&samples, &TailOptions::default(), &mut r)?;
    println!(
        "limit PageRank Hill: {:.3} ± {:.3} at r >= {:.3} (stable: {})",
        est.exponent, est.stderr, est.k_min, est.stable
    );
    for (u, a) in &est.path {
        println!("  threshold {u:>8.3}: {a:.3}");
    }
    Ok(())
}
