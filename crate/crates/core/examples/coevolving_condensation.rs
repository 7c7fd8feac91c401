//! Co-evolving trees: a newcomer starts at a uniform vertex, walks a
//! geometric number of steps toward the root and attaches there. With mean
//! step above one the root keeps a positive fraction of all vertices.
//!
//! cargo run --release --example coevolving_condensation -- [replicas] [seed]

use lwc::generators::{coevolving_tree, root_degree_fraction, StepPmf};
use lwc::{rng, stats};

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let reps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut r = rng::stream(seed, "coevolving", 0);

    for p in [0.65, 0.35] {
        let step = StepPmf::Geometric { p };
        println!("Geometric({p}), mean step {:.3}", step.mean());
        for n in [10_000, 20_000, 40_000, 160_000] {
            let fr = (0..reps)
                .map(|_| Ok(root_degree_fraction(&coevolving_tree(n, &step, &mut r)?)))
                .collect::<lwc::Result<Vec<f64>>>()?;
            let (m, se) = stats::mean_se(&fr);
            println!("  n = {n:>6}: root degree / n = {m:.4} ± {se:.4}");
        }
    }
    Ok(())
}
