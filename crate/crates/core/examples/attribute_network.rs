//! Attributed preferential attachment: two classes with a preference for
//! attaching within the class. Reports class sizes and degree tails per class.
//!
//! cargo run --release --example attribute_network -- [n] [seed]

use lwc::generators::{attribute_tree, AttributeKernel};
use lwc::rng;

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(30_000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let kernel = AttributeKernel::two_class(0.35, 0.75, 0.25, 1.0)?;
    let t = attribute_tree(n, &kernel, &mut rng::stream(seed, "attribute", 0))?;
    let marks = t.marks.as_ref().expect("attribute tree carries marks");

    let mut same = 0usize;
    for v in 1..n {
        let p = t.parent(v).expect("non-root");
        same += usize::from(marks[v] == marks[p]);
    }
    println!("edges within a class: {:.3}", same as f64 / (n - 1) as f64);
    for class in 0..2u32 {
        let degs: Vec<usize> = (0..n)
            .filter(|&v| marks[v] == class)
            .map(|v| t.children(v).len() + usize::from(v != 0))
            .collect();
        let mean = degs.iter().sum::<usize>() as f64 / degs.len() as f64;
        let max = degs.iter().copied().max().unwrap_or(0);
        println!(
            "class {class}: {} vertices, mean degree {mean:.3}, max degree {max}",
            degs.len()
        );
        for k in [1, 2, 4, 8, 16, 32] {
            let frac = degs.iter().filter(|&&d| d >= k).count() as f64 / degs.len() as f64;
            println!("  P(deg >= {k:>2}) = {frac:.5}");
        }
    }
    Ok(())
}
