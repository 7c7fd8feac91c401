//! Spectrum of a random 4-regular graph against the Kesten–McKay law, plus
//! the resolvent fixed point of the 4-regular tree.
//!
//! cargo run --release --example kesten_mckay -- [n] [seed]

use std::time::Instant;

use lwc::generators::configuration_model;
use lwc::rng;
use lwc::spectral::{eigenvalues_symmetric, kesten_mckay_cdf, kesten_mckay_density, ks_to_cdf};

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(6000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let k = 4;

    let mut r = rng::stream(seed, "cm", 0);
    let g = configuration_model(&vec![k; n], &mut r)?;
    let start = Instant::now();
    let eigs = eigenvalues_symmetric(&g)?;
    println!("n = {n}: {} eigenvalues in {:.1?}", eigs.len(), start.elapsed());

    let ks = ks_to_cdf(&eigs, |x| kesten_mckay_cdf(k, x).unwrap());
    println!("KS distance to Kesten–McKay(k = {k}): {ks:.4}");

    println!("{:>6} {:>10} {:>10}", "x", "empirical", "density");
    let width = 0.5;
    let r = 2.0 * ((k - 1) as f64).sqrt();
    let mut x = -r;
    while x < r {
        let count = eigs.iter().filter(|&&l| l >= x && l < x + width).count();
        let emp = count as f64 / (n as f64 * width);
        let mid = x + width / 2.0;
        println!("{mid:>6.2} {emp:>10.4} {:>10.4}", kesten_mckay_density(k, mid)?);
        x += width;
    }
    Ok(())
}
