//! Ising model on random regular graphs: the local-field fixed point, the
//! limiting free energy, and exact free energies of small graphs.
//!
//! cargo run --release --example ising_free_energy -- [beta] [field] [seed]

use lwc::generators::{configuration_model_iid, DegreePmf};
use lwc::ising::{exact_gibbs, free_energy_limit, ising_rde_solve, Boundary, IsingParams, IsingRdeOptions};
use lwc::{rng, stats};

fn main() -> lwc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let beta: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let b: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut r = rng::stream(seed, "ising", 0);

    let p = DegreePmf::delta(3);
    let pool = ising_rde_solve(&p, beta, b, &IsingRdeOptions::default(), &mut r)?;
    let (phi, se) = free_energy_limit(&p, beta, b, &pool, 100_000, &mut r)?;
    println!("3-regular, beta = {beta}, B = {b}");
    println!(
        "cavity field {:.6} after {} sweeps",
        stats::mean_se(pool.pool()).0,
        pool.sweeps
    );
    println!("limit free energy {phi:.6} ± {se:.1e}");

    let params = IsingParams::uniform(beta, b);
    for n in [10, 13, 16] {
        let phis = (0..100)
            .map(|_| {
                let g = configuration_model_iid(&p, n, &mut r)?;
                Ok(exact_gibbs(&g, &params, &Boundary::Free, &[])?.phi)
            })
            .collect::<lwc::Result<Vec<f64>>>()?;
        let (m, s) = stats::mean_se(&phis);
        println!("n = {n:>2}: mean phi_n {m:.5} ± {s:.5}, gap {:.5}", (m - phi).abs());
    }
    Ok(())
}
