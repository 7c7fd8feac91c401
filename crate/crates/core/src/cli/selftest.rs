//! Fast end-to-end checks, including one that must detect a deliberately
//! wrong Kesten–McKay density.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::assignment::{self, CostMatrix, ZetaSource};
use crate::branching::{yule_sample, Stop};
use crate::fringe::{self, FringeLaw};
use crate::generators::{self, AttachmentFn, DegreePmf, StepPmf};
use crate::graph::{self, tree_code, tv_distance, EmpiricalMeasure, Graph, RootedTree, NO_PARENT};
use crate::ising::{self, Boundary, IsingParams};
use crate::pagerank::{self, Digraph};
use crate::rng::{stream, StreamRng};
use crate::spectral;

const SEED: u64 = 20_241_017;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(name: &str, f: impl FnOnce() -> crate::Result<(bool, String)>) -> Check {
    let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check {
        name: name.into(),
        pass,
        detail,
    }
}

pub fn run_selftest() -> Report {
    let checks = vec![
        check("er-local-limit", er_local_limit),
        check("rrt-fringe", rrt_fringe),
        check("yule-embedding", yule_embedding),
        check("kesten-mckay", || {
            let ks = kesten_mckay_ks(|x| spectral::kesten_mckay_density(4, x).unwrap_or(0.0))?;
            Ok((ks <= 0.05, format!("KS {ks:.4} at n = 1500")))
        }),
        check("kesten-mckay-mutation", || {
            // a density with the wrong normalizing constant must be rejected
            let ks = kesten_mckay_ks(|x| 1.25 * spectral::kesten_mckay_density(4, x).unwrap_or(0.0))?;
            Ok((ks > 0.05, format!("tampered KS {ks:.4} flagged")))
        }),
        check("resolvent", resolvent),
        check("ising-exact", ising_exact),
        check("assignment", assignment_checks),
        check("pagerank", pagerank_checks),
        check("coevolving-regimes", coevolving),
        check("reproducibility", reproducibility),
    ];
    Report { checks }
}

fn star_code(k: usize) -> graph::CanonicalCode {
    let mut parent = vec![NO_PARENT];
    parent.extend(std::iter::repeat(0).take(k));
    tree_code(&RootedTree::from_growth(parent))
}

fn er_local_limit() -> crate::Result<(bool, String)> {
    let mut rng = stream(SEED, "er", 0);
    let lambda = 2.0;
    let g = generators::erdos_renyi(100_000, lambda, &mut rng)?;
    let poisson = DegreePmf::poisson(lambda, 40)?;
    let mut target = EmpiricalMeasure::new();
    let mut stars = EmpiricalMeasure::new();
    for (k, &p) in poisson.probs().iter().enumerate() {
        target.add(k, p);
        stars.add(star_code(k), p);
    }
    let degrees = EmpiricalMeasure::from_counts(g.degrees());
    let tv_deg = tv_distance(&degrees, &target)?;
    let balls = graph::empirical_neighborhoods(&g, 1)?;
    let tv_ball = tv_distance(&balls, &stars)?;
    Ok((
        tv_deg <= 0.01 && tv_ball <= 0.02,
        format!("degree TV {tv_deg:.4}, radius-1 TV {tv_ball:.4}"),
    ))
}

fn rrt_fringe() -> crate::Result<(bool, String)> {
    let mut rng = stream(SEED, "rrt", 0);
    let t = generators::recursive_tree(200_000, &AttachmentFn::uniform(), &mut rng)?;
    let sizes = fringe::fringe_size_pmf(&t);
    let worst = (1..=5usize)
        .map(|k| (sizes.prob(&k) - 1.0 / (k * (k + 1)) as f64).abs())
        .fold(0.0, f64::max);
    let residual = fringe::stationarity_residual(&FringeLaw::of_tree(&t), 5)?;
    Ok((
        worst <= 0.01 && residual <= 0.05,
        format!("size deviation {worst:.4}, stationarity residual {residual:.4}"),
    ))
}

fn yule_embedding() -> crate::Result<(bool, String)> {
    let mut rng = stream(SEED, "yule", 0);
    let reps = 100_000;
    let mut yule = EmpiricalMeasure::new();
    let mut rrt = EmpiricalMeasure::new();
    for _ in 0..reps {
        yule.add(tree_code(&yule_sample(Stop::Population(5), 5, &mut rng)?.tree), 1.0);
        rrt.add(
            tree_code(&generators::recursive_tree(5, &AttachmentFn::uniform(), &mut rng)?),
            1.0,
        );
    }
    let tv = tv_distance(&yule, &rrt)?;
    Ok((tv <= 0.02, format!("TV {tv:.4} over {reps} replicas")))
}

fn kesten_mckay_ks(density: impl Fn(f64) -> f64 + Copy) -> crate::Result<f64> {
    let mut rng = stream(SEED, "km", 0);
    let g = generators::configuration_model(&[4; 1500], &mut rng)?;
    let eigs = spectral::eigenvalues_symmetric(&g)?;
    let r = 2.0 * 3f64.sqrt();
    Ok(spectral::ks_to_cdf(&eigs, |x| spectral::edge_cdf(density, r, x)))
}

fn random_tree(n: usize, rng: &mut StreamRng) -> RootedTree {
    let mut parent = vec![NO_PARENT];
    for v in 1..n {
        parent.push(rng.random_range(0..v));
    }
    RootedTree::from_growth(parent)
}

/// Inverse of a dense complex matrix by Gauss–Jordan elimination.
fn invert(mut a: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .expect("non-empty");
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in 0..n {
                    let (x, y) = (a[col][j], inv[col][j]);
                    a[i][j] -= f * x;
                    inv[i][j] -= f * y;
                }
            }
        }
    }
    inv
}

fn resolvent() -> crate::Result<(bool, String)> {
    let mut rng = stream(SEED, "resolvent", 0);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(1..=30);
        let t = random_tree(n, &mut rng);
        let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(0.05..1.0));
        let r = spectral::resolvent_tree(&t, z)?;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (v, row) in m.iter_mut().enumerate() {
            row[v] = -z;
        }
        for (c, p) in t.edges_to_parent() {
            m[c][p] += 1.0;
            m[p][c] += 1.0;
        }
        let g = invert(m);
        for v in 0..n {
            worst = worst.max((g[v][v] - r.full[v]).norm());
        }
    }
    Ok((worst <= 1e-8, format!("max error {worst:.2e} on 20 trees")))
}

fn ising_exact() -> crate::Result<(bool, String)> {
    let mut rng = stream(SEED, "ising", 0);
    let mut worst: f64 = 0.0;
    let mut prune: f64 = 0.0;
    for _ in 0..30 {
        let n = rng.random_range(1..=12);
        let t = random_tree(n, &mut rng);
        let params = IsingParams::uniform(rng.random_range(0.0..1.5), rng.random_range(0.0..1.0));
        let exact = ising::exact_gibbs(&t.to_graph().graph, &params, &Boundary::Free, &[])?;
        let rec = ising::tree_local_fields(&t, &params)?.magnetization();
        for (a, b) in rec.iter().zip(&exact.magnetization) {
            worst = worst.max((a - b).abs());
        }
        prune = prune.max(ising::pruning_check(&t, &params)?);
    }
    let wheel = Graph::from_edges(
        6,
        &[
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (5, 1),
        ],
    )?;
    let violations = ising::griffiths_check(&wheel, &[0.0, 0.2, 0.5, 1.0], &[0.0, 0.1, 0.5])?.len();
    let b: f64 = 0.7;
    let p = DegreePmf::delta(3);
    let pool = ising::ising_rde_solve(&p, 0.0, b, &Default::default(), &mut rng)?;
    let (phi, _) = ising::free_energy_limit(&p, 0.0, b, &pool, 1000, &mut rng)?;
    let phi_gap = (phi - (2.0 * b.cosh()).ln()).abs();
    Ok((
        worst <= 1e-10 && prune <= 1e-10 && violations == 0 && phi_gap <= 1e-12,
        format!(
            "recursion {worst:.1e}, pruning {prune:.1e}, Griffiths violations {violations}, free field {phi_gap:.1e}"
        ),
    ))
}

fn brute_force(m: &CostMatrix) -> f64 {
    fn go(m: &CostMatrix, row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        if row == m.n() {
            *best = best.min(acc);
            return;
        }
        for j in 0..m.n() {
            if !used[j] {
                used[j] = true;
                go(m, row + 1, used, acc + m.get(row, j), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(m, 0, &mut vec![false; m.n()], 0.0, &mut best);
    best
}

fn assignment_checks() -> crate::Result<(bool, String)> {
    let mut rng = stream(SEED, "assign", 0);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let m = CostMatrix::exponential(6, 1.0, &mut rng)?;
        worst = worst.max((assignment::optimal_assignment(&m).total_cost - brute_force(&m)).abs());
    }
    let (zeta, _) = assignment::zeta2_integral(ZetaSource::Analytic, &mut rng)?;
    let (greedy, _) = assignment::greedy_root_weight(10_000, 2, &mut rng)?;
    Ok((
        worst <= 1e-9 && (zeta - assignment::ZETA2).abs() <= 1e-4 && (greedy - 1.0).abs() <= 0.03,
        format!("brute force gap {worst:.1e}, analytic integral {zeta:.6}, greedy root weight {greedy:.4}"),
    ))
}

fn pagerank_checks() -> crate::Result<(bool, String)> {
    let mut rng = stream(SEED, "pagerank", 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=300);
        let g = Digraph::from_tree(&random_tree(n, &mut rng));
        let c = rng.random_range(0.05..0.95);
        let a = pagerank::pagerank_linear(&g, c)?;
        let b = pagerank::pagerank_path_counts(&g, c, 1e-15)?;
        for (x, y) in a.normalized.iter().zip(&b.normalized) {
            worst = worst.max((x - y).abs());
        }
    }
    let mut identity: f64 = 0.0;
    for beta in [0.1, 0.5, 1.0, 2.0] {
        for c in [0.1, 0.5, 0.85] {
            let t = pagerank::exponent_targets(beta, c);
            identity = identity.max((t.pagerank - t.lambda / t.lambda_thinned).abs());
        }
    }
    Ok((
        worst <= 1e-10 && identity <= 1e-12,
        format!("path counts vs linear {worst:.1e}, exponent identity {identity:.1e}"),
    ))
}

fn coevolving() -> crate::Result<(bool, String)> {
    let mut rng = stream(SEED, "coevolving", 0);
    let mut frac = |p: f64, n: usize| -> crate::Result<f64> {
        let mut s = 0.0;
        for _ in 0..20 {
            s +=
                generators::root_degree_fraction(&generators::coevolving_tree(n, &StepPmf::Geometric { p }, &mut rng)?);
        }
        Ok(s / 20.0)
    };
    let local = [frac(0.65, 10_000)?, frac(0.65, 40_000)?];
    let condensed = [frac(0.35, 10_000)?, frac(0.35, 40_000)?];
    Ok((
        local[1] < local[0] && condensed.iter().all(|&f| f >= 0.02),
        format!(
            "Geom(.65) fraction {:.4} -> {:.4}, Geom(.35) fraction {:.4} -> {:.4}",
            local[0], local[1], condensed[0], condensed[1]
        ),
    ))
}

fn reproducibility() -> crate::Result<(bool, String)> {
    let args = ["lwc", "assign", "--n", "20", "--replicas", "8", "--seed", "5"];
    let a = super::run_captured(args);
    let b = super::run_captured(args);
    let (missing, _) = super::run_captured(["lwc", "assign", "--n", "20"]);
    Ok((
        a.0 == 0 && a == b && missing == super::EXIT_VALIDATION,
        format!("identical reruns: {}, missing seed exits {missing}", a == b),
    ))
}
