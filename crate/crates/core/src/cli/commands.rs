//! Parameters and bodies of the experiment subcommands.

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Artifacts, Run};
use crate::assignment::{self, CostScaling, LogisticOptions, ZetaSource};
use crate::branching::{yule_sample, Stop};
use crate::error::{Error, Result};
use crate::fringe::{self, FringeLaw};
use crate::generators::{self, AttachmentFn, AttributeKernel, DegreePmf, StepPmf};
use crate::graph::{self, EmpiricalMeasure, Graph, MeasureKey, RealBin, RootedTree};
use crate::ising;
use crate::pagerank::{self, Digraph, TailOptions};
use crate::rng::{stream, StreamRng};
use crate::spectral::{self, RdeOptions};
use crate::stats;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| invalid(format!("missing parameter `{name}`")))
}

/// Degree law from either a regular degree or an explicit pmf.
fn degree_law(degree: Option<usize>, pmf: &Option<Vec<f64>>, lambda: Option<f64>) -> Result<DegreePmf> {
    match (degree, pmf, lambda) {
        (Some(k), None, None) => Ok(DegreePmf::delta(k)),
        (None, Some(p), None) => DegreePmf::new(p.clone()),
        (None, None, Some(l)) => DegreePmf::poisson(l, (l * 10.0 + 40.0) as usize),
        _ => Err(invalid("give exactly one of `degree`, `pmf` or `lambda`")),
    }
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut s = format!("{header}\n");
    for (x, v) in rows {
        s.push_str(&format!("{x},{v}\n"));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphModel {
    Er,
    Cm,
    Rrt,
    Pa,
    Attribute,
    Coevolving,
    Yule,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GenerateParams {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<GraphModel>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Mean degree of the Erdős–Rényi graph.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Common degree of a regular configuration model.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Degree pmf p_0, p_1, ... of a configuration model.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<f64>>,
    /// Preferential attachment parameter: f(k) = k + 1 + beta.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Geometric step law parameter of the co-evolving model.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_p: Option<f64>,
    /// Two-class attribute model: share of the first class.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_first: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub same: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Write the edge list here.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<std::path::PathBuf>,
}

fn sample_model(p: &GenerateParams, rng: &mut StreamRng) -> Result<(Graph, Option<RootedTree>)> {
    let model = p.model.ok_or_else(|| invalid("missing parameter `model`"))?;
    let n = need(p.n, "n")?;
    let tree = |t: RootedTree| -> Result<(Graph, Option<RootedTree>)> { Ok((t.to_graph().graph, Some(t))) };
    match model {
        GraphModel::Er => Ok((generators::erdos_renyi(n, need(p.lambda, "lambda")?, rng)?, None)),
        GraphModel::Cm => {
            let law = degree_law(p.degree, &p.pmf, None)?;
            Ok((generators::configuration_model_iid(&law, n, rng)?, None))
        }
        GraphModel::Rrt => tree(generators::recursive_tree(n, &AttachmentFn::uniform(), rng)?),
        GraphModel::Pa => tree(generators::recursive_tree(
            n,
            &AttachmentFn::linear(need(p.beta, "beta")?),
            rng,
        )?),
        GraphModel::Attribute => {
            let kernel = AttributeKernel::two_class(
                p.p_first.unwrap_or(0.35),
                p.same.unwrap_or(0.75),
                p.cross.unwrap_or(0.25),
                p.gamma.unwrap_or(1.0),
            )?;
            tree(generators::attribute_tree(n, &kernel, rng)?)
        }
        GraphModel::Coevolving => tree(generators::coevolving_tree(
            n,
            &StepPmf::Geometric {
                p: need(p.step_p, "step-p")?,
            },
            rng,
        )?),
        GraphModel::Yule => tree(yule_sample(Stop::Population(n), n.max(1), rng)?.tree),
    }
}

pub(super) fn generate(run: &Run<GenerateParams>) -> Result<Artifacts> {
    let p = &run.params;
    let mut rng = stream(run.seed, "generate", 0);
    let (g, tree) = sample_model(p, &mut rng)?;
    let degrees = EmpiricalMeasure::from_counts(g.degrees());
    let pmf = degrees.normalized()?;
    let mean_degree = 2.0 * g.num_edges() as f64 / g.n().max(1) as f64;
    let loops: usize = (0..g.n()).map(|v| g.loops(v)).sum();
    let mut result = json!({
        "vertices": g.n(),
        "edges": g.num_edges(),
        "loops": loops,
        "simple": g.is_simple(),
        "mean_degree": mean_degree,
        "degree_pmf": pmf.to_json(),
    });
    if let Some(t) = &tree {
        result["root_degree_fraction"] = json!(generators::root_degree_fraction(t));
        result["height"] = json!(t.height());
        if let Some(marks) = &t.marks {
            let classes = EmpiricalMeasure::from_counts(marks.iter().map(|&m| m as usize));
            result["attribute_counts"] = classes.to_json().into_value();
        }
    }
    let edges = if p.edges.is_some() || run.outputs.edges.is_some() {
        Some(graph::io::write_edge_list(&graph::RootedGraph::new(g.clone(), 0)?))
    } else {
        None
    };
    if let (Some(path), Some(text)) = (&p.edges, &edges) {
        std::fs::write(path, text)?;
    }
    Ok(Artifacts {
        summary: format!(
            "generate: {} vertices, {} edges, mean degree {mean_degree:.4}",
            g.n(),
            g.num_edges()
        ),
        result,
        csv: Some(csv_table("degree,probability", pmf.iter().map(|(&k, w)| (k as f64, w)))),
        edges,
        log: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeModel {
    Rrt,
    Pa,
    Coevolving,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FringeParams {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<TreeModel>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Number of ancestors in the fringe stack.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_p: Option<f64>,
    /// Largest fringe size listed in the size table.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_size: Option<usize>,
}

pub(super) fn fringe(run: &Run<FringeParams>) -> Result<Artifacts> {
    let p = &run.params;
    let model = p.model.ok_or_else(|| invalid("missing parameter `model`"))?;
    let n = need(p.n, "n")?;
    let k = p.k.unwrap_or(0);
    let max_size = p.max_size.unwrap_or(10);
    let mut rng = stream(run.seed, "fringe", 0);
    let t = match model {
        TreeModel::Rrt => generators::recursive_tree(n, &AttachmentFn::uniform(), &mut rng)?,
        TreeModel::Pa => generators::recursive_tree(n, &AttachmentFn::linear(need(p.beta, "beta")?), &mut rng)?,
        TreeModel::Coevolving => generators::coevolving_tree(
            n,
            &StepPmf::Geometric {
                p: need(p.step_p, "step-p")?,
            },
            &mut rng,
        )?,
    };
    let sizes = fringe::fringe_size_pmf(&t);
    let rows: Vec<Value> = (1..=max_size)
        .map(|s| {
            let oracle = (model == TreeModel::Rrt).then(|| 1.0 / (s * (s + 1)) as f64);
            json!({ "size": s, "empirical": sizes.prob(&s), "oracle": oracle })
        })
        .collect();
    let worst = (model == TreeModel::Rrt).then(|| {
        (1..=max_size)
            .map(|s| (sizes.prob(&s) - 1.0 / (s * (s + 1)) as f64).abs())
            .fold(0.0, f64::max)
    });
    let law = fringe::empirical_fringe(&t, k);
    let small: EmpiricalMeasure<String> = {
        let mut m = EmpiricalMeasure::new();
        for (key, w) in law.iter() {
            let size: usize = key.levels.iter().map(|c| c.tree_size().unwrap_or(usize::MAX)).sum();
            if size <= fringe::DEFAULT_SUPPORT_CAP {
                m.add(key.key_string(), w);
            }
        }
        m
    };
    let residual = if k == 0 {
        Some(fringe::stationarity_residual(&FringeLaw::of_tree(&t), 5)?)
    } else {
        None
    };
    let summary = match worst {
        Some(w) => format!("fringe: max |P(size = s) - 1/(s(s+1))| = {w:.5} over s <= {max_size}"),
        None => format!("fringe: P(size = 1) = {:.5}", sizes.prob(&1)),
    };
    Ok(Artifacts {
        summary,
        result: json!({
            "vertices": t.n(),
            "depth": k,
            "size_table": rows,
            "max_deviation": worst,
            "stationarity_residual": residual,
            "law": small.to_json().into_value(),
            "law_mass_listed": small.total(),
        }),
        csv: Some(csv_table(
            "size,probability",
            (1..=max_size).map(|s| (s as f64, sizes.prob(&s))),
        )),
        edges: None,
        log: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumModel {
    Cm,
    Er,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SpectrumParams {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<SpectrumModel>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Histogram bin width.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
}

pub(super) fn spectrum(run: &Run<SpectrumParams>) -> Result<Artifacts> {
    let p = &run.params;
    let model = p.model.ok_or_else(|| invalid("missing parameter `model`"))?;
    let n = need(p.n, "n")?;
    let width = p.bin_width.unwrap_or(0.1);
    if !(width > 0.0) {
        return Err(invalid("bin width must be positive"));
    }
    let mut rng = stream(run.seed, "spectrum", 0);
    let g = match model {
        SpectrumModel::Cm => generators::configuration_model(&vec![need(p.degree, "degree")?; n], &mut rng)?,
        SpectrumModel::Er => generators::erdos_renyi(n, need(p.lambda, "lambda")?, &mut rng)?,
    };
    let eigs = spectral::eigenvalues_symmetric(&g)?;
    let hist = spectral::histogram(&eigs, width);
    let ks = match (model, p.degree) {
        (SpectrumModel::Cm, Some(k)) if k >= 3 => Some(spectral::ks_to_cdf(&eigs, |x| {
            spectral::kesten_mckay_cdf(k, x).expect("k >= 3")
        })),
        _ => None,
    };
    let density: Vec<(f64, f64)> = hist.iter().map(|(b, w)| (b.mid(), w / width)).collect();
    let summary = match ks {
        Some(d) => format!("spectrum: {} eigenvalues, KS to Kesten-McKay = {d:.4}", eigs.len()),
        None => format!("spectrum: {} eigenvalues", eigs.len()),
    };
    Ok(Artifacts {
        summary,
        result: json!({
            "eigenvalues": eigs.len(),
            "ks_kesten_mckay": ks,
            "bin_width": width,
            "density": density.iter().map(|&(x, d)| json!({"x": x, "density": d})).collect::<Vec<_>>(),
        }),
        csv: Some(csv_table("x,density", density)),
        edges: None,
        log: vec![],
    })
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct IsingParams {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Graph sizes for exact finite-n free energies on configuration models.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_n: Option<Vec<usize>>,
}

pub(super) fn ising(run: &Run<IsingParams>) -> Result<Artifacts> {
    let p = &run.params;
    let law = degree_law(p.degree, &p.pmf, None)?;
    let beta = need(p.beta, "beta")?;
    let b = p.field.unwrap_or(0.0);
    let opts = ising::IsingRdeOptions {
        pool_size: p.pool.unwrap_or(100_000),
        ..Default::default()
    };
    let mut rng = stream(run.seed, "ising", 0);
    let pool = ising::ising_rde_solve(&law, beta, b, &opts, &mut rng)?;
    let samples = p.samples.unwrap_or(100_000);
    let (phi, se) = ising::free_energy_limit(&law, beta, b, &pool, samples, &mut rng)?;
    let (root_mag, root_mag_se) = ising::root_magnetization_limit(&law, beta, b, &pool, samples, &mut rng)?;
    let replicas = run.replicas.unwrap_or(50);
    let params = ising::IsingParams::uniform(beta, b);
    // per-vertex magnetization and Griffiths checks on the first exact graph
    let (magnetization, violations) = match p.exact_n.as_deref().and_then(|ns| ns.first()) {
        Some(&n) => {
            let g = generators::configuration_model_iid(&law, n, &mut stream(run.seed, "ising-exact", 0))?;
            let m = ising::exact_gibbs(&g, &params, &ising::Boundary::Free, &[])?.magnetization;
            let v = if n <= 15 {
                let grid = |x: f64| [0.5 * x, x, 1.5 * x];
                ising::griffiths_check(&g, &grid(beta), &grid(b))?
            } else {
                Vec::new()
            };
            (m, v)
        }
        None => (Vec::new(), Vec::new()),
    };
    let mut finite = Vec::new();
    for (i, &n) in p.exact_n.iter().flatten().enumerate() {
        let phis: Vec<f64> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let mut rr = stream(run.seed, "ising-exact", (i * replicas + r) as u64);
                let g = generators::configuration_model_iid(&law, n, &mut rr)?;
                Ok(ising::exact_gibbs(&g, &params, &ising::Boundary::Free, &[])?.phi)
            })
            .collect::<Result<_>>()?;
        let (m, s) = stats::mean_se(&phis);
        finite.push(json!({"n": n, "phi": m, "se": s, "gap": (m - phi).abs()}));
    }
    Ok(Artifacts {
        summary: format!("ising: phi = {phi:.6} ± {se:.6} after {} sweeps", pool.sweeps),
        result: json!({
            "phi": phi,
            "se": se,
            "sweeps": pool.sweeps,
            "pool_ks": pool.ks,
            "mean_field": stats::mean_se(&pool.lower).0,
            "root_magnetization": root_mag,
            "root_magnetization_se": root_mag_se,
            "magnetization": magnetization,
            "violations": violations,
            "finite": finite,
        }),
        csv: None,
        edges: None,
        log: pool
            .log
            .iter()
            .map(|(s, d)| format!("sweep {s} drift {d:.3e}"))
            .collect(),
    })
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AssignParams {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingArg {
    MeanN,
    MeanOne,
}

pub(super) fn assign(run: &Run<AssignParams>) -> Result<Artifacts> {
    let p = &run.params;
    let n = need(p.n, "n")?;
    let scaling = match p.scaling.unwrap_or(ScalingArg::MeanN) {
        ScalingArg::MeanN => CostScaling::MeanN,
        ScalingArg::MeanOne => CostScaling::MeanOne,
    };
    let mut rng = stream(run.seed, "assign", 0);
    let est = assignment::random_assignment_experiment(n, run.replicas.unwrap_or(100), scaling, &mut rng)?;
    Ok(Artifacts {
        summary: format!(
            "assign: mean A_n/n = {:.4} ± {:.4} (target {:.4})",
            est.mean, est.se, est.target
        ),
        result: json!({
            "mean": est.mean,
            "se": est.se,
            "ci": [est.ci.0, est.ci.1],
            "target": est.target,
        }),
        csv: None,
        edges: None,
        log: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PagerankModel {
    Rrt,
    Pa,
    /// Samples of the limiting root PageRank.
    Limit,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PagerankParams {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PagerankModel>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Damping factor.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
}

pub(super) fn pagerank(run: &Run<PagerankParams>) -> Result<Artifacts> {
    let p = &run.params;
    let model = p.model.ok_or_else(|| invalid("missing parameter `model`"))?;
    let c = need(p.c, "c")?;
    let beta = p.beta.unwrap_or(0.0);
    let f = match model {
        PagerankModel::Rrt => AttachmentFn::uniform(),
        _ => AttachmentFn::linear(beta),
    };
    let width = p.bin_width.unwrap_or(0.25);
    let mut rng = stream(run.seed, "pagerank", 0);
    let (scores, degrees) = match model {
        PagerankModel::Limit => {
            let m = need(p.samples, "samples")?;
            let master: u64 = rng.random();
            let xs = (0..m)
                .into_par_iter()
                .map(|i| {
                    let mut r = stream(master, "pagerank-limit", i as u64);
                    pagerank::limit_root_pagerank_sample(&f, c, 10_000_000, &mut r)
                })
                .collect::<Result<Vec<f64>>>()?;
            (xs, None)
        }
        PagerankModel::Rrt | PagerankModel::Pa => {
            let t = generators::recursive_tree(need(p.n, "n")?, &f, &mut rng)?;
            let s = pagerank::pagerank_path_counts(&Digraph::from_tree(&t), c, 1e-15)?;
            let d: Vec<f64> = (0..t.n()).map(|v| t.children(v).len() as f64).collect();
            (s.normalized, Some(d))
        }
    };
    let tail_opts = TailOptions::default();
    let pr_tail = pagerank::tail_exponent(&scores, &tail_opts, &mut rng).ok();
    let deg_tail = match &degrees {
        Some(d) => pagerank::tail_exponent(d, &tail_opts, &mut rng).ok(),
        None => None,
    };
    let targets = (model != PagerankModel::Rrt || beta == 0.0).then(|| pagerank::exponent_targets(beta, c));
    let hist = spectral::histogram(&scores, width);
    let (mean, se) = stats::mean_se(&scores);
    let summary = match &pr_tail {
        Some(t) => format!(
            "pagerank: mean {mean:.4}, tail exponent {:.3} ± {:.3}{}",
            t.exponent,
            t.stderr,
            if t.stable { "" } else { " (no stable threshold)" }
        ),
        None => format!("pagerank: mean {mean:.4} ± {se:.4}"),
    };
    Ok(Artifacts {
        summary,
        result: json!({
            "samples": scores.len(),
            "mean": mean,
            "se": se,
            "scores": hist.to_json().into_value(),
            "pagerank_tail": pr_tail,
            "degree_tail": deg_tail,
            "targets": targets,
        }),
        csv: Some(csv_table(
            "x,density",
            hist.iter().map(|(b, w): (&RealBin, f64)| (b.mid(), w / width)),
        )),
        edges: None,
        log: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RdeKind {
    Spectral,
    Ising,
    Logistic,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RdeParams {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<RdeKind>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool: Option<usize>,
    /// Spectral: real parts of the grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    /// Spectral: imaginary part of the grid.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<f64>,
    /// Sweep limit; for the logistic kind, the number of sweeps run
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
    /// Logistic: Poisson points kept in each minimum.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

pub(super) fn rde(run: &Run<RdeParams>) -> Result<Artifacts> {
    let p = &run.params;
    let kind = p.kind.ok_or_else(|| invalid("missing parameter `kind`"))?;
    let mut rng = stream(run.seed, "rde", 0);
    match kind {
        RdeKind::Spectral => {
            let law = degree_law(p.degree, &p.pmf, None)?;
            let y = p.y.unwrap_or(0.05);
            let xs =
                p.x.clone()
                    .unwrap_or_else(|| (0..=40).map(|i| -4.0 + 0.2 * i as f64).collect());
            let grid: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, y)).collect();
            let mut opts = RdeOptions {
                pool_size: p.pool.unwrap_or(20_000),
                samples: p.pool.unwrap_or(20_000),
                ..Default::default()
            };
            if let Some(t) = p.tol {
                opts.tol = t;
            }
            if let Some(s) = p.sweeps {
                opts.max_sweeps = s;
                opts.min_sweeps = opts.min_sweeps.min(s);
            }
            let points = spectral::spectral_rde_solve(&law, &grid, &opts, &mut rng)?;
            let rows: Vec<(f64, f64)> = points
                .iter()
                .map(|pt| (pt.z.re, spectral::stieltjes_invert(pt.s_inf)))
                .collect();
            let closed = match p.degree {
                Some(k) if k >= 3 => Some(
                    points
                        .iter()
                        .map(|pt| (pt.s_inf - spectral::kesten_mckay_stieltjes(k, pt.z)).norm())
                        .fold(0.0, f64::max),
                ),
                _ => None,
            };
            Ok(Artifacts {
                summary: format!(
                    "rde spectral: {} grid points, max sweeps {}",
                    points.len(),
                    points.iter().map(|p| p.sweeps).max().unwrap_or(0)
                ),
                result: json!({
                    "points": points.iter().map(|pt| json!({
                        "x": pt.z.re,
                        "y": pt.z.im,
                        "re": pt.s_inf.re,
                        "im": pt.s_inf.im,
                        "se": pt.s_inf_se,
                        "sweeps": pt.sweeps,
                        "density": spectral::stieltjes_invert(pt.s_inf),
                    })).collect::<Vec<_>>(),
                    "max_gap_closed_form": closed,
                }),
                csv: Some(csv_table("x,density", rows)),
                edges: None,
                log: vec![],
            })
        }
        RdeKind::Ising => {
            let law = degree_law(p.degree, &p.pmf, None)?;
            let opts = ising::IsingRdeOptions {
                pool_size: p.pool.unwrap_or(100_000),
                max_sweeps: p.sweeps.unwrap_or(1_000),
                tol: p.tol.unwrap_or(1e-6),
                ..Default::default()
            };
            let pool = ising::ising_rde_solve(&law, need(p.beta, "beta")?, p.field.unwrap_or(0.0), &opts, &mut rng)?;
            let s = stats::sorted(&pool.lower);
            let (m, se) = stats::mean_se(&s);
            let quantiles = [0.1, 0.5, 0.9].map(|q| stats::quantile_sorted(&s, q));
            Ok(Artifacts {
                summary: format!("rde ising: mean field {m:.6} ± {se:.6} after {} sweeps", pool.sweeps),
                result: json!({
                    "sweeps": pool.sweeps,
                    "mean": m,
                    "se": se,
                    "quantiles": quantiles,
                    "ks_between_starts": pool.ks,
                }),
                csv: None,
                edges: None,
                log: pool
                    .log
                    .iter()
                    .map(|(s, d)| format!("sweep {s} drift {d:.3e}"))
                    .collect(),
            })
        }
        RdeKind::Logistic => {
            let defaults = LogisticOptions::default();
            let opts = LogisticOptions {
                pool_size: p.pool.unwrap_or(defaults.pool_size),
                sweeps: p.sweeps.unwrap_or(defaults.sweeps),
                cutoff: p.cutoff.unwrap_or(defaults.cutoff),
                tol: p.tol.unwrap_or(defaults.tol),
                ..defaults
            };
            let pool = assignment::logistic_rde_solve(&opts, &mut rng)?;
            let ks = stats::ks_one_sample(&pool.values, assignment::logistic_cdf);
            let zeta = assignment::zeta2_integral(
                ZetaSource::Pool {
                    pool: &pool,
                    pairs: 1_000_000,
                },
                &mut rng,
            )?;
            Ok(Artifacts {
                summary: format!(
                    "rde logistic: KS to logistic {ks:.4}, integral {:.4} ± {:.4}",
                    zeta.0, zeta.1
                ),
                result: json!({
                    "ks_logistic": ks,
                    "median": stats::median(&pool.values),
                    "last_change": pool.last_change,
                    "cutoff_hits": pool.cutoff_hits,
                    "cutoff_margin": pool.cutoff_margin,
                    "zeta2": zeta.0,
                    "zeta2_se": zeta.1,
                    "target": assignment::ZETA2,
                }),
                csv: None,
                edges: None,
                log: vec![],
            })
        }
    }
}
