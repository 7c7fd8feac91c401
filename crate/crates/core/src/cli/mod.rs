//! Command-line experiment driver. Every subcommand takes its parameters
//! from flags, from an optional JSON experiment file, or both (flags win),
//! and draws all randomness from named substreams of one master seed.

mod commands;
pub mod selftest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;

pub use commands::{
    AssignParams, FringeParams, GenerateParams, IsingParams, PagerankParams, RdeParams, SpectrumParams,
};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lwc", version, about = "Local weak convergence experiments on random graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a random graph or tree and summarize its degrees.
    Generate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: GenerateParams,
    },
    /// Fringe laws of growing trees.
    Fringe {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: FringeParams,
    },
    /// Empirical spectral distribution of a sparse random graph.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: SpectrumParams,
    },
    /// Limiting Ising free energy, optionally with exact finite-n values.
    Ising {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: IsingParams,
    },
    /// Random assignment problem with exponential costs.
    Assign {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: AssignParams,
    },
    /// PageRank on growing trees and its local limit.
    Pagerank {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: PagerankParams,
    },
    /// Population dynamics for a recursive distributional equation.
    Rde {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: RdeParams,
    },
    /// Fast end-to-end checks of the library.
    Selftest {
        /// Write the report as JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args, Default)]
pub struct Common {
    /// Master seed; required.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    /// JSON experiment file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the result JSON here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write the (x, value) table here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the run log here.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

/// Experiment file contents.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    #[serde(default)]
    pub subcommand: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub replicas: Option<usize>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub outputs: OutputPaths,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub log: Option<PathBuf>,
    /// Edge list written by `generate`.
    pub edges: Option<PathBuf>,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
pub struct Run<P> {
    pub seed: u64,
    pub replicas: Option<usize>,
    pub params: P,
    pub outputs: OutputPaths,
}

/// What a subcommand produces.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub summary: String,
    pub result: Value,
    pub csv: Option<String>,
    pub edges: Option<String>,
    pub log: Vec<String>,
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) | Error::NoSolution(_) => EXIT_NONCONVERGENCE,
            Error::Io(_) => EXIT_FAILURE,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn validation(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        message: msg.into(),
    }
}

fn load_experiment(path: &Path) -> Result<ExperimentFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| validation(format!("{}: {e}", path.display())))
}

/// Merge flags over the experiment file and check everything is known.
fn resolve<P: Serialize + DeserializeOwned>(name: &str, common: &Common, flags: &P) -> Result<Run<P>, Failure> {
    let file = match &common.config {
        Some(path) => load_experiment(path)?,
        None => ExperimentFile::default(),
    };
    if let Some(sub) = &file.subcommand {
        if sub != name {
            return Err(validation(format!("experiment file is for `{sub}`, not `{name}`")));
        }
    }
    let mut merged = file.params.clone();
    let Value::Object(overrides) = serde_json::to_value(flags).map_err(|e| validation(e.to_string()))? else {
        return Err(validation("parameters must form an object"));
    };
    merged.extend(overrides);
    let params: P = serde_json::from_value(Value::Object(merged)).map_err(|e| validation(format!("{name}: {e}")))?;
    let seed = common
        .seed
        .or(file.seed)
        .ok_or_else(|| validation(format!("{name}: a seed is required (--seed or \"seed\")")))?;
    let outputs = OutputPaths {
        json: common.json.clone().or(file.outputs.json),
        csv: common.csv.clone().or(file.outputs.csv),
        log: common.log.clone().or(file.outputs.log),
        edges: file.outputs.edges,
    };
    Ok(Run {
        seed,
        replicas: common.replicas.or(file.replicas),
        params,
        outputs,
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("{}: {e}", path.display()),
    })
}

fn execute<P: Serialize + DeserializeOwned>(
    name: &str,
    common: &Common,
    flags: &P,
    body: impl FnOnce(&Run<P>) -> crate::Result<Artifacts>,
) -> Result<String, Failure> {
    let run = resolve(name, common, flags)?;
    let art = body(&run)?;
    let doc = serde_json::json!({
        "command": name,
        "seed": run.seed,
        "replicas": run.replicas,
        "params": run.params,
        "result": art.result,
    });
    let json = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    let mut stdout = String::new();
    match &run.outputs.json {
        Some(p) => write(p, &json)?,
        None => stdout.push_str(&json),
    }
    if let (Some(p), Some(csv)) = (&run.outputs.csv, &art.csv) {
        write(p, csv)?;
    }
    if let (Some(p), Some(edges)) = (&run.outputs.edges, &art.edges) {
        write(p, edges)?;
    }
    if let Some(p) = &run.outputs.log {
        let mut text = format!("{name} seed={}\n", run.seed);
        text.push_str(&format!(
            "params {}\n",
            serde_json::to_string(&run.params).expect("serializable")
        ));
        for line in &art.log {
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(&art.summary);
        text.push('\n');
        write(p, &text)?;
    }
    eprintln!("{}", art.summary);
    Ok(stdout)
}

/// Run one command line and return `(exit code, standard output)`.
pub fn run_captured<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return (code, String::new());
        }
    };
    let out = match &cli.command {
        Command::Generate { common, params } => execute("generate", common, params, commands::generate),
        Command::Fringe { common, params } => execute("fringe", common, params, commands::fringe),
        Command::Spectrum { common, params } => execute("spectrum", common, params, commands::spectrum),
        Command::Ising { common, params } => execute("ising", common, params, commands::ising),
        Command::Assign { common, params } => execute("assign", common, params, commands::assign),
        Command::Pagerank { common, params } => execute("pagerank", common, params, commands::pagerank),
        Command::Rde { common, params } => execute("rde", common, params, commands::rde),
        Command::Selftest { json } => {
            let report = selftest::run_selftest();
            let mut text = String::new();
            for c in &report.checks {
                text.push_str(&format!(
                    "{} {} ({})\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            let json_text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
            let written = match json {
                Some(p) => write(p, &json_text),
                None => Ok(()),
            };
            return match written {
                Err(f) => {
                    eprintln!("error: {}", f.message);
                    (f.code, text)
                }
                Ok(()) => (if report.all_pass() { EXIT_OK } else { EXIT_FAILURE }, text),
            };
        }
    };
    match out {
        Ok(stdout) => (EXIT_OK, stdout),
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.code, String::new())
        }
    }
}

/// Run one command line, printing its output; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (code, out) = run_captured(args);
    print!("{out}");
    code
}

/// Cap the worker pool from `LWC_THREADS` if set.
pub fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("LWC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("LWC_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}
