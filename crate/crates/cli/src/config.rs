//! Config file schema and flag merging (flags > file > defaults), plus
//! construction of the configured problem and method.
//!
//! Schema (all keys optional; unknown keys are rejected):
//!
//! ```toml
//! seed = 7                 # also --seed
//! scale = "desk"           # "desk" | "paper"; also --scale
//!
//! [problem]
//! family = "benchmark"     # "benchmark" | "quadratic"
//! n = 8                    # quadratic family only
//! p = 2
//! range = 1.3
//! coupling = 0.4
//! omega = 0.3
//!
//! [method]
//! variant = "DPC-G"        # RG | RN | DPC-G | DAPC-G | DPC-N | DAPC-N
//! h = 0.1
//! k = 3
//! k_prime = 3
//! gamma = 0.05             # default: 1/(L+M) gradient, 1.0 Newton
//! n_c = 1
//! n_ec = 0
//! steps = 300
//! t0 = 0.0
//!
//! [sweep]
//! hs = [0.4, 0.2, 0.1, 0.05, 0.04]
//! horizon = 60.0
//! variants = ["RG", "DPC-G", "DPC-N"]
//! k = 8
//! k_prime = 8
//!
//! [budget]
//! t_bar = 0.1
//! r = 0.5
//! hs = [1.0, 0.2]
//!
//! [bounds]
//! tau = 0.9                # Newton contraction rate to test, in (1-gamma, 1)
//! ```

use crate::CliError;
use dpc_core::algorithms::{MethodConfig, Variant};
use dpc_core::bench::{paper_benchmark, BenchmarkScale};
use dpc_core::graph::NetworkGraph;
use dpc_core::objective::{
    estimate_constants, ConstantsBundle, ObjectiveOracle, SampleRegion, SyntheticQuadratic,
};
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const OUT_DIR_ENV: &str = "DPC_OUT_DIR";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub scale: Option<String>,
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub method: MethodSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub budget: BudgetSection,
    #[serde(default)]
    pub bounds: BoundsSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub family: Option<String>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub range: Option<f64>,
    pub coupling: Option<f64>,
    pub omega: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    pub variant: Option<String>,
    pub h: Option<f64>,
    pub k: Option<usize>,
    pub k_prime: Option<usize>,
    pub gamma: Option<f64>,
    pub n_c: Option<usize>,
    pub n_ec: Option<usize>,
    pub steps: Option<usize>,
    pub t0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub hs: Option<Vec<f64>>,
    pub horizon: Option<f64>,
    pub variants: Option<Vec<String>>,
    pub k: Option<usize>,
    pub k_prime: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub t_bar: Option<f64>,
    pub r: Option<f64>,
    pub hs: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub tau: Option<f64>,
}

/// Fully merged invocation settings.
pub struct Settings {
    pub seed: u64,
    pub scale: BenchmarkScale,
    pub out: PathBuf,
    pub jobs: usize,
    pub file: FileConfig,
}

impl Settings {
    pub fn load(
        config_path: Option<&Path>,
        out: Option<PathBuf>,
        seed: Option<u64>,
        scale: Option<&str>,
        jobs: Option<usize>,
    ) -> Result<Self, CliError> {
        let file = match config_path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                parse_file(&text)?
            }
            None => FileConfig::default(),
        };
        let seed = seed.or(file.seed).unwrap_or(7);
        let scale = parse_scale(scale.or(file.scale.as_deref()).unwrap_or("desk"))?;
        let out = out
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        let jobs = jobs.unwrap_or(1);
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        Ok(Self { seed, scale, out, jobs, file })
    }
}

pub fn parse_file(text: &str) -> Result<FileConfig, CliError> {
    toml::from_str(text).map_err(|e| {
        let msg = e.to_string().trim().replace('\n', "; ");
        CliError::Config(format!("config file: {msg}"))
    })
}

fn parse_scale(s: &str) -> Result<BenchmarkScale, CliError> {
    match s {
        "desk" => Ok(BenchmarkScale::Desk),
        "paper" => Ok(BenchmarkScale::Paper),
        other => Err(CliError::Config(format!(
            "scale must be \"desk\" or \"paper\", got {other:?}"
        ))),
    }
}

/// The configured objective with its graph and regularity constants.
pub struct Problem {
    pub family: String,
    pub graph: NetworkGraph,
    pub oracle: Box<dyn ObjectiveOracle>,
    pub constants: ConstantsBundle,
}

pub fn build_problem(settings: &Settings) -> Result<Problem, CliError> {
    let section = &settings.file.problem;
    let family = section.family.as_deref().unwrap_or("benchmark");
    match family {
        "benchmark" => {
            let bench = paper_benchmark(settings.seed, settings.scale)?;
            Ok(Problem {
                family: family.to_string(),
                graph: bench.graph,
                oracle: Box::new(bench.oracle),
                constants: bench.constants,
            })
        }
        "quadratic" => {
            let n = section.n.unwrap_or(8);
            let p = section.p.unwrap_or(2);
            let range = section.range.unwrap_or(1.3);
            let coupling = section.coupling.unwrap_or(0.4);
            let omega = section.omega.unwrap_or(0.3);
            let graph = NetworkGraph::random_geometric(n, p, range, settings.seed)?;
            let oracle = SyntheticQuadratic::random(graph.clone(), settings.seed, coupling, omega);
            let constants = estimate_constants(
                &oracle,
                &graph,
                SampleRegion::default(),
                80,
                settings.seed,
            )?;
            Ok(Problem {
                family: family.to_string(),
                graph,
                oracle: Box::new(oracle),
                constants,
            })
        }
        other => Err(CliError::Config(format!(
            "problem.family must be \"benchmark\" or \"quadratic\", got {other:?}"
        ))),
    }
}

/// Safe default step size: 1/(L+M) for gradient corrections, 1 for Newton.
pub fn default_gamma(variant: Variant, constants: &ConstantsBundle) -> f64 {
    if variant.newton_correction() {
        1.0
    } else {
        1.0 / (constants.big_l + constants.big_m)
    }
}

pub fn method_config(
    settings: &Settings,
    constants: &ConstantsBundle,
) -> Result<MethodConfig, CliError> {
    let section = &settings.file.method;
    let variant: Variant = section.variant.as_deref().unwrap_or("DPC-G").parse()?;
    let h = section.h.unwrap_or(0.1);
    let k = section.k.unwrap_or(3);
    let k_prime = section.k_prime.unwrap_or(3);
    let gamma = section.gamma.unwrap_or_else(|| default_gamma(variant, constants));
    let mut config = MethodConfig::new(variant, h, k, k_prime, gamma);
    if let Some(n_c) = section.n_c {
        config.n_c = n_c;
    }
    if let Some(n_ec) = section.n_ec {
        config.n_ec = n_ec;
    }
    config.validate()?;
    Ok(config)
}

pub fn steps_and_t0(settings: &Settings) -> (usize, f64) {
    (settings.file.method.steps.unwrap_or(300), settings.file.method.t0.unwrap_or(0.0))
}
