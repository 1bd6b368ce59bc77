//! Assembling a run plan from defaults, an optional JSON config file, and
//! command-line flags — in that precedence order, flags winning.

use crate::args::CommonArgs;
use crate::CliError;
use dqaoa_core::decompose::Strategy;
use dqaoa_core::qubo::{generate_dense_qubo, generate_maxcut, load_problem, QuboProblem};
use dqaoa_orchestrator::{DqaoaConfig, Transport};
use serde::Deserialize;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Dense,
    MaxCut,
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(ProblemKind::Dense),
            "maxcut" | "max-cut" => Ok(ProblemKind::MaxCut),
            other => Err(format!("unknown problem kind {other:?} (expected dense or maxcut)")),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Dense => "dense",
            ProblemKind::MaxCut => "maxcut",
        })
    }
}

/// Where the instance comes from: a file on disk, or a generator spec of
/// the form `dense:N[:seed]` / `maxcut:N[:seed]`.
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    File(PathBuf),
    Generated { kind: ProblemKind, n: usize, seed: u64 },
}

impl ProblemSource {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        if let Ok(kind) = head.parse::<ProblemKind>() {
            let n_part = parts
                .next()
                .ok_or_else(|| CliError::config(format!("generator spec {s:?} is missing :N")))?;
            let n: usize = n_part
                .parse()
                .map_err(|_| CliError::config(format!("bad size {n_part:?} in {s:?}")))?;
            let seed = match parts.next() {
                None => 0,
                Some(p) => p
                    .parse()
                    .map_err(|_| CliError::config(format!("bad seed {p:?} in {s:?}")))?,
            };
            if parts.next().is_some() {
                return Err(CliError::config(format!("trailing fields in {s:?}")));
            }
            Ok(ProblemSource::Generated { kind, n, seed })
        } else {
            Ok(ProblemSource::File(PathBuf::from(s)))
        }
    }

    /// Materialize the QUBO. The generator seed is part of the source
    /// string itself, so the instance is identical across trials regardless
    /// of the solver seed.
    pub fn load(&self) -> Result<QuboProblem, CliError> {
        match self {
            ProblemSource::File(path) => Ok(load_problem(path)
                .map_err(|e| CliError::config(e.to_string()))?
                .into_qubo()),
            ProblemSource::Generated { kind, n, seed } => {
                generate_instance(*kind, *n, *seed).map_err(CliError::config)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ProblemSource::File(path) => path.display().to_string(),
            ProblemSource::Generated { kind, n, seed } => format!("{kind}:{n}:{seed}"),
        }
    }
}

pub fn generate_instance(kind: ProblemKind, n: usize, seed: u64) -> Result<QuboProblem, String> {
    match kind {
        ProblemKind::Dense => generate_dense_qubo(n, seed).map_err(|e| e.to_string()),
        ProblemKind::MaxCut => Ok(generate_maxcut(n, seed)
            .map_err(|e| e.to_string())?
            .to_qubo()),
    }
}

/// Optional lists for the sweep command's Cartesian product. Any list left
/// empty falls back to the corresponding scalar setting.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepLists {
    #[serde(default)]
    pub sub_size: Vec<usize>,
    #[serde(default)]
    pub num_sub: Vec<usize>,
    #[serde(default)]
    pub workers: Vec<usize>,
    #[serde(default)]
    pub strategy: Vec<Strategy>,
}

impl SweepLists {
    pub fn is_empty(&self) -> bool {
        self.sub_size.is_empty()
            && self.num_sub.is_empty()
            && self.workers.is_empty()
            && self.strategy.is_empty()
    }
}

/// The config-file mirror of the command-line flags (same keys, snake
/// case). Unknown keys are rejected so typos fail loudly.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub problem: Option<String>,
    pub strategy: Option<Strategy>,
    pub sub_size: Option<usize>,
    pub num_sub: Option<usize>,
    pub stride: Option<usize>,
    pub edge_threshold: Option<f64>,
    pub workers: Option<usize>,
    pub transport: Option<Transport>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub reference: Option<f64>,
    pub max_cycles: Option<usize>,
    pub ar_tol: Option<f64>,
    pub ar_window: Option<usize>,
    pub shots: Option<usize>,
    pub budget: Option<usize>,
    pub layers: Option<usize>,
    pub energy_offset: Option<f64>,
    pub out: Option<PathBuf>,
    pub sweep: Option<SweepLists>,
    pub sizes: Option<Vec<usize>>,
    pub kind: Option<String>,
}

impl FileSpec {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))
    }
}

/// Everything a command needs after merging defaults, file, and flags.
#[derive(Clone, Debug)]
pub struct RunPlan {
    pub problem: Option<ProblemSource>,
    pub dqaoa: DqaoaConfig,
    pub trials: usize,
    pub seed: u64,
    pub reference: Option<f64>,
    pub workers: usize,
    pub transport: Transport,
    pub out: Option<PathBuf>,
    pub sweep: SweepLists,
    pub sizes: Vec<usize>,
    pub kind: ProblemKind,
    /// Whether a sub-problem size was stated explicitly (flag or file).
    shape_given: bool,
}

impl RunPlan {
    /// Merge precedence: built-in defaults < config file < flags.
    pub fn assemble(common: &CommonArgs, default_strategy: Strategy) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(path) => FileSpec::read(path)?,
            None => FileSpec::default(),
        };

        let mut dqaoa = DqaoaConfig::default();
        dqaoa.decomposition.strategy = common
            .strategy
            .or(file.strategy)
            .unwrap_or(default_strategy);
        let shape_given = common.sub_size.or(file.sub_size).is_some();
        if let Some(k) = common.sub_size.or(file.sub_size) {
            dqaoa.decomposition.sub_size = k;
        }
        if let Some(m) = common.num_sub.or(file.num_sub) {
            dqaoa.decomposition.num_sub = m;
        }
        if let Some(s) = common.stride.or(file.stride) {
            dqaoa.decomposition.stride = s;
        }
        if let Some(t) = common.edge_threshold.or(file.edge_threshold) {
            dqaoa.decomposition.edge_threshold = Some(t);
        }
        if let Some(c) = common.max_cycles.or(file.max_cycles) {
            dqaoa.max_cycles = c;
        }
        if let Some(t) = common.ar_tol.or(file.ar_tol) {
            dqaoa.ar_tolerance = t;
        }
        if let Some(w) = common.ar_window.or(file.ar_window) {
            dqaoa.ar_window = w;
        }
        if let Some(s) = common.shots.or(file.shots) {
            dqaoa.qaoa.shots = s;
        }
        if let Some(b) = common.budget.or(file.budget) {
            dqaoa.qaoa.max_evals = b;
        }
        if let Some(l) = common.layers.or(file.layers) {
            dqaoa.qaoa.layers = l;
        }
        if let Some(o) = file.energy_offset {
            dqaoa.energy_offset = o;
        }

        let problem = match common.problem.clone().or(file.problem) {
            Some(s) => Some(ProblemSource::parse(&s)?),
            None => None,
        };
        let trials = common.trials.or(file.trials).unwrap_or(10);
        if trials == 0 {
            return Err(CliError::config("trials must be at least 1"));
        }
        let kind = match &file.kind {
            Some(s) => s.parse::<ProblemKind>().map_err(CliError::config)?,
            None => ProblemKind::Dense,
        };

        Ok(RunPlan {
            problem,
            dqaoa,
            trials,
            seed: common.seed.or(file.seed).unwrap_or(0),
            reference: common.reference.or(file.reference),
            workers: common.workers.or(file.workers).unwrap_or(4),
            transport: common
                .transport
                .or(file.transport)
                .unwrap_or(Transport::InProcess),
            out: common.out.clone().or(file.out),
            sweep: file.sweep.unwrap_or_default(),
            sizes: file.sizes.unwrap_or_default(),
            kind,
            shape_given,
        })
    }

    pub fn require_problem(&self) -> Result<&ProblemSource, CliError> {
        self.problem.as_ref().ok_or_else(|| {
            CliError::config("no problem given; pass --problem or set it in the config file")
        })
    }

    /// The decomposition shape must be stated somewhere — the built-in
    /// size-1 default is never what an experiment wants.
    pub fn require_shape(&self) -> Result<(), CliError> {
        if self.shape_given {
            return Ok(());
        }
        Err(CliError::config(
            "no decomposition shape given; pass --sub-size (and usually --num-sub) or set them in the config file",
        ))
    }
}
