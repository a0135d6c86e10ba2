//! Experiment harness: TOML experiment specs, sweeps over instance
//! parameters, CSV result rows and per-strategy summaries.
//!
//! ```toml
//! name = "exp1"
//! algorithm = "both"        # ndshd1 | ndshd2 | both
//! order = "mcf"             # mcf | ascending
//! repetitions = 5
//! seed_base = 1
//! l = 1
//! h = 3
//! timeout_secs = 60
//!
//! [pattern]
//! kind = "complete"         # complete | random | file
//! nodes = 4
//!
//! [data]
//! kind = "random"           # random | file
//! nodes = 200
//! avg_degree = 4.0
//! labels = 20
//!
//! [sweep]
//! variable = "n2"           # n1 | m1 | n2 | m2 | labels | l | h
//! values = [200, 400, 600]
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use crate::generate::{complete_graph, label_token, random_labeled_graph};
use crate::graph::{parse_graph, GraphError, LabeledGraph};
use crate::search::{determine, NodeOrder, SearchConfig, SearchError, Strategy};
use crate::stats::{median, Outcome, SearchStats, Summary};

pub const DEFAULT_TIMEOUT_SECS: f64 = 60.0;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("experiment spec: {0}")]
    Spec(#[from] toml::de::Error),
    #[error("invalid experiment spec: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Graph { path: String, source: GraphError },
    #[error(transparent)]
    Generate(#[from] GraphError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    Ndshd1,
    Ndshd2,
    #[default]
    Both,
}

impl AlgorithmChoice {
    pub fn strategies(self) -> &'static [Strategy] {
        match self {
            AlgorithmChoice::Ndshd1 => &[Strategy::Ndshd1],
            AlgorithmChoice::Ndshd2 => &[Strategy::Ndshd2],
            AlgorithmChoice::Both => &[Strategy::Ndshd1, Strategy::Ndshd2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UniqueLabels {
    Unique,
}

/// Either a fixed number of labels drawn at random, or `"unique"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum LabelPolicy {
    Count(usize),
    Unique(UniqueLabels),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PatternSource {
    /// Complete graph on uniquely labeled vertices.
    Complete {
        nodes: usize,
    },
    Random {
        nodes: usize,
        avg_degree: f64,
        labels: LabelPolicy,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DataSource {
    Random {
        nodes: usize,
        avg_degree: f64,
        labels: usize,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    N1,
    M1,
    N2,
    M2,
    Labels,
    L,
    H,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::N1 => "n1",
            SweepVariable::M1 => "m1",
            SweepVariable::N2 => "n2",
            SweepVariable::M2 => "m2",
            SweepVariable::Labels => "labels",
            SweepVariable::L => "l",
            SweepVariable::H => "h",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default)]
    pub algorithm: AlgorithmChoice,
    #[serde(default)]
    pub order: NodeOrder,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed_base: u64,
    pub l: usize,
    pub h: usize,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    pub pattern: PatternSource,
    pub data: DataSource,
    pub sweep: Option<Sweep>,
}

fn one() -> usize {
    1
}

fn default_timeout() -> f64 {
    DEFAULT_TIMEOUT_SECS
}

impl ExperimentSpec {
    /// Parses and validates a TOML spec.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let spec: ExperimentSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::Invalid(msg));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.timeout_secs.is_nan() || self.timeout_secs <= 0.0 {
            return bad("timeout_secs must be positive".into());
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return bad("sweep values must be nonempty".into());
            }
        }
        for point in self.points() {
            if point.l == 0 || point.l > point.h {
                return bad(format!("l = {} and h = {} must satisfy 1 <= l <= h", point.l, point.h));
            }
        }
        Ok(())
    }

    /// The concrete parameter sets, one per sweep value (or just one).
    pub fn points(&self) -> Vec<Point> {
        let base = Point {
            sweep_value: None,
            pattern: self.pattern.clone(),
            data: self.data.clone(),
            l: self.l,
            h: self.h,
        };
        let Some(sweep) = &self.sweep else {
            return vec![base];
        };
        sweep
            .values
            .iter()
            .map(|&v| {
                let mut p = base.clone();
                p.sweep_value = Some(v);
                let n = v.round().max(0.0) as usize;
                match sweep.variable {
                    SweepVariable::N1 => match &mut p.pattern {
                        PatternSource::Complete { nodes } | PatternSource::Random { nodes, .. } => *nodes = n,
                        PatternSource::File { .. } => {}
                    },
                    SweepVariable::M1 => {
                        if let PatternSource::Random { avg_degree, .. } = &mut p.pattern {
                            *avg_degree = v;
                        }
                    }
                    SweepVariable::N2 => {
                        if let DataSource::Random { nodes, .. } = &mut p.data {
                            *nodes = n;
                        }
                    }
                    SweepVariable::M2 => {
                        if let DataSource::Random { avg_degree, .. } = &mut p.data {
                            *avg_degree = v;
                        }
                    }
                    SweepVariable::Labels => {
                        if let DataSource::Random { labels, .. } = &mut p.data {
                            *labels = n;
                        }
                    }
                    SweepVariable::L => p.l = n,
                    SweepVariable::H => p.h = n,
                }
                p
            })
            .collect()
    }
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub sweep_value: Option<f64>,
    pub pattern: PatternSource,
    pub data: DataSource,
    pub l: usize,
    pub h: usize,
}

impl Point {
    /// Builds the `(pattern, data)` instance for one seed. File paths are
    /// resolved against `base_dir`.
    pub fn instance(&self, seed: u64, base_dir: &Path) -> Result<(LabeledGraph, LabeledGraph), BenchError> {
        let load = |path: &Path| -> Result<LabeledGraph, BenchError> {
            let full = base_dir.join(path);
            let text = fs::read_to_string(&full)?;
            parse_graph(&text).map_err(|source| BenchError::Graph {
                path: full.display().to_string(),
                source,
            })
        };
        let pattern = match &self.pattern {
            PatternSource::Complete { nodes } => complete_graph(*nodes),
            PatternSource::Random {
                nodes,
                avg_degree,
                labels,
            } => {
                let count = match labels {
                    LabelPolicy::Count(k) => *k,
                    LabelPolicy::Unique(_) => *nodes,
                };
                let g = random_labeled_graph(*nodes, *avg_degree, count.max(1), seed.wrapping_mul(2).wrapping_add(1))?;
                if matches!(labels, LabelPolicy::Unique(_)) {
                    LabeledGraph::new((0..*nodes).map(label_token).collect(), g.edges().to_vec())?
                } else {
                    g
                }
            }
            PatternSource::File { path } => load(path)?,
        };
        let data = match &self.data {
            DataSource::Random {
                nodes,
                avg_degree,
                labels,
            } => random_labeled_graph(*nodes, *avg_degree, *labels, seed.wrapping_mul(2))?,
            DataSource::File { path } => load(path)?,
        };
        Ok((pattern, data))
    }
}

/// One search run of the harness.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub point: usize,
    pub sweep_value: Option<f64>,
    pub repetition: usize,
    pub seed: u64,
    pub n1: usize,
    pub e1: usize,
    pub n2: usize,
    pub e2: usize,
    pub labels2: usize,
    pub l: usize,
    pub h: usize,
    pub strategy: Strategy,
    pub stats: SearchStats,
}

/// Seed of repetition `rep` at sweep point `point`.
pub fn run_seed(seed_base: u64, point: usize, rep: usize) -> u64 {
    seed_base + 1000 * point as u64 + rep as u64
}

/// Runs every (point, repetition, strategy) combination in sweep order,
/// handing each record to `on_record` as it completes.
pub fn run_experiment<F>(spec: &ExperimentSpec, base_dir: &Path, mut on_record: F) -> Result<Vec<RunRecord>, BenchError>
where
    F: FnMut(&RunRecord),
{
    spec.validate()?;
    let mut records = Vec::new();
    for (pi, point) in spec.points().iter().enumerate() {
        for rep in 0..spec.repetitions {
            let seed = run_seed(spec.seed_base, pi, rep);
            let (g1, g2) = point.instance(seed, base_dir)?;
            let labels2 = g2.labels().iter().collect::<std::collections::BTreeSet<_>>().len();
            for &strategy in spec.algorithm.strategies() {
                let config = SearchConfig {
                    strategy,
                    order: spec.order,
                    time_limit: Some(Duration::from_secs_f64(spec.timeout_secs)),
                    max_h: SearchConfig::default().max_h.max(point.h),
                    ..Default::default()
                };
                let outcome = determine(&g1, &g2, point.l, point.h, &config)?;
                let record = RunRecord {
                    point: pi,
                    sweep_value: point.sweep_value,
                    repetition: rep,
                    seed,
                    n1: g1.vertex_count(),
                    e1: g1.edge_count(),
                    n2: g2.vertex_count(),
                    e2: g2.edge_count(),
                    labels2,
                    l: point.l,
                    h: point.h,
                    strategy,
                    stats: outcome.stats,
                };
                on_record(&record);
                records.push(record);
            }
        }
    }
    Ok(records)
}

const TIMING_COLUMNS: [&str; 2] = ["wall_time", "setup_time"];

pub const CSV_COLUMNS: [&str; 22] = [
    "experiment",
    "sweep_variable",
    "sweep_value",
    "point",
    "repetition",
    "seed",
    "n1",
    "e1",
    "n2",
    "e2",
    "labels2",
    "l",
    "h",
    "algorithm",
    "order",
    "outcome",
    "wall_time",
    "setup_time",
    "recursion_calls",
    "max_depth",
    "mean_backtrack_depth",
    "states_explored",
];

/// Writes one CSV row per record. With `omit_timing` the wall-clock columns
/// are dropped, making the output a pure function of the spec.
pub fn write_csv<W: Write>(
    spec: &ExperimentSpec,
    records: &[RunRecord],
    out: W,
    omit_timing: bool,
) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let keep = |c: &str| !(omit_timing && TIMING_COLUMNS.contains(&c));
    w.write_record(CSV_COLUMNS.iter().filter(|c| keep(c)))?;
    let sweep_var = spec.sweep.as_ref().map(|s| s.variable.name()).unwrap_or("");
    for r in records {
        let fields = [
            spec.name.clone(),
            sweep_var.to_string(),
            r.sweep_value.map(|v| v.to_string()).unwrap_or_default(),
            r.point.to_string(),
            r.repetition.to_string(),
            r.seed.to_string(),
            r.n1.to_string(),
            r.e1.to_string(),
            r.n2.to_string(),
            r.e2.to_string(),
            r.labels2.to_string(),
            r.l.to_string(),
            r.h.to_string(),
            r.strategy.name().to_string(),
            spec.order.name().to_string(),
            r.stats.outcome.to_string(),
            format!("{:.6}", r.stats.wall_time),
            format!("{:.6}", r.stats.setup_time),
            r.stats.recursion_calls.to_string(),
            r.stats.max_depth.to_string(),
            format!("{:.4}", r.stats.mean_backtrack_depth),
            r.stats.states_explored.to_string(),
        ];
        w.write_record(CSV_COLUMNS.iter().zip(&fields).filter(|(c, _)| keep(c)).map(|(_, f)| f))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-strategy statistics over all runs of an experiment.
#[derive(Debug, Clone)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub runs: usize,
    pub timeouts: usize,
    pub wall_time: Summary,
    pub recursion_calls: Summary,
}

pub fn summarize(records: &[RunRecord]) -> Vec<StrategySummary> {
    [Strategy::Ndshd1, Strategy::Ndshd2]
        .into_iter()
        .filter_map(|strategy| {
            let runs: Vec<&RunRecord> = records.iter().filter(|r| r.strategy == strategy).collect();
            if runs.is_empty() {
                return None;
            }
            let times: Vec<f64> = runs.iter().map(|r| r.stats.wall_time).collect();
            let calls: Vec<f64> = runs.iter().map(|r| r.stats.recursion_calls as f64).collect();
            Some(StrategySummary {
                strategy,
                runs: runs.len(),
                timeouts: runs.iter().filter(|r| r.stats.outcome == Outcome::Timeout).count(),
                wall_time: Summary::of(&times),
                recursion_calls: Summary::of(&calls),
            })
        })
        .collect()
}

/// Summary block: one CSV-style line per (strategy, metric).
pub fn write_summary<W: Write>(summaries: &[StrategySummary], mut out: W, omit_timing: bool) -> std::io::Result<()> {
    writeln!(out, "algorithm,metric,runs,timeouts,max,mean,stddev,median")?;
    for s in summaries {
        let mut metrics = vec![("recursion_calls", &s.recursion_calls)];
        if !omit_timing {
            metrics.insert(0, ("wall_time", &s.wall_time));
        }
        for (name, m) in metrics {
            writeln!(
                out,
                "{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
                s.strategy.name(),
                name,
                s.runs,
                s.timeouts,
                m.max,
                m.mean,
                m.stddev,
                m.median
            )?;
        }
    }
    Ok(())
}

/// Median wall time per sweep point for one strategy, in sweep order.
pub fn median_times(records: &[RunRecord], strategy: Strategy) -> Vec<(Option<f64>, f64)> {
    let points = records.iter().map(|r| r.point).max().map_or(0, |p| p + 1);
    (0..points)
        .map(|p| {
            let rs: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.point == p && r.strategy == strategy)
                .collect();
            let times: Vec<f64> = rs.iter().map(|r| r.stats.wall_time).collect();
            (rs.first().and_then(|r| r.sweep_value), median(&times))
        })
        .collect()
}
