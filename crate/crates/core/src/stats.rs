//! Search instrumentation and summary statistics.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which level of the search a recursive call belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Node,
    Edge,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Node => "node",
            Phase::Edge => "edge",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    True,
    False,
    Timeout,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::True => "true",
            Outcome::False => "false",
            Outcome::Timeout => "timeout",
        })
    }
}

/// One recursive search call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub call: u64,
    /// Number of node and edge-path matches in the state.
    pub depth: usize,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub outcome: Outcome,
    /// Seconds spent in the search proper.
    pub wall_time: f64,
    /// Seconds spent building the compatible matrix and path store.
    pub setup_time: f64,
    pub recursion_calls: u64,
    pub max_depth: usize,
    /// Mean state depth at which the search backtracked (0 if it never did).
    pub mean_backtrack_depth: f64,
    /// Number of matches tried (children generated).
    pub states_explored: u64,
    pub candidate_paths: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
}

/// Accumulates counters during a search.
#[derive(Debug, Default)]
pub(crate) struct Collector {
    pub calls: u64,
    pub max_depth: usize,
    pub backtracks: u64,
    pub backtrack_depth_sum: u64,
    pub explored: u64,
    pub trace: Option<Vec<TraceRecord>>,
}

impl Collector {
    pub fn new(trace: bool) -> Self {
        Collector {
            trace: trace.then(Vec::new),
            ..Default::default()
        }
    }

    pub fn on_call(&mut self, depth: usize, phase: Phase) {
        if let Some(t) = &mut self.trace {
            t.push(TraceRecord {
                call: self.calls,
                depth,
                phase,
            });
        }
        self.calls += 1;
        self.max_depth = self.max_depth.max(depth);
    }

    pub fn on_backtrack(&mut self, depth: usize) {
        self.backtracks += 1;
        self.backtrack_depth_sum += depth as u64;
    }

    pub fn mean_backtrack_depth(&self) -> f64 {
        if self.backtracks == 0 {
            0.0
        } else {
            self.backtrack_depth_sum as f64 / self.backtracks as f64
        }
    }
}

/// Max, mean and population standard deviation of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
    pub median: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let count = values.len();
        if count == 0 {
            return Summary {
                count,
                max: 0.0,
                mean: 0.0,
                stddev: 0.0,
                median: 0.0,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count as f64;
        Summary {
            count,
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            stddev: var.sqrt(),
            median: median(values),
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}
