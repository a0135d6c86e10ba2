//! Backtracking search for node-disjoint subgraph homeomorphisms.
//!
//! Two strategies share one [`MatchState`]:
//!
//! * [`Strategy::Ndshd1`] completes the node mapping first and only then
//!   searches edge-path assignments, backtracking into the node level when
//!   the edge level fails.
//! * [`Strategy::Ndshd2`] assigns paths to every pattern edge as soon as both
//!   of its ends are matched, before matching the next node.
//!
//! Both are sound and complete; they differ in how early dead ends show up.

mod state;

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::LabeledGraph;
use crate::mapping::Mapping;
use crate::paths::{PathId, DEFAULT_MAX_H};
use crate::stats::{Collector, Outcome, Phase, SearchStats};

pub use state::MatchState;

/// Expansions allowed per matrix cell when looking for independent witness
/// paths during compatibility refinement.
pub const DEFAULT_WITNESS_BUDGET: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("path length window [{l}, {h}] must satisfy 1 <= l <= h")]
    InvalidWindow { l: usize, h: usize },
    #[error("h = {h} exceeds the configured cap of {cap}")]
    LengthCap { h: usize, cap: usize },
    #[error("illegal match: {0}")]
    IllegalMatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Ndshd1,
    #[default]
    Ndshd2,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Ndshd1 => "ndshd1",
            Strategy::Ndshd2 => "ndshd2",
        }
    }
}

/// How the next pattern vertex (and the next pattern edge) is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum NodeOrder {
    /// Fewest remaining candidates first, ties by ascending id.
    #[default]
    #[serde(rename = "mcf")]
    MostConstrained,
    /// Ascending id.
    #[serde(rename = "ascending")]
    Ascending,
}

impl NodeOrder {
    pub fn name(self) -> &'static str {
        match self {
            NodeOrder::MostConstrained => "mcf",
            NodeOrder::Ascending => "ascending",
        }
    }
}

/// Switches for the three pruning rules. Turning any of them off never
/// changes the set of solutions, only the amount of search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Refinements {
    /// Kill paths running through a newly matched data vertex.
    pub through_matched: bool,
    /// Kill paths touching the inner vertices of a committed path.
    pub conflicting: bool,
    /// Re-filter the compatible matrix by neighbor path support.
    pub compatibility: bool,
}

impl Refinements {
    pub const ALL: Refinements = Refinements {
        through_matched: true,
        conflicting: true,
        compatibility: true,
    };
    pub const NONE: Refinements = Refinements {
        through_matched: false,
        conflicting: false,
        compatibility: false,
    };
}

impl Default for Refinements {
    fn default() -> Self {
        Refinements::ALL
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub order: NodeOrder,
    pub refinements: Refinements,
    pub max_h: usize,
    pub witness_budget: usize,
    pub trace: bool,
    pub time_limit: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::default(),
            order: NodeOrder::default(),
            refinements: Refinements::ALL,
            max_h: DEFAULT_MAX_H,
            witness_budget: DEFAULT_WITNESS_BUDGET,
            trace: false,
            time_limit: None,
        }
    }
}

impl SearchConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        SearchConfig {
            strategy,
            ..Default::default()
        }
    }

    pub fn check_window(&self, l: usize, h: usize) -> Result<(), SearchError> {
        if l == 0 || l > h {
            return Err(SearchError::InvalidWindow { l, h });
        }
        if h > self.max_h {
            return Err(SearchError::LengthCap { h, cap: self.max_h });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub mapping: Option<Mapping>,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        self.mapping.is_some()
    }

    pub fn timed_out(&self) -> bool {
        self.stats.outcome == Outcome::Timeout
    }
}

/// Decides whether `g1` is an `(l, h)`-topological minor of `g2`, returning
/// the first mapping found together with search statistics.
pub fn determine(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    l: usize,
    h: usize,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let mut first = None;
    let stats = run(g1, g2, l, h, config, Some(1), |m| {
        first = Some(m);
        ControlFlow::Break(())
    })?;
    Ok(SearchOutcome { mapping: first, stats })
}

/// Two-level search: full node mapping first, then edge paths.
pub fn ndshd1(g1: &LabeledGraph, g2: &LabeledGraph, l: usize, h: usize) -> Result<Option<Mapping>, SearchError> {
    Ok(determine(g1, g2, l, h, &SearchConfig::with_strategy(Strategy::Ndshd1))?.mapping)
}

/// Interleaved search: edge paths as soon as both ends are matched.
pub fn ndshd2(g1: &LabeledGraph, g2: &LabeledGraph, l: usize, h: usize) -> Result<Option<Mapping>, SearchError> {
    Ok(determine(g1, g2, l, h, &SearchConfig::with_strategy(Strategy::Ndshd2))?.mapping)
}

/// Every distinct mapping (up to `limit`), with the default configuration.
pub fn enumerate_all(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    l: usize,
    h: usize,
    limit: Option<usize>,
) -> Result<Vec<Mapping>, SearchError> {
    let mut out = Vec::new();
    enumerate_with(g1, g2, l, h, &SearchConfig::default(), limit, |m| {
        out.push(m);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Streams every distinct mapping to `sink` until it breaks, `limit`
/// mappings have been emitted, or the search space is exhausted.
pub fn enumerate_with<F>(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    l: usize,
    h: usize,
    config: &SearchConfig,
    limit: Option<usize>,
    sink: F,
) -> Result<SearchStats, SearchError>
where
    F: FnMut(Mapping) -> ControlFlow<()>,
{
    run(g1, g2, l, h, config, limit, sink)
}

fn run<F>(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    l: usize,
    h: usize,
    config: &SearchConfig,
    limit: Option<usize>,
    sink: F,
) -> Result<SearchStats, SearchError>
where
    F: FnMut(Mapping) -> ControlFlow<()>,
{
    let setup = Instant::now();
    let mut state = MatchState::new(g1, g2, l, h, config)?;
    let setup_time = setup.elapsed().as_secs_f64();

    let started = Instant::now();
    let mut searcher = Searcher {
        state: &mut state,
        order: config.order,
        stats: Collector::new(config.trace),
        deadline: config.time_limit.map(|d| started + d),
        timed_out: false,
        sink,
        limit,
        emitted: 0,
    };
    match config.strategy {
        Strategy::Ndshd1 => searcher.node_search1(),
        Strategy::Ndshd2 => searcher.node_search2(),
    };
    let wall_time = started.elapsed().as_secs_f64();

    let outcome = if searcher.emitted > 0 {
        Outcome::True
    } else if searcher.timed_out {
        Outcome::Timeout
    } else {
        Outcome::False
    };
    let c = &searcher.stats;
    let stats = SearchStats {
        outcome,
        wall_time,
        setup_time,
        recursion_calls: c.calls,
        max_depth: c.max_depth,
        mean_backtrack_depth: c.mean_backtrack_depth(),
        states_explored: c.explored,
        candidate_paths: searcher.state.store().len(),
        trace: searcher.stats.trace.take(),
    };
    debug_assert_eq!(state.depth(), 0);
    Ok(stats)
}

struct Searcher<'s, 'g, F> {
    state: &'s mut MatchState<'g>,
    order: NodeOrder,
    stats: Collector,
    deadline: Option<Instant>,
    timed_out: bool,
    sink: F,
    limit: Option<usize>,
    emitted: usize,
}

impl<F> Searcher<'_, '_, F>
where
    F: FnMut(Mapping) -> ControlFlow<()>,
{
    /// Registers a call; true if the search must stop for time.
    fn enter(&mut self, phase: Phase) -> bool {
        self.stats.on_call(self.state.depth(), phase);
        if let Some(deadline) = self.deadline {
            if self.stats.calls.is_multiple_of(64) && Instant::now() >= deadline {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    /// Emits the current complete mapping. Returns true if the search stops.
    fn emit(&mut self) -> bool {
        let mapping = self.state.mapping().expect("success state");
        self.emitted += 1;
        let flow = (self.sink)(mapping);
        flow.is_break() || self.limit.is_some_and(|k| self.emitted >= k)
    }

    fn is_dead(&self) -> bool {
        self.state.is_dead(Phase::Node) || self.state.is_dead(Phase::Edge)
    }

    fn next_pattern_vertex(&self) -> Option<u32> {
        let g1 = self.state.pattern();
        let mut unmatched = g1.vertices().filter(|&pv| !self.state.is_matched(pv));
        match self.order {
            NodeOrder::Ascending => unmatched.next(),
            NodeOrder::MostConstrained => unmatched.min_by_key(|&pv| (self.state.matrix().row_count(pv), pv)),
        }
    }

    fn next_edge(&self, pending: impl Iterator<Item = usize>) -> Option<usize> {
        let mut pending = pending.filter(|&e| !self.state.edge_assigned(e));
        match self.order {
            NodeOrder::Ascending => pending.next(),
            NodeOrder::MostConstrained => pending.min_by_key(|&e| (self.state.pending_count(e), e)),
        }
    }

    fn try_node<G>(&mut self, pv: u32, mut descend: G) -> bool
    where
        G: FnMut(&mut Self) -> bool,
    {
        for dv in self.state.node_candidates(pv) {
            self.stats.explored += 1;
            self.state.push_node_match(pv, dv).expect("candidates are legal");
            let stop = descend(self);
            self.state.pop();
            if stop {
                return true;
            }
            self.stats.on_backtrack(self.state.depth());
        }
        false
    }

    fn try_path<G>(&mut self, edge: usize, mut descend: G) -> bool
    where
        G: FnMut(&mut Self) -> bool,
    {
        let candidates: Vec<PathId> = self.state.path_candidates(edge);
        for p in candidates {
            self.stats.explored += 1;
            self.state.push_path_match(edge, p).expect("candidates are legal");
            let stop = descend(self);
            self.state.pop();
            if stop {
                return true;
            }
            self.stats.on_backtrack(self.state.depth());
        }
        false
    }

    fn node_search1(&mut self) -> bool {
        if self.enter(Phase::Node) {
            return true;
        }
        if self.state.is_dead(Phase::Node) {
            return false;
        }
        match self.next_pattern_vertex() {
            None => self.edge_search1(),
            Some(pv) => self.try_node(pv, Self::node_search1),
        }
    }

    fn edge_search1(&mut self) -> bool {
        if self.enter(Phase::Edge) {
            return true;
        }
        if self.is_dead() {
            return false;
        }
        if self.state.is_success() {
            return self.emit();
        }
        let edge = self
            .next_edge(0..self.state.pattern().edge_count())
            .expect("unassigned edge exists");
        self.try_path(edge, Self::edge_search1)
    }

    fn node_search2(&mut self) -> bool {
        if self.enter(Phase::Node) {
            return true;
        }
        if self.state.is_success() {
            return self.emit();
        }
        if self.is_dead() {
            return false;
        }
        let Some(pv) = self.next_pattern_vertex() else {
            return false;
        };
        self.try_node(pv, |s| {
            let emergent = s.state.new_edges_emergent();
            if emergent.is_empty() {
                s.node_search2()
            } else {
                s.edge_search2(&emergent)
            }
        })
    }

    fn edge_search2(&mut self, emergent: &[usize]) -> bool {
        if self.enter(Phase::Edge) {
            return true;
        }
        if self.is_dead() {
            return false;
        }
        match self.next_edge(emergent.iter().copied()) {
            None => self.node_search2(),
            Some(edge) => self.try_path(edge, |s| s.edge_search2(emergent)),
        }
    }
}
