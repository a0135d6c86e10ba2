//! Partial match state: node matches, edge-path matches, the refined
//! compatible matrix and path store, plus the trail needed to undo each
//! match exactly.

use std::collections::VecDeque;

use crate::graph::{LabeledGraph, Vertex};
use crate::mapping::Mapping;
use crate::matrix::CompatibleMatrix;
use crate::paths::{candidate_branch_nodes, PathId, PathStore, UndoToken};
use crate::stats::Phase;

use super::{Refinements, SearchConfig, SearchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Occupancy {
    Free,
    Branch,
    Inner,
}

#[derive(Debug)]
enum Frame {
    Node {
        pv: Vertex,
        matrix: CompatibleMatrix,
        token: Option<UndoToken>,
    },
    Path {
        edge: usize,
        matrix: CompatibleMatrix,
        token: Option<UndoToken>,
    },
}

/// One node of the search tree, mutated in place and restored via
/// [`pop`](MatchState::pop).
///
/// Pushing a node match applies row/column exclusivity, then (if enabled)
/// kills every path running through the matched data vertex and re-filters
/// the matrix. Pushing an edge-path match kills paths touching the inner
/// vertices of the committed path, zeroes those vertices' columns and
/// re-filters the matrix.
///
/// Independently of which refinements are enabled, the state never accepts
/// a match that would break the homeomorphism: data vertices already used as
/// branch nodes or as inner vertices of committed paths are unavailable.
pub struct MatchState<'g> {
    g1: &'g LabeledGraph,
    g2: &'g LabeledGraph,
    l: usize,
    h: usize,
    refinements: Refinements,
    witness_budget: usize,
    m0: CompatibleMatrix,
    m: CompatibleMatrix,
    store: PathStore,
    nm: Vec<(Vertex, Vertex)>,
    epm: Vec<(usize, PathId)>,
    image: Vec<Option<Vertex>>,
    edge_path: Vec<Option<PathId>>,
    occupancy: Vec<Occupancy>,
    trail: Vec<Frame>,
    marks: Vec<u8>,
    queued: CompatibleMatrix,
}

impl<'g> MatchState<'g> {
    /// Builds the initial matrix and the path store for `g1` into `g2`.
    pub fn new(
        g1: &'g LabeledGraph,
        g2: &'g LabeledGraph,
        l: usize,
        h: usize,
        config: &SearchConfig,
    ) -> Result<Self, SearchError> {
        config.check_window(l, h)?;
        let m0 = CompatibleMatrix::initial(g1, g2);
        let store = PathStore::enumerate(g2, &candidate_branch_nodes(&m0), l, h);
        let mut state = MatchState {
            g1,
            g2,
            l,
            h,
            refinements: config.refinements,
            witness_budget: config.witness_budget,
            m: m0.clone(),
            m0,
            store,
            nm: Vec::new(),
            epm: Vec::new(),
            image: vec![None; g1.vertex_count()],
            edge_path: vec![None; g1.edge_count()],
            occupancy: vec![Occupancy::Free; g2.vertex_count() + 1],
            trail: Vec::new(),
            marks: vec![0; g2.vertex_count() + 1],
            queued: CompatibleMatrix::zeros(g1.vertex_count(), g2.vertex_count()),
        };
        if state.refinements.compatibility {
            state.refine_compatibility();
        }
        Ok(state)
    }

    pub fn pattern(&self) -> &'g LabeledGraph {
        self.g1
    }

    pub fn data(&self) -> &'g LabeledGraph {
        self.g2
    }

    pub fn window(&self) -> (usize, usize) {
        (self.l, self.h)
    }

    pub fn matrix(&self) -> &CompatibleMatrix {
        &self.m
    }

    pub fn initial_matrix(&self) -> &CompatibleMatrix {
        &self.m0
    }

    pub fn store(&self) -> &PathStore {
        &self.store
    }

    pub fn node_matches(&self) -> &[(Vertex, Vertex)] {
        &self.nm
    }

    pub fn edge_path_matches(&self) -> &[(usize, PathId)] {
        &self.epm
    }

    /// Number of matches (node and edge-path) in the state.
    pub fn depth(&self) -> usize {
        self.nm.len() + self.epm.len()
    }

    pub fn image(&self, pv: Vertex) -> Option<Vertex> {
        self.image[pv as usize - 1]
    }

    pub fn is_matched(&self, pv: Vertex) -> bool {
        self.image(pv).is_some()
    }

    pub fn edge_assigned(&self, edge: usize) -> bool {
        self.edge_path[edge].is_some()
    }

    fn is_free(&self, dv: Vertex) -> bool {
        self.occupancy[dv as usize] == Occupancy::Free
    }

    fn is_usable_path(&self, p: PathId) -> bool {
        self.store.is_alive(p) && self.store.inner(p).iter().all(|&x| self.is_free(x))
    }

    /// Data vertices `pv` may still be matched to, ascending.
    pub fn node_candidates(&self, pv: Vertex) -> Vec<Vertex> {
        self.m.row_ones(pv).filter(|&dv| self.is_free(dv)).collect()
    }

    /// Alive paths usable for pattern edge `edge`, ascending id. Empty unless
    /// both ends of the edge are matched.
    pub fn path_candidates(&self, edge: usize) -> Vec<PathId> {
        let (a, b) = self.g1.edges()[edge];
        match (self.image(a), self.image(b)) {
            (Some(fa), Some(fb)) => self
                .store
                .alive_between(fa, fb)
                .filter(|&p| self.is_usable_path(p))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Alive paths between the images of an edge whose ends are both matched.
    pub fn pending_count(&self, edge: usize) -> u32 {
        let (a, b) = self.g1.edges()[edge];
        match (self.image(a), self.image(b)) {
            (Some(fa), Some(fb)) => self.store.count_between(fa, fb),
            _ => 0,
        }
    }

    /// Appends `(pv, dv)` to the node matches and refines.
    pub fn push_node_match(&mut self, pv: Vertex, dv: Vertex) -> Result<(), SearchError> {
        if !self.g1.contains(pv) || !self.g2.contains(dv) {
            return Err(SearchError::IllegalMatch(format!("unknown vertex in ({pv}, {dv})")));
        }
        if self.is_matched(pv) {
            return Err(SearchError::IllegalMatch(format!(
                "pattern vertex {pv} already matched"
            )));
        }
        if !self.is_free(dv) || !self.m.get(pv, dv) {
            return Err(SearchError::IllegalMatch(format!("({pv}, {dv}) is not compatible")));
        }
        let matrix = self.m.clone();
        self.nm.push((pv, dv));
        self.image[pv as usize - 1] = Some(dv);
        self.occupancy[dv as usize] = Occupancy::Branch;
        let token = self.refine_on_node_match(pv, dv);
        self.trail.push(Frame::Node { pv, matrix, token });
        Ok(())
    }

    fn refine_on_node_match(&mut self, pv: Vertex, dv: Vertex) -> Option<UndoToken> {
        self.m.clear_column(dv);
        self.m.set(pv, dv);
        self.m.keep_only(pv, dv);
        let token = self
            .refinements
            .through_matched
            .then(|| self.store.remove_paths_through_vertex(dv));
        if self.refinements.compatibility {
            self.refine_after(&[dv], Some(pv));
        }
        token
    }

    /// Appends `(edge, path)` to the edge-path matches and refines.
    pub fn push_path_match(&mut self, edge: usize, p: PathId) -> Result<(), SearchError> {
        if edge >= self.g1.edge_count() {
            return Err(SearchError::IllegalMatch(format!("no pattern edge #{edge}")));
        }
        if self.edge_assigned(edge) {
            return Err(SearchError::IllegalMatch(format!(
                "pattern edge #{edge} already assigned"
            )));
        }
        let (a, b) = self.g1.edges()[edge];
        let (Some(fa), Some(fb)) = (self.image(a), self.image(b)) else {
            return Err(SearchError::IllegalMatch(format!(
                "ends of pattern edge {a}-{b} not matched"
            )));
        };
        if (p as usize) >= self.store.len() || !self.is_usable_path(p) {
            return Err(SearchError::IllegalMatch(format!("path {p} is not usable")));
        }
        let (x, y) = self.store.ends(p);
        if (x, y) != (fa.min(fb), fa.max(fb)) {
            return Err(SearchError::IllegalMatch(format!(
                "path {p} does not join {fa} and {fb}"
            )));
        }
        let matrix = self.m.clone();
        self.epm.push((edge, p));
        self.edge_path[edge] = Some(p);
        for &v in self.store.inner(p) {
            self.occupancy[v as usize] = Occupancy::Inner;
        }
        let token = self.refine_on_path_match(p);
        self.trail.push(Frame::Path { edge, matrix, token });
        Ok(())
    }

    fn refine_on_path_match(&mut self, p: PathId) -> Option<UndoToken> {
        let token = if self.refinements.conflicting {
            for i in 0..self.store.inner(p).len() {
                let v = self.store.inner(p)[i];
                self.m.clear_column(v);
            }
            Some(
                self.store
                    .remove_paths_conflicting_with(p)
                    .expect("committed path is alive"),
            )
        } else {
            None
        };
        if self.refinements.compatibility {
            let inner = self.store.inner(p).to_vec();
            self.refine_after(&inner, None);
        }
        token
    }

    /// Incremental form of [`refine_compatibility`](Self::refine_compatibility)
    /// after `occupied` data vertices were taken and, optionally, pattern
    /// vertex `matched` got its image. Only cells whose support may have
    /// changed are rechecked; clearing a cell rechecks the cells it supported.
    fn refine_after(&mut self, occupied: &[Vertex], matched: Option<Vertex>) -> usize {
        let mut queue = VecDeque::new();
        let mut zeroed = 0;
        let mut cleared = Vec::new();

        if let Some(u) = matched {
            let t = self.image(u).expect("matched");
            let mut reach: Vec<Vertex> = self
                .store
                .alive_from(t)
                .filter(|&p| self.is_usable_path(p))
                .map(|p| other_end(self.store.ends(p), t))
                .collect();
            reach.sort_unstable();
            for &w in self.g1.neighbors(u) {
                if self.is_matched(w) {
                    continue;
                }
                let row: Vec<Vertex> = self.m.row_ones(w).collect();
                for dv in row {
                    if reach.binary_search(&dv).is_ok() {
                        self.enqueue(&mut queue, w, dv);
                    } else {
                        self.m.clear(w, dv);
                        zeroed += 1;
                        cleared.push((w, dv));
                    }
                }
                if self.m.row_is_zero(w) {
                    self.abandon(queue);
                    return zeroed;
                }
            }
        }

        for &x in occupied {
            let mut touched: Vec<Vertex> = vec![x];
            for &p in self.store.ending_at(x).iter().chain(self.store.through(x)) {
                let (a, b) = self.store.ends(p);
                touched.extend([a, b]);
            }
            for dv in touched {
                for pv in self.g1.vertices() {
                    if !self.is_matched(pv) && self.m.get(pv, dv) {
                        self.enqueue(&mut queue, pv, dv);
                    }
                }
            }
        }

        // rows next to the matched vertex were restricted above and all
        // their remaining cells are queued already
        let restricted = |s: &Self, u: Vertex| matched.is_some_and(|m| u == m || s.g1.has_edge(u, m));
        for (w, dv) in cleared {
            if self
                .g1
                .neighbors(w)
                .iter()
                .any(|&u| !self.is_matched(u) && !restricted(self, u))
            {
                self.cascade(&mut queue, w, dv);
            }
        }

        self.drain(queue, zeroed)
    }

    fn drain(&mut self, mut queue: VecDeque<(Vertex, Vertex)>, mut zeroed: usize) -> usize {
        let mut marks = std::mem::take(&mut self.marks);
        while let Some((pv, dv)) = queue.pop_front() {
            self.queued.clear(pv, dv);
            if !self.m.get(pv, dv) || self.cell_supported(pv, dv, &mut marks) {
                continue;
            }
            self.m.clear(pv, dv);
            zeroed += 1;
            if self.m.row_is_zero(pv) {
                break;
            }
            self.cascade(&mut queue, pv, dv);
        }
        self.abandon(queue);
        self.marks = marks;
        zeroed
    }

    /// Drops pending work. Used once a row is empty: the state is dead and
    /// further refinement is wasted.
    fn abandon(&mut self, queue: VecDeque<(Vertex, Vertex)>) {
        for (pv, dv) in queue {
            self.queued.clear(pv, dv);
        }
    }

    fn enqueue(&mut self, queue: &mut VecDeque<(Vertex, Vertex)>, pv: Vertex, dv: Vertex) {
        if !self.queued.get(pv, dv) {
            self.queued.set(pv, dv);
            queue.push_back((pv, dv));
        }
    }

    /// Queues the cells that may have relied on `(w, dv)` for support.
    fn cascade(&mut self, queue: &mut VecDeque<(Vertex, Vertex)>, w: Vertex, dv: Vertex) {
        let mut ends = Vec::new();
        for p in self.store.alive_from(dv) {
            ends.push(other_end(self.store.ends(p), dv));
        }
        for i in 0..self.g1.neighbors(w).len() {
            let u = self.g1.neighbors(w)[i];
            if self.is_matched(u) {
                continue;
            }
            for &e in &ends {
                if self.m.get(u, e) {
                    self.enqueue(queue, u, e);
                }
            }
        }
    }

    /// Undoes the most recent match. Returns false if the state is empty.
    pub fn pop(&mut self) -> bool {
        let Some(frame) = self.trail.pop() else {
            return false;
        };
        match frame {
            Frame::Node { pv, matrix, token } => {
                if let Some(t) = token {
                    self.store.undo(t);
                }
                self.m = matrix;
                let (_, dv) = self.nm.pop().expect("node frame has a match");
                self.image[pv as usize - 1] = None;
                self.occupancy[dv as usize] = Occupancy::Free;
            }
            Frame::Path { edge, matrix, token } => {
                if let Some(t) = token {
                    self.store.undo(t);
                }
                self.m = matrix;
                let (_, p) = self.epm.pop().expect("path frame has a match");
                self.edge_path[edge] = None;
                for &v in self.store.inner(p) {
                    self.occupancy[v as usize] = Occupancy::Free;
                }
            }
        }
        true
    }

    /// Dead-state test. Node phase: some unmatched pattern row is all zero.
    /// Edge phase: some unassigned pattern edge with both ends matched has
    /// no alive path between their images.
    pub fn is_dead(&self, phase: Phase) -> bool {
        match phase {
            Phase::Node => self
                .g1
                .vertices()
                .any(|pv| !self.is_matched(pv) && self.m.row_is_zero(pv)),
            Phase::Edge => self.g1.edges().iter().enumerate().any(|(i, &(a, b))| {
                !self.edge_assigned(i) && self.is_matched(a) && self.is_matched(b) && self.pending_count(i) == 0
            }),
        }
    }

    pub fn is_success(&self) -> bool {
        self.nm.len() == self.g1.vertex_count() && self.epm.len() == self.g1.edge_count()
    }

    /// Pattern edges joining the most recently matched pattern vertex to
    /// earlier matched ones.
    pub fn new_edges_emergent(&self) -> Vec<usize> {
        let Some(&(pv, _)) = self.nm.last() else {
            return Vec::new();
        };
        self.g1
            .neighbors(pv)
            .iter()
            .filter(|&&u| self.is_matched(u))
            .map(|&u| {
                self.g1
                    .edge_index(pv, u)
                    .expect("adjacent pattern vertices share an edge")
            })
            .filter(|&e| !self.edge_assigned(e))
            .collect()
    }

    /// The completed mapping, with each edge image running from the image of
    /// the edge's smaller pattern endpoint.
    pub fn mapping(&self) -> Option<Mapping> {
        if !self.is_success() {
            return None;
        }
        let node_map: Vec<Vertex> = self.image.iter().map(|v| v.expect("complete")).collect();
        let edge_paths = self
            .g1
            .edges()
            .iter()
            .zip(&self.edge_path)
            .map(|(&(a, _), p)| {
                let path = self.store.path(p.expect("complete"));
                if path.first() == node_map[a as usize - 1] {
                    path
                } else {
                    path.reversed()
                }
            })
            .collect();
        Some(Mapping { node_map, edge_paths })
    }

    /// Zeroes every matrix cell `(vi, vj)` of an unmatched pattern vertex
    /// that cannot be part of any completion:
    ///
    /// 1. a matched neighbor `u` of `vi` has no usable path from `vj` to its image;
    /// 2. an unmatched neighbor `u` of `vi` has no usable path from `vj` to a
    ///    free data vertex compatible with `u`;
    /// 3. no choice of one path per neighbor requirement is pairwise
    ///    independent (checked by bounded backtracking; when the budget runs
    ///    out the cell is kept).
    ///
    /// Repeats until no cell changes or some unmatched row is empty. Returns
    /// the number of cells zeroed.
    pub fn refine_compatibility(&mut self) -> usize {
        let mut queue = VecDeque::new();
        for pv in self.g1.vertices() {
            if self.is_matched(pv) || self.g1.neighbors(pv).is_empty() {
                continue;
            }
            let cells: Vec<Vertex> = self.m.row_ones(pv).collect();
            for dv in cells {
                self.enqueue(&mut queue, pv, dv);
            }
        }
        self.drain(queue, 0)
    }

    fn cell_supported(&self, pv: Vertex, dv: Vertex, marks: &mut [u8]) -> bool {
        if !self.is_free(dv) {
            return false;
        }
        let neighbors = self.g1.neighbors(pv);
        let mut options: Vec<Vec<PathId>> = vec![Vec::new(); neighbors.len()];
        for p in self.store.alive_from(dv) {
            if !self.store.inner(p).iter().all(|&x| self.is_free(x)) {
                continue;
            }
            let other = other_end(self.store.ends(p), dv);
            for (k, &u) in neighbors.iter().enumerate() {
                let fits = match self.image(u) {
                    Some(t) => other == t,
                    None => self.is_free(other) && self.m.get(u, other),
                };
                if fits {
                    options[k].push(p);
                }
            }
        }
        if options.iter().any(Vec::is_empty) {
            return false;
        }
        options.sort_by_key(Vec::len);
        let mut budget = self.witness_budget;
        // out of budget: keep the cell
        self.pick_witnesses(&options, dv, marks, &mut budget).unwrap_or(true)
    }

    /// Backtracking choice of pairwise independent witnesses, one per
    /// requirement. `None` means the budget ran out.
    fn pick_witnesses(
        &self,
        options: &[Vec<PathId>],
        dv: Vertex,
        marks: &mut [u8],
        budget: &mut usize,
    ) -> Option<bool> {
        let Some((first, rest)) = options.split_first() else {
            return Some(true);
        };
        for &p in first {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let vs = self.store.vertices(p);
            if vs.iter().any(|&v| v != dv && marks[v as usize] != 0) {
                continue;
            }
            for &v in vs {
                if v != dv {
                    marks[v as usize] = 1;
                }
            }
            let found = self.pick_witnesses(rest, dv, marks, budget);
            for &v in vs {
                if v != dv {
                    marks[v as usize] = 0;
                }
            }
            match found {
                Some(false) => {}
                other => return other,
            }
        }
        Some(false)
    }
}

fn other_end((a, b): (Vertex, Vertex), v: Vertex) -> Vertex {
    if a == v {
        b
    } else {
        a
    }
}
