//! Bounded simple paths between candidate branch nodes.
//!
//! [`PathStore`] holds every simple path of length in `[l, h]` whose two ends
//! are candidate branch nodes, indexed by end pair, by end vertex and by
//! inner vertex. Paths are removed softly (alive flag plus per-pair counts)
//! and restored through LIFO [`UndoToken`]s.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{LabeledGraph, Path, Vertex};
use crate::matrix::CompatibleMatrix;

pub type PathId = u32;

/// Upper bound on `h` unless overridden by configuration.
pub const DEFAULT_MAX_H: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("vertex {0} is not a candidate branch node")]
    NotCandidate(Vertex),
    #[error("path {0} does not exist or is not alive")]
    NotAlive(PathId),
}

/// Data vertices whose column in the initial matrix has at least one 1.
pub fn candidate_branch_nodes(m0: &CompatibleMatrix) -> Vec<Vertex> {
    (1..=m0.cols() as Vertex).filter(|&dv| !m0.column_is_zero(dv)).collect()
}

/// Record of the paths killed by one removal batch.
#[must_use = "an undo token must be handed back to PathStore::undo"]
#[derive(Debug)]
pub struct UndoToken {
    seq: usize,
    killed: Vec<PathId>,
}

impl UndoToken {
    pub fn killed(&self) -> &[PathId] {
        &self.killed
    }
}

#[derive(Debug, Clone)]
pub struct PathStore {
    l: usize,
    h: usize,
    candidates: Vec<Vertex>,
    /// data vertex -> index into `candidates`
    slot: Vec<Option<u32>>,
    verts: Vec<Vertex>,
    offsets: Vec<u32>,
    alive: Vec<bool>,
    alive_total: usize,
    /// triangular pair index -> path ids, ascending
    by_pair: Vec<Vec<PathId>>,
    /// full symmetric count matrix over candidates
    counts: Vec<u32>,
    by_inner: Vec<Vec<PathId>>,
    by_end: Vec<Vec<PathId>>,
    open_tokens: usize,
}

impl PathStore {
    /// Enumerates all simple paths of length in `[l, h]` between two distinct
    /// candidates. Inner vertices may be any vertex of `g`. Each path is
    /// stored once, starting at its smaller end; ids follow discovery order
    /// (by start vertex, then depth-first with ascending neighbors).
    pub fn enumerate(g: &LabeledGraph, candidates: &[Vertex], l: usize, h: usize) -> Self {
        let mut candidates = candidates.to_vec();
        candidates.sort_unstable();
        candidates.dedup();
        let n = g.vertex_count();
        let nc = candidates.len();
        let mut slot = vec![None; n + 1];
        for (i, &c) in candidates.iter().enumerate() {
            slot[c as usize] = Some(i as u32);
        }

        let mut store = PathStore {
            l,
            h,
            candidates,
            slot,
            verts: Vec::new(),
            offsets: vec![0],
            alive: Vec::new(),
            alive_total: 0,
            by_pair: vec![Vec::new(); nc * nc.saturating_sub(1) / 2],
            counts: vec![0; nc * nc],
            by_inner: vec![Vec::new(); n + 1],
            by_end: vec![Vec::new(); n + 1],
            open_tokens: 0,
        };
        if l == 0 || l > h {
            return store;
        }

        let mut on_path = vec![false; n + 1];
        let mut stack: Vec<Vertex> = Vec::with_capacity(h + 1);
        for i in 0..nc {
            let start = store.candidates[i];
            stack.push(start);
            on_path[start as usize] = true;
            store.extend(g, &mut stack, &mut on_path);
            on_path[start as usize] = false;
            stack.pop();
        }
        store
    }

    fn extend(&mut self, g: &LabeledGraph, stack: &mut Vec<Vertex>, on_path: &mut [bool]) {
        let depth = stack.len() - 1;
        let start = stack[0];
        let last = stack[depth];
        if depth >= self.l && last > start && self.slot[last as usize].is_some() {
            self.push_path(stack);
        }
        if depth == self.h {
            return;
        }
        for &w in g.neighbors(last) {
            if !on_path[w as usize] {
                on_path[w as usize] = true;
                stack.push(w);
                self.extend(g, stack, on_path);
                stack.pop();
                on_path[w as usize] = false;
            }
        }
    }

    fn push_path(&mut self, vs: &[Vertex]) {
        let id = self.alive.len() as PathId;
        self.verts.extend_from_slice(vs);
        self.offsets.push(self.verts.len() as u32);
        self.alive.push(true);
        self.alive_total += 1;
        let (a, b) = (vs[0], vs[vs.len() - 1]);
        let (sa, sb) = (self.slot_of(a), self.slot_of(b));
        let pair = self.pair_index(sa, sb);
        self.by_pair[pair].push(id);
        self.bump(sa, sb, 1);
        self.by_end[a as usize].push(id);
        self.by_end[b as usize].push(id);
        for &v in &vs[1..vs.len() - 1] {
            self.by_inner[v as usize].push(id);
        }
    }

    #[inline]
    fn slot_of(&self, v: Vertex) -> usize {
        self.slot[v as usize].expect("path end is a candidate") as usize
    }

    #[inline]
    fn pair_index(&self, a: usize, b: usize) -> usize {
        let (i, j) = (a.min(b), a.max(b));
        debug_assert!(i < j);
        let nc = self.candidates.len();
        i * (2 * nc - i - 1) / 2 + (j - i - 1)
    }

    #[inline]
    fn bump(&mut self, a: usize, b: usize, delta: i32) {
        let nc = self.candidates.len();
        for idx in [a * nc + b, b * nc + a] {
            self.counts[idx] = (self.counts[idx] as i64 + delta as i64) as u32;
        }
    }

    pub fn min_len(&self) -> usize {
        self.l
    }

    pub fn max_len(&self) -> usize {
        self.h
    }

    pub fn candidates(&self) -> &[Vertex] {
        &self.candidates
    }

    pub fn is_candidate(&self, v: Vertex) -> bool {
        (v as usize) < self.slot.len() && self.slot[v as usize].is_some()
    }

    /// Total number of stored paths, dead or alive.
    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    pub fn alive_count(&self) -> usize {
        self.alive_total
    }

    pub fn is_alive(&self, id: PathId) -> bool {
        self.alive.get(id as usize).copied().unwrap_or(false)
    }

    /// Vertex sequence of a path, smaller end first.
    pub fn vertices(&self, id: PathId) -> &[Vertex] {
        let (s, e) = (self.offsets[id as usize], self.offsets[id as usize + 1]);
        &self.verts[s as usize..e as usize]
    }

    pub fn inner(&self, id: PathId) -> &[Vertex] {
        let vs = self.vertices(id);
        &vs[1..vs.len() - 1]
    }

    pub fn ends(&self, id: PathId) -> (Vertex, Vertex) {
        let vs = self.vertices(id);
        (vs[0], vs[vs.len() - 1])
    }

    pub fn path(&self, id: PathId) -> Path {
        Path::new(self.vertices(id).to_vec())
    }

    /// Number of alive paths between two candidates (the `R` entry).
    pub fn path_count(&self, u: Vertex, w: Vertex) -> Result<u32, PathError> {
        let su = self
            .slot
            .get(u as usize)
            .copied()
            .flatten()
            .ok_or(PathError::NotCandidate(u))?;
        let sw = self
            .slot
            .get(w as usize)
            .copied()
            .flatten()
            .ok_or(PathError::NotCandidate(w))?;
        Ok(self.counts[su as usize * self.candidates.len() + sw as usize])
    }

    /// Like [`path_count`](Self::path_count) but 0 for non-candidates.
    #[inline]
    pub fn count_between(&self, u: Vertex, w: Vertex) -> u32 {
        match (self.slot[u as usize], self.slot[w as usize]) {
            (Some(a), Some(b)) => self.counts[a as usize * self.candidates.len() + b as usize],
            _ => 0,
        }
    }

    /// All stored path ids between `u` and `w`, alive or not, ascending.
    pub fn pair_list(&self, u: Vertex, w: Vertex) -> &[PathId] {
        match (self.slot[u as usize], self.slot[w as usize]) {
            (Some(a), Some(b)) if a != b => &self.by_pair[self.pair_index(a as usize, b as usize)],
            _ => &[],
        }
    }

    pub fn alive_between(&self, u: Vertex, w: Vertex) -> impl Iterator<Item = PathId> + '_ {
        self.pair_list(u, w).iter().copied().filter(|&p| self.alive[p as usize])
    }

    /// Alive paths having `v` as one of their ends.
    pub fn alive_from(&self, v: Vertex) -> impl Iterator<Item = PathId> + '_ {
        self.by_end[v as usize]
            .iter()
            .copied()
            .filter(|&p| self.alive[p as usize])
    }

    /// All path ids with `v` as an end, alive or not.
    pub fn ending_at(&self, v: Vertex) -> &[PathId] {
        self.by_end.get(v as usize).map_or(&[], Vec::as_slice)
    }

    /// All path ids with `v` strictly inside, alive or not.
    pub fn through(&self, v: Vertex) -> &[PathId] {
        &self.by_inner[v as usize]
    }

    fn kill(&mut self, id: PathId, killed: &mut Vec<PathId>) {
        if !self.alive[id as usize] {
            return;
        }
        self.alive[id as usize] = false;
        self.alive_total -= 1;
        let (a, b) = self.ends(id);
        let (sa, sb) = (self.slot_of(a), self.slot_of(b));
        self.bump(sa, sb, -1);
        killed.push(id);
    }

    fn issue(&mut self, killed: Vec<PathId>) -> UndoToken {
        self.open_tokens += 1;
        #[cfg(debug_assertions)]
        self.check_invariants();
        UndoToken {
            seq: self.open_tokens,
            killed,
        }
    }

    /// Kills every alive path with `v` as an inner vertex. Paths ending at
    /// `v` are untouched.
    pub fn remove_paths_through_vertex(&mut self, v: Vertex) -> UndoToken {
        let mut killed = Vec::new();
        if (v as usize) < self.by_inner.len() {
            let ids = std::mem::take(&mut self.by_inner[v as usize]);
            for &id in &ids {
                self.kill(id, &mut killed);
            }
            self.by_inner[v as usize] = ids;
        }
        self.issue(killed)
    }

    /// Kills every alive path other than `p` that touches an inner vertex
    /// of `p`, whether as its own inner vertex or as an end.
    pub fn remove_paths_conflicting_with(&mut self, p: PathId) -> Result<UndoToken, PathError> {
        if !self.is_alive(p) {
            return Err(PathError::NotAlive(p));
        }
        let mut killed = Vec::new();
        let victims: Vec<PathId> = self
            .inner(p)
            .iter()
            .flat_map(|&x| self.by_inner[x as usize].iter().chain(&self.by_end[x as usize]))
            .copied()
            .filter(|&q| q != p)
            .collect();
        for q in victims {
            self.kill(q, &mut killed);
        }
        Ok(self.issue(killed))
    }

    /// Kills the given paths (already-dead ones are skipped).
    pub fn remove_paths(&mut self, ids: impl IntoIterator<Item = PathId>) -> UndoToken {
        let mut killed = Vec::new();
        for id in ids {
            self.kill(id, &mut killed);
        }
        self.issue(killed)
    }

    /// Revives the paths killed by `token`. Tokens must be returned in
    /// reverse order of issue.
    pub fn undo(&mut self, token: UndoToken) {
        assert_eq!(token.seq, self.open_tokens, "undo tokens must be applied in LIFO order");
        self.open_tokens -= 1;
        for &id in token.killed.iter().rev() {
            self.alive[id as usize] = true;
            self.alive_total += 1;
            let (a, b) = self.ends(id);
            let (sa, sb) = (self.slot_of(a), self.slot_of(b));
            self.bump(sa, sb, 1);
        }
        #[cfg(debug_assertions)]
        self.check_invariants();
    }

    /// Alive flags, for exact-restoration checks.
    pub fn alive_flags(&self) -> &[bool] {
        &self.alive
    }

    /// Panics if the count matrix disagrees with the alive pair lists.
    pub fn check_invariants(&self) {
        let nc = self.candidates.len();
        // quadratic in candidates; skip for big stores
        if nc > 200 {
            return;
        }
        for i in 0..nc {
            assert_eq!(self.counts[i * nc + i], 0, "nonzero diagonal");
            for j in i + 1..nc {
                let alive = self.by_pair[self.pair_index(i, j)]
                    .iter()
                    .filter(|&&p| self.alive[p as usize])
                    .count() as u32;
                assert_eq!(self.counts[i * nc + j], alive, "R/RList mismatch");
                assert_eq!(self.counts[j * nc + i], alive, "R not symmetric");
            }
        }
    }

    /// One line per path, `p <id> <v1> ... <vk>`, ascending id.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for id in 0..self.len() as PathId {
            let _ = write!(out, "p {id}");
            for v in self.vertices(id) {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::generate::complete_graph;

    fn fixture_store(l: usize, h: usize) -> PathStore {
        let (g1, g2) = fixture::running_example();
        let m0 = CompatibleMatrix::initial(&g1, &g2);
        PathStore::enumerate(&g2, &candidate_branch_nodes(&m0), l, h)
    }

    fn alive_paths_between(s: &PathStore, u: Vertex, w: Vertex) -> Vec<Vec<Vertex>> {
        s.alive_between(u, w).map(|p| s.vertices(p).to_vec()).collect()
    }

    #[test]
    fn fixture_candidates() {
        let (g1, g2) = fixture::running_example();
        let m0 = CompatibleMatrix::initial(&g1, &g2);
        assert_eq!(candidate_branch_nodes(&m0), vec![1, 2, 3, 4, 6, 7, 8]);
    }

    #[test]
    fn degenerate_candidate_sets() {
        assert!(candidate_branch_nodes(&CompatibleMatrix::zeros(2, 4)).is_empty());
        let mut m = CompatibleMatrix::zeros(1, 3);
        for dv in 1..=3 {
            m.set(1, dv);
        }
        assert_eq!(candidate_branch_nodes(&m), vec![1, 2, 3]);
    }

    #[test]
    fn fixture_paths_between_2_and_8() {
        let s = fixture_store(2, 2);
        assert_eq!(alive_paths_between(&s, 2, 8), vec![vec![2, 1, 8], vec![2, 9, 8]]);
        assert_eq!(s.path_count(2, 8), Ok(2));
        assert_eq!(s.path_count(8, 2), Ok(2));
    }

    #[test]
    fn triangle_edges() {
        let g = complete_graph(3);
        let s = PathStore::enumerate(&g, &[1, 2, 3], 1, 1);
        assert_eq!(s.len(), 3);
        assert_eq!(s.dump(), "p 0 1 2\np 1 1 3\np 2 2 3\n");
    }

    #[test]
    fn non_candidate_queries() {
        let s = fixture_store(2, 2);
        assert_eq!(s.path_count(5, 2), Err(PathError::NotCandidate(5)));
        assert_eq!(s.path_count(2, 99), Err(PathError::NotCandidate(99)));
        assert_eq!(s.path_count(1, 4), Ok(0));
    }

    #[test]
    fn inner_non_candidates_are_kept() {
        // 6-5-4 runs through the non-candidate vertex 5
        let s = fixture_store(2, 2);
        assert_eq!(alive_paths_between(&s, 4, 6), vec![vec![4, 5, 6]]);
    }

    #[test]
    fn remove_through_8_after_matching() {
        let mut s = fixture_store(2, 2);
        let before_26 = s.path_count(2, 6).unwrap();
        let expect: Vec<PathId> = (0..s.len() as PathId).filter(|&p| s.inner(p).contains(&8)).collect();
        let token = s.remove_paths_through_vertex(8);
        assert_eq!(token.killed(), expect.as_slice());
        assert_eq!(s.path_count(2, 6).unwrap(), before_26);
        for p in 0..s.len() as PathId {
            assert_eq!(s.is_alive(p), !s.inner(p).contains(&8));
        }
        s.undo(token);
        assert!(s.alive_flags().iter().all(|&a| a));
    }

    #[test]
    fn untouched_vertex_removal_is_noop() {
        let mut s = fixture_store(1, 1);
        let counts = s.counts.clone();
        let token = s.remove_paths_through_vertex(2);
        assert!(token.killed().is_empty());
        assert_eq!(s.counts, counts);
        s.undo(token);
    }

    #[test]
    fn commit_296_kills_298() {
        let mut s = fixture_store(2, 2);
        let p296 = s.alive_between(2, 6).find(|&p| s.vertices(p) == [2, 9, 6]).unwrap();
        let token = s.remove_paths_conflicting_with(p296).unwrap();
        assert!(s.is_alive(p296));
        assert_eq!(alive_paths_between(&s, 2, 8), vec![vec![2, 1, 8]]);
        s.undo(token);
        assert_eq!(s.path_count(2, 8), Ok(2));
    }

    #[test]
    fn edge_paths_conflict_with_nothing() {
        let g = complete_graph(4);
        let mut s = PathStore::enumerate(&g, &[1, 2, 3, 4], 1, 2);
        let edge = s.alive_between(1, 2).find(|&p| s.vertices(p).len() == 2).unwrap();
        let token = s.remove_paths_conflicting_with(edge).unwrap();
        assert!(token.killed().is_empty());
        s.undo(token);
    }

    #[test]
    fn conflict_on_dead_path_is_an_error() {
        let mut s = fixture_store(2, 2);
        let t = s.remove_paths_through_vertex(9);
        let dead = s.through(9)[0];
        assert_eq!(
            s.remove_paths_conflicting_with(dead).unwrap_err(),
            PathError::NotAlive(dead)
        );
        s.undo(t);
    }

    #[test]
    #[should_panic(expected = "LIFO")]
    fn out_of_order_undo_panics() {
        let mut s = fixture_store(2, 2);
        let a = s.remove_paths_through_vertex(9);
        let _b = s.remove_paths_through_vertex(1);
        s.undo(a);
    }
}
