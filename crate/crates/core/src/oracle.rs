//! Brute-force ground truth.
//!
//! Nothing here uses the compatible matrix, the path store or any pruning
//! rule: node maps are enumerated lexicographically with only label and
//! injectivity filtering, and every candidate assignment is checked clause
//! by clause against the definition of a node-disjoint homeomorphism.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{LabeledGraph, Path, Vertex};
use crate::mapping::Mapping;

pub const MAX_PATTERN_VERTICES: usize = 6;
pub const MAX_DATA_VERTICES: usize = 14;
pub const MAX_PATH_LENGTH: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("mapping is structurally incomplete: {0}")]
    Incomplete(String),
    #[error("instance too large for brute force (n1 <= {MAX_PATTERN_VERTICES}, n2 <= {MAX_DATA_VERTICES}, h <= {MAX_PATH_LENGTH}): {0}")]
    TooLarge(String),
    #[error("invalid path length window [{l}, {h}]")]
    InvalidWindow { l: usize, h: usize },
}

/// The first clause of the definition a mapping violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownDataVertex {
        pattern: Vertex,
        image: Vertex,
    },
    Injectivity {
        a: Vertex,
        b: Vertex,
        image: Vertex,
    },
    Label {
        pattern: Vertex,
        image: Vertex,
    },
    NotSimplePath {
        edge: (Vertex, Vertex),
    },
    WrongEnds {
        edge: (Vertex, Vertex),
    },
    Length {
        edge: (Vertex, Vertex),
        length: usize,
    },
    SharedInnerVertex {
        first: (Vertex, Vertex),
        second: (Vertex, Vertex),
        vertex: Vertex,
    },
    BranchNodeInside {
        pattern: Vertex,
        edge: (Vertex, Vertex),
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownDataVertex { pattern, image } => {
                write!(f, "pattern vertex {pattern} maps to unknown data vertex {image}")
            }
            Violation::Injectivity { a, b, image } => {
                write!(
                    f,
                    "injectivity violated: pattern vertices {a} and {b} both map to {image}"
                )
            }
            Violation::Label { pattern, image } => {
                write!(f, "label mismatch: pattern vertex {pattern} vs data vertex {image}")
            }
            Violation::NotSimplePath { edge: (a, b) } => {
                write!(f, "image of edge {a}-{b} is not a simple path of the data graph")
            }
            Violation::WrongEnds { edge: (a, b) } => {
                write!(f, "image of edge {a}-{b} does not end at the images of {a} and {b}")
            }
            Violation::Length { edge: (a, b), length } => {
                write!(f, "image of edge {a}-{b} has length {length} outside the window")
            }
            Violation::SharedInnerVertex { first, second, vertex } => write!(
                f,
                "independence violated: paths for {}-{} and {}-{} share inner vertex {vertex}",
                first.0, first.1, second.0, second.1
            ),
            Violation::BranchNodeInside { pattern, edge: (a, b) } => write!(
                f,
                "independence violated: image of pattern vertex {pattern} lies inside the path for {a}-{b}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks `m` against the definition: injective label-preserving node map,
/// every edge image a simple path with the right ends and length in
/// `[l, h]`, and all edge images pairwise independent. Branch nodes may not
/// sit inside any edge image.
pub fn verify_mapping(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    l: usize,
    h: usize,
    m: &Mapping,
) -> Result<Verdict, OracleError> {
    if m.node_map.len() != g1.vertex_count() {
        return Err(OracleError::Incomplete(format!(
            "{} node images for {} pattern vertices",
            m.node_map.len(),
            g1.vertex_count()
        )));
    }
    if m.edge_paths.len() != g1.edge_count() {
        return Err(OracleError::Incomplete(format!(
            "{} edge images for {} pattern edges",
            m.edge_paths.len(),
            g1.edge_count()
        )));
    }
    Ok(match first_violation(g1, g2, l, h, m) {
        None => Verdict::Valid,
        Some(v) => Verdict::Invalid(v),
    })
}

fn first_violation(g1: &LabeledGraph, g2: &LabeledGraph, l: usize, h: usize, m: &Mapping) -> Option<Violation> {
    let f = |v: Vertex| m.node_map[v as usize - 1];

    for a in g1.vertices() {
        if !g2.contains(f(a)) {
            return Some(Violation::UnknownDataVertex {
                pattern: a,
                image: f(a),
            });
        }
    }
    for a in g1.vertices() {
        for b in a + 1..=g1.vertex_count() as Vertex {
            if f(a) == f(b) {
                return Some(Violation::Injectivity { a, b, image: f(a) });
            }
        }
    }
    for a in g1.vertices() {
        if g1.label(a) != g2.label(f(a)) {
            return Some(Violation::Label {
                pattern: a,
                image: f(a),
            });
        }
    }

    let edges = g1.edges();
    for (&edge, p) in edges.iter().zip(&m.edge_paths) {
        if !p.is_simple_path_in(g2) {
            return Some(Violation::NotSimplePath { edge });
        }
        let ends = (p.first(), p.last());
        let (fa, fb) = (f(edge.0), f(edge.1));
        if ends != (fa, fb) && ends != (fb, fa) {
            return Some(Violation::WrongEnds { edge });
        }
        if p.len() < l || p.len() > h {
            return Some(Violation::Length { edge, length: p.len() });
        }
    }

    for i in 0..edges.len() {
        for j in 0..edges.len() {
            if i == j {
                continue;
            }
            let other = &m.edge_paths[j];
            if let Some(&x) = m.edge_paths[i].inner().iter().find(|x| other.vertices().contains(x)) {
                let (first, second) = if i < j {
                    (edges[i], edges[j])
                } else {
                    (edges[j], edges[i])
                };
                return Some(Violation::SharedInnerVertex {
                    first,
                    second,
                    vertex: x,
                });
            }
        }
    }

    for a in g1.vertices() {
        for (&edge, p) in edges.iter().zip(&m.edge_paths) {
            if p.inner().contains(&f(a)) {
                return Some(Violation::BranchNodeInside { pattern: a, edge });
            }
        }
    }
    None
}

fn check_guard(g1: &LabeledGraph, g2: &LabeledGraph, l: usize, h: usize) -> Result<(), OracleError> {
    if l == 0 || l > h {
        return Err(OracleError::InvalidWindow { l, h });
    }
    if g1.vertex_count() > MAX_PATTERN_VERTICES || g2.vertex_count() > MAX_DATA_VERTICES || h > MAX_PATH_LENGTH {
        return Err(OracleError::TooLarge(format!(
            "n1 = {}, n2 = {}, h = {h}",
            g1.vertex_count(),
            g2.vertex_count()
        )));
    }
    Ok(())
}

/// Every node-disjoint `(l, h)` homeomorphism from `g1` into `g2`, sorted.
pub fn brute_force_solve(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    l: usize,
    h: usize,
) -> Result<Vec<Mapping>, OracleError> {
    brute_force_search(g1, g2, l, h, None)
}

/// Whether any homeomorphism exists; stops at the first one found.
pub fn brute_force_exists(g1: &LabeledGraph, g2: &LabeledGraph, l: usize, h: usize) -> Result<bool, OracleError> {
    Ok(!brute_force_search(g1, g2, l, h, Some(1))?.is_empty())
}

fn brute_force_search(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    l: usize,
    h: usize,
    limit: Option<usize>,
) -> Result<Vec<Mapping>, OracleError> {
    check_guard(g1, g2, l, h)?;
    let mut solver = Brute {
        g1,
        g2,
        l,
        h,
        limit,
        path_cache: BTreeMap::new(),
        found: Vec::new(),
    };
    let mut images = Vec::with_capacity(g1.vertex_count());
    solver.node_maps(&mut images);
    let mut found = solver.found;
    found.sort();
    Ok(found)
}

struct Brute<'a> {
    g1: &'a LabeledGraph,
    g2: &'a LabeledGraph,
    l: usize,
    h: usize,
    limit: Option<usize>,
    path_cache: BTreeMap<(Vertex, Vertex), Vec<Path>>,
    found: Vec<Mapping>,
}

impl Brute<'_> {
    fn done(&self) -> bool {
        self.limit.is_some_and(|k| self.found.len() >= k)
    }

    fn node_maps(&mut self, images: &mut Vec<Vertex>) {
        if self.done() {
            return;
        }
        if images.len() == self.g1.vertex_count() {
            self.edge_maps(images);
            return;
        }
        let pv = images.len() as Vertex + 1;
        for dv in self.g2.vertices() {
            if !images.contains(&dv) && self.g2.label(dv) == self.g1.label(pv) {
                images.push(dv);
                self.node_maps(images);
                images.pop();
            }
        }
    }

    fn edge_maps(&mut self, images: &[Vertex]) {
        let mut choices = Vec::new();
        for &(a, b) in self.g1.edges() {
            let key = (images[a as usize - 1], images[b as usize - 1]);
            let (g2, l, h) = (self.g2, self.l, self.h);
            let paths = self
                .path_cache
                .entry(key)
                .or_insert_with(|| simple_paths(g2, key.0, key.1, l, h))
                .clone();
            if paths.is_empty() {
                return;
            }
            choices.push(paths);
        }
        let mut chosen = Vec::with_capacity(choices.len());
        self.assign(images, &choices, &mut chosen);
    }

    fn assign(&mut self, images: &[Vertex], choices: &[Vec<Path>], chosen: &mut Vec<Path>) {
        if self.done() {
            return;
        }
        if chosen.len() == choices.len() {
            let m = Mapping {
                node_map: images.to_vec(),
                edge_paths: chosen.clone(),
            };
            if verify_mapping(self.g1, self.g2, self.l, self.h, &m) == Ok(Verdict::Valid) {
                self.found.push(m);
            }
            return;
        }
        for p in &choices[chosen.len()] {
            if chosen.iter().all(|q| independent(p, q)) {
                chosen.push(p.clone());
                self.assign(images, choices, chosen);
                chosen.pop();
            }
        }
    }
}

fn independent(p: &Path, q: &Path) -> bool {
    !p.inner().iter().any(|x| q.vertices().contains(x)) && !q.inner().iter().any(|x| p.vertices().contains(x))
}

/// Simple paths from `s` to `t` with length in `[l, h]`, by plain DFS.
pub fn simple_paths(g: &LabeledGraph, s: Vertex, t: Vertex, l: usize, h: usize) -> Vec<Path> {
    fn walk(g: &LabeledGraph, t: Vertex, l: usize, h: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Path>) {
        let last = *cur.last().unwrap();
        if last == t {
            if cur.len() > l {
                out.push(Path::new(cur.clone()));
            }
            return;
        }
        if cur.len() - 1 == h {
            return;
        }
        for &w in g.neighbors(last) {
            if !cur.contains(&w) {
                cur.push(w);
                walk(g, t, l, h, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if s != t {
        walk(g, t, l, h, &mut vec![s], &mut out);
    }
    out
}

/// Every simple path of length in `[l, h]` between two distinct vertices of
/// `allowed_ends`, as vertex sequences starting at the smaller end.
pub fn all_bounded_paths(
    g: &LabeledGraph,
    allowed_ends: &BTreeSet<Vertex>,
    l: usize,
    h: usize,
) -> BTreeSet<Vec<Vertex>> {
    let mut out = BTreeSet::new();
    for &s in allowed_ends {
        for &t in allowed_ends {
            if s < t {
                out.extend(simple_paths(g, s, t, l, h).into_iter().map(|p| p.0));
            }
        }
    }
    out
}
