//! Vertex-labeled simple undirected graphs and their text format.
//!
//! Vertices are dense 1-based ids. The text format is line oriented:
//!
//! ```text
//! # comment
//! n 3 m 2
//! v 1 A
//! v 2 B
//! v 3 A
//! e 1 2
//! e 2 3
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Dense 1-based vertex id.
pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed header, expected `n <vertex_count> m <edge_count>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed record `{text}`")]
    MalformedRecord { line: usize, text: String },
    #[error("line {line}: vertex {id} is outside 1..={count}")]
    VertexOutOfRange { line: usize, id: Vertex, count: usize },
    #[error("line {line}: duplicate declaration of vertex {id}")]
    DuplicateVertex { line: usize, id: Vertex },
    #[error("line {line}: edge references undeclared vertex {id}")]
    UnknownVertex { line: usize, id: Vertex },
    #[error("line {line}: self-loop on vertex {id}")]
    SelfLoop { line: usize, id: Vertex },
    #[error("line {line}: duplicate edge {u}-{w}")]
    DuplicateEdge { line: usize, u: Vertex, w: Vertex },
    #[error("declared {declared} {what} but found {found}")]
    CountMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("empty input")]
    Empty,
    #[error("invalid vertex id {0}")]
    InvalidVertex(Vertex),
    #[error("edge {u}-{w} is invalid: {reason}")]
    InvalidEdge { u: Vertex, w: Vertex, reason: &'static str },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
}

/// An undirected, vertex-labeled simple graph.
///
/// Immutable after construction. Neighbor lists are sorted ascending and the
/// edge list is sorted lexicographically by `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    labels: Vec<String>,
    adj: Vec<Vec<Vertex>>,
    edges: Vec<(Vertex, Vertex)>,
}

impl LabeledGraph {
    /// Builds a graph from per-vertex labels (vertex `i + 1` gets `labels[i]`)
    /// and an edge list. Rejects self-loops, duplicate edges and unknown ids.
    pub fn new<I>(labels: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let n = labels.len();
        let mut set = BTreeSet::new();
        for (u, w) in edges {
            if u == 0 || w == 0 || u as usize > n || w as usize > n {
                return Err(GraphError::InvalidEdge {
                    u,
                    w,
                    reason: "unknown vertex",
                });
            }
            if u == w {
                return Err(GraphError::InvalidEdge {
                    u,
                    w,
                    reason: "self-loop",
                });
            }
            if !set.insert((u.min(w), u.max(w))) {
                return Err(GraphError::InvalidEdge {
                    u,
                    w,
                    reason: "duplicate edge",
                });
            }
        }
        Ok(Self::from_edge_set(labels, set))
    }

    fn from_edge_set(labels: Vec<String>, set: BTreeSet<(Vertex, Vertex)>) -> Self {
        let mut adj = vec![Vec::new(); labels.len()];
        for &(u, w) in &set {
            adj[u as usize - 1].push(w);
            adj[w as usize - 1].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        LabeledGraph {
            labels,
            adj,
            edges: set.into_iter().collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<Vertex> {
        1..=self.labels.len() as Vertex
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v >= 1 && v as usize <= self.labels.len()
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Position of the edge `{u, w}` in [`edges`](Self::edges).
    pub fn edge_index(&self, u: Vertex, w: Vertex) -> Option<usize> {
        self.edges.binary_search(&(u.min(w), u.max(w))).ok()
    }

    /// Label of `v`. Panics if `v` is not a vertex.
    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v as usize - 1]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Sorted neighbors of `v`. Panics if `v` is not a vertex.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize - 1]
    }

    pub fn degree(&self, v: Vertex) -> Result<usize, GraphError> {
        if !self.contains(v) {
            return Err(GraphError::InvalidVertex(v));
        }
        Ok(self.adj[v as usize - 1].len())
    }

    pub fn has_edge(&self, u: Vertex, w: Vertex) -> bool {
        self.contains(u) && self.contains(w) && self.neighbors(u).binary_search(&w).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![1 as Vertex];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize - 1] {
                    seen[w as usize - 1] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Serializes into the text format. Output is canonical: vertices in
    /// ascending id order, edges in lexicographic order.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {} m {}", self.vertex_count(), self.edge_count())?;
        for v in self.vertices() {
            writeln!(f, "v {} {}", v, self.label(v))?;
        }
        for &(u, w) in &self.edges {
            writeln!(f, "e {u} {w}")?;
        }
        Ok(())
    }
}

impl FromStr for LabeledGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_graph(s)
    }
}

/// Parses the line-oriented graph format.
pub fn parse_graph(text: &str) -> Result<LabeledGraph, GraphError> {
    let mut records = text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    });

    let (header_line, header) = records.next().ok_or(GraphError::Empty)?;
    let (n, m) = parse_header(header).ok_or(GraphError::MalformedHeader { line: header_line })?;

    let mut labels: Vec<Option<String>> = vec![None; n];
    let mut edges = BTreeSet::new();
    let mut vertex_lines = 0;

    for (line, text) in records {
        let mut fields = text.split_whitespace();
        let malformed = || GraphError::MalformedRecord {
            line,
            text: text.to_string(),
        };
        match fields.next() {
            Some("v") => {
                let id: Vertex = fields.next().and_then(|s| s.parse().ok()).ok_or_else(malformed)?;
                let label = fields.next().ok_or_else(malformed)?;
                if fields.next().is_some() {
                    return Err(malformed());
                }
                if id == 0 || id as usize > n {
                    return Err(GraphError::VertexOutOfRange { line, id, count: n });
                }
                let slot = &mut labels[id as usize - 1];
                if slot.is_some() {
                    return Err(GraphError::DuplicateVertex { line, id });
                }
                *slot = Some(label.to_string());
                vertex_lines += 1;
            }
            Some("e") => {
                let u: Vertex = fields.next().and_then(|s| s.parse().ok()).ok_or_else(malformed)?;
                let w: Vertex = fields.next().and_then(|s| s.parse().ok()).ok_or_else(malformed)?;
                if fields.next().is_some() {
                    return Err(malformed());
                }
                for id in [u, w] {
                    if id == 0 || id as usize > n || labels[id as usize - 1].is_none() {
                        return Err(GraphError::UnknownVertex { line, id });
                    }
                }
                if u == w {
                    return Err(GraphError::SelfLoop { line, id: u });
                }
                if !edges.insert((u.min(w), u.max(w))) {
                    return Err(GraphError::DuplicateEdge { line, u, w });
                }
            }
            _ => return Err(malformed()),
        }
    }

    if vertex_lines != n {
        return Err(GraphError::CountMismatch {
            what: "vertices",
            declared: n,
            found: vertex_lines,
        });
    }
    if edges.len() != m {
        return Err(GraphError::CountMismatch {
            what: "edges",
            declared: m,
            found: edges.len(),
        });
    }
    let labels = labels.into_iter().map(Option::unwrap).collect();
    Ok(LabeledGraph::from_edge_set(labels, edges))
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields.as_slice() {
        ["n", n, "m", m] => Some((n.parse().ok()?, m.parse().ok()?)),
        _ => None,
    }
}

/// A walk through a host graph given as its vertex sequence.
///
/// `Path` itself does not know its host graph; [`Path::is_simple_path_in`]
/// checks adjacency and distinctness against one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<Vertex>);

impl Path {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        Path(vertices)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Vertex {
        self.0[0]
    }

    pub fn last(&self) -> Vertex {
        self.0[self.0.len() - 1]
    }

    /// The vertices strictly between the two ends.
    pub fn inner(&self) -> &[Vertex] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    pub fn is_simple_path_in(&self, g: &LabeledGraph) -> bool {
        if self.0.len() < 2 || !self.0.iter().all(|&v| g.contains(v)) {
            return false;
        }
        let distinct: BTreeSet<_> = self.0.iter().collect();
        distinct.len() == self.0.len() && self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> LabeledGraph {
        let labels = ["A", "B", "C", "D"].map(String::from).to_vec();
        LabeledGraph::new(labels, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn smallest_graph() {
        let g = parse_graph("n 2 m 1\nv 1 A\nv 2 B\ne 1 2\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.label(2), "B");
    }

    #[test]
    fn comments_blank_lines_and_any_vertex_order() {
        let g = parse_graph("# hi\n\nn 3 m 1\nv 3 C\n  v 1 A\n# mid\nv 2 B\ne 3 1\n").unwrap();
        assert_eq!(g.edges(), &[(1, 3)]);
        assert_eq!(g.label(3), "C");
    }

    #[test]
    fn rejects_self_loop() {
        let err = parse_graph("n 1 m 1\nv 1 A\ne 1 1\n").unwrap_err();
        assert_eq!(err, GraphError::SelfLoop { line: 3, id: 1 });
    }

    #[test]
    fn rejects_bad_inputs_with_line_numbers() {
        assert_eq!(
            parse_graph("n x m 1\n").unwrap_err(),
            GraphError::MalformedHeader { line: 1 }
        );
        assert_eq!(
            parse_graph("n 2 m 1\nv 1 A\nv 2 B\ne 1 3\n").unwrap_err(),
            GraphError::UnknownVertex { line: 4, id: 3 }
        );
        assert_eq!(
            parse_graph("n 2 m 0\nv 1 A\nv 1 B\n").unwrap_err(),
            GraphError::DuplicateVertex { line: 3, id: 1 }
        );
        assert_eq!(
            parse_graph("n 2 m 2\nv 1 A\nv 2 B\ne 1 2\ne 2 1\n").unwrap_err(),
            GraphError::DuplicateEdge { line: 5, u: 2, w: 1 }
        );
        assert!(matches!(
            parse_graph("n 2 m 0\nv 1 A\n").unwrap_err(),
            GraphError::CountMismatch { what: "vertices", .. }
        ));
        assert!(matches!(
            parse_graph("n 2 m 2\nv 1 A\nv 2 B\ne 1 2\n").unwrap_err(),
            GraphError::CountMismatch { what: "edges", .. }
        ));
        assert!(matches!(
            parse_graph("n 1 m 0\nv 1 A extra\n").unwrap_err(),
            GraphError::MalformedRecord { line: 2, .. }
        ));
        assert_eq!(parse_graph("# only\n").unwrap_err(), GraphError::Empty);
    }

    #[test]
    fn degrees() {
        let g = parse_graph("n 2 m 0\nv 1 A\nv 2 A\n").unwrap();
        assert_eq!(g.degree(1), Ok(0));
        assert_eq!(k4().degree(1), Ok(3));
        assert_eq!(k4().degree(5), Err(GraphError::InvalidVertex(5)));
        assert_eq!(k4().degree(0), Err(GraphError::InvalidVertex(0)));
    }

    #[test]
    fn serialization_is_canonical() {
        let g = parse_graph("n 3 m 2\nv 2 B\nv 3 C\nv 1 A\ne 3 2\ne 2 1\n").unwrap();
        assert_eq!(g.to_text(), "n 3 m 2\nv 1 A\nv 2 B\nv 3 C\ne 1 2\ne 2 3\n");
    }

    #[test]
    fn path_accessors() {
        let g = k4();
        let p = Path::new(vec![2, 1, 3]);
        assert_eq!(p.len(), 2);
        assert_eq!(p.inner(), &[1]);
        assert!(p.is_simple_path_in(&g));
        assert!(!Path::new(vec![2, 1, 2]).is_simple_path_in(&g));
        assert!(Path::new(vec![1, 2]).inner().is_empty());
        assert_eq!(p.reversed().vertices(), &[3, 1, 2]);
    }
}
