//! Complete homeomorphism witnesses and their text format.
//!
//! ```text
//! n <pattern_v> <data_v>
//! p <pattern_u> <pattern_w> : <v1> <v2> ... <vk>
//! ```

use std::fmt;

use thiserror::Error;

use crate::graph::{LabeledGraph, Path, Vertex};

/// A node map `f` plus an edge-to-path map `g`.
///
/// `node_map[v - 1]` is the image of pattern vertex `v`; `edge_paths[i]` is
/// the image of the `i`-th pattern edge `(a, b)` (in the pattern's edge
/// order), running from `f(a)` to `f(b)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mapping {
    pub node_map: Vec<Vertex>,
    pub edge_paths: Vec<Path>,
}

impl Mapping {
    pub fn image(&self, pv: Vertex) -> Vertex {
        self.node_map[pv as usize - 1]
    }

    /// Renders in the mapping file format using `pattern` for edge names.
    pub fn to_text(&self, pattern: &LabeledGraph) -> String {
        MappingDisplay { mapping: self, pattern }.to_string()
    }
}

struct MappingDisplay<'a> {
    mapping: &'a Mapping,
    pattern: &'a LabeledGraph,
}

impl fmt::Display for MappingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, dv) in self.mapping.node_map.iter().enumerate() {
            writeln!(f, "n {} {}", i + 1, dv)?;
        }
        for (&(a, b), path) in self.pattern.edges().iter().zip(&self.mapping.edge_paths) {
            writeln!(f, "p {a} {b} : {path}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MappingError {
    #[error("line {line}: malformed record `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: {pv} is not a pattern vertex")]
    UnknownVertex { line: usize, pv: Vertex },
    #[error("line {line}: {u}-{w} is not a pattern edge")]
    UnknownEdge { line: usize, u: Vertex, w: Vertex },
    #[error("line {line}: pattern vertex {pv} mapped twice")]
    DuplicateVertex { line: usize, pv: Vertex },
    #[error("line {line}: pattern edge {u}-{w} mapped twice")]
    DuplicateEdge { line: usize, u: Vertex, w: Vertex },
    #[error("incomplete mapping: {0}")]
    Incomplete(String),
}

/// Parses a mapping file against its pattern graph. Every pattern vertex
/// and edge must be mapped exactly once. Paths given from `f(b)` to `f(a)`
/// are reoriented.
pub fn parse_mapping(text: &str, pattern: &LabeledGraph) -> Result<Mapping, MappingError> {
    let mut nodes: Vec<Option<Vertex>> = vec![None; pattern.vertex_count()];
    let mut paths: Vec<Option<Path>> = vec![None; pattern.edge_count()];

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let malformed = || MappingError::Malformed {
            line,
            text: body.to_string(),
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| s.parse::<Vertex>().map_err(|_| malformed());
        match fields.as_slice() {
            ["n", pv, dv] => {
                let (pv, dv) = (num(pv)?, num(dv)?);
                if !pattern.contains(pv) {
                    return Err(MappingError::UnknownVertex { line, pv });
                }
                let slot = &mut nodes[pv as usize - 1];
                if slot.is_some() {
                    return Err(MappingError::DuplicateVertex { line, pv });
                }
                *slot = Some(dv);
            }
            ["p", u, w, ":", rest @ ..] if !rest.is_empty() => {
                let (u, w) = (num(u)?, num(w)?);
                let idx = pattern
                    .edge_index(u, w)
                    .filter(|_| u != w)
                    .ok_or(MappingError::UnknownEdge { line, u, w })?;
                let vs = rest.iter().map(|s| num(s)).collect::<Result<Vec<_>, _>>()?;
                if paths[idx].is_some() {
                    return Err(MappingError::DuplicateEdge { line, u, w });
                }
                let path = Path::new(vs);
                paths[idx] = Some(if u > w { path.reversed() } else { path });
            }
            _ => return Err(malformed()),
        }
    }

    let node_map = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| n.ok_or_else(|| MappingError::Incomplete(format!("pattern vertex {} unmapped", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    let edge_paths = paths
        .into_iter()
        .zip(pattern.edges())
        .map(|(p, &(a, b))| {
            let p = p.ok_or_else(|| MappingError::Incomplete(format!("pattern edge {a}-{b} unmapped")))?;
            let (fa, fb) = (node_map[a as usize - 1], node_map[b as usize - 1]);
            Ok(if !p.is_empty() && p.first() == fb && p.last() == fa {
                p.reversed()
            } else {
                p
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Mapping { node_map, edge_paths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    #[test]
    fn fixture_mapping_round_trips() {
        let (g1, _) = fixture::running_example();
        let m = fixture::known_mapping();
        assert_eq!(m.node_map, vec![2, 8, 6, 4]);
        assert_eq!(m.edge_paths[3].vertices(), &[8, 7, 6]);
        assert_eq!(parse_mapping(&m.to_text(&g1), &g1), Ok(m));
    }

    #[test]
    fn reorients_reversed_paths() {
        let (g1, _) = fixture::running_example();
        let text = fixture::MAPPING_L2H2.replace("p 2 3 : 8 7 6", "p 3 2 : 6 7 8");
        assert_eq!(parse_mapping(&text, &g1), Ok(fixture::known_mapping()));
    }

    #[test]
    fn truncated_file_is_incomplete() {
        let (g1, _) = fixture::running_example();
        let text: String = fixture::MAPPING_L2H2.lines().take(6).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_mapping(&text, &g1), Err(MappingError::Incomplete(_))));
    }

    #[test]
    fn rejects_unknown_and_duplicate_records() {
        let (g1, _) = fixture::running_example();
        assert!(matches!(
            parse_mapping("n 9 1\n", &g1),
            Err(MappingError::UnknownVertex { pv: 9, .. })
        ));
        assert!(matches!(
            parse_mapping("p 2 4 : 1 2\n", &g1),
            Err(MappingError::UnknownEdge { .. })
        ));
        assert!(matches!(
            parse_mapping("n 1 2\nn 1 3\n", &g1),
            Err(MappingError::DuplicateVertex { .. })
        ));
        assert!(matches!(
            parse_mapping("p 1 2 :\n", &g1),
            Err(MappingError::Malformed { line: 1, .. })
        ));
    }
}
