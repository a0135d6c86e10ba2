//! Decide whether a vertex-labeled pattern graph is an `(l, h)`-topological
//! minor of a data graph: find an injective label-preserving node map plus
//! pairwise independent data paths, of length between `l` and `h`, for every
//! pattern edge.
//!
//! ```
//! use homeomatch::{fixture, search};
//!
//! let (pattern, data) = fixture::running_example();
//! let found = search::ndshd2(&pattern, &data, 2, 2).unwrap();
//! assert!(found.is_some());
//! assert!(search::ndshd2(&pattern, &data, 3, 3).unwrap().is_none());
//! ```

pub mod bench;
pub mod fixture;
pub mod generate;
pub mod graph;
pub mod mapping;
pub mod matrix;
pub mod oracle;
pub mod paths;
pub mod search;
pub mod stats;

pub use graph::{parse_graph, LabeledGraph, Path, Vertex};
pub use mapping::{parse_mapping, Mapping};
pub use matrix::CompatibleMatrix;
pub use paths::{PathId, PathStore};
pub use search::{determine, enumerate_all, ndshd1, ndshd2, SearchConfig, Strategy};
