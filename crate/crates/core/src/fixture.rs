//! The small running-example instance shipped under `fixtures/`.
//!
//! With path lengths in `[2, 2]` the pattern embeds with branch nodes
//! 2, 8, 6, 4; with `[3, 3]` it does not embed.

use crate::graph::{parse_graph, LabeledGraph};
use crate::mapping::{parse_mapping, Mapping};

pub const PATTERN: &str = include_str!("../../../fixtures/running_example_pattern.graph");
pub const DATA: &str = include_str!("../../../fixtures/running_example_data.graph");
pub const MAPPING_L2H2: &str = include_str!("../../../fixtures/running_example_l2h2.mapping");

/// `(pattern, data)` of the running example.
pub fn running_example() -> (LabeledGraph, LabeledGraph) {
    (
        parse_graph(PATTERN).expect("fixture pattern parses"),
        parse_graph(DATA).expect("fixture data parses"),
    )
}

/// The known embedding for path lengths `[2, 2]`:
/// 12→2-1-8, 13→2-9-6, 14→2-3-4, 23→8-7-6, 34→6-5-4.
pub fn known_mapping() -> Mapping {
    let (g1, _) = running_example();
    parse_mapping(MAPPING_L2H2, &g1).expect("fixture mapping parses")
}
