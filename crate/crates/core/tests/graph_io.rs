use homeomatch::generate::random_labeled_graph;
use homeomatch::{parse_graph, LabeledGraph};
use proptest::prelude::*;

proptest! {
    #[test]
    fn text_round_trip(n in 1usize..40, d in 0.0f64..5.0, labels in 1usize..8, seed in any::<u64>()) {
        let d = if n > 1 { d.min(n as f64 - 1.0) } else { 0.0 };
        let g = random_labeled_graph(n, d, labels, seed).unwrap();
        let text = g.to_text();
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn degree_sum_is_twice_edge_count(n in 1usize..60, d in 0.0f64..6.0, seed in any::<u64>()) {
        let d = if n > 1 { d.min(n as f64 - 1.0) } else { 0.0 };
        let g = random_labeled_graph(n, d, 4, seed).unwrap();
        let sum: usize = g.vertices().map(|v| g.degree(v).unwrap()).sum();
        prop_assert_eq!(sum, 2 * g.edge_count());
        for v in g.vertices() {
            for &w in g.neighbors(v) {
                prop_assert!(g.neighbors(w).contains(&v));
            }
        }
    }
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let g: LabeledGraph = "# triangle\nn 3 m 3\n\nv 1 A\nv 2 B\nv 3 A\ne 1 2\ne 2 3\ne 1 3\n"
        .parse()
        .unwrap();
    assert_eq!(g.edge_count(), 3);
    assert_eq!(g.label(2), "B");
}

#[test]
fn malformed_inputs_are_rejected() {
    let cases = [
        "",
        "n 2 m 1\nv 1 A\nv 2 B\ne 1 1\n",
        "n 2 m 1\nv 1 A\nv 2 B\ne 1 3\n",
        "n 2 m 2\nv 1 A\nv 2 B\ne 1 2\ne 2 1\n",
        "n 2 m 1\nv 1 A\nv 1 B\ne 1 2\n",
        "n 3 m 0\nv 1 A\nv 2 B\n",
        "n 2 m 1\nv 1 A\nv 2 B\n",
        "n x m 1\n",
        "n 1 m 0\nv 1\n",
    ];
    for text in cases {
        assert!(parse_graph(text).is_err(), "accepted {text:?}");
    }
    assert!(LabeledGraph::new(vec!["A".into()], [(1, 1)]).is_err());
    assert!(LabeledGraph::new(vec!["A".into()], [(1, 2)]).is_err());
}
