//! Seeded instance generators: random labeled graphs and planted subdivisions.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{GraphError, LabeledGraph, Vertex};

/// Label token for the `k`-th label of a generated alphabet.
pub fn label_token(k: usize) -> String {
    format!("L{k}")
}

/// Random G(n, p) graph with `p = avg_degree / (n - 1)`, labels drawn
/// uniformly from `label_count` tokens, made connected by adding random
/// edges between components.
pub fn random_labeled_graph(
    n: usize,
    avg_degree: f64,
    label_count: usize,
    seed: u64,
) -> Result<LabeledGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidParameters("n must be at least 1".into()));
    }
    if label_count == 0 {
        return Err(GraphError::InvalidParameters("label_count must be at least 1".into()));
    }
    if avg_degree.is_nan() || avg_degree < 0.0 || avg_degree >= n as f64 && n > 1 {
        return Err(GraphError::InvalidParameters(format!(
            "avg_degree {avg_degree} must be in [0, n) for n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..n).map(|_| label_token(rng.gen_range(0..label_count))).collect();

    let mut edges = BTreeSet::new();
    if n > 1 {
        let p = (avg_degree / (n - 1) as f64).min(1.0);
        for u in 1..=n as Vertex {
            for w in u + 1..=n as Vertex {
                if rng.gen_bool(p) {
                    edges.insert((u, w));
                }
            }
        }
    }
    connect_components(n, &mut edges, &mut rng);
    LabeledGraph::new(labels, edges)
}

/// Adds uniformly random edges between distinct components until the graph
/// is connected.
fn connect_components(n: usize, edges: &mut BTreeSet<(Vertex, Vertex)>, rng: &mut ChaCha8Rng) {
    let mut dsu = Dsu::new(n);
    for &(u, w) in edges.iter() {
        dsu.union(u as usize - 1, w as usize - 1);
    }
    while dsu.components > 1 {
        let u = rng.gen_range(0..n);
        let root = dsu.find(u);
        let outside: Vec<usize> = (0..n).filter(|&w| dsu.find(w) != root).collect();
        let w = *outside.choose(rng).expect("more than one component");
        edges.insert(((u.min(w) + 1) as Vertex, (u.max(w) + 1) as Vertex));
        dsu.union(u, w);
    }
}

struct Dsu {
    parent: Vec<usize>,
    components: usize,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.components -= 1;
        }
    }
}

/// A graph on `n` vertices labeled `L0..L{n-1}` (one label per vertex).
pub fn uniquely_labeled(
    n: usize,
    edges: impl IntoIterator<Item = (Vertex, Vertex)>,
) -> Result<LabeledGraph, GraphError> {
    LabeledGraph::new((0..n).map(label_token).collect(), edges)
}

/// Complete graph on `n` uniquely labeled vertices.
pub fn complete_graph(n: usize) -> LabeledGraph {
    let n_v = n as Vertex;
    let edges = (1..=n_v).flat_map(|u| (u + 1..=n_v).map(move |w| (u, w)));
    uniquely_labeled(n, edges).expect("complete graph is simple")
}

/// Cycle on `n >= 3` uniquely labeled vertices.
pub fn cycle_graph(n: usize) -> LabeledGraph {
    let n_v = n as Vertex;
    let edges = (1..=n_v).map(move |u| (u, u % n_v + 1));
    uniquely_labeled(n, edges).expect("cycle is simple")
}

/// Builds a data graph containing a subdivision of `pattern`.
///
/// Pattern vertex `v` becomes data vertex `v` with the same label. Each
/// pattern edge, in edge order, is replaced by a path of length drawn
/// uniformly from `[l, h]` through fresh inner vertices. Then `padding`
/// extra vertices are appended, each joined to one or two random earlier
/// vertices. All new labels are drawn from the pattern's own labels.
pub fn plant_subdivision(
    pattern: &LabeledGraph,
    l: usize,
    h: usize,
    padding: usize,
    seed: u64,
) -> Result<LabeledGraph, GraphError> {
    if l == 0 || l > h {
        return Err(GraphError::InvalidParameters(format!(
            "path length window [{l}, {h}] must satisfy 1 <= l <= h"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet: Vec<String> = pattern
        .labels()
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    let mut labels: Vec<String> = pattern.labels().to_vec();
    let fresh_label =
        |rng: &mut ChaCha8Rng| -> String { alphabet.choose(rng).cloned().unwrap_or_else(|| label_token(0)) };
    let mut edges = BTreeSet::new();

    for &(a, b) in pattern.edges() {
        let len = rng.gen_range(l..=h);
        let mut prev = a;
        for _ in 1..len {
            labels.push(fresh_label(&mut rng));
            let v = labels.len() as Vertex;
            edges.insert((prev.min(v), prev.max(v)));
            prev = v;
        }
        edges.insert((prev.min(b), prev.max(b)));
    }

    for _ in 0..padding {
        let existing = labels.len();
        labels.push(fresh_label(&mut rng));
        let v = labels.len() as Vertex;
        if existing == 0 {
            continue;
        }
        let links = rng.gen_range(1..=2usize).min(existing);
        let targets = rand::seq::index::sample(&mut rng, existing, links);
        for t in targets.iter() {
            let w = t as Vertex + 1;
            edges.insert((w, v));
        }
    }

    LabeledGraph::new(labels, edges)
}
