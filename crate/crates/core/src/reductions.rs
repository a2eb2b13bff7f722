//! Hypergraph-to-graph reductions used as baselines and for start vectors.

use rand::Rng;

use crate::error::Result;
use crate::graph::Graph;
use crate::hypergraph::Hypergraph;
use crate::rng::seeded;

/// Clique reduction: every hyperedge `e` adds `w(e) / (rank(e) - 1)` to each
/// vertex pair inside it. Vertex degrees are preserved.
pub fn clique_reduce(h: &Hypergraph) -> Graph {
    let pairs = h.edges().flat_map(|(e, w)| {
        let share = w / (e.len() as f64 - 1.0);
        e.iter()
            .enumerate()
            .flat_map(move |(i, &u)| e[i + 1..].iter().map(move |&v| (u, v, share)))
    });
    Graph::from_edges(h.vertex_count(), pairs).expect("hypergraph edges are valid graph edges")
}

/// Random reduction: every hyperedge is replaced by one uniformly chosen
/// vertex pair inside it, carrying the full edge weight. One draw per edge,
/// consumed in edge order from a stream seeded by `seed`.
pub fn random_reduce(h: &Hypergraph, seed: u64) -> Result<Graph> {
    let mut rng = seeded(seed);
    let mut pairs = Vec::with_capacity(h.edge_count());
    for (e, w) in h.edges() {
        let k = e.len();
        let idx = rng.random_range(0..k * (k - 1) / 2);
        let (i, j) = unrank_pair(idx, k);
        pairs.push((e[i], e[j], w));
    }
    Graph::from_edges(h.vertex_count(), pairs)
}

// Maps 0..C(k,2) onto pairs i < j in lexicographic order.
fn unrank_pair(mut idx: usize, k: usize) -> (usize, usize) {
    for i in 0..k {
        let row = k - 1 - i;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("pair index out of range")
}
