//! Two-sided sweep-set rounding of a vector into a bipartition.
//!
//! Vertices are ordered by `|f|` (largest first, ties by id). Candidate `j`
//! takes the first `j` vertices of that order, putting negative entries on
//! the left and the rest on the right. Every threshold set `{|f| >= t}` is
//! among the candidates, and so are the partial prefixes inside a tie. The
//! candidate with the smallest bipartiteness wins, the earliest on ties.

use crate::error::{check_vector, Error, Result};
use crate::graph::Graph;
use crate::hypergraph::Hypergraph;
use crate::partition::{violation_factor, Bipartition};
use crate::reductions::clique_reduce;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub part: Bipartition,
    pub value: f64,
    /// Score of candidate `j` (in sweep order); `None` where the candidate
    /// has zero volume.
    pub scores: Vec<Option<f64>>,
}

/// Sweep scored by hypergraph bipartiteness.
pub fn sweep_hyper(h: &Hypergraph, f: &[f64]) -> Result<SweepResult> {
    let edges: Vec<(Vec<usize>, f64)> = h.edges().map(|(e, w)| (e.to_vec(), w)).collect();
    let mut res = sweep(h.vertex_count(), h.degrees(), &edges, f)?;
    res.value = h.bipartiteness(&res.part)?;
    Ok(res)
}

/// Sweep scored by graph bipartiteness.
pub fn sweep_graph(g: &Graph, f: &[f64]) -> Result<SweepResult> {
    let edges: Vec<(Vec<usize>, f64)> = g
        .edges()
        .iter()
        .map(|&(u, v, w)| (if u == v { vec![u] } else { vec![u, v] }, w))
        .collect();
    let mut res = sweep(g.vertex_count(), g.degrees(), &edges, f)?;
    res.value = g.bipartiteness(&res.part)?;
    Ok(res)
}

/// The order in which vertices enter the sweep.
pub fn sweep_order(f: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[b].abs().total_cmp(&f[a].abs()).then(a.cmp(&b)));
    order
}

fn sweep(n: usize, degrees: &[f64], edges: &[(Vec<usize>, f64)], f: &[f64]) -> Result<SweepResult> {
    check_vector(f, n)?;
    if f.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut incidence = vec![Vec::new(); n];
    for (id, (e, _)) in edges.iter().enumerate() {
        for &v in e {
            incidence[v].push(id);
        }
    }
    let order = sweep_order(f);
    let mut counts = vec![(0usize, 0usize); edges.len()];
    let (mut violated, mut volume) = (0.0, 0.0);
    let mut scores = vec![None; n];
    let mut best: Option<(f64, usize)> = None;
    for (j, &v) in order.iter().enumerate() {
        let left = f[v] < 0.0;
        for &id in &incidence[v] {
            let (e, w) = (&edges[id].0, edges[id].1);
            let (a, b) = counts[id];
            violated -= w * violation_factor(e.len(), a, b);
            counts[id] = if left { (a + 1, b) } else { (a, b + 1) };
            let (a, b) = counts[id];
            violated += w * violation_factor(e.len(), a, b);
        }
        volume += degrees[v];
        if volume > 0.0 {
            let score = violated.max(0.0) / volume;
            scores[j] = Some(score);
            if best.is_none_or(|(b, _)| score < b) {
                best = Some((score, j + 1));
            }
        }
    }
    let (value, end) = best.ok_or(Error::ZeroVolume)?;
    let (left, right): (Vec<usize>, Vec<usize>) = order[..end].iter().partition(|&&v| f[v] < 0.0);
    Ok(SweepResult {
        part: Bipartition::new(left, right)?,
        value,
        scores,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliqueCutResult {
    pub part: Bipartition,
    pub beta_graph: f64,
    pub beta_hyper: f64,
    /// Smallest eigenvalue of the clique reduction's normalized signless
    /// Laplacian.
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
}

/// The clique-reduction baseline: sweep the reduction's smallest
/// eigenvector by graph bipartiteness, then score the result on both the
/// graph and the hypergraph.
pub fn clique_cut(h: &Hypergraph, tol: f64) -> Result<CliqueCutResult> {
    let g = clique_reduce(h);
    let pair = g.min_eigenpair_active(tol, g.default_max_iter())?;
    let res = sweep_graph(&g, &pair.scaled)?;
    Ok(CliqueCutResult {
        beta_hyper: h.bipartiteness(&res.part)?,
        beta_graph: res.value,
        part: res.part,
        eigenvalue: pair.value,
        vector: pair.scaled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hyper_examples() {
        let h = Hypergraph::unweighted(2, vec![vec![0, 1]]).unwrap();
        let res = sweep_hyper(&h, &[1.0, -1.0]).unwrap();
        assert_eq!((res.part.left(), res.part.right()), (&[1][..], &[0][..]));
        assert_eq!(res.value, 0.0);

        let h = Hypergraph::unweighted(3, vec![vec![0, 1, 2]]).unwrap();
        let res = sweep_hyper(&h, &[0.6, -0.5, -0.1]).unwrap();
        assert_eq!((res.part.left(), res.part.right()), (&[1][..], &[0][..]));
        assert_eq!(res.value, 0.0);
        assert_eq!(res.scores, vec![Some(1.0), Some(0.0), Some(0.0)]);
    }

    #[test]
    fn recovers_planted_indicator() {
        let h = Hypergraph::unweighted(5, vec![vec![0, 1, 2], vec![1, 3], vec![2, 3, 4]]).unwrap();
        let chi = [1.0, -1.0, -1.0, 1.0, -1.0];
        let res = sweep_hyper(&h, &chi).unwrap();
        // Vertex 4 is the last of the tie and is not needed for a zero score.
        assert_eq!(res.value, 0.0);
        assert_eq!(res.part.left(), &[1, 2]);
        assert_eq!(res.part.right(), &[0, 3]);
    }

    #[test]
    fn graph_examples() {
        let k2 = Graph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(sweep_graph(&k2, &[1.0, -1.0]).unwrap().value, 0.0);

        let c4 = Graph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
        let pair = c4.min_eigenpair(1e-10, 10_000).unwrap();
        let res = sweep_graph(&c4, &pair.scaled).unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.part.len(), 4);

        let tri = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        // The zero vertex joins a side at the last sweep step: ({0, 2}, {1}).
        let res = sweep_graph(&tri, &[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(res.value, 1.0 / 3.0);
    }

    #[test]
    fn zero_vector_rejected() {
        let h = Hypergraph::unweighted(2, vec![vec![0, 1]]).unwrap();
        assert!(matches!(sweep_hyper(&h, &[0.0, 0.0]), Err(Error::ZeroNorm)));
    }

    #[test]
    fn clique_cut_examples() {
        let h = Hypergraph::unweighted(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let res = clique_cut(&h, 1e-10).unwrap();
        assert!(res.beta_hyper.abs() < 1e-12);
        assert!(res.eigenvalue.abs() < 1e-8);

        let h = Hypergraph::unweighted(3, vec![vec![0, 1, 2]]).unwrap();
        let res = clique_cut(&h, 1e-10).unwrap();
        assert_eq!(res.beta_hyper, 0.0);
        assert!(!res.part.left().is_empty() && !res.part.right().is_empty());
    }

    fn small_instance() -> impl Strategy<Value = (Hypergraph, Vec<f64>)> {
        (3usize..9).prop_flat_map(|n| {
            let edge = (
                proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2..=n.min(4)),
                1u8..4,
            );
            (
                proptest::collection::vec(edge, 1..8),
                proptest::collection::vec(-3i8..4, n),
            )
                .prop_filter_map("nonzero vector", move |(edges, vals)| {
                    let edges = edges.into_iter().map(|(e, w)| (e, w as f64)).collect();
                    let h = Hypergraph::new(n, edges).unwrap();
                    let f: Vec<f64> = vals.into_iter().map(|x| x as f64 * 0.25).collect();
                    (h.weighted_norm_sq(&f).unwrap() > 0.0).then_some((h, f))
                })
        })
    }

    // Every candidate re-evaluated from scratch.
    fn candidate_scores(h: &Hypergraph, f: &[f64]) -> Vec<Option<f64>> {
        let order = sweep_order(f);
        order
            .iter()
            .enumerate()
            .map(|(j, _)| {
                let prefix = &order[..=j];
                let left: Vec<usize> = prefix.iter().copied().filter(|&v| f[v] < 0.0).collect();
                let right: Vec<usize> = prefix.iter().copied().filter(|&v| f[v] >= 0.0).collect();
                Bipartition::new(left, right)
                    .ok()
                    .and_then(|p| h.bipartiteness(&p).ok())
            })
            .collect()
    }

    proptest! {
        #[test]
        fn exhaustive_and_minimal((h, f) in small_instance()) {
            let res = sweep_hyper(&h, &f).unwrap();
            let direct = candidate_scores(&h, &f);
            for (a, b) in res.scores.iter().zip(&direct) {
                match (a, b) {
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                    (None, None) => {}
                    _ => prop_assert!(false, "{:?} vs {:?}", res.scores, direct),
                }
            }
            let min = direct.iter().flatten().copied().fold(f64::INFINITY, f64::min);
            prop_assert!((res.value - min).abs() < 1e-12);
        }

        #[test]
        fn cheeger_bound_for_any_vector((h, f) in small_instance()) {
            let res = sweep_hyper(&h, &f).unwrap();
            let d = h.discrepancy_ratio(&f).unwrap();
            prop_assert!(res.value <= (2.0 * d).sqrt() + 1e-9, "beta {} D {}", res.value, d);
        }

        #[test]
        fn scale_and_sign_invariance((h, f) in small_instance(), c in 0.1f64..10.0) {
            let base = sweep_hyper(&h, &f).unwrap();
            let scaled: Vec<f64> = f.iter().map(|x| x * c).collect();
            prop_assert_eq!(&sweep_hyper(&h, &scaled).unwrap().part, &base.part);
            // A sign flip mirrors the sides except for zero entries, which
            // always go right; compare only when no entry is zero.
            if f.iter().all(|&x| x != 0.0) {
                let flipped: Vec<f64> = f.iter().map(|x| -x).collect();
                prop_assert_eq!(sweep_hyper(&h, &flipped).unwrap().part, base.part.swapped());
            }
        }

        #[test]
        fn indicator_rayleigh_at_most_twice_beta(
            (h, _) in small_instance(),
            sides in proptest::collection::vec(0u8..3, 8),
        ) {
            let n = h.vertex_count();
            let left: Vec<usize> = (0..n).filter(|&v| sides[v] == 0).collect();
            let right: Vec<usize> = (0..n).filter(|&v| sides[v] == 1).collect();
            let Ok(part) = Bipartition::new(left, right) else { return Ok(()); };
            let chi = part.indicator(n).unwrap();
            if h.weighted_norm_sq(&chi).unwrap() == 0.0 {
                return Ok(());
            }
            let r = h.discrepancy_ratio(&chi).unwrap();
            let beta = h.bipartiteness(&part).unwrap();
            prop_assert!(r <= 2.0 * beta + 1e-9);
        }
    }
}
