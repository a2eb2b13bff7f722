//! Weighted hypergraphs and the scalar measures defined on them: degrees,
//! cuts, bipartiteness, edge discrepancy and the discrepancy ratio.

use crate::error::{check_vector, Error, Result};
use crate::partition::{violation_factor, Bipartition, Side};

/// An undirected hypergraph with positive edge weights.
///
/// Vertices are `0..n`. Every edge has at least two distinct vertices.
/// Edges with identical vertex sets are kept as separate edges. The
/// structure is immutable once built; degrees and incidence lists are
/// computed up front.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let mut members = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        let mut seen = vec![usize::MAX; n];
        for (id, (edge, weight)) in edges.into_iter().enumerate() {
            if edge.len() < 2 {
                return Err(Error::RankTooSmall {
                    edge: id,
                    rank: edge.len(),
                });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight { edge: id, weight });
            }
            for &v in &edge {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if seen[v] == id {
                    return Err(Error::DuplicateVertex { edge: id, vertex: v });
                }
                seen[v] = id;
            }
            members.push(edge);
            weights.push(weight);
        }

        let mut degrees = vec![0.0; n];
        let mut incidence = vec![Vec::new(); n];
        for (id, edge) in members.iter().enumerate() {
            for &v in edge {
                degrees[v] += weights[id];
                incidence[v].push(id);
            }
        }
        Ok(Hypergraph {
            n,
            edges: members,
            weights,
            degrees,
            incidence,
        })
    }

    /// All edges with weight one.
    pub fn unweighted(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|e| (e, 1.0)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> &[usize] {
        &self.edges[id]
    }

    pub fn weight(&self, id: usize) -> f64 {
        self.weights[id]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (&[usize], f64)> + '_ {
        self.edges.iter().zip(&self.weights).map(|(e, &w)| (e.as_slice(), w))
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn min_rank(&self) -> Option<usize> {
        self.edges.iter().map(Vec::len).min()
    }

    pub fn max_rank(&self) -> Option<usize> {
        self.edges.iter().map(Vec::len).max()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.iter().any(|&w| w != 1.0)
    }

    /// `deg(v) = sum of w(e) over edges containing v`.
    pub fn degree(&self, v: usize) -> Result<f64> {
        self.degrees
            .get(v)
            .copied()
            .ok_or(Error::VertexOutOfRange { vertex: v, n: self.n })
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn volume(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.degrees[v]).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.degrees.iter().sum()
    }

    fn membership(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    /// Total weight of edges meeting both `a` and `b` while avoiding every
    /// vertex of `avoid`. With `avoid` empty this is the plain cut `w(A, B)`.
    pub fn cut_weight(&self, a: &[usize], b: &[usize], avoid: &[usize]) -> Result<f64> {
        let (in_a, in_b, in_c) = (self.membership(a)?, self.membership(b)?, self.membership(avoid)?);
        Ok(self
            .edges()
            .filter(|(e, _)| e.iter().any(|&v| in_a[v]) && e.iter().any(|&v| in_b[v]) && !e.iter().any(|&v| in_c[v]))
            .map(|(_, w)| w)
            .sum())
    }

    /// Bipartiteness ratio `beta_H(L, R)`.
    pub fn bipartiteness(&self, part: &Bipartition) -> Result<f64> {
        let sides = part.sides(self.n)?;
        let vol = self.volume(part.left()) + self.volume(part.right());
        if vol <= 0.0 {
            return Err(Error::ZeroVolume);
        }
        let mut violated = 0.0;
        for (e, w) in self.edges() {
            let (mut a, mut b) = (0, 0);
            for &v in e {
                match sides[v] {
                    Side::Left => a += 1,
                    Side::Right => b += 1,
                    Side::Outside => {}
                }
            }
            violated += w * violation_factor(e.len(), a, b);
        }
        Ok(violated / vol)
    }

    /// `<f, g>_w = sum deg(v) f(v) g(v)`.
    pub fn weighted_inner(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        check_vector(f, self.n)?;
        check_vector(g, self.n)?;
        Ok(self
            .degrees
            .iter()
            .zip(f.iter().zip(g))
            .map(|(d, (a, b))| d * a * b)
            .sum())
    }

    pub fn weighted_norm_sq(&self, f: &[f64]) -> Result<f64> {
        self.weighted_inner(f, f)
    }

    /// Discrepancy ratio `D(f) = sum w(e) Delta_f(e)^2 / ||f||_w^2`, which is
    /// also the Rayleigh quotient of the nonlinear operator.
    pub fn discrepancy_ratio(&self, f: &[f64]) -> Result<f64> {
        let norm = self.weighted_norm_sq(f)?;
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let num: f64 = self
            .edges()
            .map(|(e, w)| {
                let d = discrepancy(e, f);
                w * d * d
            })
            .sum();
        Ok(num / norm)
    }
}

/// `Delta_f(e) = max_{u in e} f(u) + min_{v in e} f(v)`.
pub fn discrepancy(edge: &[usize], f: &[f64]) -> f64 {
    let (lo, hi) = edge.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(f[v]), hi.max(f[v]))
    });
    hi + lo
}

/// `c_f(e) = w(e) |Delta_f(e)|`.
pub fn weighted_discrepancy(edge: &[usize], weight: f64, f: &[f64]) -> f64 {
    weight * discrepancy(edge, f).abs()
}

/// `c_f(S)` summed over a set of edge ids.
pub fn weighted_discrepancy_sum(h: &Hypergraph, edges: &[usize], f: &[f64]) -> f64 {
    edges
        .iter()
        .map(|&id| weighted_discrepancy(h.edge(id), h.weight(id), f))
        .sum()
}
