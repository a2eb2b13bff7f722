//! Weighted undirected graphs, the signless Laplacian `J_G = D_G + A_G`, its
//! normalised form `Z_G = D^{-1/2} J_G D^{-1/2}`, graph bipartiteness, and a
//! deterministic solver for the smallest eigenpair of `Z_G`.

use std::collections::BTreeMap;

use crate::error::{check_vector, Error, Result};
use crate::partition::{violation_factor, Bipartition, Side};

/// Undirected weighted graph; self-loops allowed.
///
/// A self-loop `(u, u)` of weight `w` adds `w` to `deg(u)` and `w` to the
/// diagonal of the adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    // (u, v, w) with u <= v, one entry per vertex pair
    edges: Vec<(usize, usize, f64)>,
    degrees: Vec<f64>,
}

impl Graph {
    /// Builds a graph, summing the weights of repeated pairs. Pairs are
    /// unordered; `(u, v)` and `(v, u)` land on the same edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (id, (u, v, w)) in edges.into_iter().enumerate() {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidWeight { edge: id, weight: w });
            }
            *acc.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges: Vec<_> = acc
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|((u, v), w)| (u, v, w))
            .collect();
        let mut degrees = vec![0.0; n];
        for &(u, v, w) in &edges {
            degrees[u] += w;
            if u != v {
                degrees[v] += w;
            }
        }
        Ok(Graph { n, edges, degrees })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, w)` with `u <= v`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .map(|i| self.edges[i].2)
            .unwrap_or(0.0)
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn volume(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.degrees[v]).sum()
    }

    fn adjacency_apply(&self, f: &[f64], out: &mut [f64], sign: f64) {
        for &(u, v, w) in &self.edges {
            if u == v {
                out[u] += sign * w * f[u];
            } else {
                out[u] += sign * w * f[v];
                out[v] += sign * w * f[u];
            }
        }
    }

    /// `J_G f = D_G f + A_G f`.
    pub fn apply_signless(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_vector(f, self.n)?;
        let mut out: Vec<f64> = self.degrees.iter().zip(f).map(|(d, x)| d * x).collect();
        self.adjacency_apply(f, &mut out, 1.0);
        Ok(out)
    }

    /// `L_G f = D_G f - A_G f`.
    pub fn apply_laplacian(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_vector(f, self.n)?;
        let mut out: Vec<f64> = self.degrees.iter().zip(f).map(|(d, x)| d * x).collect();
        self.adjacency_apply(f, &mut out, -1.0);
        Ok(out)
    }

    /// `f^T J_G f / f^T D_G f`.
    pub fn rayleigh(&self, f: &[f64]) -> Result<f64> {
        let jf = self.apply_signless(f)?;
        let num: f64 = jf.iter().zip(f).map(|(a, b)| a * b).sum();
        let den: f64 = self.degrees.iter().zip(f).map(|(d, x)| d * x * x).sum();
        if den <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(num / den)
    }

    /// Graph bipartiteness `beta_G(L, R)`: edges inside `L` or inside `R`
    /// count twice, edges with exactly one endpoint in `L u R` count once.
    /// Each edge is counted once regardless of orientation.
    pub fn bipartiteness(&self, part: &Bipartition) -> Result<f64> {
        let sides = part.sides(self.n)?;
        let vol = self.volume(part.left()) + self.volume(part.right());
        if vol <= 0.0 {
            return Err(Error::ZeroVolume);
        }
        let mut violated = 0.0;
        for &(u, v, w) in &self.edges {
            let (mut a, mut b) = (0, 0);
            let ends: &[usize] = if u == v { &[u] } else { &[u, v] };
            for &x in ends {
                match sides[x] {
                    Side::Left => a += 1,
                    Side::Right => b += 1,
                    Side::Outside => {}
                }
            }
            violated += w * violation_factor(ends.len(), a, b);
        }
        Ok(violated / vol)
    }

    /// Default iteration cap for [`Graph::min_eigenpair`].
    pub fn default_max_iter(&self) -> usize {
        let n = self.n.max(2) as f64;
        (100.0 * n * n.ln()) as usize + 1000
    }

    /// Smallest eigenpair of `Z_G` by power iteration on `(2 + s) I - Z_G`.
    ///
    /// The start vector is fixed (`1 + 1/(i+1)` in coordinate `i`), so the
    /// result is deterministic. Iteration stops once
    /// `||Z x - lambda x||_2 <= tol`.
    pub fn min_eigenpair(&self, tol: f64, max_iter: usize) -> Result<EigenPair> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
        }
        if let Some(v) = self.degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::IsolatedVertex(v));
        }
        const SHIFT: f64 = 2.0 + 1e-6;
        let inv_sqrt: Vec<f64> = self.degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
        let apply_z = |x: &[f64], out: &mut Vec<f64>| {
            let y: Vec<f64> = x.iter().zip(&inv_sqrt).map(|(a, s)| a * s).collect();
            out.clear();
            out.extend(self.degrees.iter().zip(&y).map(|(d, a)| d * a));
            self.adjacency_apply(&y, out, 1.0);
            for (o, s) in out.iter_mut().zip(&inv_sqrt) {
                *o *= s;
            }
        };

        let mut x: Vec<f64> = (0..self.n).map(|i| 1.0 + 1.0 / (i as f64 + 1.0)).collect();
        normalize(&mut x);
        let mut z = Vec::with_capacity(self.n);
        let mut best = (f64::INFINITY, 0.0, x.clone());
        for iter in 0..=max_iter {
            apply_z(&x, &mut z);
            let lambda: f64 = x.iter().zip(&z).map(|(a, b)| a * b).sum();
            let residual = z
                .iter()
                .zip(&x)
                .map(|(zi, xi)| (zi - lambda * xi).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual < best.0 {
                best = (residual, lambda, x.clone());
            }
            if residual <= tol {
                return Ok(EigenPair::new(lambda, x, residual, &inv_sqrt, iter));
            }
            for (xi, zi) in x.iter_mut().zip(&z) {
                *xi = SHIFT * *xi - zi;
            }
            normalize(&mut x);
        }
        Err(Error::EigenNoConvergence {
            iterations: max_iter,
            residual: best.0,
        })
    }

    /// [`Graph::min_eigenpair`] on the subgraph of vertices with positive
    /// degree. Zero-degree vertices get 0 in both returned vectors.
    pub fn min_eigenpair_active(&self, tol: f64, max_iter: usize) -> Result<EigenPair> {
        let active: Vec<usize> = (0..self.n).filter(|&v| self.degrees[v] > 0.0).collect();
        if active.is_empty() {
            return Err(Error::ZeroVolume);
        }
        if active.len() == self.n {
            return self.min_eigenpair(tol, max_iter);
        }
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in active.iter().enumerate() {
            local[v] = i;
        }
        let sub = Graph::from_edges(
            active.len(),
            self.edges.iter().map(|&(u, v, w)| (local[u], local[v], w)),
        )?;
        let pair = sub.min_eigenpair(tol, max_iter)?;
        let lift = |x: &[f64]| {
            let mut full = vec![0.0; self.n];
            for (i, &v) in active.iter().enumerate() {
                full[v] = x[i];
            }
            full
        };
        Ok(EigenPair {
            value: pair.value,
            vector: lift(&pair.vector),
            scaled: lift(&pair.scaled),
            residual: pair.residual,
            iterations: pair.iterations,
        })
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|a| *a /= norm);
    }
}

/// An eigenpair of `Z_G`, plus the `D^{-1/2}`-scaled vector, which is an
/// eigenvector of `D_G^{-1} J_G` with the same eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit-norm eigenvector of `Z_G`.
    pub vector: Vec<f64>,
    /// `D^{-1/2} vector`.
    pub scaled: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl EigenPair {
    fn new(value: f64, vector: Vec<f64>, residual: f64, inv_sqrt: &[f64], iterations: usize) -> Self {
        let scaled = vector.iter().zip(inv_sqrt).map(|(a, s)| a * s).collect();
        EigenPair {
            value,
            vector,
            scaled,
            residual,
            iterations,
        }
    }
}
