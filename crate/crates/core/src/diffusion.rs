//! Discrete heat diffusion `f <- f + ε r`, with the exact rate (FBC) or the
//! even-split approximation (FBCA).

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::{check_vector, Error, Result};
use crate::graph::Graph;
use crate::hypergraph::Hypergraph;
use crate::rate::{compute_rate, max_min_sets};
use crate::reductions::clique_reduce;
use crate::rng::seeded;

/// Where the diffusion starts.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// The `D^{-1/2}`-scaled smallest eigenvector of the clique reduction's
    /// normalized signless Laplacian, zero on isolated vertices.
    Clique,
    Vector(Vec<f64>),
    /// Entries drawn uniformly from `[-1, 1]`.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionConfig {
    pub epsilon: f64,
    /// Relative Rayleigh-quotient decrease below which a step counts as
    /// stalled.
    pub theta: f64,
    /// Number of consecutive stalled steps that ends the run.
    pub window: usize,
    pub max_steps: usize,
    pub renormalize: bool,
    pub start: Start,
    /// Residual tolerance for the eigensolver behind [`Start::Clique`].
    pub eigen_tol: f64,
    /// Keep the per-step graphs built by FBCA.
    pub keep_graphs: bool,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig {
            epsilon: 1.0,
            theta: 1e-6,
            window: 10,
            max_steps: 1000,
            renormalize: true,
            start: Start::Clique,
            eigen_tol: 1e-8,
            keep_graphs: false,
        }
    }
}

impl DiffusionConfig {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidParams("convergence window must be positive".into()));
        }
        Ok(())
    }
}

/// One row of a diffusion trajectory. `rate_norm` is `‖r‖_w` of the rate
/// taken at this step; `seconds` is wall time since the run started.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub rayleigh: f64,
    pub rate_norm: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionState {
    pub f: Vec<f64>,
    pub step: usize,
    /// Rayleigh quotient of every visited vector, starting with `f_0`.
    pub history: Vec<f64>,
    pub records: Vec<StepRecord>,
    /// Per-step FBCA graphs, when requested.
    pub graphs: Vec<Graph>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionOutcome {
    pub state: DiffusionState,
    /// `R(f)` of the returned vector.
    pub eigenvalue: f64,
    pub converged: bool,
    /// `‖r + λ f‖_w / ‖f‖_w` at the returned vector.
    pub residual: f64,
}

pub fn start_vector(h: &Hypergraph, start: &Start, eigen_tol: f64) -> Result<Vec<f64>> {
    let n = h.vertex_count();
    let f = match start {
        Start::Clique => {
            let g = clique_reduce(h);
            g.min_eigenpair_active(eigen_tol, g.default_max_iter())?.scaled
        }
        Start::Vector(f) => {
            check_vector(f, n)?;
            f.clone()
        }
        Start::Random(seed) => {
            let mut rng = seeded(*seed);
            (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
        }
    };
    Ok(f)
}

fn scale_to_unit(h: &Hypergraph, f: &mut [f64]) -> Result<()> {
    let norm = h.weighted_norm_sq(f)?.sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    f.iter_mut().for_each(|x| *x /= norm);
    Ok(())
}

/// One FBC step: `f + ε r` with `r` the exact diffusion rate, optionally
/// rescaled to unit weighted norm. Returns the new vector and the rate used.
pub fn fbc_step(h: &Hypergraph, f: &[f64], epsilon: f64, renormalize: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = compute_rate(h, f)?.rate;
    advance(h, f, r, epsilon, renormalize)
}

fn advance(h: &Hypergraph, f: &[f64], r: Vec<f64>, epsilon: f64, renormalize: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut next: Vec<f64> = f.iter().zip(&r).map(|(x, d)| x + epsilon * d).collect();
    if renormalize {
        scale_to_unit(h, &mut next)?;
    } else if h.weighted_norm_sq(&next)? == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((next, r))
}

/// The graph FBCA diffuses on at `f`: each edge spreads its weight evenly
/// over the pairs in (maximizers × minimizers). A vertex in both sets gets a
/// self-loop.
pub fn fbca_graph(h: &Hypergraph, f: &[f64]) -> Result<Graph> {
    let sets = max_min_sets(h, f)?;
    let mut pairs = Vec::new();
    for e in 0..h.edge_count() {
        let (top, bottom) = (&sets.max[e], &sets.min[e]);
        let share = h.weight(e) / (top.len() * bottom.len()) as f64;
        for &u in top {
            for &v in bottom {
                pairs.push((u, v, share));
            }
        }
    }
    Graph::from_edges(h.vertex_count(), pairs)
}

/// `−D_H^{-1} J_G f` for the FBCA graph `G` at `f` (zero on isolated
/// vertices).
pub fn fbca_rate(h: &Hypergraph, g: &Graph, f: &[f64]) -> Result<Vec<f64>> {
    let jf = g.apply_signless(f)?;
    Ok(jf
        .iter()
        .zip(h.degrees())
        .map(|(&x, &d)| if d > 0.0 { -x / d } else { 0.0 })
        .collect())
}

pub fn run_fbc(h: &Hypergraph, config: &DiffusionConfig) -> Result<DiffusionOutcome> {
    run(h, config, |f| Ok((compute_rate(h, f)?.rate, None)))
}

/// The approximate diffusion. Unlike FBC it carries no guarantee that the
/// Rayleigh quotient decreases.
pub fn run_fbca(h: &Hypergraph, config: &DiffusionConfig) -> Result<DiffusionOutcome> {
    let keep = config.keep_graphs;
    run(h, config, |f| {
        let g = fbca_graph(h, f)?;
        let r = fbca_rate(h, &g, f)?;
        Ok((r, keep.then_some(g)))
    })
}

const FIXED_POINT_TOL: f64 = 1e-13;

fn run<F>(h: &Hypergraph, config: &DiffusionConfig, mut rate: F) -> Result<DiffusionOutcome>
where
    F: FnMut(&[f64]) -> Result<(Vec<f64>, Option<Graph>)>,
{
    config.validate()?;
    let clock = Instant::now();
    let mut f = start_vector(h, &config.start, config.eigen_tol)?;
    if config.renormalize {
        scale_to_unit(h, &mut f)?;
    }
    let mut current = h.discrepancy_ratio(&f)?;
    let mut state = DiffusionState {
        f,
        step: 0,
        history: vec![current],
        records: Vec::new(),
        graphs: Vec::new(),
    };
    let mut best = (current, state.f.clone());
    let mut stalled = 0;
    let mut converged = false;
    let mut last_rate = None;
    while state.step < config.max_steps {
        let (r, graph) = rate(&state.f)?;
        let rate_norm = h.weighted_norm_sq(&r)?.sqrt();
        if rate_norm <= FIXED_POINT_TOL * h.weighted_norm_sq(&state.f)?.sqrt() {
            // A fixed point up to rounding: nothing will change from here on.
            converged = true;
            last_rate = Some(r);
            break;
        }
        let (next, _) = advance(h, &state.f, r, config.epsilon, config.renormalize)?;
        let value = h.discrepancy_ratio(&next)?;
        state.step += 1;
        state.records.push(StepRecord {
            step: state.step,
            rayleigh: value,
            rate_norm,
            seconds: clock.elapsed().as_secs_f64(),
        });
        if let Some(g) = graph {
            state.graphs.push(g);
        }
        let decrease = (current - value) / current.max(1e-15);
        stalled = if decrease < config.theta { stalled + 1 } else { 0 };
        state.f = next;
        state.history.push(value);
        current = value;
        if value < best.0 {
            best = (value, state.f.clone());
        }
        if stalled >= config.window {
            converged = true;
            break;
        }
    }
    if !converged {
        state.f = best.1;
    }
    let eigenvalue = h.discrepancy_ratio(&state.f)?;
    let r = match last_rate {
        Some(r) => r,
        None => rate(&state.f)?.0,
    };
    let residual = eigen_residual(h, &state.f, &r, eigenvalue)?;
    Ok(DiffusionOutcome {
        state,
        eigenvalue,
        converged,
        residual,
    })
}

/// `‖r + λ f‖_w / ‖f‖_w`.
pub fn eigen_residual(h: &Hypergraph, f: &[f64], r: &[f64], lambda: f64) -> Result<f64> {
    let diff: Vec<f64> = r.iter().zip(f).map(|(a, b)| a + lambda * b).collect();
    let den = h.weighted_norm_sq(f)?;
    if den <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((h.weighted_norm_sq(&diff)? / den).sqrt())
}
