//! Scoring against ground truth and the synthetic benchmark harness.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{run_fbc, run_fbca, DiffusionConfig, DiffusionOutcome};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::partition::Bipartition;
use crate::reductions::clique_reduce;
use crate::sweep::{clique_cut, sweep_hyper};
use crate::synth::{generate, ModelParams};

fn overlap(a: &[usize], b: &[usize]) -> usize {
    // Both sides of a bipartition are sorted.
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                k += 1;
                i += 1;
                j += 1;
            }
        }
    }
    k
}

fn f1(candidate: &[usize], truth: &[usize]) -> f64 {
    if candidate.is_empty() || truth.is_empty() {
        return 0.0;
    }
    2.0 * overlap(candidate, truth) as f64 / (candidate.len() + truth.len()) as f64
}

/// Per-cluster F1 scores under the better of the two ways of matching the
/// candidate sides to the truth sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Pair {
    /// F1 of the candidate's left side against its matched truth side.
    pub left: f64,
    pub right: f64,
    pub mean: f64,
    /// True when the candidate's left side is matched to the truth's right.
    pub swapped: bool,
}

/// Matches sides to maximize the mean F1; the straight matching wins ties.
pub fn f1_pair(candidate: &Bipartition, truth: &Bipartition) -> F1Pair {
    let straight = (f1(candidate.left(), truth.left()), f1(candidate.right(), truth.right()));
    let crossed = (f1(candidate.left(), truth.right()), f1(candidate.right(), truth.left()));
    let (pair, swapped) = if crossed.0 + crossed.1 > straight.0 + straight.1 {
        (crossed, true)
    } else {
        (straight, false)
    };
    F1Pair {
        left: pair.0,
        right: pair.1,
        mean: (pair.0 + pair.1) / 2.0,
        swapped,
    }
}

/// Fraction of all `n` vertices labeled correctly under the better side
/// matching. Vertices outside the candidate count as wrong.
pub fn accuracy(candidate: &Bipartition, truth: &Bipartition, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let straight = overlap(candidate.left(), truth.left()) + overlap(candidate.right(), truth.right());
    let crossed = overlap(candidate.left(), truth.right()) + overlap(candidate.right(), truth.left());
    straight.max(crossed) as f64 / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "fbc")]
    Fbc,
    #[serde(rename = "fbca")]
    Fbca,
    #[serde(rename = "cc")]
    CliqueCut,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fbc => "fbc",
            Algorithm::Fbca => "fbca",
            Algorithm::CliqueCut => "cc",
        }
    }
}

/// What one clustering run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutput {
    pub part: Bipartition,
    pub beta_hyper: f64,
    /// Bipartiteness of the same sets on the clique reduction.
    pub beta_graph: f64,
    /// `R(f)` for the diffusions; the smallest eigenvalue of the clique
    /// reduction for the baseline.
    pub eigenvalue: f64,
    /// `√(2λ)` for the diffusions.
    pub cheeger_bound: Option<f64>,
    pub diffusion: Option<DiffusionOutcome>,
    pub seconds: f64,
}

impl ClusterOutput {
    pub fn cheeger_ok(&self) -> Option<bool> {
        self.cheeger_bound.map(|b| self.beta_hyper <= b + 1e-6)
    }
}

/// Runs one algorithm end to end (start vector, diffusion, sweep).
pub fn run_algorithm(h: &Hypergraph, algorithm: Algorithm, config: &DiffusionConfig) -> Result<ClusterOutput> {
    let clock = Instant::now();
    let (part, beta_hyper, eigenvalue, diffusion) = match algorithm {
        Algorithm::CliqueCut => {
            let res = clique_cut(h, config.eigen_tol)?;
            (res.part, res.beta_hyper, res.eigenvalue, None)
        }
        Algorithm::Fbc | Algorithm::Fbca => {
            let outcome = if algorithm == Algorithm::Fbc {
                run_fbc(h, config)?
            } else {
                run_fbca(h, config)?
            };
            let sweep = sweep_hyper(h, &outcome.state.f)?;
            (sweep.part, sweep.value, outcome.eigenvalue, Some(outcome))
        }
    };
    let seconds = clock.elapsed().as_secs_f64();
    let beta_graph = clique_reduce(h).bipartiteness(&part)?;
    Ok(ClusterOutput {
        cheeger_bound: diffusion.as_ref().map(|_| (2.0 * eigenvalue.max(0.0)).sqrt()),
        part,
        beta_hyper,
        beta_graph,
        eigenvalue,
        diffusion,
        seconds,
    })
}

fn default_trials() -> usize {
    10
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Fbc, Algorithm::Fbca, Algorithm::CliqueCut]
}

/// A grid of synthetic configurations: one point per entry of `q_ratios`,
/// with `q = ratio · p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub q_ratios: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

impl ExperimentGrid {
    pub fn diffusion_config(&self) -> DiffusionConfig {
        let d = DiffusionConfig::default();
        DiffusionConfig {
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            theta: self.theta.unwrap_or(d.theta),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            ..d
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub q_ratio: f64,
    pub trial: usize,
    pub seed: u64,
    pub edges: usize,
    pub algorithm: Algorithm,
    pub beta_hyper: f64,
    pub beta_graph: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub eigenvalue: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
}

impl MeanStderr {
    pub fn of(xs: &[f64]) -> Self {
        let k = xs.len() as f64;
        if xs.is_empty() {
            return MeanStderr {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / k;
        let stderr = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
        } else {
            0.0
        };
        MeanStderr { mean, stderr }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub q_ratio: f64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub edges: f64,
    pub beta_hyper: MeanStderr,
    pub beta_graph: MeanStderr,
    pub f1: MeanStderr,
    pub seconds: MeanStderr,
    /// Wall time summed over trials.
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub grid: ExperimentGrid,
    pub trials: Vec<TrialResult>,
    pub summary: Vec<Summary>,
}

/// Runs every algorithm on `trials` hypergraphs per grid point (trial `i`
/// uses seed `base_seed + i`), spreading trials over `jobs` threads. Results
/// other than timings do not depend on `jobs`.
pub fn run_experiment(grid: &ExperimentGrid, jobs: usize) -> Result<ExperimentResult> {
    if grid.trials == 0 || grid.q_ratios.is_empty() || grid.algorithms.is_empty() {
        return Err(Error::InvalidParams(
            "experiment needs trials, q ratios and algorithms".into(),
        ));
    }
    let config = grid.diffusion_config();
    let tasks: Vec<(f64, usize)> = grid
        .q_ratios
        .iter()
        .flat_map(|&q| (0..grid.trials).map(move |t| (q, t)))
        .collect();
    let run_task = |&(q_ratio, trial): &(f64, usize)| -> Result<Vec<TrialResult>> {
        let seed = grid.base_seed + trial as u64;
        let params = ModelParams {
            n: grid.n,
            r: grid.r,
            p: grid.p,
            q: q_ratio * grid.p,
            seed,
        };
        let (h, truth) = generate(&params)?;
        grid.algorithms
            .iter()
            .map(|&algorithm| {
                let out = run_algorithm(&h, algorithm, &config)?;
                Ok(TrialResult {
                    q_ratio,
                    trial,
                    seed,
                    edges: h.edge_count(),
                    algorithm,
                    beta_hyper: out.beta_hyper,
                    beta_graph: out.beta_graph,
                    f1: f1_pair(&out.part, &truth).mean,
                    accuracy: accuracy(&out.part, &truth, h.vertex_count()),
                    eigenvalue: out.eigenvalue,
                    seconds: out.seconds,
                })
            })
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    let per_task: Vec<Result<Vec<TrialResult>>> = pool.install(|| tasks.par_iter().map(run_task).collect());
    let mut trials = Vec::new();
    for r in per_task {
        trials.extend(r?);
    }
    let summary = summarize(grid, &trials);
    Ok(ExperimentResult {
        grid: grid.clone(),
        trials,
        summary,
    })
}

fn summarize(grid: &ExperimentGrid, trials: &[TrialResult]) -> Vec<Summary> {
    let mut out = Vec::new();
    for &q_ratio in &grid.q_ratios {
        for &algorithm in &grid.algorithms {
            let rows: Vec<&TrialResult> = trials
                .iter()
                .filter(|t| t.q_ratio == q_ratio && t.algorithm == algorithm)
                .collect();
            let col = |f: fn(&TrialResult) -> f64| rows.iter().map(|t| f(t)).collect::<Vec<f64>>();
            let seconds = col(|t| t.seconds);
            out.push(Summary {
                q_ratio,
                algorithm,
                trials: rows.len(),
                edges: MeanStderr::of(&col(|t| t.edges as f64)).mean,
                beta_hyper: MeanStderr::of(&col(|t| t.beta_hyper)),
                beta_graph: MeanStderr::of(&col(|t| t.beta_graph)),
                f1: MeanStderr::of(&col(|t| t.f1)),
                seconds: MeanStderr::of(&seconds),
                total_seconds: seconds.iter().sum(),
            });
        }
    }
    out
}

/// One CSV row per grid point and algorithm.
pub fn summary_csv(summary: &[Summary]) -> String {
    let mut out = String::from(
        "q_ratio,algorithm,trials,edges,beta_hyper,beta_hyper_se,beta_graph,beta_graph_se,f1,f1_se,seconds,seconds_se\n",
    );
    for s in summary {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.q_ratio,
            s.algorithm.name(),
            s.trials,
            s.edges,
            s.beta_hyper.mean,
            s.beta_hyper.stderr,
            s.beta_graph.mean,
            s.beta_graph.stderr,
            s.f1.mean,
            s.f1.stderr,
            s.seconds.mean,
            s.seconds.stderr
        )
        .unwrap();
    }
    out
}
