//! Random two-cluster `r`-uniform hypergraphs.
//!
//! Vertices `0..n/2` form the left cluster and `n/2..n` the right one. Every
//! `r`-subset inside a cluster is an edge with probability `p`, every other
//! `r`-subset with probability `q`, independently.
//!
//! Candidate sets are far too many to enumerate at realistic sizes, so the
//! number of edges in each stratum (inside left, inside right, crossing) is
//! drawn from its binomial distribution and that many distinct subsets are
//! then sampled uniformly from the stratum.

use std::collections::HashSet;

use rand::seq::index;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::partition::Bipartition;
use crate::rng::{seeded, StreamRng};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

// Strata up to this many candidates may be listed explicitly.
const ENUMERATION_LIMIT: u64 = 5_000_000;

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "n must be even and at least 2, got {}",
                self.n
            )));
        }
        if self.r < 2 || self.r > self.n {
            return Err(Error::InvalidParams(format!(
                "r must lie in 2..={}, got {}",
                self.n, self.r
            )));
        }
        for (name, x) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParams(format!("{name} must lie in [0, 1], got {x}")));
            }
        }
        Ok(())
    }

    /// Number of candidate sets inside one cluster.
    pub fn intra_candidates(&self) -> u64 {
        binomial_coefficient(self.n / 2, self.r)
    }

    /// Number of candidate sets meeting both clusters.
    pub fn cross_candidates(&self) -> u64 {
        binomial_coefficient(self.n, self.r) - 2 * self.intra_candidates()
    }

    pub fn expected_edges(&self) -> f64 {
        2.0 * self.intra_candidates() as f64 * self.p + self.cross_candidates() as f64 * self.q
    }
}

pub fn binomial_coefficient(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// Draws a hypergraph and returns it with the planted clusters.
pub fn generate(params: &ModelParams) -> Result<(Hypergraph, Bipartition)> {
    params.validate()?;
    let n = params.n;
    let half = n / 2;
    let mut rng = seeded(params.seed);
    let count = |rng: &mut StreamRng, trials: u64, p: f64| -> Result<usize> {
        let dist = Binomial::new(trials, p).map_err(|e| Error::InvalidParams(e.to_string()))?;
        Ok(dist.sample(rng) as usize)
    };
    let intra = params.intra_candidates();
    let left_count = count(&mut rng, intra, params.p)?;
    let right_count = count(&mut rng, intra, params.p)?;
    let cross_count = count(&mut rng, params.cross_candidates(), params.q)?;

    let mut edges = Vec::with_capacity(left_count + right_count + cross_count);
    for (stratum, k) in [
        (Stratum::Left, left_count),
        (Stratum::Right, right_count),
        (Stratum::Cross, cross_count),
    ] {
        edges.extend(sample_stratum(&mut rng, params, stratum, k)?);
    }
    edges.sort_unstable();

    let h = Hypergraph::unweighted(n, edges)?;
    let truth = Bipartition::new((0..half).collect(), (half..n).collect())?;
    Ok((h, truth))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stratum {
    Left,
    Right,
    Cross,
}

impl Stratum {
    fn universe(self, n: usize) -> std::ops::Range<usize> {
        match self {
            Stratum::Left => 0..n / 2,
            Stratum::Right => n / 2..n,
            Stratum::Cross => 0..n,
        }
    }

    fn contains(self, set: &[usize], n: usize) -> bool {
        match self {
            Stratum::Cross => set.iter().any(|&v| v < n / 2) && set.iter().any(|&v| v >= n / 2),
            _ => true,
        }
    }

    fn size(self, params: &ModelParams) -> u64 {
        match self {
            Stratum::Cross => params.cross_candidates(),
            _ => params.intra_candidates(),
        }
    }
}

// Samples `k` distinct sorted r-subsets of the stratum, uniformly. Dense
// requests list the stratum and pick from it; sparse ones draw subsets of
// the stratum's universe and reject repeats and non-members.
fn sample_stratum(rng: &mut StreamRng, params: &ModelParams, stratum: Stratum, k: usize) -> Result<Vec<Vec<usize>>> {
    let (n, r) = (params.n, params.r);
    let total = stratum.size(params);
    if k == 0 {
        return Ok(Vec::new());
    }
    let universe: Vec<usize> = stratum.universe(n).collect();
    if 2 * (k as u64) > total {
        if binomial_coefficient(universe.len(), r) > ENUMERATION_LIMIT {
            return Err(Error::InvalidParams(format!(
                "edge probability too high: {k} of {total} candidates would have to be listed"
            )));
        }
        let all = enumerate(&universe, r, |s| stratum.contains(s, n));
        return Ok(index::sample(rng, all.len(), k)
            .into_iter()
            .map(|i| all[i].clone())
            .collect());
    }
    let mut seen = HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let mut set: Vec<usize> = index::sample(rng, universe.len(), r)
            .into_iter()
            .map(|i| universe[i])
            .collect();
        set.sort_unstable();
        if stratum.contains(&set, n) && seen.insert(set.clone()) {
            out.push(set);
        }
    }
    Ok(out)
}

fn enumerate(universe: &[usize], r: usize, keep: impl Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let m = universe.len();
    if r > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        let set: Vec<usize> = idx.iter().map(|&i| universe[i]).collect();
        if keep(&set) {
            out.push(set);
        }
        let mut i = r;
        while i > 0 && idx[i - 1] == m - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
