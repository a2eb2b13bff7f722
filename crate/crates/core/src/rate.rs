//! The rate of change `r = df/dt` of the hypergraph heat diffusion.
//!
//! Vertices are grouped into classes of equal `f` value. Every edge with
//! nonzero discrepancy contributes one "side entry" to the class holding its
//! maximizers and one to the class holding its minimizers. Within a class the
//! rates are fixed greedily: a linear program finds the set `P` of vertices
//! whose common rate `δ(P)` is largest, those vertices and the entries they
//! absorb are removed, and the procedure repeats on what is left.
//!
//! An edge whose vertices all carry the same value sits in one class on both
//! sides, so it contributes two entries there.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{check_vector, Error, Result};
use crate::flow::FlowNetwork;
use crate::hypergraph::Hypergraph;
use crate::lp::{LinearProgram, Relation};

/// Per-edge argmax and argmin vertex sets, ties included.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMinSets {
    pub max: Vec<Vec<usize>>,
    pub min: Vec<Vec<usize>>,
    /// `max f + min f` per edge.
    pub discrepancy: Vec<f64>,
}

pub fn max_min_sets(h: &Hypergraph, f: &[f64]) -> Result<MaxMinSets> {
    check_vector(f, h.vertex_count())?;
    let m = h.edge_count();
    let mut out = MaxMinSets {
        max: Vec::with_capacity(m),
        min: Vec::with_capacity(m),
        discrepancy: Vec::with_capacity(m),
    };
    for (e, _) in h.edges() {
        let hi = e.iter().map(|&v| f[v]).fold(f64::NEG_INFINITY, f64::max);
        let lo = e.iter().map(|&v| f[v]).fold(f64::INFINITY, f64::min);
        out.max.push(e.iter().copied().filter(|&v| f[v] == hi).collect());
        out.min.push(e.iter().copied().filter(|&v| f[v] == lo).collect());
        out.discrepancy.push(hi + lo);
    }
    Ok(out)
}

/// Which extreme of an edge a side entry stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extreme {
    Max,
    Min,
}

/// One side of an edge with nonzero discrepancy, as seen from the class that
/// holds that side's vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideEntry {
    pub edge: usize,
    pub extreme: Extreme,
    /// True when the discrepancy is negative, so the entry pushes the rates
    /// of its vertices up.
    pub gain: bool,
    /// The weighted discrepancy `w(e)|Δ(e)|`.
    pub weight: f64,
    /// The side's vertices that are still unassigned.
    pub members: Vec<usize>,
}

impl SideEntry {
    // Entries whose vertices must all receive the same rate.
    fn linked(&self) -> bool {
        matches!((self.extreme, self.gain), (Extreme::Max, true) | (Extreme::Min, false))
    }

    // Whether assigning the marked vertices absorbs this entry.
    fn absorbed_by(&self, marked: &[bool]) -> bool {
        match (self.extreme, self.gain) {
            (Extreme::Max, false) => self.members.iter().any(|&v| marked[v]),
            _ => self.members.iter().all(|&v| marked[v]),
        }
    }

    fn signed_weight(&self) -> f64 {
        if self.gain {
            self.weight
        } else {
            -self.weight
        }
    }
}

/// A maximal set of vertices with equal `f` value, with the edges whose
/// maximizers or minimizers lie in it, split by discrepancy sign.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceClass {
    pub value: f64,
    pub members: Vec<usize>,
    /// Edges with maximizers here and negative discrepancy.
    pub max_gain: Vec<usize>,
    /// Edges with maximizers here and positive discrepancy.
    pub max_loss: Vec<usize>,
    /// Edges with minimizers here and negative discrepancy.
    pub min_gain: Vec<usize>,
    /// Edges with minimizers here and positive discrepancy.
    pub min_loss: Vec<usize>,
}

// -0.0 and 0.0 must land in the same class.
fn class_key(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

// Returns class values in increasing order and the class index per vertex.
fn class_index(f: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| class_key(f[a]).total_cmp(&class_key(f[b])).then(a.cmp(&b)));
    let mut values = Vec::new();
    let mut index = vec![0; f.len()];
    for v in order {
        let key = class_key(f[v]);
        if values.last() != Some(&key) {
            values.push(key);
        }
        index[v] = values.len() - 1;
    }
    (values, index)
}

pub fn partition_classes(h: &Hypergraph, f: &[f64]) -> Result<Vec<EquivalenceClass>> {
    let sets = max_min_sets(h, f)?;
    let (values, index) = class_index(f);
    let mut classes: Vec<EquivalenceClass> = values
        .iter()
        .map(|&value| EquivalenceClass {
            value,
            members: Vec::new(),
            max_gain: Vec::new(),
            max_loss: Vec::new(),
            min_gain: Vec::new(),
            min_loss: Vec::new(),
        })
        .collect();
    for (v, &c) in index.iter().enumerate() {
        classes[c].members.push(v);
    }
    for (e, &d) in sets.discrepancy.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let top = &mut classes[index[sets.max[e][0]]];
        if d < 0.0 {
            top.max_gain.push(e);
        } else {
            top.max_loss.push(e);
        }
        let bottom = &mut classes[index[sets.min[e][0]]];
        if d < 0.0 {
            bottom.min_gain.push(e);
        } else {
            bottom.min_loss.push(e);
        }
    }
    Ok(classes)
}

/// The support of an optimal solution of the class program.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassLpSolution {
    pub set: Vec<usize>,
    pub objective: f64,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Solves the class program over the unassigned vertices `members` and the
/// unabsorbed `entries`: maximize the net weighted discrepancy per unit
/// volume. Vertices tied together by linked entries are contracted into one
/// variable first, and an entry touching a single contracted group folds
/// into that group's objective coefficient.
pub fn solve_class_lp(members: &[usize], entries: &[SideEntry], degrees: &[f64]) -> Result<ClassLpSolution> {
    let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    for entry in entries.iter().filter(|e| e.linked()) {
        let first = local[&entry.members[0]];
        for v in &entry.members[1..] {
            let (a, b) = (find(&mut parent, first), find(&mut parent, local[v]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut group_of_root = HashMap::new();
    let mut group = vec![0; members.len()];
    let mut volume = Vec::new();
    for i in 0..members.len() {
        let root = find(&mut parent, i);
        let g = *group_of_root.entry(root).or_insert_with(|| {
            volume.push(0.0);
            volume.len() - 1
        });
        group[i] = g;
        volume[g] += degrees[members[i]];
    }
    let groups = volume.len();
    if groups == 1 {
        let net: f64 = entries.iter().map(SideEntry::signed_weight).sum();
        return Ok(ClassLpSolution {
            set: members.to_vec(),
            objective: net / volume[0],
        });
    }

    let mut objective = vec![0.0; groups];
    let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64)> = Vec::new();
    for entry in entries {
        let mut touched: Vec<usize> = entry.members.iter().map(|v| group[local[v]]).collect();
        touched.sort_unstable();
        touched.dedup();
        if touched.len() == 1 {
            objective[touched[0]] += entry.signed_weight();
            continue;
        }
        let x = objective.len();
        objective.push(entry.signed_weight());
        for &g in &touched {
            // A gaining min side is capped by its smallest vertex rate, a
            // losing max side is charged its largest.
            let row = if entry.gain {
                vec![(x, 1.0), (g, -1.0)]
            } else {
                vec![(g, 1.0), (x, -1.0)]
            };
            rows.push((row, Relation::Le, 0.0));
        }
    }
    let mut lp = LinearProgram::maximize(objective);
    for (row, rel, rhs) in rows {
        lp.add_constraint(row, rel, rhs);
    }
    lp.add_constraint(
        volume.iter().enumerate().map(|(g, &vol)| (g, vol)).collect(),
        Relation::Eq,
        1.0,
    );
    let solution = lp.solve()?;
    let y = &solution.x[..groups];
    let top = y.iter().copied().fold(0.0, f64::max);
    let set = members
        .iter()
        .enumerate()
        .filter(|&(i, _)| y[group[i]] > 1e-8 * top)
        .map(|(_, &v)| v)
        .collect();
    Ok(ClassLpSolution {
        set,
        objective: solution.objective,
    })
}

/// One greedy step inside a class: the vertices in `set` all receive rate
/// `delta = net / volume`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    /// Common `f` value of the class.
    pub value: f64,
    pub set: Vec<usize>,
    pub delta: f64,
    pub net: f64,
    pub volume: f64,
    /// Entries absorbed by this step, with their members as they stood when
    /// absorbed.
    pub absorbed: Vec<SideEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub rate: Vec<f64>,
    /// Steps grouped by class in increasing class value; within a class the
    /// rates strictly decrease.
    pub trace: Vec<TraceStep>,
    /// Zero-degree vertices, which receive rate zero without a step.
    pub isolated: Vec<usize>,
}

// Relative gap below which consecutive steps are treated as one.
const MERGE_TOL: f64 = 1e-9;
// Relative increase above which the greedy order is reported as broken.
const MONOTONE_TOL: f64 = 1e-7;

/// Computes `r = df/dt` for the diffusion at `f`.
pub fn compute_rate(h: &Hypergraph, f: &[f64]) -> Result<RateResult> {
    let n = h.vertex_count();
    let sets = max_min_sets(h, f)?;
    let (values, index) = class_index(f);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); values.len()];
    let mut isolated = Vec::new();
    for v in 0..n {
        if h.degrees()[v] > 0.0 {
            members[index[v]].push(v);
        } else {
            isolated.push(v);
        }
    }
    let mut entries: Vec<Vec<SideEntry>> = vec![Vec::new(); values.len()];
    for (e, &d) in sets.discrepancy.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let weight = h.weight(e) * d.abs();
        for (extreme, side) in [(Extreme::Max, &sets.max[e]), (Extreme::Min, &sets.min[e])] {
            entries[index[side[0]]].push(SideEntry {
                edge: e,
                extreme,
                gain: d < 0.0,
                weight,
                members: side.clone(),
            });
        }
    }

    let mut rate = vec![0.0; n];
    let mut trace = Vec::new();
    let mut marked = vec![false; n];
    for (c, value) in values.into_iter().enumerate() {
        let steps = solve_class(
            value,
            std::mem::take(&mut members[c]),
            std::mem::take(&mut entries[c]),
            h.degrees(),
            &mut marked,
        )?;
        for step in &steps {
            for &v in &step.set {
                rate[v] = step.delta;
            }
        }
        trace.extend(steps);
    }
    Ok(RateResult { rate, trace, isolated })
}

fn solve_class(
    value: f64,
    mut remaining: Vec<usize>,
    mut entries: Vec<SideEntry>,
    degrees: &[f64],
    marked: &mut [bool],
) -> Result<Vec<TraceStep>> {
    let mut steps: Vec<TraceStep> = Vec::new();
    while !remaining.is_empty() {
        let set = if entries.is_empty() {
            remaining.clone()
        } else {
            solve_class_lp(&remaining, &entries, degrees)?.set
        };
        for &v in &set {
            marked[v] = true;
        }
        let (absorbed, kept): (Vec<SideEntry>, Vec<SideEntry>) =
            entries.into_iter().partition(|e| e.absorbed_by(marked));
        entries = kept;
        for entry in &mut entries {
            entry.members.retain(|&v| !marked[v]);
        }
        remaining.retain(|&v| !marked[v]);
        for &v in &set {
            marked[v] = false;
        }

        let net: f64 = absorbed.iter().map(SideEntry::signed_weight).sum();
        let volume: f64 = set.iter().map(|&v| degrees[v]).sum();
        let delta = net / volume;
        if let Some(last) = steps.last_mut() {
            let scale = last.delta.abs().max(1.0);
            if delta > last.delta + MONOTONE_TOL * scale {
                return Err(Error::NonMonotoneTrace {
                    prev: last.delta,
                    next: delta,
                });
            }
            if delta >= last.delta - MERGE_TOL * scale {
                last.set.extend(set);
                last.set.sort_unstable();
                last.net += net;
                last.volume += volume;
                last.delta = last.net / last.volume;
                last.absorbed.extend(absorbed);
                continue;
            }
        }
        let mut set = set;
        set.sort_unstable();
        steps.push(TraceStep {
            value,
            set,
            delta,
            net,
            volume,
            absorbed,
        });
    }
    Ok(steps)
}

/// Rate contributions `r_e(v)` of one edge side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideContribution {
    pub edge: usize,
    pub extreme: Extreme,
    /// `(vertex, r_e(vertex))` pairs for the vertices the side touches.
    pub values: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowDecomposition {
    pub sides: Vec<SideContribution>,
}

impl FlowDecomposition {
    /// `Σ_e r_e(v)` per vertex.
    pub fn vertex_totals(&self, n: usize) -> Vec<f64> {
        let mut total = vec![0.0; n];
        for side in &self.sides {
            for &(v, r) in &side.values {
                total[v] += r;
            }
        }
        total
    }
}

/// Splits the rate of every trace step among the absorbed edge sides by a
/// maximum flow: gaining sides feed the step's vertices from the source,
/// losing sides drain them to the sink, and each vertex exchanges
/// `deg(v)|δ|` with the terminal on the side of `δ`'s sign.
pub fn decompose_flow(h: &Hypergraph, rate: &RateResult) -> Result<FlowDecomposition> {
    let degrees = h.degrees();
    let mut sides = Vec::new();
    for step in &rate.trace {
        let k = step.absorbed.len();
        let (s, t) = (0, 1);
        let local: HashMap<usize, usize> = step.set.iter().enumerate().map(|(i, &v)| (v, 2 + k + i)).collect();
        let mut net = FlowNetwork::new(2 + k + step.set.len());
        let finite: f64 = step.absorbed.iter().map(|e| e.weight).sum::<f64>()
            + step.set.iter().map(|&v| degrees[v] * step.delta.abs()).sum::<f64>();
        let infinite = finite + 1.0;
        let mut source_cut = 0.0;
        for (i, entry) in step.absorbed.iter().enumerate() {
            if entry.gain {
                net.add_edge(s, 2 + i, entry.weight);
                source_cut += entry.weight;
            } else {
                net.add_edge(2 + i, t, entry.weight);
            }
        }
        for &v in &step.set {
            let cap = degrees[v] * step.delta.abs();
            if step.delta >= 0.0 {
                net.add_edge(local[&v], t, cap);
            } else {
                net.add_edge(s, local[&v], cap);
                source_cut += cap;
            }
        }
        let mut links = Vec::new();
        for (i, entry) in step.absorbed.iter().enumerate() {
            for &v in &entry.members {
                if let Some(&node) = local.get(&v) {
                    links.push((i, v, net.add_edge(2 + i, node, infinite)));
                }
            }
        }
        let eps = 1e-13 * finite.max(1.0);
        let flow = net.max_flow(s, t, eps);
        if flow < source_cut - 1e-9 * source_cut.max(1.0) {
            return Err(Error::FlowShortfall { flow, cut: source_cut });
        }
        let mut per_entry: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
        for (i, v, handle) in links {
            per_entry[i].push((v, net.flow(handle) / degrees[v]));
        }
        for (entry, values) in step.absorbed.iter().zip(per_entry) {
            sides.push(SideContribution {
                edge: entry.edge,
                extreme: entry.extreme,
                values,
            });
        }
    }
    Ok(FlowDecomposition { sides })
}

/// Worst-case deviations found when checking a rate vector and its flow
/// decomposition against the diffusion rules.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RuleCheck {
    /// Largest `|Σ_{v∈side} deg(v) r_e(v) + w(e)Δ(e)|` over edge sides.
    pub side_sums: f64,
    /// Largest gap between an active vertex's rate and the value the sign
    /// rules require of it.
    pub side_rates: f64,
    /// Largest `|r(v) − Σ_e r_e(v)|`.
    pub coverage: f64,
    /// Sides missing from the decomposition, present for zero-discrepancy
    /// edges, or contributions on vertices outside the side.
    pub misplaced: usize,
    /// `|‖r‖_w² + Σ_e w(e)Δ(e)(r_e^S + r_e^I)|`.
    pub norm_identity: f64,
    /// `|−⟨f, r⟩_w − Σ_e w(e)Δ(e)²|`.
    pub rayleigh: f64,
}

impl RuleCheck {
    pub fn within(&self, tol: f64) -> bool {
        self.misplaced == 0
            && self.side_sums <= tol
            && self.side_rates <= tol
            && self.coverage <= tol
            && self.norm_identity <= tol
            && self.rayleigh <= tol
    }
}

pub fn check_rules(h: &Hypergraph, f: &[f64], rate: &RateResult, flow: &FlowDecomposition) -> Result<RuleCheck> {
    let sets = max_min_sets(h, f)?;
    let r = &rate.rate;
    let degrees = h.degrees();
    let mut check = RuleCheck::default();
    let mut seen: HashMap<(usize, Extreme), usize> = HashMap::new();
    for (i, side) in flow.sides.iter().enumerate() {
        if seen.insert((side.edge, side.extreme), i).is_some() {
            check.misplaced += 1;
        }
    }
    let active_tol = 1e-9;
    let mut norm_rhs = 0.0;
    let mut quad = 0.0;
    for (e, &d) in sets.discrepancy.iter().enumerate() {
        let w = h.weight(e);
        quad += w * d * d;
        let r_max = sets.max[e].iter().map(|&v| r[v]).fold(f64::NEG_INFINITY, f64::max);
        let r_min = sets.min[e].iter().map(|&v| r[v]).fold(f64::INFINITY, f64::min);
        for (extreme, members) in [(Extreme::Max, &sets.max[e]), (Extreme::Min, &sets.min[e])] {
            let side = seen.get(&(e, extreme)).map(|&i| &flow.sides[i]);
            if d == 0.0 {
                if side.is_some_and(|s| s.values.iter().any(|x| x.1.abs() > active_tol)) {
                    check.misplaced += 1;
                }
                continue;
            }
            let Some(side) = side else {
                check.misplaced += 1;
                continue;
            };
            let mut sum = 0.0;
            for &(v, re) in &side.values {
                if !members.contains(&v) {
                    check.misplaced += 1;
                    continue;
                }
                sum += degrees[v] * re;
                if re.abs() <= active_tol {
                    continue;
                }
                let gap = match (extreme, d < 0.0) {
                    (Extreme::Max, false) => r_max - r[v],
                    (Extreme::Min, true) => r[v] - r_min,
                    // The whole side must move together.
                    _ => {
                        let (lo, hi) = members.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, &u| {
                            (acc.0.min(r[u]), acc.1.max(r[u]))
                        });
                        hi - lo
                    }
                };
                check.side_rates = check.side_rates.max(gap);
            }
            check.side_sums = check.side_sums.max((sum + w * d).abs());
        }
        if d != 0.0 {
            norm_rhs -= w * d * (r_max + r_min);
        }
    }
    let totals = flow.vertex_totals(h.vertex_count());
    for v in 0..h.vertex_count() {
        check.coverage = check.coverage.max((r[v] - totals[v]).abs());
    }
    let norm = h.weighted_norm_sq(r)?;
    check.norm_identity = (norm - norm_rhs).abs();
    check.rayleigh = (-h.weighted_inner(f, r)? - quad).abs();
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_edge() -> Hypergraph {
        Hypergraph::unweighted(3, vec![vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn max_min_examples() {
        let h = single_edge();
        let s = max_min_sets(&h, &[1.0, 1.0, -2.0]).unwrap();
        assert_eq!((s.max[0].clone(), s.min[0].clone()), (vec![0, 1], vec![2]));
        assert_eq!(s.discrepancy[0], -1.0);
        let s = max_min_sets(&h, &[0.5, 0.5, 0.5]).unwrap();
        assert_eq!((s.max[0].clone(), s.min[0].clone()), (vec![0, 1, 2], vec![0, 1, 2]));
        let s = max_min_sets(&h, &[3.0, 1.0, 0.0]).unwrap();
        assert_eq!((s.max[0].clone(), s.min[0].clone()), (vec![0], vec![2]));
    }

    #[test]
    fn class_examples() {
        let h = single_edge();
        let classes = partition_classes(&h, &[1.0, 1.0, -2.0]).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].members, vec![2]);
        assert_eq!(classes[0].min_gain, vec![0]);
        assert_eq!(classes[1].members, vec![0, 1]);
        assert_eq!(classes[1].max_gain, vec![0]);
        assert!(classes[1].max_loss.is_empty() && classes[1].min_loss.is_empty());

        let classes = partition_classes(&h, &[0.3, -0.1, 0.2]).unwrap();
        assert_eq!(classes.len(), 3);

        let classes = partition_classes(&h, &[0.0, -0.0, 1.0]).unwrap();
        assert_eq!(classes[0].members, vec![0, 1]);
    }

    #[test]
    fn class_lp_examples() {
        let deg = [1.0, 1.0, 1.0];
        let entry = |extreme, members: Vec<usize>| SideEntry {
            edge: 0,
            extreme,
            gain: true,
            weight: 1.0,
            members,
        };
        let s = solve_class_lp(&[0, 1], &[entry(Extreme::Max, vec![0, 1])], &deg).unwrap();
        assert_eq!(s.set, vec![0, 1]);
        assert!((s.objective - 0.5).abs() < 1e-12);
        let s = solve_class_lp(&[2], &[entry(Extreme::Min, vec![2])], &deg).unwrap();
        assert_eq!(s.set, vec![2]);
        assert!((s.objective - 1.0).abs() < 1e-12);
        // A gaining min side over two unlinked vertices: the program
        // spreads evenly, x = y0 = y1 = 1/2.
        let s = solve_class_lp(&[0, 1], &[entry(Extreme::Min, vec![0, 1])], &deg).unwrap();
        assert_eq!(s.set, vec![0, 1]);
        assert!((s.objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn single_edge_rate() {
        let h = single_edge();
        let f = [1.0, 1.0, -2.0];
        let res = compute_rate(&h, &f).unwrap();
        assert_eq!(res.rate, vec![0.5, 0.5, 1.0]);
        let flow = decompose_flow(&h, &res).unwrap();
        let check = check_rules(&h, &f, &res, &flow).unwrap();
        assert!(check.within(1e-12), "{check:?}");
        let max_side = flow.sides.iter().find(|s| s.extreme == Extreme::Max).unwrap();
        assert_eq!(max_side.values, vec![(0, 0.5), (1, 0.5)]);
        let min_side = flow.sides.iter().find(|s| s.extreme == Extreme::Min).unwrap();
        assert_eq!(min_side.values, vec![(2, 1.0)]);
    }

    #[test]
    fn crossing_indicator_has_zero_rate() {
        let h = Hypergraph::unweighted(5, vec![vec![0, 1, 2], vec![1, 3], vec![2, 3, 4]]).unwrap();
        let f = [1.0, -1.0, -1.0, 1.0, -1.0];
        let res = compute_rate(&h, &f).unwrap();
        assert!(res.rate.iter().all(|&x| x == 0.0));
        let flow = decompose_flow(&h, &res).unwrap();
        assert!(flow.sides.is_empty());
        assert!(check_rules(&h, &f, &res, &flow).unwrap().within(0.0));
    }

    #[test]
    fn isolated_vertices_get_zero() {
        let h = Hypergraph::unweighted(4, vec![vec![0, 1]]).unwrap();
        let res = compute_rate(&h, &[1.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(res.isolated, vec![2, 3]);
        assert_eq!(res.rate, vec![-2.0, -2.0, 0.0, 0.0]);
    }

    #[test]
    fn flat_edge_counts_both_sides() {
        // A graph edge with equal endpoint values behaves like J = D + A.
        let h = Hypergraph::new(2, vec![(vec![0, 1], 2.0)]).unwrap();
        let res = compute_rate(&h, &[0.5, 0.5]).unwrap();
        assert!((res.rate[0] + 1.0).abs() < 1e-15 && (res.rate[1] + 1.0).abs() < 1e-15);
    }

    // Two 6-cliques joined by four rank-3 edges. `choice` picks, for each
    // rank-3 edge, which of its two same-side vertices gets -1.
    pub(crate) fn eigen_fixture(choice: u32) -> (Hypergraph, Vec<f64>) {
        let mut edges = Vec::new();
        for base in [0, 6] {
            for i in 0..6 {
                for j in i + 1..6 {
                    edges.push(vec![base + i, base + j]);
                }
            }
        }
        // Lone vertex first, then the pair from the other clique.
        let triples = [[0, 6, 7], [1, 8, 9], [10, 2, 3], [11, 4, 5]];
        let mut f = vec![0.0; 12];
        for (k, t) in triples.iter().enumerate() {
            edges.push(t.to_vec());
            f[t[0]] = 1.0;
            let (neg, zero) = if choice >> k & 1 == 0 {
                (t[1], t[2])
            } else {
                (t[2], t[1])
            };
            f[neg] = -1.0;
            f[zero] = 0.0;
        }
        (Hypergraph::unweighted(12, edges).unwrap(), f)
    }

    #[test]
    fn eigen_fixture_all_sign_choices() {
        for choice in 0..16 {
            let (h, f) = eigen_fixture(choice);
            let res = compute_rate(&h, &f).unwrap();
            for v in 0..12 {
                assert!(
                    (res.rate[v] + 2.0 / 3.0 * f[v]).abs() < 1e-12,
                    "choice {choice} vertex {v}: {} vs {}",
                    res.rate[v],
                    f[v]
                );
            }
            let flow = decompose_flow(&h, &res).unwrap();
            assert!(check_rules(&h, &f, &res, &flow).unwrap().within(1e-10));
        }
    }

    // Direct enumeration of the greedy recursion: within each class, over
    // all subsets P of the unassigned vertices that keep linked sides whole,
    // pick the largest δ(P), ties resolved by the largest set.
    pub(crate) fn brute_force_rate(h: &Hypergraph, f: &[f64]) -> Vec<f64> {
        let n = h.vertex_count();
        let mut rate = vec![0.0; n];
        let deg = h.degrees();
        let mut values: Vec<f64> = f.iter().map(|&x| x + 0.0).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for value in values {
            let mut remaining: Vec<usize> = (0..n).filter(|&v| f[v] + 0.0 == value && deg[v] > 0.0).collect();
            // (edge, is_max_side, Δ, live members)
            let mut sides: Vec<(usize, bool, f64, Vec<usize>)> = Vec::new();
            for (e, (verts, _)) in h.edges().enumerate() {
                let hi = verts.iter().map(|&v| f[v]).fold(f64::MIN, f64::max);
                let lo = verts.iter().map(|&v| f[v]).fold(f64::MAX, f64::min);
                let d = hi + lo;
                if d == 0.0 {
                    continue;
                }
                if hi + 0.0 == value {
                    sides.push((e, true, d, verts.iter().copied().filter(|&v| f[v] == hi).collect()));
                }
                if lo + 0.0 == value {
                    sides.push((e, false, d, verts.iter().copied().filter(|&v| f[v] == lo).collect()));
                }
            }
            while !remaining.is_empty() {
                let k = remaining.len();
                assert!(k <= 16, "oracle limited to small classes");
                let mut best: Option<(f64, u32)> = None;
                for mask in 1u32..(1 << k) {
                    let inside = |v: usize| {
                        remaining
                            .iter()
                            .position(|&u| u == v)
                            .is_some_and(|i| mask >> i & 1 == 1)
                    };
                    let mut ok = true;
                    let mut net = 0.0;
                    for (e, is_max, d, members) in &sides {
                        let any = members.iter().any(|&v| inside(v));
                        let all = members.iter().all(|&v| inside(v));
                        let c = h.weight(*e) * d.abs();
                        let must_move_together = (*is_max && *d < 0.0) || (!*is_max && *d > 0.0);
                        if must_move_together && any && !all {
                            ok = false;
                            break;
                        }
                        let absorbed = if *is_max && *d > 0.0 { any } else { all };
                        if absorbed {
                            net += if *d < 0.0 { c } else { -c };
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let vol: f64 = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| deg[remaining[i]]).sum();
                    let delta = net / vol;
                    let better = match best {
                        None => true,
                        Some((b, bm)) => {
                            delta > b + 1e-12 || (delta > b - 1e-12 && mask.count_ones() > bm.count_ones())
                        }
                    };
                    if better {
                        best = Some((delta, mask));
                    }
                }
                let (delta, mask) = best.unwrap();
                let chosen: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| remaining[i]).collect();
                for &v in &chosen {
                    rate[v] = delta;
                }
                sides.retain(|(_, is_max, d, members)| {
                    let any = members.iter().any(|v| chosen.contains(v));
                    let all = members.iter().all(|v| chosen.contains(v));
                    !(if *is_max && *d > 0.0 { any } else { all })
                });
                for side in &mut sides {
                    side.3.retain(|v| !chosen.contains(v));
                }
                remaining.retain(|v| !chosen.contains(v));
            }
        }
        rate
    }

    #[test]
    fn oracle_agrees_on_fixtures() {
        let h = single_edge();
        assert_eq!(brute_force_rate(&h, &[1.0, 1.0, -2.0]), vec![0.5, 0.5, 1.0]);
        let (h, f) = eigen_fixture(5);
        let r = brute_force_rate(&h, &f);
        for v in 0..12 {
            assert!((r[v] + 2.0 / 3.0 * f[v]).abs() < 1e-12);
        }
    }

    fn small_instance() -> impl Strategy<Value = (Hypergraph, Vec<f64>)> {
        (3usize..9).prop_flat_map(|n| {
            let edge = (
                proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2..=n.min(4)),
                1u8..4,
            );
            (
                proptest::collection::vec(edge, 1..8),
                proptest::collection::vec(-2i8..3, n),
            )
                .prop_map(move |(edges, vals)| {
                    let edges = edges.into_iter().map(|(e, w)| (e, w as f64 * 0.5)).collect();
                    let h = Hypergraph::new(n, edges).unwrap();
                    (h, vals.into_iter().map(f64::from).collect())
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn matches_brute_force((h, f) in small_instance()) {
            let res = compute_rate(&h, &f).unwrap();
            let oracle = brute_force_rate(&h, &f);
            for v in 0..h.vertex_count() {
                prop_assert!((res.rate[v] - oracle[v]).abs() < 1e-9, "v={} {:?} vs {:?}", v, res.rate, oracle);
            }
        }

        #[test]
        fn rules_hold((h, f) in small_instance()) {
            let res = compute_rate(&h, &f).unwrap();
            let flow = decompose_flow(&h, &res).unwrap();
            let check = check_rules(&h, &f, &res, &flow).unwrap();
            prop_assert!(check.within(1e-9), "{:?}", check);
        }

        #[test]
        fn trace_strictly_decreases_per_class((h, f) in small_instance()) {
            let res = compute_rate(&h, &f).unwrap();
            for pair in res.trace.windows(2) {
                if pair[0].value == pair[1].value {
                    prop_assert!(pair[1].delta < pair[0].delta);
                }
            }
            let mut count = vec![0; h.vertex_count()];
            for step in &res.trace {
                for &v in &step.set {
                    count[v] += 1;
                }
            }
            for &v in &res.isolated {
                count[v] += 1;
            }
            prop_assert!(count.iter().all(|&c| c == 1));
        }
    }
}
