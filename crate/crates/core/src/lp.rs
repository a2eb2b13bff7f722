//! A small dense two-phase simplex solver for problems of the form
//!
//! ```text
//! maximize  c·x   subject to  A_i·x (<= | = | >=) b_i,  x >= 0.
//! ```
//!
//! The rate computation only ever produces problems with a few hundred
//! variables, so a dense tableau is plenty. Pricing is Dantzig's rule with a
//! switch to Bland's rule after a run of degenerate pivots, which rules out
//! cycling.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("linear program is infeasible (phase one objective {0:e})")]
    Infeasible(f64),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
    #[error("constraint refers to variable {var} but the program has {count}")]
    BadVariable { var: usize, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, f64)>,
    rel: Relation,
    rhs: f64,
}

/// A linear program in builder form.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

impl LinearProgram {
    /// A program over `objective.len()` nonnegative variables, maximizing
    /// `objective · x`.
    pub fn maximize(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn variable_count(&self) -> usize {
        self.objective.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    /// Adds `Σ coeff · x[var]  rel  rhs`. Repeated variables are summed.
    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, rel: Relation, rhs: f64) {
        self.rows.push(Row { coeffs, rel, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self)?.run()
    }
}

struct Tableau {
    // (m + 1) rows of width (cols + 1); the last column is the right-hand
    // side, the last row holds reduced costs of the current objective.
    t: Vec<f64>,
    m: usize,
    cols: usize,
    n_orig: usize,
    basis: Vec<usize>,
    artificial_start: usize,
    objective: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Result<Self, LpError> {
        let n = lp.objective.len();
        let m = lp.rows.len();
        // Normalize every row to a nonnegative right-hand side.
        let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(m);
        for row in &lp.rows {
            let mut dense = vec![0.0; n];
            for &(var, a) in &row.coeffs {
                if var >= n {
                    return Err(LpError::BadVariable { var, count: n });
                }
                dense[var] += a;
            }
            let (mut rel, mut rhs) = (row.rel, row.rhs);
            if rhs < 0.0 {
                dense.iter_mut().for_each(|a| *a = -*a);
                rhs = -rhs;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            rows.push((dense, rel, rhs));
        }
        let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let artificial_start = n + slacks;
        let cols = artificial_start + artificials;
        let width = cols + 1;
        let mut t = vec![0.0; (m + 1) * width];
        let mut basis = vec![0; m];
        let (mut s, mut a) = (n, artificial_start);
        for (i, (dense, rel, rhs)) in rows.into_iter().enumerate() {
            let row = &mut t[i * width..(i + 1) * width];
            row[..n].copy_from_slice(&dense);
            row[cols] = rhs;
            match rel {
                Relation::Le => {
                    row[s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -1.0;
                    s += 1;
                    row[a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
            }
        }
        Ok(Tableau {
            t,
            m,
            cols,
            n_orig: n,
            basis,
            artificial_start,
            objective: lp.objective.clone(),
            pivots: 0,
        })
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width() + j]
    }

    // Loads reduced costs for maximizing `cost` (indexed by column) into the
    // bottom row: entry j holds z_j - c_j, the last entry the objective.
    fn load_objective(&mut self, cost: &[f64]) {
        let w = self.width();
        let m = self.m;
        let mut bottom = vec![0.0; w];
        for (j, &c) in cost.iter().enumerate() {
            bottom[j] = -c;
        }
        for i in 0..m {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    bottom[j] += cb * self.t[i * w + j];
                }
            }
        }
        self.t[m * w..].copy_from_slice(&bottom);
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        let (before, rest) = self.t.split_at_mut(r * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let factor = row[c];
            if factor != 0.0 {
                for (x, &p) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= factor * p;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    // Runs simplex iterations over columns `0..limit` until optimal.
    fn iterate(&mut self, limit: usize) -> Result<(), LpError> {
        let max_pivots = 50 * (self.m + self.cols) + 1000;
        let mut degenerate = 0;
        loop {
            if self.pivots > max_pivots {
                return Err(LpError::IterationLimit(self.pivots));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let bottom = self.m;
            let mut entering = None;
            let mut best = -TOL;
            for j in 0..limit {
                let d = self.at(bottom, j);
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > TOL {
                    let ratio = self.at(i, self.cols) / a;
                    let better = match leaving {
                        None => true,
                        Some((l, r)) => ratio < r - TOL || (ratio <= r + TOL && self.basis[i] < self.basis[l]),
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leaving else {
                return Err(LpError::Unbounded);
            };
            if ratio <= TOL {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }

    fn run(mut self) -> Result<LpSolution, LpError> {
        if self.artificial_start < self.cols {
            // Phase one: maximize minus the sum of artificials.
            let mut cost = vec![0.0; self.cols];
            cost[self.artificial_start..].iter_mut().for_each(|c| *c = -1.0);
            self.load_objective(&cost);
            self.iterate(self.cols)?;
            let infeasibility = -self.at(self.m, self.cols);
            if infeasibility > 1e-7 {
                return Err(LpError::Infeasible(infeasibility));
            }
            self.drive_out_artificials();
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.n_orig].copy_from_slice(&self.objective);
        self.load_objective(&cost);
        self.iterate(self.artificial_start)?;
        let mut x = vec![0.0; self.n_orig];
        for i in 0..self.m {
            if self.basis[i] < self.n_orig {
                x[self.basis[i]] = self.at(i, self.cols).max(0.0);
            }
        }
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots: self.pivots,
        })
    }

    // Artificials left in the basis at level zero are pivoted out where
    // possible; rows where that fails are redundant and the artificial stays
    // basic at zero, which is harmless because phase two never lets it enter.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.m {
            if self.basis[i] >= self.artificial_start {
                if let Some(j) = (0..self.artificial_start).find(|&j| self.at(i, j).abs() > TOL) {
                    self.pivot(i, j);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::maximize(vec![3.0, 5.0]);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 4.0);
        lp.add_constraint(vec![(1, 2.0)], Relation::Le, 12.0);
        lp.add_constraint(vec![(0, 3.0), (1, 2.0)], Relation::Le, 18.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max -x - y, x + y = 2, x >= 0.5 -> objective -2
        let mut lp = LinearProgram::maximize(vec![-1.0, -1.0]);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 2.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Ge, 0.5);
        let s = lp.solve().unwrap();
        assert!((s.objective + 2.0).abs() < 1e-9);
        assert!(s.x[0] >= 0.5 - 1e-9);
    }

    #[test]
    fn negative_rhs_is_flipped() {
        // max x, -x >= -3 -> 3
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_constraint(vec![(0, -1.0)], Relation::Ge, -3.0);
        assert!((lp.solve().unwrap().objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 1.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Ge, 2.0);
        assert!(matches!(lp.solve(), Err(LpError::Infeasible(_))));

        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.add_constraint(vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap_err(), LpError::Unbounded);

        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_constraint(vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(matches!(lp.solve(), Err(LpError::BadVariable { .. })));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::maximize(vec![1.0, 2.0]);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint(vec![(0, 2.0), (1, 2.0)], Relation::Eq, 2.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);
    }

    // A degenerate program of the shape produced by the rate computation.
    #[test]
    fn degenerate_rate_shape() {
        // y0, y1, x: max x, x <= y0, x <= y1, y0 + y1 = 1
        let mut lp = LinearProgram::maximize(vec![0.0, 0.0, 1.0]);
        lp.add_constraint(vec![(2, 1.0), (0, -1.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(2, 1.0), (1, -1.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 0.5).abs() < 1e-9);
    }

    // Brute force over vertices of a 2-variable box-constrained program.
    fn grid_optimum(c: [f64; 2], rows: &[([f64; 2], f64)]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let steps = 400;
        for i in 0..=steps {
            for j in 0..=steps {
                let x = [10.0 * i as f64 / steps as f64, 10.0 * j as f64 / steps as f64];
                if rows.iter().all(|(a, b)| a[0] * x[0] + a[1] * x[1] <= b + 1e-12) {
                    best = best.max(c[0] * x[0] + c[1] * x[1]);
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn matches_grid_search(
            c0 in -3i32..4, c1 in -3i32..4,
            rows in proptest::collection::vec((1i32..5, 1i32..5, 1i32..20), 1..4),
        ) {
            let c = [c0 as f64, c1 as f64];
            let mut all: Vec<([f64; 2], f64)> = rows
                .iter()
                .map(|&(a, b, r)| ([a as f64, b as f64], r as f64))
                .collect();
            all.push(([1.0, 0.0], 10.0));
            all.push(([0.0, 1.0], 10.0));
            let mut lp = LinearProgram::maximize(c.to_vec());
            for (a, b) in &all {
                lp.add_constraint(vec![(0, a[0]), (1, a[1])], Relation::Le, *b);
            }
            let s = lp.solve().unwrap();
            let grid = grid_optimum(c, &all);
            // The grid only visits points on a 0.025 lattice.
            prop_assert!(s.objective >= grid - 1e-9);
            prop_assert!(s.objective <= grid + 0.25);
            for (a, b) in &all {
                prop_assert!(a[0] * s.x[0] + a[1] * s.x[1] <= b + 1e-9);
            }
        }
    }
}
