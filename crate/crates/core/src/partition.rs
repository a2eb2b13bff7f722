use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of a bipartition a vertex sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Outside,
}

/// A pair of disjoint vertex sets `(L, R)`, not necessarily covering the
/// vertex set. Both sides are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(mut left: Vec<usize>, mut right: Vec<usize>) -> Result<Self> {
        left.sort_unstable();
        left.dedup();
        right.sort_unstable();
        right.dedup();
        if left.is_empty() && right.is_empty() {
            return Err(Error::EmptyBipartition);
        }
        let (mut i, mut j) = (0, 0);
        while i < left.len() && j < right.len() {
            match left[i].cmp(&right[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Err(Error::OverlappingSides(left[i])),
            }
        }
        Ok(Bipartition { left, right })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn swapped(&self) -> Bipartition {
        Bipartition {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_vertex(&self) -> Option<usize> {
        self.left.last().copied().max(self.right.last().copied())
    }

    /// Per-vertex side lookup for a vertex set of size `n`.
    pub fn sides(&self, n: usize) -> Result<Vec<Side>> {
        if let Some(v) = self.max_vertex() {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
        }
        let mut sides = vec![Side::Outside; n];
        for &v in &self.left {
            sides[v] = Side::Left;
        }
        for &v in &self.right {
            sides[v] = Side::Right;
        }
        Ok(sides)
    }

    /// The signed indicator: `+1` on `L`, `-1` on `R`, `0` elsewhere.
    pub fn indicator(&self, n: usize) -> Result<Vec<f64>> {
        Ok(self
            .sides(n)?
            .into_iter()
            .map(|s| match s {
                Side::Left => 1.0,
                Side::Right => -1.0,
                Side::Outside => 0.0,
            })
            .collect())
    }
}

/// Multiplier of an edge's weight in the bipartiteness numerator, given the
/// edge rank and how many of its vertices fall in `L` and in `R`.
///
/// An edge inside one side counts twice, an edge touching exactly one side
/// and the outside counts once, anything meeting both sides (or neither)
/// counts zero.
#[inline]
pub(crate) fn violation_factor(rank: usize, in_left: usize, in_right: usize) -> f64 {
    match (in_left, in_right) {
        (0, 0) => 0.0,
        (a, 0) if a == rank => 2.0,
        (0, b) if b == rank => 2.0,
        (_, 0) | (0, _) => 1.0,
        _ => 0.0,
    }
}
