//! Maslov indices of the crossings of `L` with `L0`.

use crate::meander::Meander;
use crate::shape::{MeanderShape, Side};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTable {
    /// `mu[k]` is the index of crossing `x_{k+1}`; `mu[0] == 0`.
    pub mu: Vec<i64>,
    pub mu_max: i64,
    pub mu_min: i64,
    pub gap: i64,
}

impl IndexTable {
    fn from_mu(mu: Vec<i64>) -> IndexTable {
        let mu_max = mu.iter().copied().max().unwrap_or(0);
        let mu_min = mu.iter().copied().min().unwrap_or(0);
        IndexTable { mu, mu_max, mu_min, gap: mu_max - mu_min }
    }

    /// Index of the crossing with 1-based number `k` along `L`.
    pub fn of(&self, k: usize) -> i64 {
        self.mu[k - 1]
    }

    pub fn first(&self) -> i64 {
        self.mu[0]
    }

    pub fn last(&self) -> i64 {
        *self.mu.last().expect("index table is never empty")
    }
}

/// Index step along the arc from `x_i` to `x_{i+1}`.
fn delta(side: Side, from: usize, to: usize) -> i64 {
    match (side, from < to) {
        (Side::Down, true) | (Side::Up, false) => 1,
        (Side::Down, false) | (Side::Up, true) => -1,
    }
}

pub fn shape_indices(shape: &MeanderShape) -> IndexTable {
    let mut mu = Vec::with_capacity(shape.n());
    let mut current = 0i64;
    mu.push(current);
    for i in 1..shape.n() {
        current += delta(shape.arc_side(i), shape.perm[i - 1], shape.perm[i]);
        mu.push(current);
    }
    IndexTable::from_mu(mu)
}

pub fn maslov_indices(m: &Meander) -> IndexTable {
    shape_indices(m.shape())
}

/// Signed quarter-turn step between two angles given in quarter turns.
fn quarter_step(from: i64, to: i64) -> i64 {
    (to - from + 1).rem_euclid(4) - 1
}

/// Rotation of the tangent line, in half turns, along the semicircle that
/// realises an arc travelled from position `from` to position `to`.
///
/// The point on the circle starts at angle `π` (left end) or `0` (right end)
/// and passes through `π/2` above `L0` or `-π/2` below it; the tangent turns
/// by the same amount as the radius.
fn semicircle_half_turns(side: Side, from: usize, to: usize) -> i64 {
    let (start, end) = if from < to { (2, 0) } else { (0, 2) };
    let top = match side {
        Side::Up => 1,
        Side::Down => 3,
    };
    let quarters = quarter_step(start, top) + quarter_step(top, end);
    debug_assert_eq!(quarters.abs(), 2);
    quarters / 2
}

/// Index gap `μ(x_j) − μ(x_i)` from the rotation of the tangent line of `L`.
///
/// Arcs are realised as semicircles, so tangents at crossings are vertical
/// and the closing path of lines transverse to `L0` is constant.
pub fn winding_gap_oracle(shape: &MeanderShape, i: usize, j: usize) -> i64 {
    let (lo, hi, sign) = if i <= j { (i, j, 1) } else { (j, i, -1) };
    let mut total = 0;
    for k in lo..hi {
        total += semicircle_half_turns(shape.arc_side(k), shape.perm[k - 1], shape.perm[k]);
    }
    sign * total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(perm: &[usize], s0: Side) -> IndexTable {
        shape_indices(&MeanderShape::new(perm.to_vec(), s0))
    }

    #[test]
    fn hand_tables() {
        assert_eq!(mu(&[1, 2, 3], Side::Up).mu, vec![0, 1, 0]);
        assert_eq!(mu(&[3, 2, 1], Side::Up).mu, vec![0, -1, 0]);
        let single = mu(&[1], Side::Down);
        assert_eq!((single.mu.clone(), single.gap), (vec![0], 0));
        let t = mu(&[1, 4, 3, 2], Side::Up);
        assert_eq!(t.mu, vec![0, 1, 2, 1]);
        assert_eq!((t.mu_min, t.mu_max, t.gap), (0, 2, 2));
    }

    #[test]
    fn oracle_hand_values() {
        let s = MeanderShape::new(vec![3, 2, 1], Side::Up);
        assert_eq!(winding_gap_oracle(&s, 1, 2), -1);
        assert_eq!(winding_gap_oracle(&s, 2, 1), 1);
        let s = MeanderShape::new(vec![1, 2, 3], Side::Up);
        assert_eq!(winding_gap_oracle(&s, 1, 3), 0);
        assert_eq!(winding_gap_oracle(&s, 2, 2), 0);
    }
}
