//! Crossing data of a diameter: the open-meander word.
//!
//! Positions on `L0` run from `1` to `N`; the two boundary coincidence
//! segments of `L` and `L0` are modelled as anchors at positions `0` and
//! `N + 1`. Arc `i` joins the `i`-th and `(i+1)`-th visited points
//! (anchor, crossings, anchor), so a shape with `N` crossings has `N + 1`
//! arcs whose sides strictly alternate.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on enumeration size, overridable through `MEANDER_MAX_N`.
pub const DEFAULT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// Upper half-disk `D+`.
    Up,
    /// Lower half-disk `D-`.
    Down,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Up => Side::Down,
            Side::Down => Side::Up,
        }
    }

    /// Side after `count` alternations.
    pub fn flipped(self, count: usize) -> Side {
        if count.is_multiple_of(2) {
            self
        } else {
            self.flip()
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Up => '+',
            Side::Down => '-',
        }
    }

    pub fn from_symbol(c: &str) -> Option<Side> {
        match c {
            "+" => Some(Side::Up),
            "-" => Some(Side::Down),
            _ => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Up => f.write_str("Up"),
            Side::Down => f.write_str("Down"),
        }
    }
}

/// Chord on `L0` spanned by one arc, always stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chord {
    pub lo: usize,
    pub hi: usize,
}

impl Chord {
    pub fn new(a: usize, b: usize) -> Chord {
        Chord { lo: a.min(b), hi: a.max(b) }
    }

    pub fn interleaves(&self, other: &Chord) -> bool {
        (self.lo < other.lo && other.lo < self.hi && self.hi < other.hi)
            || (other.lo < self.lo && self.lo < other.hi && other.hi < self.hi)
    }

    /// Strict enclosure: `other` lies inside `self` and they differ.
    pub fn encloses(&self, other: &Chord) -> bool {
        self != other && self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_position(&self, p: usize) -> bool {
        self.lo <= p && p <= self.hi
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeanderShape {
    /// `perm[i]` is the `L0` position of the `(i+1)`-th crossing along `L`.
    pub perm: Vec<usize>,
    /// Side of arc 0, from the left anchor to `x1`.
    pub s0: Side,
}

impl MeanderShape {
    pub fn new(perm: Vec<usize>, s0: Side) -> MeanderShape {
        MeanderShape { perm, s0 }
    }

    /// Builds a shape and rejects it unless [`validate`] passes.
    pub fn checked(perm: Vec<usize>, s0: Side) -> Result<MeanderShape> {
        let shape = MeanderShape { perm, s0 };
        let report = validate(&shape);
        if report.is_ok() {
            Ok(shape)
        } else {
            Err(Error::InvalidShape(report))
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn arc_count(&self) -> usize {
        self.perm.len() + 1
    }

    /// `L0` position of the `k`-th visited point, `k = 0..=N+1`, anchors included.
    pub fn visit(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else if k <= self.n() {
            self.perm[k - 1]
        } else {
            self.n() + 1
        }
    }

    pub fn arc_side(&self, i: usize) -> Side {
        self.s0.flipped(i)
    }

    pub fn arc_chord(&self, i: usize) -> Chord {
        Chord::new(self.visit(i), self.visit(i + 1))
    }

    /// Inverse permutation: crossing index (1-based, along `L`) at each position.
    pub fn crossing_at(&self) -> Vec<usize> {
        let mut inv = vec![0; self.n() + 2];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i + 1;
        }
        inv
    }
}

impl fmt::Display for MeanderShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let perm: Vec<String> = self.perm.iter().map(|p| p.to_string()).collect();
        write!(f, "({};{})", perm.join(","), self.s0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    NotPermutation { detail: String },
    Interleave { side: Side, first: Chord, second: Chord },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => f.write_str("shape has no crossings"),
            Violation::NotPermutation { detail } => write!(f, "perm is not a permutation: {detail}"),
            Violation::Interleave { side, first, second } => {
                write!(f, "{side} chords {first},{second} interleave")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks that the crossing data is realised by a simple curve.
///
/// Only the first interleaving pair (in arc order) is reported.
pub fn validate(shape: &MeanderShape) -> ValidationReport {
    let n = shape.n();
    let mut report = ValidationReport::default();
    if n == 0 {
        report.violations.push(Violation::Empty);
        return report;
    }
    let mut seen = vec![false; n + 1];
    for &p in &shape.perm {
        if p == 0 || p > n {
            report.violations.push(Violation::NotPermutation {
                detail: format!("position {p} outside 1..={n}"),
            });
            return report;
        }
        if seen[p] {
            report.violations.push(Violation::NotPermutation {
                detail: format!("position {p} repeated"),
            });
            return report;
        }
        seen[p] = true;
    }
    for i in 0..shape.arc_count() {
        let ci = shape.arc_chord(i);
        // Same-side arcs are every other arc.
        for j in (i + 2..shape.arc_count()).step_by(2) {
            let cj = shape.arc_chord(j);
            if ci.interleaves(&cj) {
                report.violations.push(Violation::Interleave {
                    side: shape.arc_side(i),
                    first: ci,
                    second: cj,
                });
                return report;
            }
        }
    }
    report
}

/// Reads the enumeration cap from `MEANDER_MAX_N`, falling back to the default.
pub fn max_n_from_env() -> usize {
    std::env::var("MEANDER_MAX_N")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_N)
}

pub fn enumerate_shapes(n: usize, s0: Side) -> Result<Vec<MeanderShape>> {
    enumerate_shapes_with_limit(n, s0, max_n_from_env())
}

/// All valid shapes with `n` crossings and first side `s0`, in lexicographic
/// order of `perm`.
pub fn enumerate_shapes_with_limit(n: usize, s0: Side, limit: usize) -> Result<Vec<MeanderShape>> {
    if n == 0 {
        return Err(Error::PreconditionViolated("enumeration needs n >= 1".into()));
    }
    if n > limit {
        return Err(Error::LimitExceeded { n, limit });
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    let mut used = vec![false; n + 1];
    let mut chords: [Vec<Chord>; 2] = [Vec::new(), Vec::new()];
    extend(n, s0, &mut prefix, &mut used, &mut chords, &mut out);
    Ok(out)
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::Up => 0,
        Side::Down => 1,
    }
}

fn extend(
    n: usize,
    s0: Side,
    prefix: &mut Vec<usize>,
    used: &mut [bool],
    chords: &mut [Vec<Chord>; 2],
    out: &mut Vec<MeanderShape>,
) {
    let k = prefix.len();
    let prev = prefix.last().copied().unwrap_or(0);
    if k == n {
        let side = s0.flipped(n);
        let last = Chord::new(prev, n + 1);
        if chords[side_slot(side)].iter().all(|c| !c.interleaves(&last)) {
            out.push(MeanderShape::new(prefix.clone(), s0));
        }
        return;
    }
    let side = s0.flipped(k);
    for p in 1..=n {
        if used[p] {
            continue;
        }
        let chord = Chord::new(prev, p);
        if chords[side_slot(side)].iter().any(|c| c.interleaves(&chord)) {
            continue;
        }
        used[p] = true;
        prefix.push(p);
        chords[side_slot(side)].push(chord);
        extend(n, s0, prefix, used, chords, out);
        chords[side_slot(side)].pop();
        prefix.pop();
        used[p] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interleaving_pair_is_reported() {
        let report = validate(&MeanderShape::new(vec![2, 1], Side::Up));
        assert_eq!(
            report.violations,
            vec![Violation::Interleave {
                side: Side::Up,
                first: Chord::new(0, 2),
                second: Chord::new(1, 3),
            }]
        );
        assert_eq!(report.to_string(), "Up chords (0,2),(1,3) interleave");
    }

    #[test]
    fn nested_chords_are_fine() {
        assert!(validate(&MeanderShape::new(vec![3, 2, 1], Side::Up)).is_ok());
        assert!(validate(&MeanderShape::new(vec![1], Side::Down)).is_ok());
    }

    #[test]
    fn malformed_permutations() {
        assert!(!validate(&MeanderShape::new(vec![], Side::Up)).is_ok());
        assert!(!validate(&MeanderShape::new(vec![1, 1], Side::Up)).is_ok());
        assert!(!validate(&MeanderShape::new(vec![0, 1], Side::Up)).is_ok());
        assert!(!validate(&MeanderShape::new(vec![1, 3], Side::Up)).is_ok());
    }

    #[test]
    fn small_enumerations() {
        let perms = |n, s| -> Vec<Vec<usize>> {
            enumerate_shapes_with_limit(n, s, 12).unwrap().into_iter().map(|s| s.perm).collect()
        };
        assert_eq!(perms(1, Side::Up), vec![vec![1]]);
        assert_eq!(perms(1, Side::Down), vec![vec![1]]);
        assert_eq!(perms(2, Side::Up), vec![vec![1, 2]]);
        assert_eq!(perms(3, Side::Up), vec![vec![1, 2, 3], vec![3, 2, 1]]);
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(
            enumerate_shapes_with_limit(13, Side::Up, 12),
            Err(Error::LimitExceeded { n: 13, limit: 12 })
        ));
        assert!(enumerate_shapes_with_limit(0, Side::Up, 12).is_err());
    }

    #[test]
    fn arc_sides_alternate() {
        let s = MeanderShape::new(vec![1, 4, 3, 2], Side::Up);
        let sides: Vec<Side> = (0..s.arc_count()).map(|i| s.arc_side(i)).collect();
        assert_eq!(sides, vec![Side::Up, Side::Down, Side::Up, Side::Down, Side::Up]);
    }
}
