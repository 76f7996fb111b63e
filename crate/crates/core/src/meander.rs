//! A shape together with exact face areas.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::{format_rational, half, is_positive, rat, Rational};
use crate::regions::{build_faces, FaceStructure};
use crate::shape::{validate, MeanderShape, Side};

/// A connected component of `D \ (L ∪ L0)`.
///
/// `Arc(i)` is the face roofed by arc `i`; the two outer faces touch the
/// boundary circle. The derived order (arcs ascending, then `Outer(Up)`,
/// then `Outer(Down)`) is the canonical serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaceId {
    Arc(usize),
    Outer(Side),
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceId::Arc(i) => write!(f, "arc:{i}"),
            FaceId::Outer(s) => write!(f, "outer:{}", s.symbol()),
        }
    }
}

impl FaceId {
    pub fn parse(text: &str) -> Option<FaceId> {
        if let Some(rest) = text.strip_prefix("arc:") {
            return rest.parse().ok().map(FaceId::Arc);
        }
        text.strip_prefix("outer:").and_then(Side::from_symbol).map(FaceId::Outer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meander {
    shape: MeanderShape,
    areas: BTreeMap<FaceId, Rational>,
}

impl Meander {
    /// Checks every invariant: valid shape, exact face set, positive areas,
    /// half-disk totals and the area below `L`.
    pub fn new(shape: MeanderShape, areas: BTreeMap<FaceId, Rational>) -> Result<Meander> {
        let report = validate(&shape);
        if !report.is_ok() {
            return Err(Error::InvalidShape(report));
        }
        let faces = build_faces(&shape);
        check_areas(&faces, &areas)?;
        Ok(Meander { shape, areas })
    }

    pub fn shape(&self) -> &MeanderShape {
        &self.shape
    }

    pub fn areas(&self) -> &BTreeMap<FaceId, Rational> {
        &self.areas
    }

    pub fn area(&self, face: FaceId) -> &Rational {
        &self.areas[&face]
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn faces(&self) -> FaceStructure {
        build_faces(&self.shape)
    }

    pub fn min_face_area(&self) -> Rational {
        self.areas.values().min().cloned().expect("a meander always has faces")
    }

    pub fn into_parts(self) -> (MeanderShape, BTreeMap<FaceId, Rational>) {
        (self.shape, self.areas)
    }
}

pub(crate) fn check_areas(faces: &FaceStructure, areas: &BTreeMap<FaceId, Rational>) -> Result<()> {
    let expected = faces.face_ids();
    if areas.len() != expected.len() || expected.iter().any(|f| !areas.contains_key(f)) {
        let missing: Vec<String> =
            expected.iter().filter(|f| !areas.contains_key(f)).map(|f| f.to_string()).collect();
        let extra: Vec<String> =
            areas.keys().filter(|f| !expected.contains(f)).map(|f| f.to_string()).collect();
        return Err(Error::AreaInvariant(format!(
            "face set mismatch (missing [{}], unexpected [{}])",
            missing.join(" "),
            extra.join(" ")
        )));
    }
    for (face, a) in areas {
        if !is_positive(a) {
            return Err(Error::AreaInvariant(format!(
                "face {face} has non-positive area {}",
                format_rational(a)
            )));
        }
    }
    let mut up = Rational::default();
    let mut down = Rational::default();
    let mut below = Rational::default();
    for (face, a) in areas {
        match faces.side(*face) {
            Side::Up => up += a,
            Side::Down => down += a,
        }
        if faces.below_l(*face) {
            below += a;
        }
    }
    for (name, total) in [("Up", up), ("Down", down), ("below-L", below)] {
        if total != half() {
            return Err(Error::AreaInvariant(format!(
                "{name} faces sum to {}, expected 1/2",
                format_rational(&total)
            )));
        }
    }
    Ok(())
}

/// The four face groups fixed by the area invariants.
fn group_of(faces: &FaceStructure, face: FaceId) -> usize {
    let side = match faces.side(face) {
        Side::Up => 0,
        Side::Down => 2,
    };
    side + usize::from(faces.below_l(face))
}

/// Deterministic positive areas satisfying every invariant.
///
/// Raw weights are drawn as `k / granularity`; each of the four
/// (side, L-side) groups is then rescaled to its forced total: Up-below `t`,
/// Up-above `1/2 - t`, Down-below `1/2 - t`, Down-above `t`.
pub fn assign_areas(shape: &MeanderShape, seed: u64, granularity: u32) -> Result<Meander> {
    let report = validate(shape);
    if !report.is_ok() {
        return Err(Error::InvalidShape(report));
    }
    if granularity == 0 {
        return Err(Error::PreconditionViolated("granularity must be positive".into()));
    }
    let faces = build_faces(shape);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = i64::from(granularity);
    let t = if g >= 2 { rat(rng.gen_range(1..g), 2 * g) } else { rat(1, 4) };
    let targets = [t.clone(), half() - &t, half() - &t, t];

    let ids = faces.face_ids();
    let raw: Vec<Rational> = ids.iter().map(|_| rat(rng.gen_range(1..=g), g)).collect();
    let mut group_sums = vec![Rational::default(); 4];
    for (face, r) in ids.iter().zip(&raw) {
        group_sums[group_of(&faces, *face)] += r;
    }
    let mut areas = BTreeMap::new();
    for (face, r) in ids.iter().zip(raw) {
        let group = group_of(&faces, *face);
        if group_sums[group] == Rational::default() {
            return Err(Error::Infeasible(format!("face group {group} is empty")));
        }
        areas.insert(*face, r * &targets[group] / &group_sums[group]);
    }
    for (group, total) in group_sums.iter().enumerate() {
        if *total == Rational::default() {
            return Err(Error::Infeasible(format!("face group {group} is empty")));
        }
    }
    Meander::new(shape.clone(), areas)
}

/// Builds a meander from `(face, numerator, denominator)` triples.
pub fn meander_from_fractions(
    shape: MeanderShape,
    fractions: &[(FaceId, i64, i64)],
) -> Result<Meander> {
    let areas = fractions
        .iter()
        .map(|&(f, p, q)| (f, Rational::new(BigInt::from(p), BigInt::from(q))))
        .collect();
    Meander::new(shape, areas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example() -> Meander {
        meander_from_fractions(
            MeanderShape::new(vec![3, 2, 1], Side::Up),
            &[
                (FaceId::Arc(0), 1, 8),
                (FaceId::Arc(1), 1, 16),
                (FaceId::Arc(2), 1, 8),
                (FaceId::Arc(3), 1, 8),
                (FaceId::Outer(Side::Up), 1, 4),
                (FaceId::Outer(Side::Down), 5, 16),
            ],
        )
        .unwrap()
    }

    #[test]
    fn worked_example_satisfies_invariants() {
        let m = worked_example();
        assert_eq!(m.area(FaceId::Arc(1)), &rat(1, 16));
    }

    #[test]
    fn wrong_up_total_is_rejected() {
        let err = meander_from_fractions(
            MeanderShape::new(vec![3, 2, 1], Side::Up),
            &[
                (FaceId::Arc(0), 1, 8),
                (FaceId::Arc(1), 1, 16),
                (FaceId::Arc(2), 1, 4),
                (FaceId::Arc(3), 1, 8),
                (FaceId::Outer(Side::Up), 1, 4),
                (FaceId::Outer(Side::Down), 5, 16),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::AreaInvariant(_)));
    }

    #[test]
    fn assigned_areas_are_deterministic_and_valid() {
        let shape = MeanderShape::new(vec![1, 2, 3], Side::Up);
        let a = assign_areas(&shape, 7, 1000).unwrap();
        let b = assign_areas(&shape, 7, 1000).unwrap();
        assert_eq!(a, b);
        let c = assign_areas(&shape, 8, 1000).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_crossing_forces_equal_bumps() {
        for seed in 0..20 {
            let m = assign_areas(&MeanderShape::new(vec![1], Side::Up), seed, 1000).unwrap();
            assert_eq!(m.area(FaceId::Arc(0)), m.area(FaceId::Arc(1)));
        }
    }

    #[test]
    fn face_id_text() {
        for f in [FaceId::Arc(0), FaceId::Arc(12), FaceId::Outer(Side::Up), FaceId::Outer(Side::Down)] {
            assert_eq!(FaceId::parse(&f.to_string()), Some(f));
        }
        assert_eq!(FaceId::parse("arc:x"), None);
        assert!(FaceId::Arc(5) < FaceId::Outer(Side::Up));
        assert!(FaceId::Outer(Side::Up) < FaceId::Outer(Side::Down));
    }
}
