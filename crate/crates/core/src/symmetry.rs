//! Reflections of the disk that map `L0` to itself.

use std::collections::BTreeMap;

use crate::meander::{FaceId, Meander};
use crate::shape::MeanderShape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryTransform {
    /// Reflection across `L0`: swaps the half-disks.
    VFlip,
    /// Reflection across the vertical axis: reverses `L` and mirrors positions.
    HFlip,
    /// Rotation by `π`, the composition of the two reflections.
    RotPi,
}

pub fn transform_shape(shape: &MeanderShape, t: SymmetryTransform) -> MeanderShape {
    match t {
        SymmetryTransform::VFlip => MeanderShape::new(shape.perm.clone(), shape.s0.flip()),
        SymmetryTransform::HFlip => {
            let n = shape.n();
            let perm = (1..=n).map(|k| n + 1 - shape.perm[n - k]).collect();
            MeanderShape::new(perm, shape.arc_side(n))
        }
        SymmetryTransform::RotPi => transform_shape(
            &transform_shape(shape, SymmetryTransform::HFlip),
            SymmetryTransform::VFlip,
        ),
    }
}

/// Where a face of the original meander lands.
pub fn transform_face(face: FaceId, n: usize, t: SymmetryTransform) -> FaceId {
    match (t, face) {
        (SymmetryTransform::VFlip, FaceId::Outer(s)) => FaceId::Outer(s.flip()),
        (SymmetryTransform::VFlip, arc) => arc,
        (SymmetryTransform::HFlip, FaceId::Arc(i)) => FaceId::Arc(n - i),
        (SymmetryTransform::HFlip, outer) => outer,
        (SymmetryTransform::RotPi, f) => transform_face(
            transform_face(f, n, SymmetryTransform::HFlip),
            n,
            SymmetryTransform::VFlip,
        ),
    }
}

/// Position on `L0` after the transform (anchors included).
pub fn transform_position(p: usize, n: usize, t: SymmetryTransform) -> usize {
    match t {
        SymmetryTransform::VFlip => p,
        SymmetryTransform::HFlip | SymmetryTransform::RotPi => n + 1 - p,
    }
}

pub fn apply_symmetry(m: &Meander, t: SymmetryTransform) -> Meander {
    let n = m.n();
    let shape = transform_shape(m.shape(), t);
    let areas: BTreeMap<FaceId, _> =
        m.areas().iter().map(|(f, a)| (transform_face(*f, n, t), a.clone())).collect();
    Meander::new(shape, areas).expect("disk symmetries preserve every meander invariant")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meander::assign_areas;
    use crate::shape::Side;

    #[test]
    fn hand_examples() {
        let s = MeanderShape::new(vec![3, 2, 1], Side::Up);
        assert_eq!(transform_shape(&s, SymmetryTransform::VFlip), MeanderShape::new(vec![3, 2, 1], Side::Down));
        let s = MeanderShape::new(vec![1, 2], Side::Up);
        assert_eq!(transform_shape(&s, SymmetryTransform::HFlip), s);
    }

    #[test]
    fn involutions_on_a_meander() {
        let m = assign_areas(&MeanderShape::new(vec![1, 4, 3, 2], Side::Up), 3, 1000).unwrap();
        for t in [SymmetryTransform::VFlip, SymmetryTransform::HFlip, SymmetryTransform::RotPi] {
            assert_eq!(apply_symmetry(&apply_symmetry(&m, t), t), m);
        }
        let vh = apply_symmetry(&apply_symmetry(&m, SymmetryTransform::HFlip), SymmetryTransform::VFlip);
        let hv = apply_symmetry(&apply_symmetry(&m, SymmetryTransform::VFlip), SymmetryTransform::HFlip);
        assert_eq!(vh, hv);
        assert_eq!(vh, apply_symmetry(&m, SymmetryTransform::RotPi));
    }
}
