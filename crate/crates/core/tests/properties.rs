use std::sync::OnceLock;

use proptest::prelude::*;

use hofer_meander::engine::{base_energy, default_carve, normalize, untangle, Verdict};
use hofer_meander::format::{parse, serialize};
use hofer_meander::maslov::shape_indices;
use hofer_meander::meander::assign_areas;
use hofer_meander::moves::remove_point;
use hofer_meander::rational::half;
use hofer_meander::regions::{classify_extremal, Extremum};
use hofer_meander::shape::{enumerate_shapes_with_limit, MeanderShape, Side};
use hofer_meander::symmetry::{apply_symmetry, SymmetryTransform};

fn catalogue() -> &'static [MeanderShape] {
    static ALL: OnceLock<Vec<MeanderShape>> = OnceLock::new();
    ALL.get_or_init(|| {
        let mut v = Vec::new();
        for n in 1..=7 {
            for s0 in [Side::Up, Side::Down] {
                v.extend(enumerate_shapes_with_limit(n, s0, 12).unwrap());
            }
        }
        v
    })
}

fn shape() -> impl Strategy<Value = MeanderShape> {
    (0..catalogue().len()).prop_map(|i| catalogue()[i].clone())
}

fn transform() -> impl Strategy<Value = SymmetryTransform> {
    prop_oneof![
        Just(SymmetryTransform::VFlip),
        Just(SymmetryTransform::HFlip),
        Just(SymmetryTransform::RotPi)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_areas_round_trip(s in shape(), seed in any::<u64>(), g in 1u32..5000) {
        let m = assign_areas(&s, seed, g).unwrap();
        prop_assert_eq!(parse(&serialize(&m)).unwrap(), m);
    }

    #[test]
    fn symmetries_are_involutions(s in shape(), seed in any::<u64>(), t in transform()) {
        let m = assign_areas(&s, seed, 997).unwrap();
        let image = apply_symmetry(&m, t);
        prop_assert_eq!(apply_symmetry(&image, t), m.clone());
        prop_assert_eq!(shape_indices(image.shape()).gap, shape_indices(m.shape()).gap);
    }

    #[test]
    fn normalization_is_free_and_keeps_the_gap(s in shape(), seed in any::<u64>()) {
        let m = assign_areas(&s, seed, 997).unwrap();
        let n = normalize(&m, &default_carve(&m)).unwrap();
        let (a, b) = (shape_indices(m.shape()), shape_indices(n.shape()));
        prop_assert_eq!(a.gap, b.gap);
        prop_assert_eq!((b.first(), b.last()), (0, 0));
        prop_assert!(n.n() >= m.n() && n.n() <= m.n() + 3);
    }

    #[test]
    fn removal_strictly_shrinks(s in shape(), seed in any::<u64>()) {
        let m = assign_areas(&s, seed, 997).unwrap();
        let m = normalize(&m, &default_carve(&m)).unwrap();
        let t = shape_indices(m.shape());
        prop_assume!(t.mu_min < 0);
        let c = classify_extremal(&m, Extremum::AtMin).unwrap();
        prop_assume!(!c.m_minus.is_empty());
        let r = remove_point(&m, &c.m_minus[0]).unwrap();
        prop_assert!(r.meander.n() < m.n());
        let cost = r.moves.iter().fold(hofer_meander::Rational::default(), |a, mv| a + &mv.cost);
        prop_assert_eq!(cost, c.m_minus[0].weight.clone());
    }

    #[test]
    fn certificates_pass(s in shape(), seed in any::<u64>()) {
        let m = assign_areas(&s, seed, 997).unwrap();
        let cert = untangle(&m);
        prop_assert_eq!(cert.verdict, Verdict::Pass, "{:?}", cert.note);
        prop_assert!(cert.ledger.total <= cert.bound);
    }

    #[test]
    fn base_energy_at_most_half(s in shape(), seed in any::<u64>()) {
        let m = assign_areas(&s, seed, 997).unwrap();
        prop_assume!(shape_indices(m.shape()).gap <= 1);
        prop_assert!(base_energy(&m).unwrap() <= half());
    }
}
