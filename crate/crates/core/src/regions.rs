//! Face decomposition, regions under arcs, and the small/large regions of
//! extremal crossings.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::maslov::{maslov_indices, IndexTable};
use crate::meander::{FaceId, Meander};
use crate::rational::{sum, Rational};
use crate::shape::{Chord, MeanderShape, Side};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcInfo {
    pub chord: Chord,
    pub side: Side,
    /// Innermost same-side arc strictly enclosing this one.
    pub parent: Option<usize>,
    /// `1 +` number of enclosing arcs.
    pub depth: usize,
    pub children: Vec<usize>,
}

/// Nesting forests of both sides plus the faces seen across every `L0` segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceStructure {
    pub n: usize,
    pub arcs: Vec<ArcInfo>,
    /// `segments[p]` holds the (Up, Down) faces adjacent to segment `(p, p+1)`.
    pub segments: Vec<(FaceId, FaceId)>,
}

pub fn build_faces(shape: &MeanderShape) -> FaceStructure {
    let n = shape.n();
    let mut arcs: Vec<ArcInfo> = (0..shape.arc_count())
        .map(|i| ArcInfo {
            chord: shape.arc_chord(i),
            side: shape.arc_side(i),
            parent: None,
            depth: 1,
            children: Vec::new(),
        })
        .collect();

    for side in [Side::Up, Side::Down] {
        let mut order: Vec<usize> = (0..arcs.len()).filter(|&i| arcs[i].side == side).collect();
        order.sort_by_key(|&i| (arcs[i].chord.lo, std::cmp::Reverse(arcs[i].chord.hi)));
        let mut stack: Vec<usize> = Vec::new();
        for i in order {
            while let Some(&top) = stack.last() {
                if arcs[top].chord.hi <= arcs[i].chord.lo {
                    stack.pop();
                } else {
                    break;
                }
            }
            if let Some(&top) = stack.last() {
                arcs[i].parent = Some(top);
                arcs[i].depth = arcs[top].depth + 1;
                arcs[top].children.push(i);
            }
            stack.push(i);
        }
    }

    let innermost = |side: Side, p: usize| -> FaceId {
        arcs.iter()
            .enumerate()
            .filter(|(_, a)| a.side == side && a.chord.lo <= p && p < a.chord.hi)
            .max_by_key(|(_, a)| a.depth)
            .map(|(i, _)| FaceId::Arc(i))
            .unwrap_or(FaceId::Outer(side))
    };
    let segments = (0..=n).map(|p| (innermost(Side::Up, p), innermost(Side::Down, p))).collect();
    FaceStructure { n, arcs, segments }
}

impl FaceStructure {
    /// All `N + 3` faces in canonical order.
    pub fn face_ids(&self) -> Vec<FaceId> {
        let mut ids: Vec<FaceId> = (0..self.arcs.len()).map(FaceId::Arc).collect();
        ids.push(FaceId::Outer(Side::Up));
        ids.push(FaceId::Outer(Side::Down));
        ids
    }

    pub fn side(&self, face: FaceId) -> Side {
        match face {
            FaceId::Arc(i) => self.arcs[i].side,
            FaceId::Outer(s) => s,
        }
    }

    pub fn depth(&self, face: FaceId) -> usize {
        match face {
            FaceId::Arc(i) => self.arcs[i].depth,
            FaceId::Outer(_) => 0,
        }
    }

    /// Whether the face lies on the lower side of the oriented curve `L`.
    pub fn below_l(&self, face: FaceId) -> bool {
        let odd = self.depth(face) % 2 == 1;
        match self.side(face) {
            Side::Up => odd,
            Side::Down => !odd,
        }
    }

    pub fn face_on(&self, segment: usize, side: Side) -> FaceId {
        let (up, down) = self.segments[segment];
        match side {
            Side::Up => up,
            Side::Down => down,
        }
    }

    /// Segments `(p, p+1)` along which the face touches `L0`, ascending.
    pub fn segments_of(&self, face: FaceId) -> Vec<usize> {
        let side = self.side(face);
        (0..self.segments.len()).filter(|&p| self.face_on(p, side) == face).collect()
    }

    /// Face just outside the given arc on its side.
    pub fn parent_face(&self, arc: usize) -> FaceId {
        match self.arcs[arc].parent {
            Some(p) => FaceId::Arc(p),
            None => FaceId::Outer(self.arcs[arc].side),
        }
    }

    /// Faces enclosed between an arc and `L0`: its own face and every face nested in it.
    pub fn region_faces(&self, arc: usize) -> BTreeSet<FaceId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![arc];
        while let Some(a) = stack.pop() {
            out.insert(FaceId::Arc(a));
            stack.extend(self.arcs[a].children.iter().copied());
        }
        out
    }
}

/// Closed region bounded by one arc and `L0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub arc: usize,
    pub side: Side,
    pub interval: Chord,
    pub faces: BTreeSet<FaceId>,
    pub area: Rational,
}

impl Region {
    pub fn of_arc(m: &Meander, faces: &FaceStructure, arc: usize) -> Region {
        let set = faces.region_faces(arc);
        let area = sum(set.iter().map(|f| m.area(*f)));
        Region { arc, side: faces.arcs[arc].side, interval: faces.arcs[arc].chord, faces: set, area }
    }

    pub fn contains(&self, other: &Region) -> bool {
        other.faces.is_subset(&self.faces)
    }

    pub fn strictly_contains(&self, other: &Region) -> bool {
        self.contains(other) && self.faces != other.faces
    }

    pub fn contains_position(&self, p: usize) -> bool {
        self.interval.contains_position(p)
    }

    /// Both delimiting points strictly left of `p`.
    pub fn left_of(&self, p: usize) -> bool {
        self.interval.hi < p
    }

    pub fn disjoint(&self, other: &Region) -> bool {
        self.faces.is_disjoint(&other.faces)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    AtMin,
    AtMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SideClass {
    /// Small region in the lower half-disk.
    MMinus,
    /// Small region in the upper half-disk.
    MPlus,
}

impl fmt::Display for SideClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideClass::MMinus => f.write_str("M-"),
            SideClass::MPlus => f.write_str("M+"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalPointInfo {
    /// 1-based number along `L`.
    pub crossing: usize,
    pub position: usize,
    pub small: Region,
    pub large: Region,
    pub weight: Rational,
    pub side_class: SideClass,
}

impl ExtremalPointInfo {
    /// Region of this point lying on the given side.
    pub fn region_on(&self, side: Side) -> &Region {
        if self.small.side == side {
            &self.small
        } else {
            &self.large
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalClassification {
    pub target_index: i64,
    /// Sorted by `L0` position.
    pub points: Vec<ExtremalPointInfo>,
    pub m_minus: Vec<ExtremalPointInfo>,
    pub m_plus: Vec<ExtremalPointInfo>,
}

impl ExtremalClassification {
    pub fn positions(&self) -> BTreeSet<usize> {
        self.points.iter().map(|p| p.position).collect()
    }

    pub fn minus_positions(&self) -> BTreeSet<usize> {
        self.m_minus.iter().map(|p| p.position).collect()
    }

    pub fn plus_positions(&self) -> BTreeSet<usize> {
        self.m_plus.iter().map(|p| p.position).collect()
    }
}

/// Small and large regions of crossing `k`, built from its two neighbouring arcs.
///
/// The smaller region wins; equal areas resolve to the Down region.
pub fn point_info(m: &Meander, faces: &FaceStructure, k: usize) -> Result<ExtremalPointInfo> {
    if k == 1 || k == m.n() {
        return Err(Error::NeighborMissing { crossing: k });
    }
    let before = Region::of_arc(m, faces, k - 1);
    let after = Region::of_arc(m, faces, k);
    let (down, up) = if before.side == Side::Down { (before, after) } else { (after, before) };
    let (small, large) = if up.area < down.area { (up, down) } else { (down, up) };
    let side_class = match small.side {
        Side::Down => SideClass::MMinus,
        Side::Up => SideClass::MPlus,
    };
    Ok(ExtremalPointInfo {
        crossing: k,
        position: m.shape().perm[k - 1],
        weight: small.area.clone(),
        small,
        large,
        side_class,
    })
}

pub fn classify_extremal(m: &Meander, which: Extremum) -> Result<ExtremalClassification> {
    let table = maslov_indices(m);
    classify_with_table(m, &table, which)
}

pub fn classify_with_table(
    m: &Meander,
    table: &IndexTable,
    which: Extremum,
) -> Result<ExtremalClassification> {
    let target = match which {
        Extremum::AtMin => table.mu_min,
        Extremum::AtMax => table.mu_max,
    };
    classify_at_index(m, table, target)
}

/// Classification of the crossings whose index equals `target`.
pub fn classify_at_index(m: &Meander, table: &IndexTable, target: i64) -> Result<ExtremalClassification> {
    let faces = m.faces();
    let mut points = Vec::new();
    for k in 1..=m.n() {
        if table.of(k) == target {
            points.push(point_info(m, &faces, k)?);
        }
    }
    points.sort_by_key(|p| p.position);
    let m_minus = points.iter().filter(|p| p.side_class == SideClass::MMinus).cloned().collect();
    let m_plus = points.iter().filter(|p| p.side_class == SideClass::MPlus).cloned().collect();
    Ok(ExtremalClassification { target_index: target, points, m_minus, m_plus })
}
