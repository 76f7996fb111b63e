//! Removal moves as rewrites of the meander word with exact area transfer.
//!
//! Every move is built from two primitives:
//!
//! * a *flip*: the region under one arc is pushed whole through `L0` to the
//!   opposite half-disk. All crossings on its footprint disappear, the arcs
//!   meeting them splice into arcs of the opposite side, and faces merge:
//!   across every footprint segment the two faces become one, and the two
//!   opposite-side faces flanking the footprint join through the sliver left
//!   under the flipped curve.
//! * a *flux*: the opposite half-disk pays the flipped area back. A chunk of
//!   the given size leaves a pool of faces, proportionally to their areas,
//!   and crosses `L0` through each face's first segment inside the pool's
//!   footprint. Crossing a segment never changes the side of `L`, so the
//!   half-disk totals and the area below `L` are preserved exactly.
//!
//! The energy of a move is the flipped area (the ε-margins of smooth
//! supports are taken to zero).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::maslov::{shape_indices, IndexTable};
use crate::meander::{FaceId, Meander};
use crate::rational::{format_rational, sum, Rational};
use crate::regions::{
    build_faces, classify_at_index, point_info, ExtremalClassification, ExtremalPointInfo,
    FaceStructure, Region, SideClass,
};
use crate::shape::{validate, Chord, MeanderShape, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    FullRemoval,
    PartialRemoval,
    RefinedRemoval,
}

impl MoveKind {
    pub fn keyword(self) -> &'static str {
        match self {
            MoveKind::FullRemoval => "full",
            MoveKind::PartialRemoval => "partial",
            MoveKind::RefinedRemoval => "refined",
        }
    }

    pub fn from_keyword(word: &str) -> Option<MoveKind> {
        match word {
            "full" => Some(MoveKind::FullRemoval),
            "partial" => Some(MoveKind::PartialRemoval),
            "refined" => Some(MoveKind::RefinedRemoval),
            _ => None,
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// What became of an old face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceFate {
    Same(FaceId),
    Merged(FaceId),
    Transported(FaceId),
}

impl FaceFate {
    pub fn target(self) -> FaceId {
        match self {
            FaceFate::Same(f) | FaceFate::Merged(f) | FaceFate::Transported(f) => f,
        }
    }
}

/// Combinatorial trace of one circulation: a region pushed across `L0` and
/// the equal flux paid back on the other side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circulation {
    pub source: Region,
    pub target_interval: Chord,
    pub transported: Vec<Region>,
    pub flux: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveRecord {
    pub kind: MoveKind,
    /// `L0` position of the processed point when the move ran.
    pub point: usize,
    /// Crossing count before the move.
    pub n_before: usize,
    pub cost: Rational,
    /// Positions (at move time) of the crossings that disappeared.
    pub removed_crossings: BTreeSet<usize>,
    pub face_audit: BTreeMap<FaceId, FaceFate>,
    /// Old position (anchors included) to new position.
    pub position_map: Vec<Option<usize>>,
    pub circulation: Circulation,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn face_index(face: FaceId, n: usize) -> usize {
    match face {
        FaceId::Arc(i) => i,
        FaceId::Outer(Side::Up) => n + 1,
        FaceId::Outer(Side::Down) => n + 2,
    }
}

/// Result of pushing one region through `L0`, before any flux is paid.
struct Flip {
    shape: MeanderShape,
    faces: FaceStructure,
    /// Old face to the new face containing it.
    class_of: BTreeMap<FaceId, FaceId>,
    class_size: BTreeMap<FaceId, usize>,
    /// Summed areas of the merged classes.
    areas: BTreeMap<FaceId, Rational>,
    position_map: Vec<Option<usize>>,
    removed: BTreeSet<usize>,
}

impl Flip {
    /// New segment containing old segment `(p, p+1)`.
    fn segment_image(&self, p: usize) -> usize {
        (0..=p).rev().find_map(|q| self.position_map[q]).expect("anchor 0 always survives")
    }
}

fn flip_region(m: &Meander, old: &FaceStructure, arc: usize) -> Result<Flip> {
    let shape = m.shape();
    let n = shape.n();
    let chord = old.arcs[arc].chord;
    let side = old.arcs[arc].side;
    if chord.lo == 0 || chord.hi == n + 1 {
        return Err(Error::PreconditionViolated(format!(
            "arc {arc} ends at an anchor and cannot be flipped"
        )));
    }
    let removed: BTreeSet<usize> = (chord.lo..=chord.hi).collect();
    let width = removed.len();
    let mut position_map = vec![None; n + 2];
    for (p, slot) in position_map.iter_mut().enumerate() {
        if p < chord.lo {
            *slot = Some(p);
        } else if p > chord.hi {
            *slot = Some(p - width);
        }
    }

    let mut perm = Vec::with_capacity(n - width);
    let mut run = 0usize;
    for &p in &shape.perm {
        if removed.contains(&p) {
            run += 1;
            continue;
        }
        if run % 2 == 1 {
            return Err(Error::AssertionFailure(format!(
                "odd number of crossings spliced out before position {p}"
            )));
        }
        run = 0;
        perm.push(position_map[p].expect("surviving position"));
    }
    if run % 2 == 1 {
        return Err(Error::AssertionFailure("odd number of crossings spliced out at the end of L".into()));
    }
    let new_shape = MeanderShape::new(perm, shape.s0);
    let report = validate(&new_shape);
    if !report.is_ok() {
        return Err(Error::AssertionFailure(format!(
            "flipping arc {arc} of {shape} gives an unrealisable word: {report}"
        )));
    }
    let new_faces = build_faces(&new_shape);

    let mut uf = UnionFind::new(n + 3);
    for p in chord.lo..chord.hi {
        let (up, down) = old.segments[p];
        uf.union(face_index(up, n), face_index(down, n));
    }
    let other = side.flip();
    uf.union(
        face_index(old.face_on(chord.lo - 1, other), n),
        face_index(old.face_on(chord.hi, other), n),
    );

    let old_ids = old.face_ids();
    let mut root_to_new: BTreeMap<usize, FaceId> = BTreeMap::new();
    let mut new_to_root: BTreeMap<FaceId, usize> = BTreeMap::new();
    for (q, slot) in position_map.iter().enumerate() {
        let Some(new_pos) = *slot else { continue };
        if q == n + 1 {
            continue;
        }
        for s in [Side::Up, Side::Down] {
            let root = uf.find(face_index(old.face_on(q, s), n));
            let target = new_faces.face_on(new_pos, s);
            let seen_new = *root_to_new.entry(root).or_insert(target);
            let seen_root = *new_to_root.entry(target).or_insert(root);
            if seen_new != target || seen_root != root {
                return Err(Error::AssertionFailure(format!(
                    "face merge of arc {arc} in {shape} is not a bijection at segment {q}"
                )));
            }
        }
    }
    let mut class_of = BTreeMap::new();
    let mut class_size: BTreeMap<FaceId, usize> = BTreeMap::new();
    let mut areas: BTreeMap<FaceId, Rational> = BTreeMap::new();
    for f in &old_ids {
        let root = uf.find(face_index(*f, n));
        let target = *root_to_new.get(&root).ok_or_else(|| {
            Error::AssertionFailure(format!("face {f} of {shape} vanished when flipping arc {arc}"))
        })?;
        if old.below_l(*f) != new_faces.below_l(target) {
            return Err(Error::AssertionFailure(format!(
                "face {f} changes side of L when flipping arc {arc} of {shape}"
            )));
        }
        class_of.insert(*f, target);
        *class_size.entry(target).or_default() += 1;
        *areas.entry(target).or_default() += m.area(*f);
    }
    if areas.len() != new_faces.face_ids().len() {
        return Err(Error::AssertionFailure(format!(
            "flipping arc {arc} of {shape} leaves {} face classes for {} faces",
            areas.len(),
            new_faces.face_ids().len()
        )));
    }
    Ok(Flip {
        shape: new_shape,
        faces: new_faces,
        class_of,
        class_size,
        areas,
        position_map,
        removed,
    })
}

/// One pool face paying part of a flux.
struct PoolEntry {
    face: FaceId,
    share: Rational,
    /// New segment through which this face's chunk crosses `L0`.
    segment: usize,
}

/// Pool made of the images of a region's faces after a flip.
fn pool_from_region(old: &FaceStructure, flip: &Flip, m: &Meander, region: &Region) -> Vec<PoolEntry> {
    let mut grouped: BTreeMap<FaceId, (Rational, usize)> = BTreeMap::new();
    for f in &region.faces {
        let target = flip.class_of[f];
        let first = old
            .segments_of(*f)
            .into_iter()
            .find(|&p| region.interval.lo <= p && p < region.interval.hi)
            .expect("every face of a region touches L0 inside its footprint");
        let seg = flip.segment_image(first);
        let entry = grouped.entry(target).or_insert((Rational::default(), seg));
        entry.0 += m.area(*f);
        entry.1 = entry.1.min(seg);
    }
    grouped
        .into_iter()
        .map(|(face, (share, segment))| PoolEntry { face, share, segment })
        .collect()
}

/// Moves `amount` out of the pool across `L0`, proportionally to the shares.
///
/// When the pool's own content cannot cover the amount strictly (an exact
/// tie between small and large region), the shares fall back to the whole
/// areas of the pool faces, which include any content merged into them.
fn pay_flux(
    areas: &mut BTreeMap<FaceId, Rational>,
    faces: &FaceStructure,
    mut pool: Vec<PoolEntry>,
    amount: &Rational,
) -> Result<()> {
    let mut total = sum(pool.iter().map(|e| &e.share));
    if *amount >= total {
        for e in pool.iter_mut() {
            e.share = areas[&e.face].clone();
        }
        total = sum(pool.iter().map(|e| &e.share));
        if *amount >= total {
            return Err(Error::AssertionFailure(format!(
                "flux {} exceeds the paying pool {}",
                format_rational(amount),
                format_rational(&total)
            )));
        }
    }
    for e in &pool {
        let chunk = amount * &e.share / &total;
        let side = faces.side(e.face);
        let receiver = faces.face_on(e.segment, side.flip());
        *areas.get_mut(&e.face).expect("pool face exists") -= &chunk;
        *areas.get_mut(&receiver).expect("receiving face exists") += &chunk;
    }
    Ok(())
}

fn audit(flip: &Flip, transported: &BTreeSet<FaceId>) -> BTreeMap<FaceId, FaceFate> {
    flip.class_of
        .iter()
        .map(|(old, new)| {
            let fate = if transported.contains(old) {
                FaceFate::Transported(*new)
            } else if flip.class_size[new] > 1 {
                FaceFate::Merged(*new)
            } else {
                FaceFate::Same(*new)
            };
            (*old, fate)
        })
        .collect()
}

fn finish(flip: Flip, areas: BTreeMap<FaceId, Rational>) -> Result<(Meander, Flip)> {
    let shape = flip.shape.clone();
    let m = Meander::new(shape, areas).map_err(|e| Error::AssertionFailure(format!("after move: {e}")))?;
    Ok((m, flip))
}

/// Transports the region `a`, lying inside the large region of `x0`, whole to
/// the opposite half-disk and pays for it out of the small region of `x0`.
///
/// `x0` survives with weight decreased by `a.area`.
pub fn partial_remove(m: &Meander, x0: &ExtremalPointInfo, a: &Region) -> Result<(Meander, MoveRecord)> {
    if a.side == x0.small.side {
        return Err(Error::PreconditionViolated(
            "transported region must lie opposite the small region".into(),
        ));
    }
    if !x0.large.strictly_contains(a) {
        return Err(Error::PreconditionViolated(
            "transported region must lie inside the large region".into(),
        ));
    }
    if a.area >= x0.weight {
        return Err(Error::PreconditionViolated(format!(
            "transported area {} is not below the weight {}",
            format_rational(&a.area),
            format_rational(&x0.weight)
        )));
    }
    let old = m.faces();
    let flip = flip_region(m, &old, a.arc)?;
    if flip.removed.contains(&x0.position) {
        return Err(Error::AssertionFailure("partial removal reached the processed point".into()));
    }
    let mut areas = flip.areas.clone();
    let pool = pool_from_region(&old, &flip, m, &x0.small);
    pay_flux(&mut areas, &flip.faces, pool, &a.area)?;
    let face_audit = audit(&flip, &a.faces);
    let removed = flip.removed.clone();
    let position_map = flip.position_map.clone();
    let (next, _) = finish(flip, areas)?;
    let record = MoveRecord {
        kind: MoveKind::PartialRemoval,
        point: x0.position,
        n_before: m.n(),
        cost: a.area.clone(),
        removed_crossings: removed,
        face_audit,
        position_map,
        circulation: Circulation {
            source: x0.small.clone(),
            target_interval: a.interval,
            transported: vec![a.clone()],
            flux: a.area.clone(),
        },
    };
    Ok((next, record))
}

/// Pushes the whole small region of `x0` across `L0`, paid by a chunk of
/// equal area taken from `target` (a region on the large side).
fn full_flip(m: &Meander, x0: &ExtremalPointInfo, target: &Region, kind: MoveKind) -> Result<(Meander, MoveRecord)> {
    if target.side == x0.small.side {
        return Err(Error::PreconditionViolated("flux target must lie opposite the small region".into()));
    }
    let old = m.faces();
    let flip = flip_region(m, &old, x0.small.arc)?;
    let mut areas = flip.areas.clone();
    let pool = pool_from_region(&old, &flip, m, target);
    pay_flux(&mut areas, &flip.faces, pool, &x0.weight)?;
    let face_audit = audit(&flip, &x0.small.faces);
    let removed = flip.removed.clone();
    let position_map = flip.position_map.clone();
    let (next, _) = finish(flip, areas)?;
    let record = MoveRecord {
        kind,
        point: x0.position,
        n_before: m.n(),
        cost: x0.weight.clone(),
        removed_crossings: removed,
        face_audit,
        position_map,
        circulation: Circulation {
            source: x0.small.clone(),
            target_interval: target.interval,
            transported: Vec::new(),
            flux: x0.weight.clone(),
        },
    };
    Ok((next, record))
}

/// Removal of `x0` with no special care for other points: its small region
/// is flipped and the large region pays.
pub fn full_remove(m: &Meander, x0: &ExtremalPointInfo) -> Result<(Meander, MoveRecord)> {
    full_flip(m, x0, &x0.large.clone(), MoveKind::FullRemoval)
}

/// Partition of the set `C` produced by the selection loop.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CSets {
    /// Transported whole, in processing order (right to left).
    pub c1: Vec<ExtremalPointInfo>,
    /// Kept, with small and large regions shrinking equally; nested, largest first.
    pub c2: Vec<ExtremalPointInfo>,
    /// Inside a transported region.
    pub c3: Vec<ExtremalPointInfo>,
    /// Untouched.
    pub c4: Vec<ExtremalPointInfo>,
}

impl CSets {
    pub fn is_empty(&self) -> bool {
        self.c1.is_empty() && self.c2.is_empty() && self.c3.is_empty() && self.c4.is_empty()
    }

    pub fn len(&self) -> usize {
        self.c1.len() + self.c2.len() + self.c3.len() + self.c4.len()
    }
}

/// Selection loop over the candidate set `C`, given the weight of `x0`.
///
/// `q` is the rightmost remaining point at every iteration; a budget that
/// exactly exhausts the weight counts as a full transport.
pub fn select_c(c: &[ExtremalPointInfo], w0: &Rational) -> CSets {
    let mut out = CSets::default();
    let mut c4: Vec<usize> = (0..c.len()).collect();
    let mut e: Vec<usize> = (0..c.len()).collect();
    let mut alpha = Rational::default();
    while let Some(&q) = e.iter().max_by_key(|&&i| c[i].position) {
        let rq = &c[q].small;
        if &alpha + &c[q].weight <= *w0 {
            let inside: Vec<usize> = e.iter().copied().filter(|&i| rq.contains_position(c[i].position)).collect();
            out.c1.push(c[q].clone());
            out.c3.extend(inside.iter().filter(|&&i| i != q).map(|&i| c[i].clone()));
            c4.retain(|i| !inside.contains(i));
            alpha += &c[q].weight;
            e.retain(|i| !inside.contains(i));
        } else {
            out.c2.push(c[q].clone());
            c4.retain(|&i| i != q);
            e.retain(|&i| i != q && rq.contains(&c[i].small));
        }
    }
    out.c4 = c4.into_iter().map(|i| c[i].clone()).collect();
    out
}

/// Points of `M+` inside the large region of `x0` whose large region contains
/// the small region of `x0`.
pub fn candidate_set(classification: &ExtremalClassification, x0: &ExtremalPointInfo) -> Vec<ExtremalPointInfo> {
    classification
        .m_plus
        .iter()
        .filter(|q| q.position != x0.position)
        .filter(|q| x0.large.contains_position(q.position))
        .filter(|q| q.large.contains(&x0.small))
        .cloned()
        .collect()
}

pub fn classify_c(m: &Meander, x0: &ExtremalPointInfo) -> Result<CSets> {
    let table = shape_indices(m.shape());
    let classification = classify_at_index(m, &table, table.of(x0.crossing))?;
    Ok(select_c(&candidate_set(&classification, x0), &x0.weight))
}

/// Outcome of removing one extremal point, with everything needed to audit it.
#[derive(Debug, Clone)]
pub struct Removal {
    pub meander: Meander,
    pub moves: Vec<MoveRecord>,
    pub c_sets: CSets,
    /// Original position (anchors included) to final position.
    pub position_map: Vec<Option<usize>>,
    /// Common change of index of the surviving crossings.
    pub index_shift: i64,
}

fn compose(first: &[Option<usize>], second: &[Option<usize>]) -> Vec<Option<usize>> {
    first.iter().map(|p| p.and_then(|q| second[q])).collect()
}

fn crossing_at_position(m: &Meander, position: usize) -> Option<usize> {
    m.shape().perm.iter().position(|&p| p == position).map(|i| i + 1)
}

fn info_at(m: &Meander, position: usize) -> Result<ExtremalPointInfo> {
    let k = crossing_at_position(m, position)
        .ok_or_else(|| Error::AssertionFailure(format!("tracked crossing at {position} disappeared")))?;
    point_info(m, &m.faces(), k)
}

/// Region of the crossing at `position` on the given side, in the current meander.
fn region_at(m: &Meander, position: usize, side: Side) -> Result<Region> {
    Ok(info_at(m, position)?.region_on(side).clone())
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::AssertionFailure(what()))
    }
}

/// Removes the leftmost point of `M-`, composing transports of the `C1`
/// regions with a final flip whose flux keeps every `C2` point in `M+`.
pub fn remove_point(m: &Meander, x0: &ExtremalPointInfo) -> Result<Removal> {
    let table = shape_indices(m.shape());
    if table.first() != 0 || table.last() != 0 {
        return Err(Error::PreconditionViolated("remove_point needs mu(x1) = mu(xN) = 0".into()));
    }
    let target = table.of(x0.crossing);
    if target != table.mu_min {
        return Err(Error::PreconditionViolated(format!(
            "x{} has index {target}, not the minimum {}",
            x0.crossing, table.mu_min
        )));
    }
    let before = classify_at_index(m, &table, target)?;
    let leftmost = before.m_minus.first().map(|p| p.position);
    if x0.side_class != SideClass::MMinus || leftmost != Some(x0.position) {
        return Err(Error::PreconditionViolated(format!(
            "position {} is not the leftmost point of M-",
            x0.position
        )));
    }
    let c_sets = select_c(&candidate_set(&before, x0), &x0.weight);
    let small_side = x0.small.side;
    let large_side = small_side.flip();

    let mut current = m.clone();
    let mut map: Vec<Option<usize>> = (0..m.n() + 2).map(Some).collect();
    let mut moves = Vec::new();
    let track = |map: &[Option<usize>], p: usize| -> Result<usize> {
        map[p].ok_or_else(|| Error::AssertionFailure(format!("crossing at {p} removed too early")))
    };

    for q in &c_sets.c1 {
        let x_now = info_at(&current, track(&map, x0.position)?)?;
        let a = region_at(&current, track(&map, q.position)?, large_side)?;
        let (next, record) = partial_remove(&current, &x_now, &a)?;
        map = compose(&map, &record.position_map);
        moves.push(record);
        current = next;
    }
    let x_now = info_at(&current, track(&map, x0.position)?)?;
    let (kind, pool) = match c_sets.c2.last() {
        Some(q) => (MoveKind::RefinedRemoval, region_at(&current, track(&map, q.position)?, large_side)?),
        None if !c_sets.is_empty() => (MoveKind::RefinedRemoval, x_now.large.clone()),
        None => (MoveKind::FullRemoval, x_now.large.clone()),
    };
    if x_now.small.side != small_side {
        return Err(Error::AssertionFailure("small region of x0 changed side during transports".into()));
    }
    let (next, record) = full_flip(&current, &x_now, &pool, kind)?;
    map = compose(&map, &record.position_map);
    moves.push(record);
    current = next;

    let mut removal = Removal { meander: current, moves, c_sets, position_map: map, index_shift: 0 };
    removal.index_shift = check_removal(m, &table, &before, x0, &removal)?;
    Ok(removal)
}

/// Postconditions of a removal, checked against the meander it started from.
fn check_removal(
    m: &Meander,
    table: &IndexTable,
    before: &ExtremalClassification,
    x0: &ExtremalPointInfo,
    removal: &Removal,
) -> Result<i64> {
    let after = &removal.meander;
    let map = &removal.position_map;
    let n_removed = map[1..=m.n()].iter().filter(|p| p.is_none()).count();
    check(after.n() + n_removed == m.n(), || "crossings were created".into())?;
    check(after.n() < m.n(), || "no crossing was removed".into())?;
    for p in x0.small.interval.lo..=x0.small.interval.hi {
        check(map[p].is_none(), || format!("crossing at {p} inside the small region survived"))?;
    }
    for q in removal.c_sets.c1.iter().chain(&removal.c_sets.c3) {
        check(map[q.position].is_none(), || format!("C1/C3 point at {} survived", q.position))?;
    }
    let cost = sum(removal.moves.iter().map(|r| &r.cost));
    check(cost == x0.weight, || {
        format!("total cost {} differs from the weight {}", format_rational(&cost), format_rational(&x0.weight))
    })?;

    // Index gaps of survivors.
    let new_table = shape_indices(after.shape());
    let mut shift = None;
    for k in 1..=m.n() {
        let p = m.shape().perm[k - 1];
        let Some(np) = map[p] else { continue };
        let nk = crossing_at_position(after, np).expect("mapped position holds a crossing");
        let d = new_table.of(nk) - table.of(k);
        if *shift.get_or_insert(d) != d {
            return Err(Error::AssertionFailure(format!("index gap changed for the crossing at {p}")));
        }
    }
    let shift = shift.unwrap_or(0);
    let target = before.target_index;
    let after_class = if new_table.mu_min + (-shift) <= target {
        Some(classify_at_index(after, &new_table, target + shift)?)
    } else {
        None
    };
    let back = |np: usize| (1..m.n() + 1).find(|&p| map[p] == Some(np)).expect("survivor");
    let m_after: BTreeSet<usize> = after_class.as_ref().map(|c| c.positions().into_iter().map(back).collect()).unwrap_or_default();
    let minus_after: BTreeSet<usize> =
        after_class.as_ref().map(|c| c.minus_positions().into_iter().map(back).collect()).unwrap_or_default();
    let plus_after: BTreeSet<usize> =
        after_class.as_ref().map(|c| c.plus_positions().into_iter().map(back).collect()).unwrap_or_default();
    let m_before = before.positions();
    check(m_after.is_subset(&m_before) && m_after != m_before, || "M did not strictly shrink".into())?;
    check(minus_after.iter().all(|&p| p > x0.position), || {
        format!("a point of M- at or left of {} appeared", x0.position)
    })?;
    check(plus_after.is_subset(&before.plus_positions()), || {
        let gained: Vec<String> = plus_after.difference(&before.plus_positions()).map(|p| p.to_string()).collect();
        format!(
            "M+ gained the points at [{}] while removing {} from {} (C1 {}, C2 {}, C3 {}, C4 {})",
            gained.join(" "),
            x0.position,
            m.shape(),
            removal.c_sets.c1.len(),
            removal.c_sets.c2.len(),
            removal.c_sets.c3.len(),
            removal.c_sets.c4.len()
        )
    })?;

    let faces_after = after.faces();
    for q in &removal.c_sets.c2 {
        let np = map[q.position].ok_or_else(|| Error::AssertionFailure("C2 point removed".into()))?;
        let info = point_info(after, &faces_after, crossing_at_position(after, np).expect("survivor"))?;
        let small_drop = &q.small.area - &info.region_on(q.small.side).area;
        let large_drop = &q.large.area - &info.region_on(q.large.side).area;
        check(small_drop == large_drop, || {
            format!(
                "C2 point at {}: small region dropped {} but large region dropped {}",
                q.position,
                format_rational(&small_drop),
                format_rational(&large_drop)
            )
        })?;
    }

    // Regions on the small side lying right of r(x0) are outside the support.
    for q in &before.points {
        let Some(np) = map[q.position] else { continue };
        let region = q.region_on(x0.small.side);
        if region.interval.lo <= x0.small.interval.hi {
            continue;
        }
        let info = point_info(after, &faces_after, crossing_at_position(after, np).expect("survivor"))?;
        let now = info.region_on(x0.small.side);
        check(now.area == region.area && now.faces.len() == region.faces.len(), || {
            format!("region of the point at {} right of the small region was touched", q.position)
        })?;
    }
    Ok(shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meander::{assign_areas, meander_from_fractions};
    use crate::rational::rat;
    use crate::regions::{classify_extremal, Extremum};

    fn worked() -> Meander {
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
    fn worked_removal() {
        let m = worked();
        let c = classify_extremal(&m, Extremum::AtMin).unwrap();
        let removal = remove_point(&m, &c.m_minus[0]).unwrap();
        assert_eq!(removal.meander.shape(), &MeanderShape::new(vec![1], Side::Up));
        assert_eq!(removal.moves.len(), 1);
        let mv = &removal.moves[0];
        assert_eq!(mv.kind, MoveKind::FullRemoval);
        assert_eq!(mv.cost, rat(1, 16));
        assert_eq!(mv.removed_crossings, BTreeSet::from([2, 3]));
        assert_eq!(removal.meander.area(FaceId::Arc(0)), &rat(3, 16));
        assert_eq!(removal.meander.area(FaceId::Arc(1)), &rat(3, 16));
        assert_eq!(removal.meander.area(FaceId::Outer(Side::Up)), &rat(5, 16));
        assert_eq!(removal.meander.area(FaceId::Outer(Side::Down)), &rat(5, 16));
        assert_eq!(mv.face_audit[&FaceId::Arc(1)], FaceFate::Transported(FaceId::Arc(0)));
        assert_eq!(mv.face_audit[&FaceId::Arc(2)], FaceFate::Merged(FaceId::Outer(Side::Up)));
        assert_eq!(mv.face_audit[&FaceId::Outer(Side::Down)], FaceFate::Same(FaceId::Outer(Side::Down)));
    }

    fn synthetic(position: usize, lo: usize, faces: &[usize], weight: (i64, i64)) -> ExtremalPointInfo {
        let region = |side, faces: &[usize], area: Rational| Region {
            arc: faces[0],
            side,
            interval: Chord::new(lo, position),
            faces: faces.iter().map(|&f| FaceId::Arc(f)).collect(),
            area,
        };
        let w = rat(weight.0, weight.1);
        ExtremalPointInfo {
            crossing: position,
            position,
            small: region(Side::Up, faces, w.clone()),
            large: region(Side::Down, &[100 + position], rat(1, 2)),
            weight: w,
            side_class: SideClass::MPlus,
        }
    }

    #[test]
    fn selection_hand_instance() {
        // q3 < q2 < q1 with pairwise disjoint small regions.
        let q1 = synthetic(9, 8, &[8], (5, 100));
        let q2 = synthetic(6, 5, &[5], (4, 100));
        let q3 = synthetic(3, 2, &[2], (3, 100));
        let sets = select_c(&[q3.clone(), q2.clone(), q1.clone()], &rat(10, 100));
        let pos = |v: &[ExtremalPointInfo]| v.iter().map(|p| p.position).collect::<Vec<_>>();
        assert_eq!(pos(&sets.c1), vec![9, 6]);
        assert_eq!(pos(&sets.c2), vec![3]);
        assert!(sets.c3.is_empty() && sets.c4.is_empty());
    }

    #[test]
    fn selection_heavy_point_recurses_inside() {
        // Outer point too heavy; the loop continues inside its small region only.
        let outer = synthetic(10, 1, &[1, 2, 3], (8, 100));
        let inner = synthetic(4, 2, &[2], (2, 100));
        let left = synthetic(0, 0, &[0], (1, 100));
        let sets = select_c(&[left.clone(), inner.clone(), outer.clone()], &rat(5, 100));
        let pos = |v: &[ExtremalPointInfo]| v.iter().map(|p| p.position).collect::<Vec<_>>();
        assert_eq!(pos(&sets.c2), vec![10]);
        assert_eq!(pos(&sets.c1), vec![4]);
        assert_eq!(pos(&sets.c4), vec![0]);
        assert!(select_c(&[], &rat(1, 10)).is_empty());
    }

    #[test]
    fn budget_tie_counts_as_transport() {
        let q = synthetic(5, 4, &[4], (1, 10));
        let sets = select_c(&[q], &rat(1, 10));
        assert_eq!(sets.c1.len(), 1);
    }

    #[test]
    fn removal_postconditions_hold_on_small_shapes() {
        let (mut refined, mut partial) = (0, 0);
        for n in 1..=9usize {
            for s0 in [Side::Up, Side::Down] {
                for shape in crate::shape::enumerate_shapes_with_limit(n, s0, 12).unwrap() {
                    let t = shape_indices(&shape);
                    if t.first() != 0 || t.last() != 0 || t.mu_min >= 0 {
                        continue;
                    }
                    for seed in 0..4 {
                        let m = assign_areas(&shape, seed, 97).unwrap();
                        let c = classify_extremal(&m, Extremum::AtMin).unwrap();
                        let Some(x0) = c.m_minus.first() else { continue };
                        let removal = remove_point(&m, x0)
                            .unwrap_or_else(|e| panic!("{shape} seed {seed}: {e}"));
                        for mv in &removal.moves {
                            match mv.kind {
                                MoveKind::RefinedRemoval => refined += 1,
                                MoveKind::PartialRemoval => partial += 1,
                                MoveKind::FullRemoval => {}
                            }
                        }
                    }
                }
            }
        }
        assert!(refined > 0 && partial > 0);
    }

    fn region_by_chord(m: &Meander, chord: Chord) -> Region {
        let faces = m.faces();
        let arc = faces.arcs.iter().position(|a| a.chord == chord).expect("arc with mapped chord");
        Region::of_arc(m, &faces, arc)
    }

    fn two_partials(m: &Meander, x: &ExtremalPointInfo, a: &Region, b: &Region) -> Meander {
        let (m1, r1) = partial_remove(m, x, a).unwrap();
        let map = |p: usize| r1.position_map[p].unwrap();
        let x1 = info_at(&m1, map(x.position)).unwrap();
        let b1 = region_by_chord(&m1, Chord::new(map(b.interval.lo), map(b.interval.hi)));
        partial_remove(&m1, &x1, &b1).unwrap().0
    }

    #[test]
    fn successive_partials_commute() {
        let mut checked = 0;
        for shape in crate::shape::enumerate_shapes_with_limit(9, Side::Up, 12).unwrap() {
            let t = shape_indices(&shape);
            if t.first() != 0 || t.last() != 0 || t.mu_min >= 0 {
                continue;
            }
            for seed in 0..3 {
                let m = assign_areas(&shape, seed, 1000).unwrap();
                let c = classify_extremal(&m, Extremum::AtMin).unwrap();
                let faces = m.faces();
                for x in &c.m_minus {
                    let kids = &faces.arcs[x.large.arc].children;
                    for (i, &p) in kids.iter().enumerate() {
                        for &q in &kids[i + 1..] {
                            let (a, b) = (Region::of_arc(&m, &faces, p), Region::of_arc(&m, &faces, q));
                            if &a.area + &b.area >= x.weight {
                                continue;
                            }
                            assert_eq!(two_partials(&m, x, &a, &b), two_partials(&m, x, &b, &a), "{shape}");
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn partial_removal_debits_the_small_region() {
        // Find an instance with a region nested in the large region of a
        // minimum point, then transport it.
        for n in [5usize, 7] {
            for shape in crate::shape::enumerate_shapes_with_limit(n, Side::Up, 12).unwrap() {
                let t = shape_indices(&shape);
                if t.first() != 0 || t.last() != 0 || t.mu_min >= 0 {
                    continue;
                }
                let m = assign_areas(&shape, 11, 1000).unwrap();
                let c = classify_extremal(&m, Extremum::AtMin).unwrap();
                let faces = m.faces();
                for x in &c.m_minus {
                    let inner = faces.arcs[x.large.arc].children.clone();
                    for child in inner {
                        let a = Region::of_arc(&m, &faces, child);
                        if a.area >= x.weight {
                            let err = partial_remove(&m, x, &a).unwrap_err();
                            assert!(matches!(err, Error::PreconditionViolated(_)));
                            continue;
                        }
                        let (next, record) = partial_remove(&m, x, &a).unwrap();
                        assert_eq!(record.cost, a.area);
                        assert!(!record.removed_crossings.contains(&x.position));
                        let np = record.position_map[x.position].unwrap();
                        let k = crossing_at_position(&next, np).unwrap();
                        let now = point_info(&next, &next.faces(), k).unwrap();
                        assert_eq!(now.region_on(Side::Down).area, &x.weight - &a.area);
                        return;
                    }
                }
            }
        }
        panic!("no instance with a nested region found");
    }
}
