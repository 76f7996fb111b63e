//! The untangling induction: normalize, empty the minimum level by two
//! sweeps until the index gap is at most one, then pay the base case.
//!
//! Mirrored sweeps are never coded twice. The `M+` sweep is the `M-` sweep
//! conjugated by the rotation by `π`, and the sweep at the maximum level is
//! the whole double sweep conjugated by the reflection across `L0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::format::serialize;
use crate::maslov::{shape_indices, IndexTable};
use crate::meander::{FaceId, Meander};
use crate::moves::{remove_point, Circulation, FaceFate, MoveKind, MoveRecord};
use crate::rational::{format_rational, half, rat, sum, Rational};
use crate::regions::{classify_at_index, Region};
use crate::shape::{Chord, MeanderShape, Side};
use crate::symmetry::{apply_symmetry, transform_face, transform_position, SymmetryTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepMode {
    MinusSweep,
    PlusSweep,
    BaseCase,
}

impl SweepMode {
    pub fn keyword(self) -> &'static str {
        match self {
            SweepMode::MinusSweep => "minus",
            SweepMode::PlusSweep => "plus",
            SweepMode::BaseCase => "base",
        }
    }

    pub fn from_keyword(word: &str) -> Option<SweepMode> {
        match word {
            "minus" => Some(SweepMode::MinusSweep),
            "plus" => Some(SweepMode::PlusSweep),
            "base" => Some(SweepMode::BaseCase),
            _ => None,
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRecord {
    pub mode: SweepMode,
    pub moves: Vec<MoveRecord>,
    pub subtotal: Rational,
}

impl SweepRecord {
    fn new(mode: SweepMode, moves: Vec<MoveRecord>) -> SweepRecord {
        let subtotal = sum(moves.iter().map(|m| &m.cost));
        SweepRecord { mode, moves, subtotal }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnergyLedger {
    pub sweeps: Vec<SweepRecord>,
    pub total: Rational,
}

impl EnergyLedger {
    pub fn push(&mut self, sweep: SweepRecord) {
        self.total += &sweep.subtotal;
        self.sweeps.push(sweep);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub input: Meander,
    pub normalized: Meander,
    pub initial_table: IndexTable,
    pub ledger: EnergyLedger,
    pub bound: Rational,
    pub verdict: Verdict,
    /// Serialized meanders: input, normalized, then the state after every sweep.
    pub trace: Vec<String>,
    /// Why the verdict is `fail`, when a step broke.
    pub note: Option<String>,
}

fn normalized(table: &IndexTable) -> bool {
    table.first() == 0 && table.last() == 0
}

/// Inserts a crossing at the left or right end and carves `carve` out of both
/// outer faces. The new end face gets one carve, the old boundary face the other.
fn insert_crossing(m: &Meander, at_left: bool, carve: &Rational) -> Result<Meander> {
    let shape = m.shape();
    let n = shape.n();
    let (new_shape, relabel, bump, gainer): (MeanderShape, Box<dyn Fn(FaceId) -> FaceId>, FaceId, FaceId) =
        if at_left {
            let mut perm = vec![1];
            perm.extend(shape.perm.iter().map(|p| p + 1));
            let relabel = |f| match f {
                FaceId::Arc(i) => FaceId::Arc(i + 1),
                outer => outer,
            };
            (MeanderShape::new(perm, shape.s0.flip()), Box::new(relabel), FaceId::Arc(0), FaceId::Arc(1))
        } else {
            let mut perm = shape.perm.clone();
            perm.push(n + 1);
            (MeanderShape::new(perm, shape.s0), Box::new(|f| f), FaceId::Arc(n + 1), FaceId::Arc(n))
        };
    let mut areas: BTreeMap<FaceId, Rational> = m.areas().iter().map(|(f, a)| (relabel(*f), a.clone())).collect();
    *areas.get_mut(&FaceId::Outer(Side::Up)).expect("outer face") -= carve;
    *areas.get_mut(&FaceId::Outer(Side::Down)).expect("outer face") -= carve;
    areas.insert(bump, carve.clone());
    *areas.get_mut(&gainer).expect("boundary arc face") += carve;
    Meander::new(new_shape, areas).map_err(|e| Error::PreconditionViolated(format!("carve too large: {e}")))
}

/// Adds crossings next to the anchors, at no cost, until `μ(x1) = μ(xN) = 0`.
pub fn normalize(m: &Meander, carve: &Rational) -> Result<Meander> {
    if *carve <= Rational::default() || *carve >= m.min_face_area() {
        return Err(Error::PreconditionViolated(format!(
            "carve {} must lie strictly between 0 and the smallest face area",
            format_rational(carve)
        )));
    }
    let mut cur = m.clone();
    for _ in 0..3 {
        if normalized(&shape_indices(cur.shape())) {
            return Ok(cur);
        }
        let shape = cur.shape();
        cur = if shape.s0 == Side::Down {
            insert_crossing(&cur, true, carve)?
        } else {
            // Right peel for a lower last arc, otherwise a split of the upper one.
            insert_crossing(&cur, false, carve)?
        };
    }
    if normalized(&shape_indices(cur.shape())) {
        Ok(cur)
    } else {
        Err(Error::AssertionFailure(format!("normalization of {} did not converge", m.shape())))
    }
}

pub fn default_carve(m: &Meander) -> Rational {
    m.min_face_area() * rat(1, 4)
}

fn conjugate_region(r: &Region, n: usize, t: SymmetryTransform) -> Region {
    let arc = match t {
        SymmetryTransform::VFlip => r.arc,
        _ => n - r.arc,
    };
    let side = match t {
        SymmetryTransform::HFlip => r.side,
        _ => r.side.flip(),
    };
    Region {
        arc,
        side,
        interval: Chord::new(transform_position(r.interval.lo, n, t), transform_position(r.interval.hi, n, t)),
        faces: r.faces.iter().map(|f| transform_face(*f, n, t)).collect(),
        area: r.area.clone(),
    }
}

/// Rewrites a record made in a transformed frame into the original frame.
fn conjugate_record(rec: &MoveRecord, t: SymmetryTransform) -> MoveRecord {
    let nb = rec.n_before;
    let na = nb - rec.removed_crossings.len();
    let pos = |p: usize, n: usize| transform_position(p, n, t);
    let mut position_map = vec![None; nb + 2];
    for (p, q) in rec.position_map.iter().enumerate() {
        position_map[pos(p, nb)] = q.map(|q| pos(q, na));
    }
    let fate = |f: FaceFate| match f {
        FaceFate::Same(g) => FaceFate::Same(transform_face(g, na, t)),
        FaceFate::Merged(g) => FaceFate::Merged(transform_face(g, na, t)),
        FaceFate::Transported(g) => FaceFate::Transported(transform_face(g, na, t)),
    };
    MoveRecord {
        kind: rec.kind,
        point: pos(rec.point, nb),
        n_before: nb,
        cost: rec.cost.clone(),
        removed_crossings: rec.removed_crossings.iter().map(|&p| pos(p, nb)).collect(),
        face_audit: rec.face_audit.iter().map(|(f, v)| (transform_face(*f, nb, t), fate(*v))).collect(),
        position_map,
        circulation: Circulation {
            source: conjugate_region(&rec.circulation.source, nb, t),
            target_interval: Chord::new(
                pos(rec.circulation.target_interval.lo, nb),
                pos(rec.circulation.target_interval.hi, nb),
            ),
            transported: rec.circulation.transported.iter().map(|r| conjugate_region(r, nb, t)).collect(),
            flux: rec.circulation.flux.clone(),
        },
    }
}

fn conjugate_sweep(s: &SweepRecord, t: SymmetryTransform, mode: SweepMode) -> SweepRecord {
    SweepRecord { mode, moves: s.moves.iter().map(|r| conjugate_record(r, t)).collect(), subtotal: s.subtotal.clone() }
}

/// Sweep state carried out of [`sweep_at`].
struct SweepOutcome {
    meander: Meander,
    record: SweepRecord,
    target: i64,
}

/// Removes the points of `M-` at index `target`, leftmost first, until none is left.
fn sweep_at(m: &Meander, mut target: i64, mode: SweepMode) -> Result<SweepOutcome> {
    let mut cur = m.clone();
    let mut moves = Vec::new();
    // Face provenance back to the sweep-start faces, and the start position of every current position.
    let mut provenance: BTreeMap<FaceId, BTreeSet<FaceId>> =
        cur.areas().keys().map(|f| (*f, BTreeSet::from([*f]))).collect();
    let mut to_start: Vec<Option<usize>> = (0..cur.n() + 2).map(Some).collect();
    let mut claimed: BTreeSet<FaceId> = BTreeSet::new();
    let mut last_processed: Option<usize> = None;
    loop {
        let table = shape_indices(cur.shape());
        if table.mu_min > target {
            break;
        }
        let class = classify_at_index(&cur, &table, target)?;
        let Some(x0) = class.m_minus.first() else { break };
        let start_pos = to_start[x0.position].expect("current crossings come from the sweep start");
        if last_processed.is_some_and(|p| p >= start_pos) {
            return Err(Error::AssertionFailure(format!(
                "processed points are not increasing: {start_pos} after {}",
                last_processed.unwrap()
            )));
        }
        last_processed = Some(start_pos);
        let n_before = cur.n();
        let removal = remove_point(&cur, x0)?;
        if removal.meander.n() >= n_before {
            return Err(Error::NonTermination(format!("removal at {} kept {} crossings", x0.position, n_before)));
        }
        for mv in &removal.moves {
            if mv.kind != MoveKind::PartialRemoval {
                let pulled: BTreeSet<FaceId> =
                    mv.circulation.source.faces.iter().flat_map(|f| provenance[f].iter().copied()).collect();
                if !pulled.is_disjoint(&claimed) {
                    return Err(Error::AssertionFailure(format!(
                        "small region of the point at {} overlaps an earlier one",
                        start_pos
                    )));
                }
                claimed.extend(pulled);
            }
            let mut next: BTreeMap<FaceId, BTreeSet<FaceId>> = BTreeMap::new();
            for (old, fate) in &mv.face_audit {
                next.entry(fate.target()).or_default().extend(provenance[old].iter().copied());
            }
            provenance = next;
            let mut back = vec![None; mv.n_before + 2 - mv.removed_crossings.len()];
            for (p, q) in mv.position_map.iter().enumerate() {
                if let Some(q) = q {
                    back[*q] = to_start[p];
                }
            }
            to_start = back;
        }
        target += removal.index_shift;
        moves.extend(removal.moves);
        cur = removal.meander;
    }
    let record = SweepRecord::new(mode, moves);
    if record.subtotal > half() {
        return Err(Error::AssertionFailure(format!(
            "sweep subtotal {} exceeds 1/2",
            format_rational(&record.subtotal)
        )));
    }
    Ok(SweepOutcome { meander: cur, record, target })
}

/// Empties `M-` at the minimum level.
pub fn sweep_min(m: &Meander) -> Result<(Meander, SweepRecord)> {
    let table = shape_indices(m.shape());
    if !normalized(&table) {
        return Err(Error::PreconditionViolated("sweep needs mu(x1) = mu(xN) = 0".into()));
    }
    if table.mu_min >= 0 {
        return Err(Error::PreconditionViolated("sweep needs a negative minimum index".into()));
    }
    let out = sweep_at(m, table.mu_min, SweepMode::MinusSweep)?;
    Ok((out.meander, out.record))
}

/// Both sweeps at the minimum level, in the frame of `m`.
fn double_sweep(m: &Meander) -> Result<(Meander, [SweepRecord; 2])> {
    let table = shape_indices(m.shape());
    let minus = sweep_at(m, table.mu_min, SweepMode::MinusSweep)?;
    if !normalized(&shape_indices(minus.meander.shape())) {
        return Err(Error::AssertionFailure("minus sweep broke mu(x1) = mu(xN) = 0".into()));
    }
    let rotated = apply_symmetry(&minus.meander, SymmetryTransform::RotPi);
    let plus = sweep_at(&rotated, minus.target, SweepMode::PlusSweep)?;
    let back = apply_symmetry(&plus.meander, SymmetryTransform::RotPi);
    let plus_record = conjugate_sweep(&plus.record, SymmetryTransform::RotPi, SweepMode::PlusSweep);
    Ok((back, [minus.record, plus_record]))
}

/// One round of the induction: the extreme level nearer to a negative index
/// is emptied, lowering the gap by at least one.
pub fn reduce_gap_once(m: &Meander) -> Result<(Meander, [SweepRecord; 2])> {
    let before = shape_indices(m.shape());
    if !normalized(&before) {
        return Err(Error::PreconditionViolated("reduction needs mu(x1) = mu(xN) = 0".into()));
    }
    if before.gap <= 1 {
        return Err(Error::PreconditionViolated(format!("gap {} is already at most 1", before.gap)));
    }
    let (next, records) = if before.mu_min < 0 {
        double_sweep(m)?
    } else {
        let flipped = apply_symmetry(m, SymmetryTransform::VFlip);
        let (out, records) = double_sweep(&flipped)?;
        let [a, b] = records;
        (
            apply_symmetry(&out, SymmetryTransform::VFlip),
            [
                conjugate_sweep(&a, SymmetryTransform::VFlip, a.mode),
                conjugate_sweep(&b, SymmetryTransform::VFlip, b.mode),
            ],
        )
    };
    let after = shape_indices(next.shape());
    if after.gap > before.gap - 1 {
        return Err(Error::AssertionFailure(format!("gap went from {} to {}", before.gap, after.gap)));
    }
    if before.mu_min < 0 && after.mu_min < before.mu_min {
        return Err(Error::AssertionFailure("minimum index decreased".into()));
    }
    let pair = &records[0].subtotal + &records[1].subtotal;
    if pair > Rational::from_integer(1.into()) {
        return Err(Error::AssertionFailure(format!("double sweep cost {} exceeds 1", format_rational(&pair))));
    }
    Ok((next, records))
}

/// Energy of the final step once the gap is at most one.
///
/// For the identity word the curve is the graph of a differential and the
/// energy is the oscillation of its primitive, read off the signed face
/// areas between the curves. Any other word is charged the constant `1/2`.
pub fn base_energy(m: &Meander) -> Result<Rational> {
    let table = shape_indices(m.shape());
    if table.gap > 1 {
        return Err(Error::PreconditionViolated(format!("base case needs gap <= 1, got {}", table.gap)));
    }
    let shape = m.shape();
    if !shape.perm.iter().enumerate().all(|(i, &p)| p == i + 1) {
        return Ok(half());
    }
    let mut s = Rational::default();
    let (mut lo, mut hi) = (s.clone(), s.clone());
    for i in 0..shape.arc_count() {
        match shape.arc_side(i) {
            Side::Up => s += m.area(FaceId::Arc(i)),
            Side::Down => s -= m.area(FaceId::Arc(i)),
        }
        lo = lo.min(s.clone());
        hi = hi.max(s.clone());
    }
    if s != Rational::default() {
        return Err(Error::AssertionFailure("primitive does not close up".into()));
    }
    Ok(hi - lo)
}

pub fn energy_bound(table: &IndexTable, n: usize) -> Rational {
    if n >= 2 {
        Rational::from_integer(table.gap.into()) - half()
    } else {
        half()
    }
}

/// Runs the whole induction and certifies the energy bound.
pub fn untangle(m: &Meander) -> Certificate {
    let initial_table = shape_indices(m.shape());
    let bound = energy_bound(&initial_table, m.n());
    let mut cert = Certificate {
        input: m.clone(),
        normalized: m.clone(),
        initial_table,
        ledger: EnergyLedger::default(),
        bound,
        verdict: Verdict::Fail,
        trace: vec![serialize(m)],
        note: None,
    };
    match run(&mut cert) {
        Ok(()) => {
            cert.verdict = if cert.ledger.total <= cert.bound { Verdict::Pass } else { Verdict::Fail };
            if cert.verdict == Verdict::Fail {
                cert.note = Some(format!(
                    "total {} exceeds bound {}",
                    format_rational(&cert.ledger.total),
                    format_rational(&cert.bound)
                ));
            }
        }
        Err(e) => {
            cert.verdict = Verdict::Fail;
            cert.note = Some(e.to_string());
        }
    }
    cert
}

fn run(cert: &mut Certificate) -> Result<()> {
    let input = cert.input.clone();
    let mut cur = normalize(&input, &default_carve(&input))?;
    cert.normalized = cur.clone();
    cert.trace.push(serialize(&cur));
    let start_gap = cert.initial_table.gap;
    let mut rounds = 0;
    while shape_indices(cur.shape()).gap > 1 {
        rounds += 1;
        if rounds > start_gap - 1 {
            return Err(Error::NonTermination(format!("more than {} reduction rounds", start_gap - 1)));
        }
        let (next, records) = reduce_gap_once(&cur)?;
        for r in records {
            cert.ledger.push(r);
        }
        cur = next;
        cert.trace.push(serialize(&cur));
    }
    let base = base_energy(&cur)?;
    cert.ledger.push(SweepRecord { mode: SweepMode::BaseCase, moves: Vec::new(), subtotal: base });
    let linear = Rational::new(input.n().into(), 2.into());
    if cert.ledger.total > linear {
        return Err(Error::AssertionFailure(format!(
            "total {} exceeds N/2 = {}",
            format_rational(&cert.ledger.total),
            format_rational(&linear)
        )));
    }
    Ok(())
}
