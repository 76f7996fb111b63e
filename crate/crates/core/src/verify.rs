//! Exhaustive property harness over all small shapes.
//!
//! Instances run in parallel; results are collected in enumeration order so
//! the summary is identical from run to run.

use std::fmt;

use rayon::prelude::*;

use crate::certificate::{render, replay};
use crate::engine::{untangle, SweepMode, Verdict};
use crate::error::Result;
use crate::format::{parse, serialize};
use crate::maslov::{shape_indices, winding_gap_oracle};
use crate::meander::assign_areas;
use crate::rational::{half, Rational};
use crate::shape::{enumerate_shapes_with_limit, validate, MeanderShape, Side};
use crate::symmetry::{transform_shape, SymmetryTransform};

pub const GRANULARITY: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub max_n: usize,
    pub areas_per_shape: u64,
    pub seed: u64,
    /// Enumeration cap, checked before anything runs.
    pub limit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSummary {
    pub name: &'static str,
    pub shapes: usize,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckSummary {
    fn from_results(name: &'static str, shapes: usize, results: Vec<Option<String>>) -> CheckSummary {
        let instances = results.len();
        let mut failures = 0;
        let mut first_failure = None;
        for r in results.into_iter().flatten() {
            failures += 1;
            first_failure.get_or_insert(r);
        }
        CheckSummary { name, shapes, instances, failures, first_failure }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub rows: Vec<CheckSummary>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().map(|r| r.failures).sum()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14} {:>8} {:>10} {:>9}", "check", "shapes", "instances", "failures")?;
        for r in &self.rows {
            writeln!(f, "{:<14} {:>8} {:>10} {:>9}", r.name, r.shapes, r.instances, r.failures)?;
        }
        writeln!(f, "total failures {}", self.failures())?;
        for r in &self.rows {
            if let Some(msg) = &r.first_failure {
                writeln!(f, "first failure in {}: {msg}", r.name)?;
            }
        }
        Ok(())
    }
}

fn all_shapes(max_n: usize, limit: usize) -> Result<Vec<MeanderShape>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for s0 in [Side::Up, Side::Down] {
            out.extend(enumerate_shapes_with_limit(n, s0, limit)?);
        }
    }
    Ok(out)
}

/// All permutations of `1..=n` with the interleaving test applied afterwards.
pub fn brute_force_count(n: usize, s0: Side) -> usize {
    fn rec(n: usize, s0: Side, perm: &mut Vec<usize>, used: &mut [bool], count: &mut usize) {
        if perm.len() == n {
            if validate(&MeanderShape::new(perm.clone(), s0)).is_ok() {
                *count += 1;
            }
            return;
        }
        for p in 1..=n {
            if !used[p] {
                used[p] = true;
                perm.push(p);
                rec(n, s0, perm, used, count);
                perm.pop();
                used[p] = false;
            }
        }
    }
    let mut count = 0;
    rec(n, s0, &mut Vec::new(), &mut vec![false; n + 1], &mut count);
    count
}

fn check_enumeration(cfg: &VerifyConfig) -> Result<CheckSummary> {
    let sizes: Vec<(usize, Side)> =
        (1..=cfg.max_n.min(9)).flat_map(|n| [(n, Side::Up), (n, Side::Down)]).collect();
    let results: Vec<Result<Option<String>>> = sizes
        .par_iter()
        .map(|&(n, s0)| {
            let fast = enumerate_shapes_with_limit(n, s0, cfg.limit)?.len();
            let slow = brute_force_count(n, s0);
            Ok((fast != slow).then(|| format!("n={n} s0={s0}: {fast} shapes, filter finds {slow}")))
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CheckSummary::from_results("enumeration", sizes.len(), results))
}

pub fn index_law_violation(shape: &MeanderShape) -> Option<String> {
    let n = shape.n();
    let t = shape_indices(shape);
    let at = shape.crossing_at();
    for p in 1..n {
        let d = t.of(at[p + 1]) - t.of(at[p]);
        if d.abs() != 1 {
            return Some(format!("{shape}: positions {p},{} differ by {d}", p + 1));
        }
    }
    if 2 * t.gap > n as i64 + 1 {
        return Some(format!("{shape}: gap {} too large", t.gap));
    }
    if (t.gap == 0) != (n == 1) {
        return Some(format!("{shape}: gap {} with {n} crossings", t.gap));
    }
    if shape.s0 == Side::Up && shape.arc_side(n) == Side::Up && t.last() - t.first() != 1 {
        return Some(format!("{shape}: upper boundary arcs but end gap {}", t.last() - t.first()));
    }
    None
}

pub fn oracle_violation(shape: &MeanderShape) -> Option<String> {
    let t = shape_indices(shape);
    for i in 1..=shape.n() {
        for j in 1..=shape.n() {
            let w = winding_gap_oracle(shape, i, j);
            if w != t.of(j) - t.of(i) {
                return Some(format!("{shape}: pair ({i},{j}) winding {w}, table {}", t.of(j) - t.of(i)));
            }
        }
    }
    None
}

pub fn symmetry_violation(shape: &MeanderShape) -> Option<String> {
    let n = shape.n();
    let mu = shape_indices(shape).mu;
    let last = mu[n - 1];
    for t in [SymmetryTransform::VFlip, SymmetryTransform::HFlip, SymmetryTransform::RotPi] {
        let image = transform_shape(shape, t);
        if !validate(&image).is_ok() {
            return Some(format!("{shape}: {t:?} image invalid"));
        }
        if transform_shape(&image, t) != *shape {
            return Some(format!("{shape}: {t:?} is not an involution"));
        }
        let got = shape_indices(&image).mu;
        let want: Vec<i64> = (1..=n)
            .map(|k| match t {
                SymmetryTransform::VFlip => -mu[k - 1],
                SymmetryTransform::HFlip => last - mu[n - k],
                SymmetryTransform::RotPi => mu[n - k] - last,
            })
            .collect();
        if got != want {
            return Some(format!("{shape}: {t:?} indices {got:?}, expected {want:?}"));
        }
    }
    let vh = transform_shape(&transform_shape(shape, SymmetryTransform::HFlip), SymmetryTransform::VFlip);
    let hv = transform_shape(&transform_shape(shape, SymmetryTransform::VFlip), SymmetryTransform::HFlip);
    if vh != hv || vh != transform_shape(shape, SymmetryTransform::RotPi) {
        return Some(format!("{shape}: reflections do not compose to the rotation"));
    }
    None
}

fn shape_check(
    name: &'static str,
    shapes: &[MeanderShape],
    check: fn(&MeanderShape) -> Option<String>,
) -> CheckSummary {
    let results: Vec<Option<String>> = shapes.par_iter().map(check).collect();
    CheckSummary::from_results(name, shapes.len(), results)
}

/// Everything the certificate of one instance must satisfy.
pub fn certificate_violation(shape: &MeanderShape, seed: u64) -> Option<String> {
    let m = match assign_areas(shape, seed, GRANULARITY) {
        Ok(m) => m,
        Err(e) => return Some(format!("{shape} seed {seed}: {e}")),
    };
    let cert = untangle(&m);
    let tag = format!("{shape} seed {seed}");
    if cert.verdict != Verdict::Pass {
        return Some(format!("{tag}: verdict fail ({})", cert.note.unwrap_or_default()));
    }
    let n = Rational::from_integer((shape.n() as i64).into());
    if cert.ledger.total.clone() * Rational::from_integer(2.into()) > n {
        return Some(format!("{tag}: total exceeds N/2"));
    }
    let mut previous: Option<&Rational> = None;
    for sweep in &cert.ledger.sweeps {
        if sweep.subtotal > half() {
            return Some(format!("{tag}: {} sweep above 1/2", sweep.mode));
        }
        match sweep.mode {
            SweepMode::MinusSweep => previous = Some(&sweep.subtotal),
            SweepMode::PlusSweep => {
                let pair = previous.take().cloned().unwrap_or_default() + &sweep.subtotal;
                if pair > Rational::from_integer(1.into()) {
                    return Some(format!("{tag}: double sweep above 1"));
                }
            }
            SweepMode::BaseCase => {}
        }
    }
    let rounds = cert.ledger.sweeps.iter().filter(|s| s.mode == SweepMode::MinusSweep).count() as i64;
    if rounds > (cert.initial_table.gap - 1).max(0) {
        return Some(format!("{tag}: {rounds} rounds for gap {}", cert.initial_table.gap));
    }
    None
}

pub fn serialization_violation(shape: &MeanderShape, seed: u64) -> Option<String> {
    let m = match assign_areas(shape, seed, GRANULARITY) {
        Ok(m) => m,
        Err(e) => return Some(format!("{shape} seed {seed}: {e}")),
    };
    let text = serialize(&m);
    match parse(&text) {
        Ok(back) if back == m => {}
        Ok(_) => return Some(format!("{shape} seed {seed}: round trip changed the meander")),
        Err(e) => return Some(format!("{shape} seed {seed}: {e}")),
    }
    let cert = untangle(&m);
    match replay(&render(&cert)) {
        Ok(r) if r.identical && r.recorded == r.replayed => None,
        Ok(_) => Some(format!("{shape} seed {seed}: replay differs")),
        Err(e) => Some(format!("{shape} seed {seed}: certificate does not parse: {e}")),
    }
}

fn instance_check(
    name: &'static str,
    shapes: &[MeanderShape],
    cfg: &VerifyConfig,
    check: fn(&MeanderShape, u64) -> Option<String>,
) -> CheckSummary {
    let jobs: Vec<(&MeanderShape, u64)> = shapes
        .iter()
        .flat_map(|s| (0..cfg.areas_per_shape).map(move |j| (s, cfg.seed.wrapping_add(j))))
        .collect();
    let results: Vec<Option<String>> = jobs.par_iter().map(|(s, seed)| check(s, *seed)).collect();
    CheckSummary::from_results(name, shapes.len(), results)
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let shapes = all_shapes(cfg.max_n, cfg.limit)?;
    let rows = vec![
        check_enumeration(cfg)?,
        shape_check("index-laws", &shapes, index_law_violation),
        shape_check("oracle", &shapes, oracle_violation),
        shape_check("symmetry", &shapes, symmetry_violation),
        instance_check("certificate", &shapes, cfg, certificate_violation),
        instance_check("serialization", &shapes, cfg, serialization_violation),
    ];
    Ok(VerifyReport { rows })
}
