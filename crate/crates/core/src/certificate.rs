//! Text form of certificates and their replay.
//!
//! ```text
//! certificate v1
//! input
//! meander v1
//! ...
//! end
//! move full point=2 cost=1/16
//! sweep minus subtotal=1/16
//! sweep base subtotal=1/2
//! total 9/16
//! bound 1/2
//! verdict pass
//! ```
//!
//! Move lines belong to the next `sweep` line. Positions are those of the
//! processed point in the meander the move was applied to.

use crate::engine::{untangle, Certificate, SweepMode, Verdict};
use crate::error::ParseError;
use crate::format::{content_lines, parse_lines, serialize};
use crate::meander::Meander;
use crate::moves::MoveKind;
use crate::rational::{format_rational, parse_rational, Rational};

pub const HEADER: &str = "certificate v1";

pub fn render(cert: &Certificate) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push_str("\ninput\n");
    out.push_str(&serialize(&cert.input));
    out.push_str("end\n");
    for sweep in &cert.ledger.sweeps {
        for mv in &sweep.moves {
            out.push_str(&format!("move {} point={} cost={}\n", mv.kind, mv.point, format_rational(&mv.cost)));
        }
        out.push_str(&format!("sweep {} subtotal={}\n", sweep.mode, format_rational(&sweep.subtotal)));
    }
    out.push_str(&format!("total {}\n", format_rational(&cert.ledger.total)));
    out.push_str(&format!("bound {}\n", format_rational(&cert.bound)));
    if let Some(note) = &cert.note {
        out.push_str(&format!("note {}\n", note.replace('\n', " ")));
    }
    out.push_str(&format!("verdict {}\n", cert.verdict));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveLine {
    pub kind: MoveKind,
    pub point: usize,
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepLine {
    pub mode: SweepMode,
    pub moves: Vec<MoveLine>,
    pub subtotal: Rational,
}

/// A certificate as read back from text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateText {
    pub input: Meander,
    pub sweeps: Vec<SweepLine>,
    pub total: Rational,
    pub bound: Rational,
    pub note: Option<String>,
    pub verdict: Verdict,
}

fn field<'a>(line_no: usize, word: Option<&'a str>, key: &str) -> Result<&'a str, ParseError> {
    word.and_then(|w| w.strip_prefix(key))
        .and_then(|w| w.strip_prefix('='))
        .ok_or_else(|| ParseError::syntax(line_no, format!("expected `{key}=...`")))
}

fn rational(line_no: usize, text: &str) -> Result<Rational, ParseError> {
    parse_rational(text).ok_or_else(|| ParseError::syntax(line_no, format!("bad rational `{text}`")))
}

pub fn parse(text: &str) -> Result<CertificateText, ParseError> {
    let mut lines = content_lines(text).peekable();
    let (no, header) = lines.next().ok_or_else(|| ParseError::syntax(1, "empty input"))?;
    if header != HEADER {
        return Err(ParseError::syntax(no, format!("expected `{HEADER}`, found `{header}`")));
    }
    match lines.next() {
        Some((_, "input")) => {}
        Some((no, other)) => return Err(ParseError::syntax(no, format!("expected `input`, found `{other}`"))),
        None => return Err(ParseError::syntax(no, "missing `input` block")),
    }
    let mut block = Vec::new();
    loop {
        match lines.next() {
            Some((_, "end")) => break,
            Some(line) => block.push(line),
            None => return Err(ParseError::syntax(no, "unterminated `input` block")),
        }
    }
    let input = parse_lines(block.into_iter())?;

    let mut sweeps = Vec::new();
    let mut pending = Vec::new();
    let mut total = None;
    let mut bound = None;
    let mut note = None;
    let mut verdict = None;
    for (no, line) in lines {
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        let mut words = rest.split_whitespace();
        match key {
            "move" => {
                let kind = words
                    .next()
                    .and_then(MoveKind::from_keyword)
                    .ok_or_else(|| ParseError::syntax(no, "unknown move kind"))?;
                let point = field(no, words.next(), "point")?
                    .parse()
                    .map_err(|_| ParseError::syntax(no, "bad point position"))?;
                let cost = rational(no, field(no, words.next(), "cost")?)?;
                pending.push(MoveLine { kind, point, cost });
            }
            "sweep" => {
                let mode = words
                    .next()
                    .and_then(SweepMode::from_keyword)
                    .ok_or_else(|| ParseError::syntax(no, "unknown sweep mode"))?;
                let subtotal = rational(no, field(no, words.next(), "subtotal")?)?;
                sweeps.push(SweepLine { mode, moves: std::mem::take(&mut pending), subtotal });
            }
            "total" => total = Some(rational(no, rest.trim())?),
            "bound" => bound = Some(rational(no, rest.trim())?),
            "note" => note = Some(rest.trim().to_string()),
            "verdict" => {
                verdict = Some(match rest.trim() {
                    "pass" => Verdict::Pass,
                    "fail" => Verdict::Fail,
                    other => return Err(ParseError::syntax(no, format!("bad verdict `{other}`"))),
                })
            }
            other => return Err(ParseError::syntax(no, format!("unknown line `{other}`"))),
        }
    }
    if !pending.is_empty() {
        return Err(ParseError::syntax(0, "move lines after the last sweep"));
    }
    let missing = |what: &str| ParseError::syntax(0, format!("missing `{what}` line"));
    Ok(CertificateText {
        input,
        sweeps,
        total: total.ok_or_else(|| missing("total"))?,
        bound: bound.ok_or_else(|| missing("bound"))?,
        note,
        verdict: verdict.ok_or_else(|| missing("verdict"))?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub recorded: Verdict,
    pub replayed: Verdict,
    /// The rerun renders to exactly the recorded text (up to comments and blank lines).
    pub identical: bool,
    pub certificate: Certificate,
}

/// Reruns the induction on the recorded input and compares the outcome.
pub fn replay(text: &str) -> Result<Replay, ParseError> {
    let recorded = parse(text)?;
    let certificate = untangle(&recorded.input);
    let normalize = |t: &str| content_lines(t).map(|(_, l)| l.to_string()).collect::<Vec<_>>();
    let identical = normalize(text) == normalize(&render(&certificate));
    Ok(Replay { recorded: recorded.verdict, replayed: certificate.verdict, identical, certificate })
}
