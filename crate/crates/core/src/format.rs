//! Line-oriented text format for meanders.
//!
//! ```text
//! meander v1
//! n 3
//! s0 +
//! perm 3 2 1
//! face arc:0 1/8
//! ...
//! face outer:+ 1/4
//! face outer:- 5/16
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, ParseError};
use crate::meander::{FaceId, Meander};
use crate::rational::{format_rational, parse_rational};
use crate::shape::{validate, MeanderShape, Side};

pub const HEADER: &str = "meander v1";

pub fn serialize(m: &Meander) -> String {
    let shape = m.shape();
    let perm: Vec<String> = shape.perm.iter().map(|p| p.to_string()).collect();
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("n {}\n", shape.n()));
    out.push_str(&format!("s0 {}\n", shape.s0.symbol()));
    out.push_str(&format!("perm {}\n", perm.join(" ")));
    for (face, area) in m.areas() {
        out.push_str(&format!("face {face} {}\n", format_rational(area)));
    }
    out
}

/// Lines with comments stripped, paired with 1-based line numbers; blank lines dropped.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = match line.find('#') {
            Some(cut) => &line[..cut],
            None => line,
        };
        let line = line.trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub fn parse(text: &str) -> Result<Meander, ParseError> {
    parse_lines(content_lines(text))
}

pub(crate) fn parse_lines<'a>(
    mut lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<Meander, ParseError> {
    let (line_no, header) = lines.next().ok_or_else(|| ParseError::syntax(1, "empty input"))?;
    if header != HEADER {
        return Err(ParseError::syntax(line_no, format!("expected `{HEADER}`, found `{header}`")));
    }
    let mut n: Option<usize> = None;
    let mut s0: Option<Side> = None;
    let mut perm: Option<(usize, Vec<usize>)> = None;
    let mut areas = BTreeMap::new();
    let mut last_line = line_no;
    for (line_no, line) in lines {
        last_line = line_no;
        let mut words = line.split_whitespace();
        let key = words.next().unwrap_or_default();
        let rest: Vec<&str> = words.collect();
        match key {
            "n" => {
                let [value] = rest[..] else {
                    return Err(ParseError::syntax(line_no, "`n` takes one value"));
                };
                let value = value
                    .parse()
                    .map_err(|_| ParseError::syntax(line_no, format!("bad crossing count `{value}`")))?;
                if n.replace(value).is_some() {
                    return Err(ParseError::syntax(line_no, "duplicate `n` line"));
                }
            }
            "s0" => {
                let side = match rest[..] {
                    [v] => Side::from_symbol(v),
                    _ => None,
                }
                .ok_or_else(|| ParseError::syntax(line_no, "`s0` must be `+` or `-`"))?;
                if s0.replace(side).is_some() {
                    return Err(ParseError::syntax(line_no, "duplicate `s0` line"));
                }
            }
            "perm" => {
                let values = rest
                    .iter()
                    .map(|w| w.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| ParseError::syntax(line_no, "perm entries must be positive integers"))?;
                if perm.replace((line_no, values)).is_some() {
                    return Err(ParseError::syntax(line_no, "duplicate `perm` line"));
                }
            }
            "face" => {
                let [id, value] = rest[..] else {
                    return Err(ParseError::syntax(line_no, "`face` takes an id and an area"));
                };
                let face = FaceId::parse(id)
                    .ok_or_else(|| ParseError::syntax(line_no, format!("bad face id `{id}`")))?;
                let area = parse_rational(value)
                    .ok_or_else(|| ParseError::syntax(line_no, format!("bad rational `{value}`")))?;
                if areas.insert(face, area).is_some() {
                    return Err(ParseError::syntax(line_no, format!("duplicate face {face}")));
                }
            }
            other => return Err(ParseError::syntax(line_no, format!("unknown key `{other}`"))),
        }
    }
    let n = n.ok_or_else(|| ParseError::syntax(last_line, "missing `n` line"))?;
    let s0 = s0.ok_or_else(|| ParseError::syntax(last_line, "missing `s0` line"))?;
    let (perm_line, perm) = perm.ok_or_else(|| ParseError::syntax(last_line, "missing `perm` line"))?;
    if perm.len() != n {
        return Err(ParseError::syntax(
            perm_line,
            format!("perm has {} entries but n = {n}", perm.len()),
        ));
    }
    let shape = MeanderShape::new(perm, s0);
    let report = validate(&shape);
    if !report.is_ok() {
        return Err(ParseError::invariant(perm_line, format!("planarity violation: {report}")));
    }
    Meander::new(shape, areas).map_err(|e| match e {
        Error::AreaInvariant(msg) => ParseError::invariant(last_line, format!("area invariant: {msg}")),
        other => ParseError::invariant(last_line, other.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ParseErrorClass;

    const WORKED: &str = "meander v1\nn 3\ns0 +\nperm 3 2 1\nface arc:0 1/8\nface arc:1 1/16\nface arc:2 1/8\nface arc:3 1/8\nface outer:+ 1/4\nface outer:- 5/16\n";

    #[test]
    fn canonical_roundtrip() {
        let m = parse(WORKED).unwrap();
        assert_eq!(serialize(&m), WORKED);
    }

    #[test]
    fn permuted_faces_and_comments() {
        let text = "# worked example\nmeander v1\nn 3   # three crossings\ns0 +\nperm 3 2 1\n\nface outer:- 10/32\nface arc:3 1/8\nface arc:2 1/8\nface arc:1 1/16\nface arc:0 1/8\nface outer:+ 1/4\n";
        assert_eq!(serialize(&parse(text).unwrap()), WORKED);
    }

    #[test]
    fn planarity_violation() {
        let text = "meander v1\nn 2\ns0 +\nperm 2 1\nface arc:0 1/4\nface arc:1 1/4\nface arc:2 1/4\nface outer:+ 1/8\nface outer:- 1/8\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.class, ParseErrorClass::Invariant);
        assert_eq!(err.line, 4);
        assert!(err.message.contains("planarity"), "{err}");
    }

    #[test]
    fn area_violation() {
        let text = WORKED.replace("face arc:2 1/8", "face arc:2 1/4");
        let err = parse(&text).unwrap_err();
        assert_eq!(err.class, ParseErrorClass::Invariant);
        assert!(err.message.contains("area invariant"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = parse(&WORKED.replace("s0 +", "s0 up")).unwrap_err();
        assert_eq!((err.class, err.line), (ParseErrorClass::Syntax, 3));
        let err = parse(&WORKED.replace("1/16", "1/0")).unwrap_err();
        assert_eq!((err.class, err.line), (ParseErrorClass::Syntax, 6));
        let err = parse("meander v2\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse(&WORKED.replace("n 3", "n 4")).unwrap_err();
        assert_eq!((err.class, err.line), (ParseErrorClass::Syntax, 4));
        assert!(parse("").is_err());
    }
}
