//! Line-oriented text formats.
//!
//! `.gt`:
//!
//! ```text
//! n=2
//! rect 1 h=2 v=2
//! rect 2 h=1 v=1
//! map H1.1 V1.1 +
//! map H1.2 V2.1 +
//! map H2.1 V1.2 +
//! ```
//!
//! `#` starts a comment and blank lines are ignored. `.gtc` appends lines
//! `cycle: <i0> <slot> <i1> ...` describing closed rectangle paths.

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::model::{GeometricType, Kind, Sign, SlotRef, Transition};
use crate::paths::GPath;

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..idx], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

fn int_after(tok: &Token<'_>, prefix: &str, line: usize) -> Result<usize, ParseError> {
    let body = tok
        .text
        .strip_prefix(prefix)
        .ok_or_else(|| err(line, tok.column, format!("expected `{prefix}<int>`, found `{}`", tok.text)))?;
    body.parse::<usize>()
        .map_err(|_| err(line, tok.column + prefix.len(), format!("expected an integer, found `{body}`")))
}

fn slot_token(tok: &Token<'_>, kind: Kind, line: usize) -> Result<SlotRef, ParseError> {
    let s: SlotRef = tok.text.parse().map_err(|m: String| err(line, tok.column, m))?;
    if s.kind != kind {
        return Err(err(line, tok.column, format!("expected a {kind:?}-slot, found `{}`", tok.text)));
    }
    Ok(s)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    }
}

/// Parses `.gt` text. Cycle lines are rejected; use [`parse_gtc`] for those.
pub fn parse(text: &str) -> Result<GeometricType, ParseError> {
    let (g, cycles) = parse_gtc(text)?;
    if let Some((line, _)) = cycles.first() {
        return Err(err(*line, 1, "cycle lines are only allowed in .gtc input"));
    }
    Ok(g)
}

/// Parses `.gtc` text: a type followed by cycle lines. Returns each cycle with its line number.
#[allow(clippy::type_complexity)]
pub fn parse_gtc(text: &str) -> Result<(GeometricType, Vec<(usize, GPath)>), ParseError> {
    let mut n: Option<usize> = None;
    let mut rects: Vec<Option<(usize, usize)>> = Vec::new();
    let mut maps = Vec::new();
    let mut cycles = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        last_line = line_no;
        let head = &toks[0];
        if n.is_none() {
            let value = int_after(head, "n=", line_no)?;
            if toks.len() > 1 {
                return Err(err(line_no, toks[1].column, "unexpected trailing input"));
            }
            n = Some(value);
            rects = vec![None; value];
            continue;
        }
        let nn = n.unwrap_or(0);
        match head.text {
            "rect" => {
                if toks.len() != 4 {
                    return Err(err(line_no, head.column, "expected `rect <i> h=<int> v=<int>`"));
                }
                let i = toks[1]
                    .text
                    .parse::<usize>()
                    .map_err(|_| err(line_no, toks[1].column, "expected a rectangle index"))?;
                if i == 0 || i > nn {
                    return Err(err(line_no, toks[1].column, format!("rectangle index {i} outside 1..={nn}")));
                }
                if rects[i - 1].is_some() {
                    return Err(err(line_no, toks[1].column, format!("rectangle {i} declared twice")));
                }
                let h = int_after(&toks[2], "h=", line_no)?;
                let v = int_after(&toks[3], "v=", line_no)?;
                rects[i - 1] = Some((h, v));
            }
            "map" => {
                if toks.len() != 4 {
                    return Err(err(line_no, head.column, "expected `map H<i>.<j> V<k>.<l> <+|->`"));
                }
                let hs = slot_token(&toks[1], Kind::H, line_no)?;
                let vs = slot_token(&toks[2], Kind::V, line_no)?;
                let sign = match toks[3].text {
                    "+" => Sign::Plus,
                    "-" => Sign::Minus,
                    other => {
                        return Err(err(line_no, toks[3].column, format!("expected `+` or `-`, found `{other}`")))
                    }
                };
                maps.push(Transition { h: (hs.rect, hs.slot), v: (vs.rect, vs.slot), sign });
            }
            "cycle:" => {
                let mut start = None;
                let mut steps = Vec::new();
                let mut pending: Option<SlotRef> = None;
                for tok in &toks[1..] {
                    if start.is_none() {
                        start = Some(tok.text.parse::<usize>().map_err(|_| {
                            err(line_no, tok.column, "cycle must start with a rectangle index")
                        })?);
                    } else if let Some(s) = pending.take() {
                        let i = tok.text.parse::<usize>().map_err(|_| {
                            err(line_no, tok.column, "expected a rectangle index after a slot")
                        })?;
                        steps.push((s, i));
                    } else {
                        pending = Some(tok.text.parse().map_err(|m: String| err(line_no, tok.column, m))?);
                    }
                }
                if pending.is_some() {
                    return Err(err(line_no, line.trim_end().len(), "cycle ends with a slot"));
                }
                let start = start.ok_or_else(|| err(line_no, head.column, "empty cycle"))?;
                cycles.push((line_no, GPath::new(start, steps)));
            }
            other => {
                return Err(err(line_no, head.column, format!("unknown directive `{other}`")));
            }
        }
    }
    let n = n.ok_or_else(|| err(last_line.max(1), 1, "missing `n=<int>` header"))?;
    let mut h = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for (i, r) in rects.iter().enumerate() {
        let (a, b) = r.ok_or_else(|| err(last_line.max(1), 1, format!("rectangle {} is not declared", i + 1)))?;
        h.push(a);
        v.push(b);
    }
    Ok((GeometricType::new(n, h, v, maps), cycles.into_iter().collect()))
}

/// Canonical text: header, rectangles in order, maps sorted by source slot.
pub fn serialize(g: &GeometricType) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n={}", g.n());
    for i in 1..=g.n() {
        let _ = writeln!(out, "rect {i} h={} v={}", g.h_of(i), g.v_of(i));
    }
    for t in g.maps() {
        let _ = writeln!(out, "map H{}.{} V{}.{} {}", t.h.0, t.h.1, t.v.0, t.v.1, t.sign);
    }
    out
}

/// A cycle line without trailing newline.
pub fn serialize_cycle(p: &GPath) -> String {
    let mut out = format!("cycle: {}", p.start());
    for (s, i) in p.steps() {
        let _ = write!(out, " {s} {i}");
    }
    out
}

pub fn serialize_gtc<'a>(g: &GeometricType, cycles: impl IntoIterator<Item = &'a GPath>) -> String {
    let mut out = serialize(g);
    for c in cycles {
        out.push_str(&serialize_cycle(c));
        out.push('\n');
    }
    out
}
