//! The line-oriented map definition format.
//!
//! ```text
//! # the jump map
//! domain [-1, 1]
//! piece (-1, 0) : poly 1
//! piece (0, 1) : poly -1
//! fiber 0 : {-1, 1}
//! ```
//!
//! Statements are `domain [a, b]`, `puncture x`, `piece (u, v) : <expr>` and
//! `fiber x : <set> | auto`. Numbers are constant expressions. Pieces must
//! tile the domain; a breakpoint without a `fiber` line gets `auto`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::compact::parse_set_span;
use crate::expr::parse_expr_span;
use crate::map::{BreakFiber, PiecewiseMap};
use crate::parse::{fmt_real, parse_const_span, ParseError, Span};

/// Breakpoints written twice (once per adjacent piece, or in a fiber line)
/// are identified when they agree to this relative precision.
const SAME_POINT: f64 = 1e-12;

fn same_point(a: f64, b: f64) -> bool {
    (a - b).abs() <= SAME_POINT * a.abs().max(b.abs()).max(1.0)
}

enum FiberSpec {
    Set(crate::compact::CompactSet),
    Auto,
}

pub fn parse_map(text: &str) -> Result<PiecewiseMap, ParseError> {
    let mut domain: Option<(f64, f64, usize)> = None;
    let mut punctures: Vec<(f64, usize)> = Vec::new();
    let mut pieces: Vec<(f64, f64, crate::expr::Expr, usize)> = Vec::new();
    let mut fibers: Vec<(f64, FiberSpec, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let span = Span::new(content, 0).trim();
        if span.text.is_empty() {
            continue;
        }
        let kw_end = span.text.find(char::is_whitespace).unwrap_or(span.text.len());
        let keyword = &span.text[..kw_end];
        let rest = span.slice(kw_end, span.text.len()).trim();
        let at_line = |e: ParseError| e.on_line(line_no);
        match keyword {
            "domain" => {
                if domain.is_some() {
                    return Err(span.error(0, "duplicate domain statement").on_line(line_no));
                }
                let (a, b) = parse_pair(rest, '[', ']').map_err(at_line)?;
                if !(a < b) {
                    return Err(rest.error(0, "domain needs a < b").on_line(line_no));
                }
                domain = Some((a, b, line_no));
            }
            "puncture" => {
                let x = parse_const_span(rest).map_err(at_line)?;
                punctures.push((x, line_no));
            }
            "piece" => {
                let (head, body) = split_colon(rest).map_err(at_line)?;
                let (u, v) = parse_pair(head, '(', ')').map_err(at_line)?;
                if !(u < v) {
                    return Err(head.error(0, "piece needs u < v").on_line(line_no));
                }
                let expr = parse_expr_span(body).map_err(at_line)?;
                pieces.push((u, v, expr, line_no));
            }
            "fiber" => {
                let (head, body) = split_colon(rest).map_err(at_line)?;
                let x = parse_const_span(head).map_err(at_line)?;
                let spec = if body.text == "auto" {
                    FiberSpec::Auto
                } else {
                    FiberSpec::Set(parse_set_span(body).map_err(at_line)?)
                };
                fibers.push((x, spec, line_no));
            }
            other => {
                return Err(span.error(0, format!("unknown statement '{other}'")).on_line(line_no));
            }
        }
    }

    let at = |line: usize, msg: String| ParseError::new(1, msg).on_line(line);
    let last_line = text.lines().count().max(1);
    let (a, b, domain_line) =
        domain.ok_or_else(|| at(last_line, "missing domain statement".into()))?;
    if pieces.is_empty() {
        return Err(at(last_line, "a map needs at least one piece".into()));
    }
    pieces.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut breakpoints = vec![a];
    let mut exprs = Vec::with_capacity(pieces.len());
    for (u, v, expr, line) in pieces {
        let prev = *breakpoints.last().expect("nonempty");
        if !same_point(u, prev) {
            let msg = if u < prev {
                format!("piece starting at {} overlaps the previous piece", fmt_real(u))
            } else {
                format!("gap between {} and {} is not covered by any piece", fmt_real(prev), fmt_real(u))
            };
            return Err(at(line, msg));
        }
        if v > b && !same_point(v, b) {
            return Err(at(line, format!("piece ends at {} beyond the domain", fmt_real(v))));
        }
        breakpoints.push(v);
        exprs.push(expr);
    }
    let end = *breakpoints.last().expect("nonempty");
    if !same_point(end, b) {
        return Err(at(
            domain_line,
            format!("pieces stop at {} before the domain end {}", fmt_real(end), fmt_real(b)),
        ));
    }
    *breakpoints.last_mut().expect("nonempty") = b;

    let find = |x: f64| breakpoints.iter().position(|&bp| same_point(bp, x));
    let mut slots: Vec<Option<BreakFiber>> = vec![None; breakpoints.len()];
    for (x, line) in punctures {
        match find(x) {
            Some(i) if i > 0 && i + 1 < breakpoints.len() => {
                if slots[i].is_some() {
                    return Err(at(line, format!("duplicate puncture at {}", fmt_real(x))));
                }
                slots[i] = Some(BreakFiber::Puncture);
            }
            Some(_) => return Err(at(line, "domain endpoints cannot be punctured".into())),
            None => {
                return Err(at(
                    line,
                    format!("puncture {} is not a piece endpoint", fmt_real(x)),
                ))
            }
        }
    }
    for (x, spec, line) in fibers {
        let i = find(x).ok_or_else(|| {
            at(line, format!("fiber at {} which is not a breakpoint", fmt_real(x)))
        })?;
        match slots[i] {
            Some(BreakFiber::Puncture) => {
                return Err(at(line, format!("fiber given at the puncture {}", fmt_real(x))))
            }
            Some(_) => return Err(at(line, format!("duplicate fiber at {}", fmt_real(x)))),
            None => {}
        }
        slots[i] = Some(match spec {
            FiberSpec::Set(s) => BreakFiber::Declared(s),
            FiberSpec::Auto => BreakFiber::Auto,
        });
    }
    let fibers = slots.into_iter().map(|s| s.unwrap_or(BreakFiber::Auto)).collect();
    PiecewiseMap::new(breakpoints, exprs, fibers).map_err(|e| at(domain_line, e.to_string()))
}

fn split_colon(span: Span<'_>) -> Result<(Span<'_>, Span<'_>), ParseError> {
    let parts = span.split_top_level(':');
    if parts.len() != 2 {
        return Err(span.error(0, "expected exactly one ':'"));
    }
    Ok((parts[0].trim(), parts[1].trim()))
}

fn parse_pair(span: Span<'_>, open: char, close: char) -> Result<(f64, f64), ParseError> {
    let t = span.text;
    if !t.starts_with(open) {
        return Err(span.error(0, format!("expected '{open}'")));
    }
    if !t.ends_with(close) || t.len() < 2 {
        return Err(span.error(t.len().saturating_sub(1), format!("expected '{close}'")));
    }
    let inner = span.slice(1, t.len() - 1);
    let parts = inner.split_top_level(',');
    if parts.len() != 2 {
        return Err(span.error(0, "expected two comma-separated values"));
    }
    Ok((parse_const_span(parts[0])?, parse_const_span(parts[1])?))
}

/// Serializes a map so that [`parse_map`] reproduces it exactly.
pub fn write_map(map: &PiecewiseMap) -> String {
    let mut out = String::new();
    let (a, b) = map.domain();
    let _ = writeln!(out, "domain [{}, {}]", fmt_real(a), fmt_real(b));
    for x in map.punctures() {
        let _ = writeln!(out, "puncture {}", fmt_real(x));
    }
    let bps = map.breakpoints();
    for (i, piece) in map.pieces().iter().enumerate() {
        let _ = writeln!(out, "piece ({}, {}) : {}", fmt_real(bps[i]), fmt_real(bps[i + 1]), piece);
    }
    for (x, fiber) in bps.iter().zip(map.fibers()) {
        match fiber {
            BreakFiber::Declared(s) => {
                let _ = writeln!(out, "fiber {} : {}", fmt_real(*x), s);
            }
            BreakFiber::Auto => {
                let _ = writeln!(out, "fiber {} : auto", fmt_real(*x));
            }
            BreakFiber::Puncture => {}
        }
    }
    out
}

impl FromStr for PiecewiseMap {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_map(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::CompactSet;
    use crate::expr::Expr;

    const JUMP: &str = "\
# jump
domain [-1, 1]
piece (-1, 0) : poly 1
piece (0, 1) : poly -1   # right half
fiber 0 : {-1, 1}
";

    #[test]
    fn parses_the_jump_map() {
        let m = parse_map(JUMP).unwrap();
        assert_eq!(m.breakpoints(), &[-1.0, 0.0, 1.0]);
        assert_eq!(m.fiber(0.0).unwrap(), CompactSet::points([-1.0, 1.0]).unwrap());
        assert_eq!(m.fibers()[0], BreakFiber::Auto);
    }

    #[test]
    fn const_breakpoints_and_punctures() {
        let text = "\
domain [-1, 1]
puncture 1/2
piece (-1, 0) : poly 1
piece (0, 2/(11*pi)) : sinrecip amp=1 k=1 c=0 off=0
piece (2/(11*pi), 1/2) : poly -1
piece (1/2, 1) : poly -1
fiber 0 : [-1, 1]
fiber 2/(11*pi) : auto
";
        let m = parse_map(text).unwrap();
        assert_eq!(m.breakpoints()[2], 2.0 / (11.0 * std::f64::consts::PI));
        assert_eq!(m.punctures(), vec![0.5]);
        assert_eq!(m.pieces()[1], Expr::sin_recip(1.0, 1.0, 0.0, 0.0).unwrap());
    }

    #[test]
    fn round_trip_is_exact() {
        let m = parse_map(JUMP).unwrap();
        let again = parse_map(&write_map(&m)).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let err = parse_map("domain [-1, 1]\npiece (-1, 1) : poly x\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 22));
        let err = parse_map("domain [-1, 1]\nwibble\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_map("domain [-1, 1]\npiece (-1, 0) : poly 1\n").unwrap_err();
        assert!(err.message.contains("before the domain end"));
        let err = parse_map("domain [-1, 1]\npiece (-1, 0) : poly 1\npiece (0.5, 1) : poly 1\n")
            .unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_map("piece (-1, 1) : poly 1\n").unwrap_err();
        assert!(err.message.contains("missing domain"));
        let err = parse_map("domain [-1, 1]\npiece (-1, 1) : poly 1\nfiber 0 : {0}\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_map(
            "domain [-1, 1]\npuncture 0\npiece (-1, 0) : poly 1\npiece (0, 1) : poly 1\nfiber 0 : {1}\n",
        )
        .unwrap_err();
        assert!(err.message.contains("puncture"));
        let err = parse_map("domain [-1, 1]\npiece (-1, 1) : sinrecip amp=1 k=1 c=0 off=0\n")
            .unwrap_err();
        assert!(err.message.contains("inside its piece"));
    }
}
