//! Nonempty compact subsets of the real line.
//!
//! A [`CompactSet`] is a finite union of pairwise disjoint closed intervals,
//! kept sorted with strictly positive gaps. Every metric quantity on these
//! sets (point distance, excess, Hausdorff distance) is computed exactly
//! from finitely many candidate points, because `d(., B)` is piecewise
//! linear with kinks only at endpoints and gap midpoints of `B`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::parse::{fmt_real, parse_const_span, ParseError, Span};

/// Intervals closer than this are merged on construction.
pub const MERGE_GAP: f64 = 1e-12;

/// Default tolerance for set comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.hi - self.lo <= MERGE_GAP
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactSet {
    parts: Vec<Interval>,
}

impl CompactSet {
    /// Builds the union of the given closed intervals, sorting and merging
    /// overlapping, touching or nearly touching pieces.
    pub fn new<I>(intervals: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw = Vec::new();
        for (lo, hi) in intervals {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidInterval { lo, hi });
            }
            raw.push(Interval { lo, hi });
        }
        if raw.is_empty() {
            return Err(Error::EmptySet);
        }
        raw.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut parts: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match parts.last_mut() {
                Some(last) if iv.lo - last.hi < MERGE_GAP => last.hi = last.hi.max(iv.hi),
                _ => parts.push(iv),
            }
        }
        Ok(CompactSet { parts })
    }

    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite point {x}");
        CompactSet {
            parts: vec![Interval { lo: x, hi: x }],
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new([(lo, hi)])
    }

    /// A finite set of points.
    pub fn points<I: IntoIterator<Item = f64>>(xs: I) -> Result<Self> {
        Self::new(xs.into_iter().map(|x| (x, x)))
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn min(&self) -> f64 {
        self.parts[0].lo
    }

    pub fn max(&self) -> f64 {
        self.parts[self.parts.len() - 1].hi
    }

    pub fn is_convex(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn is_singleton(&self) -> bool {
        self.is_convex() && self.parts[0].is_point()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    /// Closed convex hull: `[min, max]`.
    pub fn hull(&self) -> CompactSet {
        CompactSet {
            parts: vec![Interval {
                lo: self.min(),
                hi: self.max(),
            }],
        }
    }

    pub fn union(&self, other: &CompactSet) -> CompactSet {
        let all = self.parts.iter().chain(&other.parts).map(|p| (p.lo, p.hi));
        CompactSet::new(all).expect("union of valid sets is valid")
    }

    /// Set inclusion decided from the interval structure alone.
    pub fn is_subset_of(&self, other: &CompactSet) -> bool {
        self.parts
            .iter()
            .all(|p| other.parts.iter().any(|q| q.lo <= p.lo && p.hi <= q.hi))
    }

    /// `d(z, A) = inf { |z - a| : a in A }`.
    pub fn point_distance(&self, z: f64) -> f64 {
        // first part whose upper end is >= z
        let idx = self.parts.partition_point(|p| p.hi < z);
        let mut best = f64::INFINITY;
        if let Some(p) = self.parts.get(idx) {
            best = if p.lo <= z { 0.0 } else { p.lo - z };
        }
        if idx > 0 {
            best = best.min(z - self.parts[idx - 1].hi);
        }
        best
    }

    /// `e(A, B) = sup { d(a, B) : a in A }`, evaluated on the finite set of
    /// candidates where `d(., B)` restricted to `A` can peak.
    pub fn excess(&self, other: &CompactSet) -> f64 {
        let mut best: f64 = 0.0;
        for p in &self.parts {
            best = best.max(other.point_distance(p.lo));
            best = best.max(other.point_distance(p.hi));
        }
        for gap in other.parts.windows(2) {
            let mid = 0.5 * (gap[0].hi + gap[1].lo);
            if self.contains(mid) {
                best = best.max(other.point_distance(mid));
            }
        }
        best
    }

    pub fn hausdorff(&self, other: &CompactSet) -> f64 {
        self.excess(other).max(other.excess(self))
    }

    pub fn approx_eq(&self, other: &CompactSet, tol: f64) -> bool {
        self.hausdorff(other) <= tol
    }

    /// The open `eps`-parallel body `S_eps(A)`.
    pub fn enlarge(&self, eps: f64) -> Result<OpenUnion> {
        if !(eps > 0.0) {
            return Err(Error::NonPositiveRadius(eps));
        }
        let mut parts: Vec<(f64, f64)> = Vec::with_capacity(self.parts.len());
        for p in &self.parts {
            let (lo, hi) = (p.lo - eps, p.hi + eps);
            match parts.last_mut() {
                Some(last) if lo < last.1 => last.1 = last.1.max(hi),
                _ => parts.push((lo, hi)),
            }
        }
        Ok(OpenUnion { parts })
    }

    /// Extreme points of a convex set: its endpoints.
    pub fn extreme_points(&self) -> Result<CompactSet> {
        if !self.is_convex() {
            return Err(Error::NotConvex(self.to_string()));
        }
        let p = self.parts[0];
        Ok(CompactSet::points([p.lo, p.hi]).expect("finite endpoints"))
    }

    /// Parses a set literal such as `[-1, 1] u {2, 3}`.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        parse_set_span(Span::new(text, 0))
    }
}

impl fmt::Display for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            if p.lo == p.hi {
                write!(f, "{{{}}}", fmt_real(p.lo))?;
            } else {
                write!(f, "[{}, {}]", fmt_real(p.lo), fmt_real(p.hi))?;
            }
        }
        Ok(())
    }
}

impl FromStr for CompactSet {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CompactSet::parse(s)
    }
}

pub(crate) fn parse_set_span(span: Span<'_>) -> std::result::Result<CompactSet, ParseError> {
    let bytes = span.text.as_bytes();
    let mut pos = 0;
    let mut intervals = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    loop {
        skip_ws(&mut pos);
        let open = match bytes.get(pos) {
            Some(b'[') => b'[',
            Some(b'{') => b'{',
            _ => return Err(span.error(pos, "expected '[' or '{' to start a set term")),
        };
        let close = if open == b'[' { b']' } else { b'}' };
        let start = pos;
        let mut depth = 0i32;
        let mut end = None;
        for (i, &b) in bytes.iter().enumerate().skip(pos) {
            match b {
                b'(' | b'[' | b'{' => depth += 1,
                b')' | b']' | b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        if b != close {
                            return Err(span.error(i, "mismatched bracket"));
                        }
                        end = Some(i);
                        break;
                    }
                }
                _ => {}
            }
        }
        let end = end.ok_or_else(|| span.error(start, "unterminated set term"))?;
        let inner = span.slice(start + 1, end);
        let values = inner
            .split_top_level(',')
            .into_iter()
            .map(|s| parse_const_span(s))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if open == b'[' {
            if values.len() != 2 {
                return Err(span.error(start, "an interval needs exactly two endpoints"));
            }
            if values[0] > values[1] {
                return Err(span.error(start, "interval endpoints out of order"));
            }
            intervals.push((values[0], values[1]));
        } else {
            intervals.extend(values.into_iter().map(|x| (x, x)));
        }
        pos = end + 1;
        skip_ws(&mut pos);
        match bytes.get(pos) {
            None => break,
            Some(b'u') | Some(b'U') => pos += 1,
            Some(_) => return Err(span.error(pos, "expected 'u' between set terms")),
        }
    }
    CompactSet::new(intervals).map_err(|e| span.error(0, e.to_string()))
}

/// A finite union of disjoint open intervals, as produced by [`CompactSet::enlarge`].
#[derive(Debug, Clone, PartialEq)]
pub struct OpenUnion {
    parts: Vec<(f64, f64)>,
}

impl OpenUnion {
    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|&(lo, hi)| lo < x && x < hi)
    }

    /// Whether the compact set lies inside this open set. Each connected
    /// part must fit in a single component.
    pub fn covers(&self, set: &CompactSet) -> bool {
        set.parts()
            .iter()
            .all(|p| self.parts.iter().any(|&(lo, hi)| lo < p.lo && p.hi < hi))
    }
}
