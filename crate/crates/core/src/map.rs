//! Piecewise set-valued maps on a compact interval.
//!
//! A map is single-valued on finitely many open pieces and may be
//! multi-valued only at the breakpoints between them. Each breakpoint
//! carries a declared compact fiber, the `Auto` fiber (the union of the
//! one-sided cluster sets of the neighbouring pieces), or is a puncture
//! removed from the domain.

use crate::compact::CompactSet;
use crate::error::{Error, Result};
use crate::expr::{Expr, Side};
use crate::parse::fmt_real;
use crate::sup::sup_abs_diff;

#[derive(Debug, Clone, PartialEq)]
pub enum BreakFiber {
    Declared(CompactSet),
    /// `L(x) u R(x)`, resolved on demand.
    Auto,
    /// The point is not in the domain.
    Puncture,
}

/// Which member of a fiber a selection picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionPolicy {
    Inf,
    Sup,
    /// The member nearest the midpoint of the hull (the lower one on ties).
    Mid,
}

impl SelectionPolicy {
    pub const ALL: [SelectionPolicy; 3] = [SelectionPolicy::Inf, SelectionPolicy::Sup, SelectionPolicy::Mid];

    pub fn pick(self, fiber: &CompactSet) -> f64 {
        match self {
            SelectionPolicy::Inf => fiber.min(),
            SelectionPolicy::Sup => fiber.max(),
            SelectionPolicy::Mid => {
                let m = 0.5 * (fiber.min() + fiber.max());
                let mut best = fiber.min();
                let mut best_d = f64::INFINITY;
                for p in fiber.parts() {
                    let y = m.clamp(p.lo, p.hi);
                    let d = (y - m).abs();
                    if d < best_d {
                        best = y;
                        best_d = d;
                    }
                }
                best
            }
        }
    }
}

/// Where a point of the domain falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Breakpoint(usize),
    Piece(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMap {
    breakpoints: Vec<f64>,
    pieces: Vec<Expr>,
    fibers: Vec<BreakFiber>,
}

impl PiecewiseMap {
    /// `breakpoints` includes both domain ends; `pieces[i]` lives on
    /// `(breakpoints[i], breakpoints[i + 1])` and `fibers[i]` at
    /// `breakpoints[i]`.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Expr>, fibers: Vec<BreakFiber>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidMap("a map needs a domain [a, b] with a < b".into()));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMap("non-finite breakpoint".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap(format!(
                "breakpoints must increase strictly ({} then {})",
                fmt_real(w[0]),
                fmt_real(w[1])
            )));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidMap(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                pieces.len()
            )));
        }
        if fibers.len() != breakpoints.len() {
            return Err(Error::InvalidMap("one fiber entry per breakpoint is required".into()));
        }
        let last = breakpoints.len() - 1;
        for i in [0, last] {
            if fibers[i] == BreakFiber::Puncture {
                return Err(Error::InvalidMap(format!(
                    "domain endpoint {} cannot be punctured",
                    fmt_real(breakpoints[i])
                )));
            }
        }
        for (i, piece) in pieces.iter().enumerate() {
            let (u, v) = (breakpoints[i], breakpoints[i + 1]);
            if let Some(c) = piece.center() {
                if u < c && c < v {
                    return Err(Error::InvalidMap(format!(
                        "sinrecip center {} lies inside its piece ({}, {})",
                        fmt_real(c),
                        fmt_real(u),
                        fmt_real(v)
                    )));
                }
            }
        }
        Ok(PiecewiseMap {
            breakpoints,
            pieces,
            fibers,
        })
    }

    /// A single-valued continuous map given by one expression.
    pub fn single(a: f64, b: f64, piece: Expr) -> Result<Self> {
        Self::new(vec![a, b], vec![piece], vec![BreakFiber::Auto, BreakFiber::Auto])
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Expr] {
        &self.pieces
    }

    pub fn fibers(&self) -> &[BreakFiber] {
        &self.fibers
    }

    pub fn punctures(&self) -> Vec<f64> {
        self.breakpoints
            .iter()
            .zip(&self.fibers)
            .filter(|(_, f)| **f == BreakFiber::Puncture)
            .map(|(x, _)| *x)
            .collect()
    }

    pub fn is_punctured(&self, i: usize) -> bool {
        self.fibers[i] == BreakFiber::Puncture
    }

    pub fn locate(&self, x: f64) -> Result<Location> {
        let (a, b) = self.domain();
        if !(a <= x && x <= b) {
            return Err(Error::InvalidArgument(format!(
                "{} lies outside the domain [{}, {}]",
                fmt_real(x),
                fmt_real(a),
                fmt_real(b)
            )));
        }
        let idx = self.breakpoints.partition_point(|&bp| bp < x);
        if self.breakpoints.get(idx) == Some(&x) {
            Ok(Location::Breakpoint(idx))
        } else {
            Ok(Location::Piece(idx - 1))
        }
    }

    /// One-sided cluster sets `(L, R)` at breakpoint `i`; absent at the
    /// corresponding domain end.
    pub fn one_sided(&self, i: usize) -> (Option<CompactSet>, Option<CompactSet>) {
        let x = self.breakpoints[i];
        let left = (i > 0).then(|| self.pieces[i - 1].cluster(x, Side::Left));
        let right = (i < self.pieces.len()).then(|| self.pieces[i].cluster(x, Side::Right));
        (left, right)
    }

    /// `L u R` at breakpoint `i`.
    pub fn cluster_union(&self, i: usize) -> CompactSet {
        match self.one_sided(i) {
            (Some(l), Some(r)) => l.union(&r),
            (Some(s), None) | (None, Some(s)) => s,
            (None, None) => unreachable!("every breakpoint touches a piece"),
        }
    }

    /// The fiber at breakpoint `i`, with `Auto` resolved; `None` at a puncture.
    pub fn breakpoint_fiber(&self, i: usize) -> Option<CompactSet> {
        match &self.fibers[i] {
            BreakFiber::Declared(s) => Some(s.clone()),
            BreakFiber::Auto => Some(self.cluster_union(i)),
            BreakFiber::Puncture => None,
        }
    }

    /// `F(x)`.
    pub fn fiber(&self, x: f64) -> Result<CompactSet> {
        match self.locate(x)? {
            Location::Breakpoint(i) => self.breakpoint_fiber(i).ok_or_else(|| {
                Error::InvalidArgument(format!("{} is a puncture of the domain", fmt_real(x)))
            }),
            Location::Piece(i) => Ok(CompactSet::point(self.pieces[i].value(x))),
        }
    }

    /// Whether every fiber is a single point.
    pub fn is_single_valued(&self) -> bool {
        (0..self.breakpoints.len())
            .filter_map(|i| self.breakpoint_fiber(i))
            .all(|f| f.is_singleton())
    }

    fn with_fibers(&self, f: impl Fn(usize, CompactSet) -> CompactSet) -> PiecewiseMap {
        let fibers = (0..self.breakpoints.len())
            .map(|i| match self.breakpoint_fiber(i) {
                Some(fib) => BreakFiber::Declared(f(i, fib)),
                None => BreakFiber::Puncture,
            })
            .collect();
        PiecewiseMap {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.clone(),
            fibers,
        }
    }

    /// The single-valued selection picking `policy` from every fiber.
    pub fn selection(&self, policy: SelectionPolicy) -> PiecewiseMap {
        self.with_fibers(|_, fib| CompactSet::point(policy.pick(&fib)))
    }

    /// The map whose graph is the closure of this map's graph.
    pub fn graph_closure(&self) -> PiecewiseMap {
        self.with_fibers(|i, fib| fib.union(&self.cluster_union(i)))
    }

    /// Fiberwise closed convex hull, without any precondition.
    pub(crate) fn convexify(&self) -> PiecewiseMap {
        self.with_fibers(|_, fib| fib.hull())
    }

    /// Equality up to `tol`: fibers within Hausdorff distance `tol` at every
    /// breakpoint of either map, and pieces within `tol` in sup norm.
    pub fn map_equal(&self, other: &PiecewiseMap, tol: f64) -> Result<bool> {
        self.check_compatible(other)?;
        for x in merge_breakpoints(self, other) {
            let (fa, fb) = match (self.fiber(x), other.fiber(x)) {
                (Ok(fa), Ok(fb)) => (fa, fb),
                _ => continue, // shared puncture
            };
            if fa.hausdorff(&fb) > tol {
                return Ok(false);
            }
        }
        let resolution = tol.max(1e-9);
        for (s, t, p, q) in common_pieces(self, other) {
            let b = sup_abs_diff(p, q, s, t, resolution, 0.0, Some(tol))?;
            if b.lo > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub(crate) fn check_compatible(&self, other: &PiecewiseMap) -> Result<()> {
        if self.domain() != other.domain() {
            return Err(Error::InvalidArgument(format!(
                "domains differ: [{}, {}] vs [{}, {}]",
                fmt_real(self.domain().0),
                fmt_real(self.domain().1),
                fmt_real(other.domain().0),
                fmt_real(other.domain().1)
            )));
        }
        if self.punctures() != other.punctures() {
            return Err(Error::InvalidArgument("maps have different punctures".into()));
        }
        Ok(())
    }
}

/// Sorted union of both breakpoint sets.
pub(crate) fn merge_breakpoints(f: &PiecewiseMap, g: &PiecewiseMap) -> Vec<f64> {
    let mut xs: Vec<f64> = f.breakpoints.iter().chain(&g.breakpoints).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// The common refinement of both partitions, with the piece of each map
/// living on every cell.
pub(crate) fn common_pieces<'a>(
    f: &'a PiecewiseMap,
    g: &'a PiecewiseMap,
) -> Vec<(f64, f64, &'a Expr, &'a Expr)> {
    let xs = merge_breakpoints(f, g);
    xs.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let pi = f.breakpoints.partition_point(|&b| b < mid) - 1;
            let qi = g.breakpoints.partition_point(|&b| b < mid) - 1;
            (w[0], w[1], &f.pieces[pi], &g.pieces[qi])
        })
        .collect()
}
