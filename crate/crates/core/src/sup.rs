//! Rigorous enclosure of `sup |p(x) - q(x)|` over an interval.
//!
//! Branch and bound over subintervals. Lower bounds come from exact
//! evaluations at probe points (endpoints, midpoints and the extremal
//! phases of oscillating pieces); upper bounds are the smaller of a
//! Lipschitz estimate from [`Expr::deriv_bound`] and an interval-arithmetic
//! estimate from [`Expr::range`]. The range estimate is what keeps the
//! search finite next to a `sinrecip` center, where no Lipschitz bound
//! exists.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, Side};
use crate::parse::fmt_real;

/// A closed enclosure `[lo, hi]` of a real quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn exact(v: f64) -> Self {
        Bracket { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Enclosure of the maximum of two enclosed quantities.
    pub fn max(self, other: Bracket) -> Bracket {
        Bracket {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_real(self.lo), fmt_real(self.hi))
    }
}

const MAX_STEPS: usize = 2_000_000;

struct Cell {
    u: f64,
    v: f64,
    upper: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper.total_cmp(&other.upper) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

/// The difference `p - q` of two pieces living on a common interval.
struct Diff<'a> {
    p: &'a Expr,
    q: &'a Expr,
}

impl Diff<'_> {
    fn defined_at(&self, x: f64) -> bool {
        !self.p.oscillates_at(x) && !self.q.oscillates_at(x)
    }

    fn abs_at(&self, x: f64) -> f64 {
        (self.p.value(x) - self.q.value(x)).abs()
    }

    /// Best lower bound available from the probes in `[u, v]`.
    fn lower(&self, u: f64, v: f64) -> f64 {
        let mid = 0.5 * (u + v);
        let mut best: f64 = 0.0;
        let probes = [u, v, mid]
            .into_iter()
            .chain(self.p.probes(u, v))
            .chain(self.q.probes(u, v));
        for x in probes {
            if self.defined_at(x) {
                best = best.max(self.abs_at(x));
            }
        }
        // Next to a center the supremum is at least the limsup, read off the
        // cluster band. Rounding in the phase keeps probes from reaching it.
        for e in [u, v] {
            let (cp, cq) = (self.p.cluster(e, Side::Right), self.q.cluster(e, Side::Right));
            if cp.is_singleton() != cq.is_singleton() {
                best = best.max((cp.max() - cq.min()).abs()).max((cp.min() - cq.max()).abs());
            }
        }
        best
    }

    fn upper(&self, u: f64, v: f64) -> f64 {
        let (plo, phi) = self.p.range(u, v);
        let (qlo, qhi) = self.q.range(u, v);
        let by_range = (phi - qlo).max(qhi - plo).max(0.0);
        let mid = 0.5 * (u + v);
        match (self.p.deriv_bound(u, v), self.q.deriv_bound(u, v)) {
            (Some(lp), Some(lq)) if self.defined_at(mid) => {
                by_range.min(self.abs_at(mid) + (lp + lq) * 0.5 * (v - u))
            }
            _ => by_range,
        }
    }
}

/// Encloses `sup { |p(x) - q(x)| : s < x < t }`.
///
/// The search stops once every remaining cell is within `tol` of
/// `max(lower bound, floor)`, so a caller that already knows a larger value
/// elsewhere can pass it as `floor` to prune. When `stop_above` is given
/// the search also stops as soon as the lower bound exceeds it. Both
/// pieces must be defined on `(s, t)`.
pub(crate) fn sup_abs_diff(
    p: &Expr,
    q: &Expr,
    s: f64,
    t: f64,
    tol: f64,
    floor: f64,
    stop_above: Option<f64>,
) -> Result<Bracket> {
    if p == q {
        return Ok(Bracket::exact(0.0));
    }
    // Two oscillations sharing a center and a frequency differ by a single
    // oscillation, whose supremum next to the center is known exactly.
    if let (
        Expr::SinRecip {
            amp: a1,
            k: k1,
            center: c1,
            offset: b1,
        },
        Expr::SinRecip {
            amp: a2,
            k: k2,
            center: c2,
            offset: b2,
        },
    ) = (p, q)
    {
        if c1 == c2 && (*c1 == s || *c1 == t) {
            if k1 != k2 {
                return Err(Error::Unresolved(format!(
                    "oscillations with different frequencies share the center {}",
                    fmt_real(*c1)
                )));
            }
            return Ok(Bracket::exact((b1 - b2).abs() + (a1 - a2).abs()));
        }
    }

    let diff = Diff { p, q };
    let mut lo = diff.lower(s, t);
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        u: s,
        v: t,
        upper: diff.upper(s, t),
    });
    let min_width = 1e-15 * (1.0 + s.abs().max(t.abs()));
    // largest upper bound among cells discarded without splitting
    let mut dropped: f64 = 0.0;
    let mut steps = 0;
    while let Some(cell) = heap.pop() {
        if let Some(limit) = stop_above {
            if lo > limit {
                return Ok(Bracket {
                    lo,
                    hi: cell.upper.max(dropped).max(lo),
                });
            }
        }
        if cell.upper <= lo.max(floor) + tol {
            return Ok(Bracket {
                lo,
                hi: cell.upper.max(dropped).max(lo),
            });
        }
        steps += 1;
        if steps > MAX_STEPS || cell.v - cell.u < min_width {
            return Err(Error::Unresolved(format!(
                "sup |{p} - ({q})| on ({}, {}) stuck at [{}, {}]",
                fmt_real(s),
                fmt_real(t),
                fmt_real(lo),
                fmt_real(cell.upper)
            )));
        }
        let mid = 0.5 * (cell.u + cell.v);
        for (u, v) in [(cell.u, mid), (mid, cell.v)] {
            lo = lo.max(diff.lower(u, v));
            let upper = diff.upper(u, v);
            if upper > lo.max(floor) + tol {
                heap.push(Cell { u, v, upper });
            } else {
                dropped = dropped.max(upper);
            }
        }
    }
    Ok(Bracket {
        lo,
        hi: dropped.max(lo),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_sup(p: &Expr, q: &Expr, s: f64, t: f64, n: usize) -> f64 {
        (1..n)
            .map(|i| s + (t - s) * i as f64 / n as f64)
            .map(|x| (p.value(x) - q.value(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identical_pieces_are_exactly_zero() {
        let p = Expr::constant(1.0);
        assert_eq!(sup_abs_diff(&p, &p, 0.0, 1.0, 1e-6, 0.0, None).unwrap(), Bracket::exact(0.0));
    }

    #[test]
    fn affine_difference() {
        let p = Expr::poly(vec![1.0, -4.0]).unwrap();
        let q = Expr::constant(-1.0);
        let b = sup_abs_diff(&p, &q, 0.0, 0.5, 1e-9, 0.0, None).unwrap();
        assert!(b.contains(2.0) && b.width() <= 1e-9, "{b}");
    }

    #[test]
    fn oscillation_against_a_line() {
        let p = Expr::sin_recip(1.0, 1.0, 0.0, 0.0).unwrap();
        let q = Expr::poly(vec![0.0, 1.0]).unwrap();
        let b = sup_abs_diff(&p, &q, 0.0, 1.0, 1e-7, 0.0, None).unwrap();
        let oracle = grid_sup(&p, &q, 0.05, 1.0, 2_000_000);
        assert!(b.width() <= 1e-7);
        assert!(b.lo <= oracle + 1e-7 && oracle <= b.hi + 1e-9, "{b} vs {oracle}");
        // attained near x = 1/(3 pi / 2), away from the center
        assert!(b.lo > 1.2);
    }

    #[test]
    fn oscillation_against_constant_near_center() {
        let p = Expr::sin_recip(2.0, 1.0, 0.0, 0.5).unwrap();
        let q = Expr::constant(0.0);
        let b = sup_abs_diff(&p, &q, 0.0, 0.01, 1e-8, 0.0, None).unwrap();
        assert!(b.contains(2.5), "{b}");
    }

    #[test]
    fn shared_center_shared_frequency_is_exact() {
        let p = Expr::sin_recip(1.0, 1.0, 0.0, 0.0).unwrap();
        let q = Expr::sin_recip(0.5, 1.0, 0.0, 0.25).unwrap();
        let b = sup_abs_diff(&p, &q, 0.0, 1.0, 1e-6, 0.0, None).unwrap();
        assert_eq!(b, Bracket::exact(0.75));
        let q = Expr::sin_recip(0.5, 2.0, 0.0, 0.25).unwrap();
        assert!(matches!(
            sup_abs_diff(&p, &q, 0.0, 1.0, 1e-6, 0.0, None),
            Err(Error::Unresolved(_))
        ));
    }

    #[test]
    fn early_stop_above_threshold() {
        let p = Expr::constant(0.0);
        let q = Expr::poly(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let b = sup_abs_diff(&p, &q, 0.0, 1.0, 1e-12, 0.0, Some(1e-3)).unwrap();
        assert!(b.lo > 1e-3 && b.hi >= 1.0);
    }
}
