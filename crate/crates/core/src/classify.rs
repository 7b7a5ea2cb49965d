//! Membership of a piecewise map in the usco / cusco lattice, and the
//! convexification bijection between minimal uscos and minimal cuscos.
//!
//! Because a representable map is single-valued and continuous on its open
//! pieces, every property reduces to finitely many fiber conditions at the
//! breakpoints. With `L`, `R` the one-sided cluster sets and `F` the fiber:
//!
//! * usco: `L u R` is contained in `F` (closed graph; boundedness is structural).
//! * minimal usco: usco, and `F` is a singleton or `F` is contained in `L u R`.
//! * cusco: usco with convex `F`.
//! * minimal cusco: `F` convex and equal to the hull of `L u R` together with
//!   either extreme value of `F`, i.e. both extreme selections convexify back
//!   to `F`.

use std::fmt;

use crate::compact::{CompactSet, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::map::{Location, PiecewiseMap, SelectionPolicy};
use crate::parse::fmt_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `L u R` escapes the fiber.
    NotClosed,
    /// The fiber holds a value no neighbouring piece approaches.
    NotMinimal,
    NotConvex,
    /// An extreme selection does not convexify back to the fiber.
    HullMismatch,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::NotClosed => "graph not closed",
            Rule::NotMinimal => "not minimal",
            Rule::NotConvex => "fiber not convex",
            Rule::HullMismatch => "fiber differs from the hull of an extreme selection closure",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub at: f64,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at x={}: {}: {}", fmt_real(self.at), self.rule, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub is_usco: bool,
    pub is_minimal_usco: bool,
    pub is_cusco: bool,
    pub is_minimal_cusco: bool,
    /// First failing breakpoint for each rule that fails.
    pub witnesses: Vec<Witness>,
}

impl ClassificationReport {
    /// The one-line flag summary, e.g. `usco=yes minimal_usco=yes cusco=no minimal_cusco=no`.
    pub fn flags(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        format!(
            "usco={} minimal_usco={} cusco={} minimal_cusco={}",
            yn(self.is_usco),
            yn(self.is_minimal_usco),
            yn(self.is_cusco),
            yn(self.is_minimal_cusco)
        )
    }
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.flags())?;
        for w in &self.witnesses {
            write!(f, "\n  {w}")?;
        }
        Ok(())
    }
}

pub fn classify(map: &PiecewiseMap) -> ClassificationReport {
    let tol = DEFAULT_TOL;
    let mut witnesses: Vec<Witness> = Vec::new();
    let mut note = |at: f64, rule: Rule, detail: String| {
        if !witnesses.iter().any(|w| w.rule == rule) {
            witnesses.push(Witness { at, rule, detail });
        }
    };
    let (mut closed, mut minimal, mut convex, mut hull_match) = (true, true, true, true);

    for (i, &x) in map.breakpoints().iter().enumerate() {
        let Some(fib) = map.breakpoint_fiber(i) else {
            continue;
        };
        let lr = map.cluster_union(i);
        if lr.excess(&fib) > tol {
            closed = false;
            note(x, Rule::NotClosed, format!("cluster set {lr} is not inside fiber {fib}"));
        }
        if !(fib.is_singleton() || fib.excess(&lr) <= tol) {
            minimal = false;
            note(x, Rule::NotMinimal, format!("fiber {fib} exceeds cluster set {lr}"));
        }
        if !fib.is_convex() {
            convex = false;
            note(x, Rule::NotConvex, format!("fiber {fib}"));
        }
        // fiberwise phi(closure(selection(F, p))) for both extreme policies
        for policy in [SelectionPolicy::Sup, SelectionPolicy::Inf] {
            let closure = CompactSet::point(policy.pick(&fib)).union(&lr);
            let image = closure.hull();
            if image.hausdorff(&fib) > tol {
                hull_match = false;
                note(
                    x,
                    Rule::HullMismatch,
                    format!("{policy:?} selection closes to {closure}, whose hull {image} differs from fiber {fib}"),
                );
                break;
            }
        }
    }

    let is_usco = closed;
    ClassificationReport {
        is_usco,
        is_minimal_usco: is_usco && minimal,
        is_cusco: is_usco && convex,
        is_minimal_cusco: convex && hull_match,
        witnesses,
    }
}

/// `phi(F)(x) = co F(x)`, defined on minimal uscos.
pub fn phi(map: &PiecewiseMap) -> Result<PiecewiseMap> {
    let report = classify(map);
    if !report.is_minimal_usco {
        return Err(Error::Precondition {
            op: "phi",
            required: "minimal usco",
            report: Box::new(report),
        });
    }
    Ok(map.convexify())
}

/// The unique minimal usco inside a minimal cusco: the graph closure of
/// any extreme selection. Both extreme closures are computed and must agree.
pub fn phi_inverse(map: &PiecewiseMap) -> Result<PiecewiseMap> {
    let report = classify(map);
    if !report.is_minimal_cusco {
        return Err(Error::Precondition {
            op: "phi-inverse",
            required: "minimal cusco",
            report: Box::new(report),
        });
    }
    let upper = map.selection(SelectionPolicy::Sup).graph_closure();
    let lower = map.selection(SelectionPolicy::Inf).graph_closure();
    if !upper.map_equal(&lower, DEFAULT_TOL)? {
        return Err(Error::Invariant(
            "closures of the sup and inf selections of a minimal cusco differ".into(),
        ));
    }
    Ok(upper)
}

/// *-quasicontinuity of a single-valued map at `x`: the closure fiber
/// `L u R u {f(x)}` must coincide with its convex hull.
pub fn is_star_qc_at(map: &PiecewiseMap, x: f64) -> Result<bool> {
    if !map.is_single_valued() {
        return Err(Error::InvalidArgument(
            "*-quasicontinuity is checked on single-valued maps".into(),
        ));
    }
    match map.locate(x)? {
        Location::Piece(_) => Ok(true),
        Location::Breakpoint(i) => {
            let value = map.breakpoint_fiber(i).ok_or_else(|| {
                Error::InvalidArgument(format!("{} is a puncture of the domain", fmt_real(x)))
            })?;
            Ok(value.union(&map.cluster_union(i)).is_convex())
        }
    }
}
