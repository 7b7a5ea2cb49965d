//! Distances between piecewise maps.
//!
//! * `Pointwise(A)`: `max { H(F(x), G(x)) : x in A }` over a finite `A`, exact.
//! * `UniformOnCompact([u, v])` and `Uniform`: `sup H(F(x), G(x))` over an
//!   interval, enclosed to a requested tolerance.
//! * `GraphHausdorff`: planar Hausdorff distance between the closed graphs.
//!   On a compact domain with bounded maps this metrizes the Vietoris
//!   topology on graphs.
//!
//! Suprema are always reported as a [`Bracket`]. For the interval metrics
//! and the graph metric the reported bracket is `[lo, lo + tol]`, where
//! `lo` is a certified lower bound and the true value is certified to lie
//! below `lo + tol`.

use std::fmt;
use std::str::FromStr;

use rstar::RTree;

use crate::compact::CompactSet;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::map::{common_pieces, merge_breakpoints, PiecewiseMap};
use crate::parse::{fmt_real, parse_const, parse_const_span, Span};
use crate::sup::sup_abs_diff;

pub use crate::sup::Bracket;

/// Point clouds beyond this size are refused; the caller should loosen `tol`.
const MAX_CLOUD_POINTS: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum MapMetric {
    Pointwise(Vec<f64>),
    UniformOnCompact(f64, f64),
    Uniform,
    GraphHausdorff,
}

impl fmt::Display for MapMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapMetric::Pointwise(xs) => {
                let xs: Vec<String> = xs.iter().map(|x| fmt_real(*x)).collect();
                write!(f, "point:{}", xs.join(","))
            }
            MapMetric::UniformOnCompact(u, v) => write!(f, "uc:{},{}", fmt_real(*u), fmt_real(*v)),
            MapMetric::Uniform => f.write_str("uniform"),
            MapMetric::GraphHausdorff => f.write_str("graph"),
        }
    }
}

impl FromStr for MapMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let values = |rest: &str| -> Result<Vec<f64>> {
            let offset = s.len() - rest.len();
            Span::new(rest, offset)
                .split_top_level(',')
                .into_iter()
                .map(|p| parse_const_span(p).map_err(Error::from))
                .collect()
        };
        if let Some(rest) = s.strip_prefix("point:") {
            let xs = values(rest)?;
            Ok(MapMetric::Pointwise(xs))
        } else if let Some(rest) = s.strip_prefix("uc:") {
            match values(rest)?[..] {
                [u, v] if u <= v => Ok(MapMetric::UniformOnCompact(u, v)),
                _ => Err(Error::InvalidArgument(format!(
                    "uc metric needs two ordered endpoints, got '{rest}'"
                ))),
            }
        } else if s == "uniform" {
            Ok(MapMetric::Uniform)
        } else if s == "graph" {
            Ok(MapMetric::GraphHausdorff)
        } else {
            Err(Error::InvalidArgument(format!(
                "unknown metric '{s}' (expected point:x1,x2,..., uc:u,v, uniform or graph)"
            )))
        }
    }
}

/// `H(F(x), G(x))`.
pub fn fiber_distance(f: &PiecewiseMap, g: &PiecewiseMap, x: f64) -> Result<f64> {
    Ok(f.fiber(x)?.hausdorff(&g.fiber(x)?))
}

pub fn distance(f: &PiecewiseMap, g: &PiecewiseMap, metric: &MapMetric, tol: f64) -> Result<Bracket> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    match metric {
        MapMetric::Pointwise(xs) => {
            if xs.is_empty() {
                return Err(Error::InvalidArgument("pointwise metric needs at least one point".into()));
            }
            let mut best: f64 = 0.0;
            for &x in xs {
                best = best.max(fiber_distance(f, g, x)?);
            }
            Ok(Bracket::exact(best))
        }
        MapMetric::UniformOnCompact(u, v) => {
            f.check_compatible(g)?;
            let (a, b) = f.domain();
            if !(a <= *u && u <= v && *v <= b) {
                return Err(Error::InvalidArgument(format!(
                    "compact set [{}, {}] is not inside the domain [{}, {}]",
                    fmt_real(*u),
                    fmt_real(*v),
                    fmt_real(a),
                    fmt_real(b)
                )));
            }
            uniform_on(f, g, *u, *v, tol)
        }
        MapMetric::Uniform => {
            f.check_compatible(g)?;
            let (a, b) = f.domain();
            uniform_on(f, g, a, b, tol)
        }
        MapMetric::GraphHausdorff => graph_hausdorff(f, g, tol),
    }
}

fn uniform_on(f: &PiecewiseMap, g: &PiecewiseMap, u: f64, v: f64, tol: f64) -> Result<Bracket> {
    let mut lo: f64 = 0.0;
    let mut candidates: Vec<f64> = merge_breakpoints(f, g)
        .into_iter()
        .filter(|x| u <= *x && *x <= v)
        .collect();
    candidates.extend([u, v]);
    for x in candidates {
        // punctured in either map: not part of the common domain
        if let (Ok(fx), Ok(gx)) = (f.fiber(x), g.fiber(x)) {
            lo = lo.max(fx.hausdorff(&gx));
        }
    }
    for (s, t, p, q) in common_pieces(f, g) {
        let (s, t) = (s.max(u), t.min(v));
        if s >= t {
            continue;
        }
        let b = sup_abs_diff(p, q, s, t, tol, lo, None)?;
        lo = lo.max(b.lo);
    }
    Ok(Bracket { lo, hi: lo + tol })
}

fn graph_hausdorff(f: &PiecewiseMap, g: &PiecewiseMap, tol: f64) -> Result<Bracket> {
    let delta = 0.25 * tol;
    let a = graph_cloud(f, delta)?;
    let b = graph_cloud(g, delta)?;
    let d = cloud_hausdorff(&a, &b);
    // each cloud is within delta of its graph
    let lo = (d - 2.0 * delta).max(0.0);
    Ok(Bracket { lo, hi: lo + tol })
}

/// A finite point set within Hausdorff distance `delta` of the closed graph.
pub fn graph_cloud(map: &PiecewiseMap, delta: f64) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::new();
    let bps = map.breakpoints();
    for (i, piece) in map.pieces().iter().enumerate() {
        sample_piece(piece, bps[i], bps[i + 1], delta, &mut out)?;
    }
    for (i, &x) in bps.iter().enumerate() {
        if let Some(fib) = map.breakpoint_fiber(i) {
            vertical(x, &fib, delta, &mut out);
        }
    }
    Ok(out)
}

fn vertical(x: f64, set: &CompactSet, delta: f64, out: &mut Vec<[f64; 2]>) {
    for p in set.parts() {
        let n = ((p.hi - p.lo) / delta).ceil().max(1.0) as usize;
        out.extend((0..=n).map(|i| [x, p.lo + (p.hi - p.lo) * i as f64 / n as f64]));
    }
}

fn sample_piece(p: &Expr, s: f64, t: f64, delta: f64, out: &mut Vec<[f64; 2]>) -> Result<()> {
    let (mut s, mut t) = (s, t);
    if let Expr::SinRecip { k, center, .. } = *p {
        if center == s || center == t {
            // Within `w` of the center one full oscillation spans less than
            // `delta` horizontally, so a delta-grid over the band rectangle is
            // delta-close to the curve there, and vice versa.
            let w = (delta * k.abs() / (2.0 * std::f64::consts::PI)).sqrt().min(t - s);
            let band = p.cluster(center, crate::expr::Side::Right);
            let dir = if center == s { 1.0 } else { -1.0 };
            let cols = (w / delta).ceil().max(1.0) as usize;
            for j in 0..=cols {
                let x = center + dir * w * j as f64 / cols as f64;
                vertical(x, &band, delta, out);
            }
            if center == s {
                s += w;
            } else {
                t -= w;
            }
            if s >= t {
                return Ok(());
            }
        }
    }
    let mut stack = vec![(s, t)];
    while let Some((u, v)) = stack.pop() {
        let (lo, hi) = p.range(u, v);
        if (v - u).hypot(hi - lo) <= delta || v - u <= f64::EPSILON * (1.0 + u.abs()) {
            out.push([u, p.value(u)]);
        } else {
            let m = 0.5 * (u + v);
            stack.push((m, v));
            stack.push((u, m));
        }
        if out.len() > MAX_CLOUD_POINTS {
            return Err(Error::Unresolved(format!(
                "graph cloud exceeds {MAX_CLOUD_POINTS} points; use a larger tolerance"
            )));
        }
    }
    out.push([t, p.value(t)]);
    Ok(())
}

fn directed(from: &[[f64; 2]], to: &RTree<[f64; 2]>) -> f64 {
    from.iter()
        .map(|q| {
            let n = to.nearest_neighbor(*q).expect("nonempty cloud");
            (n[0] - q[0]).hypot(n[1] - q[1])
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two finite planar point sets.
pub fn cloud_hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let ta = RTree::bulk_load(a.to_vec());
    let tb = RTree::bulk_load(b.to_vec());
    directed(a, &tb).max(directed(b, &ta))
}

/// The verdict threshold of a convergence check, possibly depending on `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Fixed(f64),
    /// `c / n`.
    OverN(f64),
}

impl Threshold {
    pub fn at(&self, n: u32) -> f64 {
        match *self {
            Threshold::Fixed(t) => t,
            Threshold::OverN(c) => c / n as f64,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Fixed(t) => f.write_str(&fmt_real(*t)),
            Threshold::OverN(c) => write!(f, "{}/n", fmt_real(*c)),
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.strip_suffix("/n") {
            Some(c) => Ok(Threshold::OverN(parse_const(c)?)),
            None => Ok(Threshold::Fixed(parse_const(s)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    ConvergesBelow(f64),
    Fails { witness: u32, lower_bound: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub metric: MapMetric,
    pub rows: Vec<(u32, Bracket)>,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    pub fn converges(&self) -> bool {
        matches!(self.verdict, Verdict::ConvergesBelow(_))
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "metric: {}", self.metric)?;
        writeln!(f, "{:>6}  distance", "n")?;
        for (n, b) in &self.rows {
            writeln!(f, "{n:>6}  {b}")?;
        }
        match self.verdict {
            Verdict::ConvergesBelow(t) => write!(f, "verdict: converges below {}", fmt_real(t)),
            Verdict::Fails {
                witness,
                lower_bound,
            } => write!(
                f,
                "verdict: fails (n={witness}, distance >= {})",
                fmt_real(lower_bound)
            ),
        }
    }
}

/// Distances from each `family(n)` to `limit`, with a verdict on the last row.
pub fn converge<F>(
    family: F,
    limit: &PiecewiseMap,
    metric: &MapMetric,
    ns: &[u32],
    tol: f64,
    threshold: Threshold,
) -> Result<ConvergenceReport>
where
    F: Fn(u32) -> Result<PiecewiseMap>,
{
    if ns.is_empty() {
        return Err(Error::InvalidArgument("need at least one index n".into()));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("indices must increase strictly".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let member = family(n)?;
        rows.push((n, distance(&member, limit, metric, tol)?));
    }
    let &(last_n, last) = rows.last().expect("nonempty");
    let bar = threshold.at(last_n);
    let verdict = if last.hi < bar {
        Verdict::ConvergesBelow(bar)
    } else {
        let &(witness, b) = rows
            .iter()
            .max_by(|x, y| x.1.lo.total_cmp(&y.1.lo))
            .expect("nonempty");
        Verdict::Fails {
            witness,
            lower_bound: b.lo,
        }
    };
    Ok(ConvergenceReport {
        metric: metric.clone(),
        rows,
        verdict,
    })
}
