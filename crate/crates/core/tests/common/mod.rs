//! Brute-force reference computations, independent of the library's
//! exact algorithms. Only `Expr::eval`, `PiecewiseMap::fiber` and the map
//! accessors are trusted.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use svmap::{CompactSet, Expr, PiecewiseMap};

/// Points of `set` on a grid of step at most `step`, every part discretized
/// from its left end and including its right end.
pub fn discretize(set: &CompactSet, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for p in set.parts() {
        let n = ((p.hi - p.lo) / step).ceil().max(1.0) as usize;
        out.extend((0..=n).map(|i| p.lo + (p.hi - p.lo) * i as f64 / n as f64));
    }
    out.sort_by(f64::total_cmp);
    out
}

fn nearest_in_sorted(sorted: &[f64], z: f64) -> f64 {
    let i = sorted.partition_point(|&y| y < z);
    let mut best = f64::INFINITY;
    if i < sorted.len() {
        best = best.min((sorted[i] - z).abs());
    }
    if i > 0 {
        best = best.min((sorted[i - 1] - z).abs());
    }
    best
}

/// Hausdorff distance between the step-`step` discretizations.
pub fn grid_hausdorff(a: &CompactSet, b: &CompactSet, step: f64) -> f64 {
    let (da, db) = (discretize(a, step), discretize(b, step));
    let ex = |x: &[f64], y: &[f64]| x.iter().map(|&z| nearest_in_sorted(y, z)).fold(0.0, f64::max);
    ex(&da, &db).max(ex(&db, &da))
}

/// Value of the piece containing `x`, for `x` strictly inside a piece.
pub fn piece_value(map: &PiecewiseMap, x: f64) -> Option<f64> {
    let bps = map.breakpoints();
    let i = bps.partition_point(|&b| b < x);
    if i == 0 || i == bps.len() || bps[i] == x {
        return None;
    }
    map.pieces()[i - 1].eval(x).ok()
}

/// Points where some oscillating piece of `map` reaches `offset +- amp`,
/// the `count` closest to each center, each with the gap to the next peak.
fn oscillation_peaks(map: &PiecewiseMap, count: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for p in map.pieces() {
        if let Expr::SinRecip { k, center, .. } = *p {
            for j in 0..count {
                let d = k.abs() / (FRAC_PI_2 + j as f64 * PI);
                let gap = d - k.abs() / (FRAC_PI_2 + (j + 1) as f64 * PI);
                out.push((center - d, gap));
                out.push((center + d, gap));
            }
        }
    }
    out
}

/// Value at `x` of the piece of `map` adjacent to `x` on the given side,
/// extended continuously to its endpoint.
fn one_sided_value(map: &PiecewiseMap, x: f64, left: bool) -> Option<f64> {
    let bps = map.breakpoints();
    let i = if left {
        bps.partition_point(|&b| b < x)
    } else {
        bps.partition_point(|&b| b <= x)
    };
    if i == 0 || i == bps.len() {
        return None;
    }
    map.pieces()[i - 1].eval(x).ok()
}

/// A lower estimate of `sup { H(F(x), G(x)) : u <= x <= v }` from the
/// breakpoint fibers, one-sided limits at breakpoints, a uniform grid of
/// `grid` cells and the oscillation peaks of both maps, with the best
/// samples refined by local zooming.
pub fn uniform_oracle(f: &PiecewiseMap, g: &PiecewiseMap, u: f64, v: f64, grid: usize) -> f64 {
    let mut best: f64 = 0.0;
    let mut special: Vec<f64> = f.breakpoints().iter().chain(g.breakpoints()).copied().collect();
    special.extend([u, v]);
    for &x in &special {
        if x < u || x > v {
            continue;
        }
        if let (Ok(a), Ok(b)) = (f.fiber(x), g.fiber(x)) {
            best = best.max(a.hausdorff(&b));
        }
        for (left, inside) in [(true, x > u), (false, x < v)] {
            if let (true, Some(a), Some(b)) = (inside, one_sided_value(f, x, left), one_sided_value(g, x, left)) {
                best = best.max((a - b).abs());
            }
        }
    }
    let h = (v - u) / grid as f64;
    let grid_samples = (1..grid).map(|i| (u + (v - u) * i as f64 / grid as f64, h));
    let peaks = oscillation_peaks(f, 100_000).into_iter().chain(oscillation_peaks(g, 100_000));
    let diff = |x: f64| match (piece_value(f, x), piece_value(g, x)) {
        (Some(a), Some(b)) if u < x && x < v => Some((a - b).abs()),
        _ => None,
    };
    let mut top: Vec<(f64, f64, f64)> = Vec::new();
    for (x, w) in grid_samples.chain(peaks) {
        if let Some(d) = diff(x) {
            best = best.max(d);
            top.push((d, x, w));
        }
    }
    // zoom in around the best samples
    top.sort_by(|a, b| b.0.total_cmp(&a.0));
    for &(_, x0, w0) in top.iter().take(40) {
        let (mut x, mut w) = (x0, w0);
        for _ in 0..6 {
            let mut bx = x;
            for j in 0..=400 {
                let y = x - w + 2.0 * w * j as f64 / 400.0;
                if let Some(d) = diff(y) {
                    if d > best {
                        best = d;
                        bx = y;
                    }
                }
            }
            x = bx;
            w /= 50.0;
        }
    }
    best
}

/// Sup of `|p'|` over `[-1, 1]` bounded by the sum of `i |c_i|`.
fn poly_lipschitz(p: &Expr) -> f64 {
    match p {
        Expr::Poly(c) => c.iter().enumerate().map(|(i, ci)| i as f64 * ci.abs()).sum(),
        Expr::SinRecip { .. } => panic!("graph oracle handles polynomial pieces only"),
    }
}

/// A uniform sample of the closed graph of a map whose pieces are
/// polynomials on a domain inside `[-1, 1]`, with its Hausdorff error bound.
pub fn graph_samples(map: &PiecewiseMap, h: f64) -> (Vec<[f64; 2]>, f64) {
    let bps = map.breakpoints();
    let mut pts = Vec::new();
    let mut err: f64 = h / 2.0;
    for (i, p) in map.pieces().iter().enumerate() {
        let (s, t) = (bps[i], bps[i + 1]);
        let n = ((t - s) / h).ceil().max(1.0) as usize;
        let step = (t - s) / n as f64;
        err = err.max(0.5 * step * (1.0 + poly_lipschitz(p).powi(2)).sqrt());
        pts.extend((0..=n).map(|j| {
            let x = s + step * j as f64;
            [x, p.eval(x).unwrap()]
        }));
    }
    for (i, &x) in bps.iter().enumerate() {
        if map.is_punctured(i) {
            continue;
        }
        for y in discretize(&map.fiber(x).unwrap(), h) {
            pts.push([x, y]);
        }
    }
    (pts, err)
}

pub fn point_to_cloud(p: [f64; 2], cloud: &[[f64; 2]]) -> f64 {
    cloud
        .iter()
        .map(|q| (p[0] - q[0]).hypot(p[1] - q[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force planar Hausdorff distance.
pub fn brute_hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let directed = |x: &[[f64; 2]], y: &[[f64; 2]]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p[0] - q[0]).hypot(p[1] - q[1]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
