//! Static SVG rendering of a map's graph.
//!
//! Pieces are drawn as polylines sampled to pixel resolution. Within a
//! pixel-scale neighbourhood of an oscillation center the curve is drawn as
//! its shaded cluster band. Breakpoint fibers are vertical segments (or
//! dots for isolated values) and punctures are open circles.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::compact::CompactSet;
use crate::error::{Error, Result};
use crate::expr::{Expr, Side};
use crate::map::PiecewiseMap;
use crate::parse::fmt_real;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 40.0;
const MAX_SAMPLES: usize = 200_000;

const CURVE: &str = "#1f4e9a";
const FIBER: &str = "#c0392b";

/// A polyline, or a shaded band `[x0, x1] x [lo, hi]` next to an oscillation center.
enum Stroke {
    Line(Vec<(f64, f64)>),
    Band { x0: f64, x1: f64, lo: f64, hi: f64 },
}

fn sample_piece(p: &Expr, s: f64, t: f64, dx: f64, dy: f64) -> Vec<Stroke> {
    let (mut s, mut t) = (s, t);
    let mut out = Vec::new();
    if let Expr::SinRecip { k, center, .. } = *p {
        if center == s || center == t {
            // one oscillation narrower than a pixel within w of the center
            let w = (dx * k.abs() / (2.0 * PI)).sqrt().min(t - s);
            let band = p.cluster(center, Side::Right);
            let (x0, x1) = if center == s { (s, s + w) } else { (t - w, t) };
            out.push(Stroke::Band {
                x0,
                x1,
                lo: band.min(),
                hi: band.max(),
            });
            if center == s {
                s += w;
            } else {
                t -= w;
            }
            if s >= t {
                return out;
            }
        }
    }
    let mut pts = Vec::new();
    let mut stack = vec![(s, t)];
    while let Some((u, v)) = stack.pop() {
        let (lo, hi) = p.range(u, v);
        let leaf = ((v - u) / dx).hypot((hi - lo) / dy) <= 1.0 || pts.len() >= MAX_SAMPLES;
        if leaf || v - u <= f64::EPSILON * (1.0 + u.abs()) {
            pts.push((u, p.value(u)));
        } else {
            let m = 0.5 * (u + v);
            stack.push((m, v));
            stack.push((u, m));
        }
    }
    pts.push((t, p.value(t)));
    out.push(Stroke::Line(pts));
    out
}

/// `[min - 0.5, max + 0.5]` over every fiber, cluster set and piece range.
pub fn default_y_range(map: &PiecewiseMap) -> (f64, f64) {
    let bps = map.breakpoints();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, p) in map.pieces().iter().enumerate() {
        let (s, t) = (bps[i], bps[i + 1]);
        // tight enough at plot scale: refine the enclosure on 256 cells
        let n = 256;
        for j in 0..n {
            let u = s + (t - s) * j as f64 / n as f64;
            let v = s + (t - s) * (j + 1) as f64 / n as f64;
            let (a, b) = p.range(u, v);
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    for i in 0..bps.len() {
        let set = map.breakpoint_fiber(i).unwrap_or_else(|| map.cluster_union(i));
        lo = lo.min(set.min());
        hi = hi.max(set.max());
    }
    (lo - 0.5, hi + 0.5)
}

struct Frame {
    a: f64,
    b: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.a) / (self.b - self.a) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.lo) / (self.hi - self.lo) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

pub fn render_svg(map: &PiecewiseMap, y_range: Option<(f64, f64)>) -> Result<String> {
    let (lo, hi) = match y_range {
        Some((lo, hi)) if lo < hi && lo.is_finite() && hi.is_finite() => (lo, hi),
        Some((lo, hi)) => {
            return Err(Error::InvalidArgument(format!(
                "y-range needs finite lo < hi, got {}, {}",
                fmt_real(lo),
                fmt_real(hi)
            )))
        }
        None => default_y_range(map),
    };
    let (a, b) = map.domain();
    let fr = Frame { a, b, lo, hi };
    let dx = (b - a) / (WIDTH - 2.0 * MARGIN);
    let dy = (hi - lo) / (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{m}" y="{m}" width="{w}" height="{h}" fill="none" stroke="#999" stroke-width="1"/>"##,
        m = MARGIN,
        w = WIDTH - 2.0 * MARGIN,
        h = HEIGHT - 2.0 * MARGIN
    );
    if lo < 0.0 && 0.0 < hi {
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#ccc" stroke-width="1"/>"##,
            px(fr.x(a)),
            px(fr.x(b)),
            y = px(fr.y(0.0))
        );
    }
    if a < 0.0 && 0.0 < b {
        let _ = writeln!(
            s,
            r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#ccc" stroke-width="1"/>"##,
            px(fr.y(lo)),
            px(fr.y(hi)),
            x = px(fr.x(0.0))
        );
    }
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{text}</text>"#,
            px(x),
            px(y)
        );
    };
    label(&mut s, MARGIN, HEIGHT - MARGIN + 16.0, "start", fmt_real(a));
    label(&mut s, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, "end", fmt_real(b));
    label(&mut s, MARGIN - 4.0, HEIGHT - MARGIN, "end", fmt_real(lo));
    label(&mut s, MARGIN - 4.0, MARGIN + 12.0, "end", fmt_real(hi));

    let bps = map.breakpoints();
    let _ = writeln!(s, r#"<g id="pieces">"#);
    for (i, p) in map.pieces().iter().enumerate() {
        for stroke in sample_piece(p, bps[i], bps[i + 1], dx, dy) {
            match stroke {
                Stroke::Line(pts) => {
                    let coords: Vec<String> = pts
                        .iter()
                        .map(|&(x, y)| format!("{},{}", px(fr.x(x)), px(fr.y(y))))
                        .collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{CURVE}" stroke-width="1.5" points="{}"/>"#,
                        coords.join(" ")
                    );
                }
                Stroke::Band { x0, x1, lo, hi } => {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{CURVE}" fill-opacity="0.35"/>"#,
                        px(fr.x(x0)),
                        px(fr.y(hi)),
                        px((fr.x(x1) - fr.x(x0)).max(1.0)),
                        px(fr.y(lo) - fr.y(hi))
                    );
                }
            }
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g id="fibers">"#);
    for (i, &x) in bps.iter().enumerate() {
        match map.breakpoint_fiber(i) {
            Some(fib) => draw_fiber(&mut s, &fr, x, &fib),
            None => {
                for part in map.cluster_union(i).parts() {
                    for y in [part.lo, part.hi] {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{}" cy="{}" r="4" fill="white" stroke="black" stroke-width="1.5"/>"#,
                            px(fr.x(x)),
                            px(fr.y(y))
                        );
                        if part.is_point() {
                            break;
                        }
                    }
                }
            }
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

fn draw_fiber(s: &mut String, fr: &Frame, x: f64, fib: &CompactSet) {
    for part in fib.parts() {
        if part.is_point() {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="3" fill="{FIBER}"/>"#,
                px(fr.x(x)),
                px(fr.y(part.lo))
            );
        } else {
            let _ = writeln!(
                s,
                r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="{FIBER}" stroke-width="2.5"/>"#,
                px(fr.y(part.lo)),
                px(fr.y(part.hi)),
                x = px(fr.x(x))
            );
        }
    }
}
