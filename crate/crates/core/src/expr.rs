//! Continuous pieces of a piecewise map.
//!
//! The language is closed on purpose: polynomials and the shifted, scaled
//! oscillation `offset + amp * sin(k / (x - center))`. For both shapes the
//! one-sided cluster set at any point is known in closed form, which is
//! what makes graph closures and classifications exact.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::compact::CompactSet;
use crate::error::{Error, Result};
use crate::parse::{fmt_real, parse_const_span, ParseError, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// `c0 + c1 x + c2 x^2 + ...`, trailing zero coefficients trimmed.
    Poly(Vec<f64>),
    /// `offset + amp * sin(k / (x - center))`, with `k != 0`.
    SinRecip {
        amp: f64,
        k: f64,
        center: f64,
        offset: f64,
    },
}

impl Expr {
    pub fn poly(coeffs: impl Into<Vec<f64>>) -> Result<Self> {
        let mut coeffs = coeffs.into();
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
        }
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        Ok(Expr::Poly(coeffs))
    }

    pub fn constant(c: f64) -> Self {
        Expr::poly(vec![c]).expect("finite constant")
    }

    pub fn sin_recip(amp: f64, k: f64, center: f64, offset: f64) -> Result<Self> {
        if k == 0.0 {
            return Err(Error::InvalidArgument("sinrecip needs k != 0".into()));
        }
        if ![amp, k, center, offset].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sinrecip parameter".into()));
        }
        Ok(Expr::SinRecip {
            amp,
            k,
            center,
            offset,
        })
    }

    /// The oscillation center, if any.
    pub fn center(&self) -> Option<f64> {
        match *self {
            Expr::SinRecip { center, .. } => Some(center),
            Expr::Poly(_) => None,
        }
    }

    pub fn oscillates_at(&self, x: f64) -> bool {
        self.center() == Some(x)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.oscillates_at(x) {
            return Err(Error::InvalidArgument(format!(
                "sinrecip is undefined at its center {}",
                fmt_real(x)
            )));
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation; NaN at a sinrecip center.
    pub(crate) fn value(&self, x: f64) -> f64 {
        match self {
            Expr::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci),
            Expr::SinRecip {
                amp,
                k,
                center,
                offset,
            } => offset + amp * (k / (x - center)).sin(),
        }
    }

    /// The closed band `[offset - |amp|, offset + |amp|]` swept by a sinrecip.
    fn band(&self) -> Option<(f64, f64)> {
        match *self {
            Expr::SinRecip { amp, offset, .. } => Some((offset - amp.abs(), offset + amp.abs())),
            Expr::Poly(_) => None,
        }
    }

    /// The set of limit points of `self(x)` as `x -> x0` from `side`.
    pub fn cluster(&self, x0: f64, _side: Side) -> CompactSet {
        if self.oscillates_at(x0) {
            let (lo, hi) = self.band().expect("sinrecip has a band");
            CompactSet::interval(lo, hi).expect("band is ordered")
        } else {
            CompactSet::point(self.value(x0))
        }
    }

    /// An upper bound for `sup |e'|` on `[u, v]`; `None` when the
    /// derivative is unbounded there.
    pub fn deriv_bound(&self, u: f64, v: f64) -> Option<f64> {
        debug_assert!(u <= v);
        match *self {
            Expr::Poly(ref c) => {
                let mid = 0.5 * (u + v);
                let r = 0.5 * (v - u);
                let a = taylor_shift(c, mid);
                let mut bound = 0.0;
                let mut rp = 1.0;
                for (j, aj) in a.iter().enumerate().skip(1) {
                    bound += j as f64 * aj.abs() * rp;
                    rp *= r;
                }
                Some(bound)
            }
            Expr::SinRecip { amp, k, center, .. } => {
                if u <= center && center <= v {
                    None
                } else {
                    let dist = (center - u).abs().min((center - v).abs());
                    Some((amp * k).abs() / (dist * dist))
                }
            }
        }
    }

    /// An enclosure of the values taken on the closed interval `[u, v]`,
    /// the cluster band included when the center is an endpoint.
    pub fn range(&self, u: f64, v: f64) -> (f64, f64) {
        match *self {
            Expr::Poly(ref c) => {
                let mid = 0.5 * (u + v);
                let r = 0.5 * (v - u);
                let a = taylor_shift(c, mid);
                let mut spread = 0.0;
                let mut rp = r;
                for aj in a.iter().skip(1) {
                    spread += aj.abs() * rp;
                    rp *= r;
                }
                let (pu, pv) = (self.value(u), self.value(v));
                let lo = (a[0] - spread).min(pu).min(pv);
                let hi = (a[0] + spread).max(pu).max(pv);
                (lo, hi)
            }
            Expr::SinRecip { amp, offset, .. } => {
                let (smin, smax) = match self.phase_range(u, v) {
                    Some((t0, t1)) => sin_range(t0, t1),
                    None => (-1.0, 1.0),
                };
                let (a, b) = (offset + amp * smin, offset + amp * smax);
                (a.min(b), a.max(b))
            }
        }
    }

    /// Phase interval `k / (x - center)` over `[u, v]`; `None` when the
    /// center lies in `[u, v]`. Infinite ends are returned as infinities.
    fn phase_range(&self, u: f64, v: f64) -> Option<(f64, f64)> {
        let Expr::SinRecip { k, center, .. } = *self else {
            return None;
        };
        if u < center && center < v {
            return None;
        }
        let phase = |x: f64| {
            if x == center {
                // one-sided: the phase diverges with the sign of k/(x - c)
                let side = if x == u { 1.0 } else { -1.0 };
                f64::INFINITY * k.signum() * side
            } else {
                k / (x - center)
            }
        };
        let (a, b) = (phase(u), phase(v));
        if a.is_infinite() && b.is_infinite() {
            return None;
        }
        Some((a.min(b), a.max(b)))
    }

    /// Points of `[u, v]` (never a center) where the expression comes close
    /// to its largest and smallest value there. Used as lower-bound probes.
    pub(crate) fn probes(&self, u: f64, v: f64) -> Vec<f64> {
        let Expr::SinRecip { k, center, .. } = *self else {
            return Vec::new();
        };
        let Some((t0, t1)) = self.phase_range(u, v) else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(2);
        for base in [FRAC_PI_2, -FRAC_PI_2] {
            if let Some(theta) = peak_in(base, t0, t1) {
                let x = center + k / theta;
                if u <= x && x <= v && x != center {
                    out.push(x);
                }
            }
        }
        out
    }

    /// Parses `poly c0 c1 ...` or `sinrecip amp=.. k=.. c=.. off=..`.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        parse_expr_span(Span::new(text, 0))
    }
}

/// Coefficients of `p(m + t)` in powers of `t`.
fn taylor_shift(c: &[f64], m: f64) -> Vec<f64> {
    let n = c.len();
    let mut a = c.to_vec();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            a[j] += m * a[j + 1];
        }
    }
    a
}

/// A phase `base + 2 pi j` lying in `[t0, t1]`, chosen nearest the finite end.
fn peak_in(base: f64, t0: f64, t1: f64) -> Option<f64> {
    let theta = if t0.is_finite() {
        base + 2.0 * PI * ((t0 - base) / (2.0 * PI)).ceil()
    } else if t1.is_finite() {
        base + 2.0 * PI * ((t1 - base) / (2.0 * PI)).floor()
    } else {
        base
    };
    (t0 <= theta && theta <= t1).then_some(theta)
}

/// Enclosure of `sin` over `[t0, t1]`. Peaks within a small slack of the
/// interval are counted, which only ever widens the result.
fn sin_range(t0: f64, t1: f64) -> (f64, f64) {
    if !(t0.is_finite() && t1.is_finite()) || t1 - t0 >= 2.0 * PI {
        return (-1.0, 1.0);
    }
    let slack = 1e-9 * (1.0 + t0.abs().max(t1.abs()));
    let (s0, s1) = (t0.sin(), t1.sin());
    let mut lo = s0.min(s1);
    let mut hi = s0.max(s1);
    if peak_in(FRAC_PI_2, t0 - slack, t1 + slack).is_some() {
        hi = 1.0;
    }
    if peak_in(-FRAC_PI_2, t0 - slack, t1 + slack).is_some() {
        lo = -1.0;
    }
    (lo, hi)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Poly(c) => {
                f.write_str("poly")?;
                for ci in c {
                    write!(f, " {}", fmt_real(*ci))?;
                }
                Ok(())
            }
            Expr::SinRecip {
                amp,
                k,
                center,
                offset,
            } => write!(
                f,
                "sinrecip amp={} k={} c={} off={}",
                fmt_real(*amp),
                fmt_real(*k),
                fmt_real(*center),
                fmt_real(*offset)
            ),
        }
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

pub(crate) fn parse_expr_span(span: Span<'_>) -> std::result::Result<Expr, ParseError> {
    let tokens = span.tokens();
    let Some(head) = tokens.first() else {
        return Err(span.error(0, "expected 'poly' or 'sinrecip'"));
    };
    let rel = |s: &Span<'_>| s.offset - span.offset;
    match head.text {
        "poly" => {
            if tokens.len() < 2 {
                return Err(span.error(rel(head) + head.text.len(), "poly needs at least one coefficient"));
            }
            let coeffs = tokens[1..]
                .iter()
                .map(|t| parse_const_span(*t))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Expr::poly(coeffs).map_err(|e| span.error(rel(head), e.to_string()))
        }
        "sinrecip" => {
            let mut slots: [Option<f64>; 4] = [None; 4];
            const KEYS: [&str; 4] = ["amp", "k", "c", "off"];
            for t in &tokens[1..] {
                let Some(eq) = t.text.find('=') else {
                    return Err(span.error(rel(t), "expected key=value"));
                };
                let key = &t.text[..eq];
                let Some(slot) = KEYS.iter().position(|k| *k == key) else {
                    return Err(span.error(rel(t), format!("unknown sinrecip parameter '{key}'")));
                };
                if slots[slot].is_some() {
                    return Err(span.error(rel(t), format!("duplicate parameter '{key}'")));
                }
                let value = parse_const_span(t.slice(eq + 1, t.text.len()))?;
                if slot == 1 && value == 0.0 {
                    return Err(span.error(rel(t), "sinrecip needs k != 0"));
                }
                slots[slot] = Some(value);
            }
            let mut vals = [0.0; 4];
            for (i, s) in slots.iter().enumerate() {
                vals[i] = s.ok_or_else(|| {
                    span.error(span.text.len(), format!("missing sinrecip parameter '{}'", KEYS[i]))
                })?;
            }
            Expr::sin_recip(vals[0], vals[1], vals[2], vals[3])
                .map_err(|e| span.error(rel(head), e.to_string()))
        }
        other => Err(span.error(rel(head), format!("unknown expression kind '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sr(amp: f64, k: f64, c: f64, off: f64) -> Expr {
        Expr::sin_recip(amp, k, c, off).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Expr::constant(1.0).eval(0.5).unwrap(), 1.0);
        assert!((sr(1.0, 1.0, 0.0, 0.0).eval(2.0 / PI).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(Expr::poly(vec![1.0, -4.0]).unwrap().eval(0.25).unwrap(), 0.0);
        assert!(sr(1.0, 1.0, 0.0, 0.0).eval(0.0).is_err());
    }

    #[test]
    fn cluster_examples() {
        let s = sr(1.0, 1.0, 0.0, 0.0);
        assert_eq!(s.cluster(0.0, Side::Right), CompactSet::interval(-1.0, 1.0).unwrap());
        assert_eq!(Expr::constant(1.0).cluster(0.0, Side::Left), CompactSet::point(1.0));
        assert_eq!(
            sr(2.0, 1.0, 0.0, 5.0).cluster(0.0, Side::Right),
            CompactSet::interval(3.0, 7.0).unwrap()
        );
        assert_eq!(s.cluster(1.0, Side::Left), CompactSet::point(1f64.sin()));
        assert_eq!(
            sr(-2.0, 1.0, 0.0, 0.0).cluster(0.0, Side::Left),
            CompactSet::interval(-2.0, 2.0).unwrap()
        );
    }

    #[test]
    fn deriv_bound_examples() {
        assert_eq!(Expr::poly(vec![0.0, 1.0]).unwrap().deriv_bound(-3.0, 7.0), Some(1.0));
        assert_eq!(sr(1.0, 1.0, 0.0, 0.0).deriv_bound(1.0, 2.0), Some(1.0));
        assert_eq!(sr(1.0, 1.0, 0.0, 0.0).deriv_bound(-1.0, 1.0), None);
        assert_eq!(sr(1.0, 1.0, 0.0, 0.0).deriv_bound(0.0, 1.0), None);
        // x^2 on [1, 3]: |2x| <= 6
        assert_eq!(Expr::poly(vec![0.0, 0.0, 1.0]).unwrap().deriv_bound(1.0, 3.0), Some(6.0));
    }

    #[test]
    fn sinrecip_derivative_bound_holds_under_finite_differences() {
        let e = sr(1.0, 1.0, 0.0, 0.0);
        let bound = e.deriv_bound(1.0, 2.0).unwrap();
        let h = 1e-6;
        let mut x = 1.0;
        let mut worst: f64 = 0.0;
        while x + h <= 2.0 {
            worst = worst.max(((e.value(x + h) - e.value(x)) / h).abs());
            x += h;
        }
        assert!(worst <= bound, "{worst} > {bound}");
        assert!(worst > 0.5);
    }

    #[test]
    fn range_encloses_samples() {
        let cases = [
            (sr(1.0, 1.0, 0.0, 0.0), 0.1, 0.5),
            (sr(-0.5, 2.0, 1.0, 0.3), 1.2, 3.0),
            (sr(1.0, -1.0, 0.0, 0.0), -0.7, -0.01),
            (Expr::poly(vec![0.5, -1.0, 3.0, -2.0]).unwrap(), -1.0, 1.0),
        ];
        for (e, u, v) in cases {
            let (lo, hi) = e.range(u, v);
            for i in 0..=10_000 {
                let x = u + (v - u) * i as f64 / 10_000.0;
                let y = e.value(x);
                assert!(lo - 1e-12 <= y && y <= hi + 1e-12, "{e} at {x}: {y} not in [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn range_at_center_is_the_band() {
        assert_eq!(sr(2.0, 1.0, 0.0, 1.0).range(0.0, 0.5), (-1.0, 3.0));
        assert_eq!(sr(2.0, 1.0, 0.0, 1.0).range(-0.5, 0.0), (-1.0, 3.0));
    }

    #[test]
    fn probes_hit_extremes() {
        let e = sr(1.0, 1.0, 0.0, 0.0);
        let ps = e.probes(0.0, 0.5);
        assert_eq!(ps.len(), 2);
        let vals: Vec<f64> = ps.iter().map(|&x| e.value(x)).collect();
        assert!(vals.iter().any(|v| (v - 1.0).abs() < 1e-12));
        assert!(vals.iter().any(|v| (v + 1.0).abs() < 1e-12));
        let e = sr(1.0, -1.0, 0.0, 0.0);
        let ps = e.probes(-0.5, 0.0);
        assert_eq!(ps.len(), 2);
        assert!(ps.iter().all(|&x| (-0.5..0.0).contains(&x)));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(Expr::parse("poly 1").unwrap(), Expr::constant(1.0));
        assert_eq!(
            Expr::parse("sinrecip amp=1 k=1 c=0 off=0").unwrap(),
            sr(1.0, 1.0, 0.0, 0.0)
        );
        assert_eq!(Expr::parse("poly 1 -4").unwrap(), Expr::poly(vec![1.0, -4.0]).unwrap());
        assert_eq!(Expr::parse("poly 2/pi 0").unwrap(), Expr::constant(2.0 / PI));
    }

    #[test]
    fn parse_errors() {
        let err = Expr::parse("sinrecip amp=1 k=0 c=0 off=0").unwrap_err();
        assert!(err.message.contains("k != 0"));
        assert_eq!(err.column, 16);
        assert!(Expr::parse("poly").is_err());
        assert!(Expr::parse("cos 1").is_err());
        assert!(Expr::parse("sinrecip amp=1 k=1 c=0").is_err());
        assert!(Expr::parse("sinrecip amp=1 k=1 c=0 off=0 off=1").is_err());
        let err = Expr::parse("poly 1 x").unwrap_err();
        assert_eq!(err.column, 8);
    }
}
