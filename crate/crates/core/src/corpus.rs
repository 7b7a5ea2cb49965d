//! Built-in example maps, parametric families, and seeded generators.

use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compact::CompactSet;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::map::{BreakFiber, PiecewiseMap};
use crate::parse::parse_const;

pub const NAMES: [&str; 6] = ["F21", "G21", "sinrec", "Pn", "gn", "fn-trunc"];

/// `fn-trunc` removes `{1/j : 2 <= j <= m}`; this is the `m` used when none is given.
pub const DEFAULT_TRUNCATION: u32 = 10;

fn names_list() -> String {
    NAMES.join(", ")
}

fn jump_pair(m: Option<u32>, fiber0: CompactSet) -> Result<PiecewiseMap> {
    let mut bps = vec![-1.0, 0.0];
    let mut fibers = vec![BreakFiber::Auto, BreakFiber::Declared(fiber0)];
    if let Some(m) = m {
        for x in truncation_points(m)? {
            bps.push(x);
            fibers.push(BreakFiber::Puncture);
        }
    }
    bps.push(1.0);
    fibers.push(BreakFiber::Auto);
    let pieces = bps
        .windows(2)
        .map(|w| Expr::constant(if w[1] <= 0.0 { 1.0 } else { -1.0 }))
        .collect();
    PiecewiseMap::new(bps, pieces, fibers)
}

/// `1/m < 1/(m-1) < ... < 1/2`.
fn truncation_points(m: u32) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("truncation needs m >= 2, got {m}")));
    }
    Ok((2..=m).rev().map(|j| 1.0 / j as f64).collect())
}

/// `1` left of 0, `-1` right of 0, fiber `{-1, 1}` at 0.
pub fn f21() -> PiecewiseMap {
    jump_pair(None, CompactSet::points([-1.0, 1.0]).expect("nonempty")).expect("valid map")
}

/// As [`f21`] with fiber `[-1, 1]` at 0.
pub fn g21() -> PiecewiseMap {
    jump_pair(None, CompactSet::interval(-1.0, 1.0).expect("ordered")).expect("valid map")
}

/// [`f21`] on `[-1, 1]` minus `{1/j : 2 <= j <= m}`.
pub fn f21_punctured(m: u32) -> Result<PiecewiseMap> {
    jump_pair(Some(m), CompactSet::points([-1.0, 1.0])?)
}

/// [`g21`] on `[-1, 1]` minus `{1/j : 2 <= j <= m}`.
pub fn g21_punctured(m: u32) -> Result<PiecewiseMap> {
    jump_pair(Some(m), CompactSet::interval(-1.0, 1.0)?)
}

/// `sin(1/x)` on `[-1, 1]` with value 0 at 0. Not closed; its closure has fiber `[-1, 1]`.
pub fn sinrec() -> PiecewiseMap {
    let s = Expr::sin_recip(1.0, 1.0, 0.0, 0.0).expect("k != 0");
    PiecewiseMap::new(
        vec![-1.0, 0.0, 1.0],
        vec![s.clone(), s],
        vec![BreakFiber::Auto, BreakFiber::Declared(CompactSet::point(0.0)), BreakFiber::Auto],
    )
    .expect("valid map")
}

fn need_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("family index n must be at least 1".into()));
    }
    Ok(())
}

/// `1` on `[-1, 0)`, `[-1, 1]` at 0, `sin(1/x)` on `(0, 2/((4n-1) pi)]`, `-1` beyond.
pub fn p_n(n: u32) -> Result<PiecewiseMap> {
    need_n(n)?;
    let b = 2.0 / ((4.0 * n as f64 - 1.0) * std::f64::consts::PI);
    PiecewiseMap::new(
        vec![-1.0, 0.0, b, 1.0],
        vec![
            Expr::constant(1.0),
            Expr::sin_recip(1.0, 1.0, 0.0, 0.0)?,
            Expr::constant(-1.0),
        ],
        vec![
            BreakFiber::Auto,
            BreakFiber::Declared(CompactSet::interval(-1.0, 1.0)?),
            BreakFiber::Auto,
            BreakFiber::Auto,
        ],
    )
}

/// `1` on `[-1, 0]`, `1 - 2nx` on `[0, 1/n]`, `-1` beyond.
pub fn g_n(n: u32) -> Result<PiecewiseMap> {
    need_n(n)?;
    let ramp = Expr::poly(vec![1.0, -2.0 * n as f64])?;
    let (bps, pieces) = if n == 1 {
        (vec![-1.0, 0.0, 1.0], vec![Expr::constant(1.0), ramp])
    } else {
        (
            vec![-1.0, 0.0, 1.0 / n as f64, 1.0],
            vec![Expr::constant(1.0), ramp, Expr::constant(-1.0)],
        )
    };
    let fibers = vec![BreakFiber::Auto; bps.len()];
    PiecewiseMap::new(bps, pieces, fibers)
}

/// `1` left of `1/n`, `-1` right of it, on `[-1, 1]` minus `{1/j : 2 <= j <= m}`.
///
/// This is a finite truncation of an infinitely punctured domain; it does
/// not inherit the convergence behaviour of the untruncated sequence.
pub fn fn_trunc(m: u32, n: u32) -> Result<PiecewiseMap> {
    if !(2..=m).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "fn-trunc with m={m} needs 2 <= n <= {m}, got n={n}"
        )));
    }
    let jump = 1.0 / n as f64;
    let mut bps = vec![-1.0, 0.0];
    let mut fibers = vec![BreakFiber::Auto, BreakFiber::Auto];
    for x in truncation_points(m)? {
        bps.push(x);
        fibers.push(BreakFiber::Puncture);
    }
    bps.push(1.0);
    fibers.push(BreakFiber::Auto);
    let pieces = bps
        .windows(2)
        .map(|w| Expr::constant(if w[1] <= jump { 1.0 } else { -1.0 }))
        .collect();
    PiecewiseMap::new(bps, pieces, fibers)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Pn,
    Gn,
    FnTrunc { m: u32 },
}

impl Family {
    pub fn member(&self, n: u32) -> Result<PiecewiseMap> {
        match *self {
            Family::Pn => p_n(n),
            Family::Gn => g_n(n),
            Family::FnTrunc { m } => fn_trunc(m, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExampleValue {
    Map(PiecewiseMap),
    Family(Family),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedExample {
    pub name: String,
    pub value: ExampleValue,
}

impl fmt::Display for NamedExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            ExampleValue::Map(_) => write!(f, "{} (map)", self.name),
            ExampleValue::Family(_) => write!(f, "{} (family)", self.name),
        }
    }
}

/// Looks up a built-in by name. `fn-trunc(m)` selects the truncation level.
pub fn example(name: &str) -> Result<NamedExample> {
    let name = name.trim();
    let value = match name {
        "F21" => ExampleValue::Map(f21()),
        "G21" => ExampleValue::Map(g21()),
        "sinrec" => ExampleValue::Map(sinrec()),
        "Pn" => ExampleValue::Family(Family::Pn),
        "gn" => ExampleValue::Family(Family::Gn),
        "fn-trunc" => ExampleValue::Family(Family::FnTrunc { m: DEFAULT_TRUNCATION }),
        _ => match name.strip_prefix("fn-trunc(").and_then(|r| r.strip_suffix(')')) {
            Some(m) => {
                let m = parse_index(m, "m")?;
                truncation_points(m)?;
                ExampleValue::Family(Family::FnTrunc { m })
            }
            None => return Err(unknown(name)),
        },
    };
    Ok(NamedExample {
        name: name.to_string(),
        value,
    })
}

fn unknown(name: &str) -> Error {
    Error::UnknownExample {
        name: name.to_string(),
        available: names_list(),
    }
}

fn parse_index(text: &str, key: &str) -> Result<u32> {
    let v = parse_const(text)?;
    if v.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&v) {
        return Err(Error::InvalidArgument(format!("{key} must be a nonnegative integer, got {text}")));
    }
    Ok(v as u32)
}

/// A parsed `NAME[,n=K][,m=K]` reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusRef<'a> {
    pub name: &'a str,
    pub n: Option<u32>,
    pub m: Option<u32>,
}

impl<'a> CorpusRef<'a> {
    pub fn parse(spec: &'a str) -> Result<Self> {
        let mut parts = spec.split(',');
        let name = parts.next().unwrap_or("").trim();
        let (mut n, mut m) = (None, None);
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got '{part}'")))?;
            let slot = match key.trim() {
                "n" => &mut n,
                "m" => &mut m,
                other => {
                    return Err(Error::InvalidArgument(format!("unknown corpus parameter '{other}'")))
                }
            };
            if slot.replace(parse_index(value.trim(), key.trim())?).is_some() {
                return Err(Error::InvalidArgument(format!("parameter '{}' given twice", key.trim())));
            }
        }
        Ok(CorpusRef { name, n, m })
    }

    /// The family named, with `m` applied; maps are rejected.
    pub fn family(&self) -> Result<Family> {
        if self.n.is_some() {
            return Err(Error::InvalidArgument("a family reference takes no n".into()));
        }
        match (self.name, self.m) {
            ("Pn", None) => Ok(Family::Pn),
            ("gn", None) => Ok(Family::Gn),
            ("fn-trunc", m) => Ok(Family::FnTrunc {
                m: m.unwrap_or(DEFAULT_TRUNCATION),
            }),
            ("Pn" | "gn", Some(_)) => Err(Error::InvalidArgument(format!("{} takes no m", self.name))),
            (name, _) if NAMES.contains(&name) => {
                Err(Error::InvalidArgument(format!("{name} is a single map, not a family")))
            }
            (name, _) => Err(unknown(name)),
        }
    }

    pub fn map(&self) -> Result<PiecewiseMap> {
        let no_n = |n: Option<u32>, name: &str| match n {
            None => Ok(()),
            Some(_) => Err(Error::InvalidArgument(format!("{name} takes no n"))),
        };
        match self.name {
            "F21" | "G21" => {
                no_n(self.n, self.name)?;
                match (self.name, self.m) {
                    ("F21", None) => Ok(f21()),
                    ("G21", None) => Ok(g21()),
                    ("F21", Some(m)) => f21_punctured(m),
                    (_, Some(m)) => g21_punctured(m),
                    _ => Ok(g21()),
                }
            }
            "sinrec" => {
                no_n(self.n, self.name)?;
                if self.m.is_some() {
                    return Err(Error::InvalidArgument("sinrec takes no m".into()));
                }
                Ok(sinrec())
            }
            "Pn" | "gn" | "fn-trunc" => {
                let n = self
                    .n
                    .ok_or_else(|| Error::InvalidArgument(format!("{} needs n=K", self.name)))?;
                CorpusRef { n: None, ..*self }.family()?.member(n)
            }
            other => Err(unknown(other)),
        }
    }
}

/// Resolves `NAME[,n=K][,m=K]` to a map.
pub fn lookup(spec: &str) -> Result<PiecewiseMap> {
    CorpusRef::parse(spec)?.map()
}

/// Relative frequencies of the piece kinds drawn by [`random_minimal_usco`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolWeights {
    /// Polynomials of degree at most 3.
    pub poly: f64,
    /// The constants `1` and `-1`.
    pub sign: f64,
    /// `b + a sin(1/(x - c))` with `c` an endpoint of its piece.
    pub sinrecip: f64,
}

impl Default for PoolWeights {
    fn default() -> Self {
        PoolWeights {
            poly: 2.0,
            sign: 1.0,
            sinrecip: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomMapParams {
    pub interior_breakpoints: usize,
    pub weights: PoolWeights,
}

impl Default for RandomMapParams {
    fn default() -> Self {
        RandomMapParams {
            interior_breakpoints: 3,
            weights: PoolWeights::default(),
        }
    }
}

/// Interior breakpoints are drawn from the grid `j/32`.
const GRID: i32 = 32;

/// Dyadic values in `[lo, hi]` with step 1/8, exact in binary.
fn eighths(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let k = rng.random_range((lo * 8.0) as i32..=(hi * 8.0) as i32);
    k as f64 / 8.0
}

/// A random map on `[-1, 1]` whose breakpoint fibers are all `auto`, hence a
/// minimal usco.
pub fn random_minimal_usco(seed: u64, params: RandomMapParams) -> Result<PiecewiseMap> {
    let w = params.weights;
    let total = w.poly + w.sign + w.sinrecip;
    if [w.poly, w.sign, w.sinrecip].iter().any(|x| !(*x >= 0.0) || !x.is_finite()) || !(total > 0.0) {
        return Err(Error::InvalidArgument("pool weights must be nonnegative with a positive sum".into()));
    }
    let slots = (2 * GRID - 1) as usize;
    if params.interior_breakpoints > slots {
        return Err(Error::InvalidArgument(format!(
            "at most {slots} interior breakpoints are supported"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut interior: Vec<i32> = index::sample(&mut rng, slots, params.interior_breakpoints)
        .into_iter()
        .map(|i| i as i32 - (GRID - 1))
        .collect();
    interior.sort_unstable();
    let mut bps = vec![-1.0];
    bps.extend(interior.iter().map(|&j| j as f64 / GRID as f64));
    bps.push(1.0);

    let mut pieces = Vec::with_capacity(bps.len() - 1);
    for win in bps.windows(2) {
        let r = rng.random::<f64>() * total;
        let piece = if r < w.poly {
            let degree = rng.random_range(0..=3);
            let coeffs: Vec<f64> = (0..=degree).map(|_| eighths(&mut rng, -2.0, 2.0)).collect();
            Expr::poly(coeffs)?
        } else if r < w.poly + w.sign {
            Expr::constant(if rng.random::<bool>() { 1.0 } else { -1.0 })
        } else {
            let amp = eighths(&mut rng, 0.25, 1.5);
            let offset = eighths(&mut rng, -1.0, 1.0);
            let center = if rng.random::<bool>() { win[0] } else { win[1] };
            Expr::sin_recip(amp, 1.0, center, offset)?
        };
        pieces.push(piece);
    }
    let fibers = vec![BreakFiber::Auto; bps.len()];
    PiecewiseMap::new(bps, pieces, fibers)
}

/// Between 1 and `max_parts` disjoint closed intervals inside `[-10, 10]`;
/// roughly a quarter of the parts are single points.
pub fn random_compact_set(seed: u64, max_parts: usize) -> Result<CompactSet> {
    if max_parts == 0 {
        return Err(Error::InvalidArgument("max_parts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = rng.random_range(1..=max_parts);
    let mut ends: Vec<f64> = (0..2 * parts).map(|_| rng.random_range(-10.0..=10.0)).collect();
    ends.sort_by(f64::total_cmp);
    let intervals = ends.chunks(2).map(|c| {
        let hi = if rng.random_range(0..4) == 0 { c[0] } else { c[1] };
        (c[0], hi)
    });
    CompactSet::new(intervals.collect::<Vec<_>>())
}
