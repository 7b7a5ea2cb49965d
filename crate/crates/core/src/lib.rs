//! Set-valued maps on a compact interval of the real line.
//!
//! Maps are piecewise: finitely many open pieces, each carrying a
//! polynomial or an oscillation `b + a sin(k / (x - c))`, glued at
//! breakpoints that carry explicit compact fibers. On this class the usco
//! and cusco properties, the convexification map `phi` and its inverse,
//! and the usual distances between maps are all computable.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod compact;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod map;
pub mod mapfile;
pub mod metrics;
pub mod plot;
mod parse;
mod sup;

pub use classify::{classify, is_star_qc_at, phi, phi_inverse, ClassificationReport, Rule, Witness};
pub use compact::{CompactSet, Interval, OpenUnion};
pub use error::{Error, Result};
pub use expr::{Expr, Side};
pub use map::{BreakFiber, Location, PiecewiseMap, SelectionPolicy};
pub use mapfile::{parse_map, write_map};
pub use metrics::{converge, distance, fiber_distance, Bracket, ConvergenceReport, MapMetric, Threshold, Verdict};
pub use parse::{fmt_real, parse_const, ParseError};
