//! The `svmap` command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 precondition violation,
//! 3 internal invariant violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::classify::{classify, phi, phi_inverse};
use crate::corpus::{self, CorpusRef, ExampleValue};
use crate::error::Error;
use crate::map::PiecewiseMap;
use crate::mapfile::{parse_map, write_map};
use crate::metrics::{converge, distance, MapMetric, Threshold};
use crate::parse::parse_const;
use crate::plot::render_svg;

const CORPUS_PREFIX: &str = "corpus:";

#[derive(Debug, Parser)]
#[command(name = "svmap", version, about = "Piecewise set-valued maps on the real line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the usco / cusco flags of a map, with witnesses for failures.
    Classify {
        /// Map file, or corpus:NAME[,n=K][,m=K].
        source: String,
    },
    /// Convexify a minimal usco fiberwise.
    Phi {
        source: String,
        /// Output map file; stdout when omitted.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Recover the minimal usco inside a minimal cusco.
    #[command(name = "phi-inv")]
    PhiInv {
        source: String,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Distance between two maps, printed as a bracket [lo, hi].
    Dist {
        a: String,
        b: String,
        /// point:x1,x2,... | uc:u,v | uniform | graph
        #[arg(long, allow_hyphen_values = true)]
        metric: String,
        #[arg(long, default_value_t = 1e-6, allow_hyphen_values = true)]
        tol: f64,
    },
    /// Distances from the members of a family to a limit map.
    Converge {
        /// corpus:Pn, corpus:gn or corpus:fn-trunc[,m=K].
        family: String,
        limit: String,
        #[arg(long, allow_hyphen_values = true)]
        metric: String,
        /// Indices: a..b (inclusive) or a comma-separated list.
        #[arg(long = "n", default_value = "1..50")]
        ns: String,
        #[arg(long, default_value_t = 1e-6, allow_hyphen_values = true)]
        tol: f64,
        /// Verdict threshold on the last row: a constant or C/n. Defaults to --tol.
        #[arg(long)]
        threshold: Option<String>,
    },
    /// List or export the built-in examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Render the graph of a map as SVG.
    Plot {
        source: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// lo,hi
        #[arg(long = "y-range", allow_hyphen_values = true)]
        y_range: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum CorpusAction {
    List,
    /// Write a built-in map in the map file format.
    Get {
        /// NAME[,n=K][,m=K]
        name: String,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit code and the message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: format!("error: {e}"),
        }
    }
}

/// The exit code reported for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precondition { .. } => 2,
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 1, message }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn load(source: &str) -> Result<PiecewiseMap, Failure> {
    if let Some(spec) = source.strip_prefix(CORPUS_PREFIX) {
        return Ok(corpus::lookup(spec)?);
    }
    let text = fs::read_to_string(source)
        .map_err(|e| input_error(format!("error: cannot read {source}: {e}")))?;
    parse_map(&text).map_err(|e| input_error(format!("error: {source}:{e}")))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| input_error(format!("error: cannot write {}: {e}", p.display()))),
        None => write!(out, "{text}").map_err(|e| input_error(format!("error: {e}"))),
    }
}

fn parse_ns(text: &str) -> Result<Vec<u32>, Failure> {
    let bad = || input_error(format!("error: invalid index list '{text}' (expected a..b or n1,n2,...)"));
    let ns: Vec<u32> = match text.split_once("..") {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            (a..=b).collect()
        }
        None => text
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?,
    };
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(ns)
}

fn parse_y_range(text: &str) -> Result<(f64, f64), Failure> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| input_error(format!("error: --y-range expects lo,hi, got '{text}'")))?;
    let value = |s: &str| parse_const(s).map_err(|e| input_error(format!("error: --y-range: {e}")));
    Ok((value(lo)?, value(hi)?))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| input_error(format!("error: {e}"));
    match command {
        Command::Classify { source } => {
            let map = load(&source)?;
            writeln!(out, "{}", classify(&map)).map_err(io)?;
        }
        Command::Phi { source, out: path } => {
            let image = phi(&load(&source)?)?;
            emit(&write_map(&image), path.as_deref(), out)?;
        }
        Command::PhiInv { source, out: path } => {
            let image = phi_inverse(&load(&source)?)?;
            emit(&write_map(&image), path.as_deref(), out)?;
        }
        Command::Dist { a, b, metric, tol } => {
            let metric: MapMetric = metric.parse()?;
            let (f, g) = (load(&a)?, load(&b)?);
            writeln!(out, "{}", distance(&f, &g, &metric, tol)?).map_err(io)?;
        }
        Command::Converge {
            family,
            limit,
            metric,
            ns,
            tol,
            threshold,
        } => {
            let metric: MapMetric = metric.parse()?;
            let ns = parse_ns(&ns)?;
            let threshold = match threshold {
                Some(t) => t.parse::<Threshold>()?,
                None => Threshold::Fixed(tol),
            };
            let spec = family.strip_prefix(CORPUS_PREFIX).ok_or_else(|| {
                input_error(format!("error: a family must be given as corpus:NAME, got '{family}'"))
            })?;
            let family = CorpusRef::parse(spec)?.family()?;
            let limit = load(&limit)?;
            let report = converge(|n| family.member(n), &limit, &metric, &ns, tol, threshold)?;
            writeln!(out, "{report}").map_err(io)?;
        }
        Command::Corpus { action } => match action {
            CorpusAction::List => {
                for name in corpus::NAMES {
                    let ex = corpus::example(name)?;
                    let params = match (name, &ex.value) {
                        ("F21" | "G21", _) => "  [m=K punctures 1/j, 2 <= j <= K]",
                        ("fn-trunc", _) => "  [n=K, m=K; default m=10]",
                        (_, ExampleValue::Family(_)) => "  [n=K]",
                        _ => "",
                    };
                    writeln!(out, "{ex}{params}").map_err(io)?;
                }
            }
            CorpusAction::Get { name, out: path } => {
                let map = corpus::lookup(name.strip_prefix(CORPUS_PREFIX).unwrap_or(&name))?;
                emit(&write_map(&map), path.as_deref(), out)?;
            }
        },
        Command::Plot {
            source,
            out: path,
            y_range,
        } => {
            let range = y_range.as_deref().map(parse_y_range).transpose()?;
            let svg = render_svg(&load(&source)?, range)?;
            emit(&svg, Some(&path), out)?;
        }
    }
    Ok(())
}
