//! Command-line front end for `forge-core`.

pub mod json;
pub mod render;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use forge_core::genset::{GenOptions, Progress, Silent};
use forge_core::repdim::{
    cell_dim_cached, admissible_orders, reconstruct_poincare, univariate_series, QBinomialCache,
};
use forge_core::{ComponentKey, Error, FormSpec, Mode, Multidegree, RunMode, RunStrategy};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::json::{Document, SCHEMA_VERSION};
use crate::render::Trace;

#[derive(Debug, Parser)]
#[command(name = "forge", version, about = "Minimal generating sets of joint (semi-)invariants of binary forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint SL2 invariants.
    Invariants(RunArgs),
    /// Joint semi-invariants (highest-weight vectors).
    SemiInvariants(RunArgs),
    /// Kernel of the Weitzenböck derivation.
    Kernel(RunArgs),
    /// Invariants, one cell per total degree.
    InvariantsSimple(RunArgs),
    /// Dimensions of semi-invariant cells.
    Dims(DimsArgs),
    /// Poincaré series and its rational form.
    Series(SeriesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Latex,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Degrees of the binary forms.
    #[arg(required = true, value_name = "D")]
    pub degrees: Vec<u32>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    /// Highest generator degree examined (default: min(18, beta)).
    #[arg(long, value_name = "N")]
    pub max_degree: Option<u32>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "FORGE_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Warn about cells spanned by more monomials than this.
    #[arg(long, default_value_t = 200_000)]
    pub warn_threshold: usize,
}

#[derive(Debug, Args)]
pub struct DimsArgs {
    #[command(flatten)]
    pub common: Common,
    /// A single multidegree to query.
    #[arg(long, num_args = 1.., value_name = "M")]
    pub multidegree: Option<Vec<u32>>,
    #[arg(long, default_value_t = 0)]
    pub order: u32,
    /// List cells of every order, not only invariants.
    #[arg(long)]
    pub semi: bool,
    /// Largest total degree listed when no multidegree is given.
    #[arg(long, value_name = "N", default_value_t = 6)]
    pub max_degree: u32,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub common: Common,
    /// Semi-invariant series instead of the invariant one.
    #[arg(long)]
    pub semi: bool,
    /// Number of series coefficients printed.
    #[arg(long, value_name = "N", default_value_t = 20)]
    pub terms: u32,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Invariants(a)
            | Command::SemiInvariants(a)
            | Command::Kernel(a)
            | Command::InvariantsSimple(a) => &a.common,
            Command::Dims(a) => &a.common,
            Command::Series(a) => &a.common,
        }
    }
}

/// A failed run and the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Usage(_) => EXIT_USAGE,
            Error::Inconsistency(_) => EXIT_INCONSISTENT,
            Error::InsufficientPrecision { .. } => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn form_spec(degrees: &[u32]) -> Result<Arc<FormSpec>, Failure> {
    Ok(Arc::new(FormSpec::new(degrees.to_vec())?))
}

/// Runs one command. Streaming trace lines go to `stdout`; the final
/// artifact goes to `--out` or `stdout` and is written only on success.
pub fn run(cmd: &Command, stdout: &mut (dyn Write + Send)) -> Result<(), Failure> {
    let common = cmd.common();
    let artifact = match cmd {
        Command::Invariants(a) => generate(a, RunMode::Invariants, RunStrategy::Multidegree, stdout)?,
        Command::SemiInvariants(a) => generate(a, RunMode::SemiInvariants, RunStrategy::Multidegree, stdout)?,
        Command::Kernel(a) => generate(a, RunMode::Kernel, RunStrategy::Multidegree, stdout)?,
        Command::InvariantsSimple(a) => generate(a, RunMode::Invariants, RunStrategy::TotalDegree, stdout)?,
        Command::Dims(a) => dims(a)?,
        Command::Series(a) => series(a)?,
    };
    match &common.out {
        Some(path) => std::fs::write(path, artifact)?,
        None => stdout.write_all(artifact.as_bytes())?,
    }
    Ok(())
}

fn generate(
    a: &RunArgs,
    mode: RunMode,
    strategy: RunStrategy,
    stdout: &mut (dyn Write + Send),
) -> Result<String, Failure> {
    let spec = form_spec(&a.common.degrees)?;
    let opts = GenOptions {
        max_degree: a.max_degree,
        workers: a.workers,
        warn_threshold: a.warn_threshold,
        verify_kernel_dims: true,
    };
    let format = a.common.format;
    // The trace streams to stdout; with --out it is kept alongside the result.
    let mut buffered: Vec<u8> = Vec::new();
    let set = {
        let sink: &mut (dyn Write + Send) = if format == Format::Text && a.common.out.is_none() {
            stdout
        } else {
            &mut buffered
        };
        let trace = Trace::new(sink, mode, a.common.verbose);
        let progress: &dyn Progress = if format == Format::Text { &trace } else { &Silent };
        let set = forge_core::minimal_generating_set(spec, mode, strategy, &opts, progress)?;
        trace.finish()?;
        set
    };
    Ok(match format {
        Format::Json => Document::from_set(&set).to_json(),
        Format::Latex => render::latex_document(&set),
        Format::Text => {
            let mut s = String::from_utf8(buffered).expect("trace is UTF-8");
            s.push_str(&render::text_summary(&set));
            s
        }
    })
}

#[derive(Serialize)]
struct DimsDoc {
    schema: u32,
    degrees: Vec<u32>,
    cells: Vec<DimsCell>,
}

#[derive(Serialize)]
struct DimsCell {
    multidegree: Vec<u32>,
    order: u32,
    dim: u64,
}

fn dims(a: &DimsArgs) -> Result<String, Failure> {
    let spec = form_spec(&a.common.degrees)?;
    let mut cache = QBinomialCache::default();
    let mut cells = Vec::new();
    match &a.multidegree {
        Some(m) => {
            let key = ComponentKey::new(Multidegree::new(m.clone()), a.order);
            key.check(&spec)?;
            cells.push(DimsCell {
                multidegree: m.clone(),
                order: a.order,
                dim: cell_dim_cached(&spec, &key, &mut cache),
            });
        }
        None => {
            let mode = if a.semi { Mode::Semi } else { Mode::Invariants };
            for t in 1..=a.max_degree {
                for m in Multidegree::compositions(spec.num_forms(), t) {
                    for j in admissible_orders(&spec, &m, mode) {
                        let key = ComponentKey::new(m.clone(), j);
                        let dim = cell_dim_cached(&spec, &key, &mut cache);
                        if dim > 0 {
                            cells.push(DimsCell {
                                multidegree: m.parts().to_vec(),
                                order: j,
                                dim,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(match (a.common.format, &a.multidegree) {
        (Format::Json, _) => {
            let doc = DimsDoc {
                schema: SCHEMA_VERSION,
                degrees: spec.degrees().to_vec(),
                cells,
            };
            serde_json::to_string_pretty(&doc).expect("serializes") + "\n"
        }
        (_, Some(_)) => format!("{}\n", cells[0].dim),
        (_, None) => {
            let mut s = String::new();
            for c in cells {
                let _ = writeln!(s, "{} order {}: {}", Multidegree::new(c.multidegree), c.order, c.dim);
            }
            s
        }
    })
}

fn poly_text(c: &[BigInt]) -> String {
    let mut s = String::new();
    for (i, a) in c.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mag = a.abs();
        if s.is_empty() {
            if a.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(if a.is_negative() { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{i}"),
        };
        if mono.is_empty() || !mag.is_one() {
            s.push_str(&mag.to_string());
            if !mono.is_empty() {
                s.push('*');
            }
        }
        s.push_str(&mono);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

#[derive(Serialize)]
struct SeriesDoc {
    schema: u32,
    degrees: Vec<u32>,
    mode: &'static str,
    coefficients: Vec<String>,
    numerator: Option<Vec<String>>,
    denominator: Option<Vec<String>>,
    denominator_factors: Option<Vec<(u32, u32)>>,
    beta: Option<usize>,
}

fn series(a: &SeriesArgs) -> Result<String, Failure> {
    let spec = form_spec(&a.common.degrees)?;
    if a.terms == 0 {
        return Err(Error::Usage("at least one term is required".into()).into());
    }
    let mode = if a.semi { Mode::Semi } else { Mode::Invariants };
    let coeffs = univariate_series(&spec, mode, a.terms - 1).coeffs;
    let rational = match reconstruct_poincare(&spec, mode, 32, 256) {
        Ok(r) => Some(r),
        Err(Error::InsufficientPrecision { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let strs = |v: &[BigInt]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    if a.common.format == Format::Json {
        let doc = SeriesDoc {
            schema: SCHEMA_VERSION,
            degrees: spec.degrees().to_vec(),
            mode: if a.semi { "semi-invariants" } else { "invariants" },
            coefficients: strs(&coeffs),
            numerator: rational.as_ref().map(|r| strs(&r.numerator)),
            denominator: rational.as_ref().map(|r| strs(&r.denominator)),
            denominator_factors: rational.as_ref().and_then(|r| r.binomial_factors.clone()),
            beta: rational.as_ref().map(|r| r.beta()),
        };
        return Ok(serde_json::to_string_pretty(&doc).expect("serializes") + "\n");
    }
    let mut s = format!("series: {} + O(t^{})\n", poly_text(&coeffs), a.terms);
    match rational {
        Some(r) => {
            let _ = writeln!(s, "numerator: {}", poly_text(&r.numerator));
            let den = match &r.binomial_factors {
                Some(f) => f
                    .iter()
                    .map(|&(a, e)| if e == 1 { format!("(1 - t^{a})") } else { format!("(1 - t^{a})^{e}") })
                    .collect::<String>(),
                None => poly_text(&r.denominator),
            };
            let _ = writeln!(s, "denominator: {den}");
            let _ = writeln!(s, "beta: {}", r.beta());
        }
        None => s.push_str("rational form not identified\n"),
    }
    Ok(s)
}
