//! The `projshape` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use projshape_core::oracle::{random_general_position, random_with_constraints};
use projshape_core::tyler::{DEFAULT_MAX_ITER, DEFAULT_STANDARDIZE_TOL};
use projshape_core::{
    blur_sequence, is_standardizable, merge_sequence, nonhausdorff_witness, shape_distance, tyler_standardize,
    Options, SubspaceNumbers, DEFAULT_RANK_TOL,
};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{load, matrix_rows};
use crate::report::{
    analyze, subspace_numbers_report, tyler_numbers_report, BlockPairReport, DistanceReport, GeneratedConfiguration,
    SequenceReport, StandardizationReport, SCHEMA_VERSION,
};

/// Environment variable overriding the rank tolerance.
pub const TOL_ENV: &str = "PROJSHAPE_TOL";

#[derive(Debug, Parser)]
#[command(name = "projshape", version, about = "Analyze projective shapes of landmark configurations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constraints, classifications, frames and chart of a configuration.
    Analyze {
        file: PathBuf,
        /// Subspace numbers to check, as `n1,...,nd`.
        #[arg(long, value_delimiter = ',')]
        sn: Option<Vec<usize>>,
        /// Also write the colored graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Tyler standardization of a configuration.
    Standardize {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STANDARDIZE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Distance between the standardized shapes of two configurations.
    Distance {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STANDARDIZE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Tyler subspace numbers for `d` and `k`.
    TylerNumbers { d: usize, k: usize },
    /// Hausdorff and maximality check of subspace numbers.
    CheckSn {
        d: usize,
        k: usize,
        #[arg(required = true, value_delimiter = ',')]
        n: Vec<usize>,
    },
    /// Pair of distinct shapes that cannot be separated.
    Witness { d: usize, k: usize },
    /// Sequence of one shape converging to a splittable configuration and to
    /// a second shape.
    Blur {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        terms: usize,
    },
    /// Sequence of shapes converging to both members of the witness pair.
    Merge {
        d: usize,
        k: usize,
        #[arg(long, default_value_t = 8)]
        terms: usize,
    },
    /// Random configuration, optionally with planted constraints.
    Generate {
        d: usize,
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `i1,i2,...:j` puts the listed landmarks in a linear subspace of
        /// dimension `j`. Repeatable.
        #[arg(long = "constraint", value_parser = parse_constraint)]
        constraints: Vec<(Vec<usize>, usize)>,
    },
}

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

fn parse_constraint(s: &str) -> std::result::Result<(Vec<usize>, usize), String> {
    let (indices, dim) = s.rsplit_once(':').ok_or_else(|| format!("`{s}`: expected I:j"))?;
    let indices = parse_list(indices)?;
    if indices.contains(&0) {
        return Err(format!("`{s}`: landmark indices start at 1"));
    }
    let dim = dim.trim().parse::<usize>().map_err(|e| format!("`{dim}`: {e}"))?;
    Ok((indices, dim))
}

fn tolerance_from_env() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(Error::Usage(format!("{TOL_ENV} must be a positive number, got `{v}`"))),
        },
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_RANK_TOL),
        Err(e) => Err(Error::Usage(format!("{TOL_ENV}: {e}"))),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Parse(e.to_string()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_owned(), source })
}

fn check_tolerances(tol: f64, max_iter: usize) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Usage(format!("--tol must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::Usage("--max-iter must be positive".into()));
    }
    Ok(())
}

/// Runs one command and returns its JSON output.
pub fn execute(command: &Command, opts: &Options<'_>) -> Result<String> {
    match command {
        Command::Analyze { file, sn, dot } => {
            let c = load(file)?;
            let sn = sn.clone().map(SubspaceNumbers::new).transpose().map_err(Error::Invalid)?;
            let report = analyze(&c, sn.as_ref(), opts)?;
            if let Some(path) = dot {
                let graph = report
                    .graph
                    .as_ref()
                    .ok_or(Error::Domain(projshape_core::Error::SingularBase))?;
                write_file(path, &graph.to_dot())?;
            }
            json(&report)
        }
        Command::Standardize { file, tol, max_iter } => {
            check_tolerances(*tol, *max_iter)?;
            let c = load(file)?;
            let s = tyler_standardize(&c, *tol, *max_iter)?;
            json(&StandardizationReport::from(&s))
        }
        Command::Distance { file_a, file_b, tol, max_iter } => {
            check_tolerances(*tol, *max_iter)?;
            let (a, b) = (load(file_a)?, load(file_b)?);
            if (a.d(), a.k()) != (b.d(), b.k()) {
                return Err(Error::Invalid(projshape_core::Error::DimensionMismatch(format!(
                    "{} landmarks in RP^{} against {} landmarks in RP^{}",
                    a.k(),
                    a.d(),
                    b.k(),
                    b.d()
                ))));
            }
            let (class_a, class_b) = (is_standardizable(&a, opts)?, is_standardizable(&b, opts)?);
            let (sa, sb) = (tyler_standardize(&a, *tol, *max_iter)?, tyler_standardize(&b, *tol, *max_iter)?);
            let alignment = shape_distance(&sa, &sb, opts)?;
            json(&DistanceReport::new(&alignment, (&sa, &class_a), (&sb, &class_b)))
        }
        Command::TylerNumbers { d, k } => json(&tyler_numbers_report(*d, *k).map_err(Error::Invalid)?),
        Command::CheckSn { d, k, n } => {
            let n = SubspaceNumbers::new(n.clone()).map_err(Error::Invalid)?;
            if n.d() != *d {
                return Err(Error::Usage(format!("expected {d} subspace numbers, got {}", n.d())));
            }
            json(&subspace_numbers_report(*k, &n)?)
        }
        Command::Witness { d, k } => {
            let pair = nonhausdorff_witness(*d, *k).map_err(Error::Invalid)?;
            json(&BlockPairReport::new(&pair, opts)?)
        }
        Command::Blur { file, terms } => {
            let c = load(file)?;
            json(&SequenceReport::from(&blur_sequence(&c, *terms, opts)?))
        }
        Command::Merge { d, k, terms } => {
            let pair = nonhausdorff_witness(*d, *k).map_err(Error::Invalid)?;
            json(&SequenceReport::from(&merge_sequence(&pair, *terms)?))
        }
        Command::Generate { d, k, seed, constraints } => {
            let zero_based: Vec<(Vec<usize>, usize)> =
                constraints.iter().map(|(i, j)| (i.iter().map(|x| x - 1).collect(), *j)).collect();
            let c = if zero_based.is_empty() {
                random_general_position(*d, *k, *seed)
            } else {
                random_with_constraints(*d, *k, &zero_based, *seed)
            }
            .map_err(Error::Invalid)?;
            json(&GeneratedConfiguration {
                schema_version: SCHEMA_VERSION,
                d: c.d(),
                k: c.k(),
                seed: *seed,
                constraints: constraints.clone(),
                matrix: matrix_rows(c.matrix()),
            })
        }
    }
}

/// Parses `args` (program name first), writes one JSON document to `stdout`
/// or a diagnostic to `stderr`, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let result = tolerance_from_env().and_then(|tol| {
        let opts = Options::default().with_rank_tol(tol);
        execute(&cli.command, &opts)
    });
    match result {
        Ok(text) => match writeln!(stdout, "{text}") {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                2
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
