//! Command-line front end. This is the only module that touches the disk.

mod files;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::builder::{build_with, check_extension, kuratowski_embed, BuildConfig, Completion, DEFAULT_SIZE_CAP};
use crate::discretize::{ceil_metric, collapse_metric, dense_discrete_copy};
use crate::distance_sets::{classify, four_values_counterexample, DistanceSet};
use crate::error::{Error, Result};
use crate::hedgehog::{self, Hedgehog, DEFAULT_MAX_CYCLE};
use crate::metric::FiniteMetricSpace;
use crate::ramsey::{experiment, ColoringKind, ExperimentConfig};
use crate::rat::{parse_list, Rat};

pub use files::SpaceFile;
use files::{emit, emit_with, read_json, read_space, to_json, ViolationsFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(name = "urysohn", version, about = "Finite metric spaces with rational distances in [0,1]")]
pub struct Cli {
    /// Worker threads for parallel stages; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "verb", rename_all = "kebab-case")]
pub enum Command {
    /// Enumerate all classes of m-element distance sets.
    Classify {
        #[arg(long)]
        m: usize,
        /// Write the CSV report here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the full report, bit cubes included, as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check the 4-values condition for a set of positive rationals.
    Fourvalues {
        /// Comma-separated values, e.g. "1,2,3" or "1/3,2/3,1".
        #[arg(long)]
        set: String,
    },
    /// Build a finite approximation with the given distance alphabet.
    Build {
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        size_cap: usize,
        #[arg(long, value_enum, default_value_t = CompletionArg::Covering)]
        completion: CompletionArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// List extension profiles over subspaces of at most k points that no
    /// point realizes. Exits 1 if any are found.
    CheckExtension {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Alphabet to use; defaults to the one stored with the space, or to
        /// the distances that occur in it.
        #[arg(long)]
        alphabet: Option<String>,
        /// Where to write unrealized profiles; defaults to `<in>.violations.json`.
        #[arg(long)]
        violations: Option<PathBuf>,
    },
    /// Round every distance up to the grid [0,1]_m.
    Ceil {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collapse every distance onto [0,1]_m through the fine grid.
    Collapse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the hedgehog graph over a fine space, optionally verifying it.
    Hedgehog {
        #[arg(long)]
        fine: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        max_tree: usize,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_CYCLE)]
        max_cycle: usize,
        /// Write the graph as JSON.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Write the cycle census as CSV (with --verify).
        #[arg(long)]
        census: Option<PathBuf>,
        /// Where to write the report when verification fails; defaults to
        /// `<fine>.violations.json`.
        #[arg(long)]
        violations: Option<PathBuf>,
    },
    /// Search colorings of a space for monochromatic copies of targets.
    Experiment {
        #[arg(long = "in")]
        input: PathBuf,
        /// JSON array of target spaces.
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        k: u32,
        /// Half-open seed range `a..b` for random colorings.
        #[arg(long)]
        seeds: String,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [KindArg::Random])]
        kinds: Vec<KindArg>,
        /// Record wall-clock milliseconds per run.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a [0,1]_m-valued space into step functions and check isometry.
    EmbedCm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a 1/m-dense copy of a [0,1]_m-valued target inside an ambient space.
    DenseCopy {
        #[arg(long)]
        ambient: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the metric axioms. Exits 1 on any violation.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionArg {
    Minimal,
    Covering,
}

impl From<CompletionArg> for Completion {
    fn from(c: CompletionArg) -> Self {
        match c {
            CompletionArg::Minimal => Completion::Minimal,
            CompletionArg::Covering => Completion::Covering,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Random,
    Parity,
    Adversarial,
}

impl From<KindArg> for ColoringKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Random => ColoringKind::Random,
            KindArg::Parity => ColoringKind::Parity,
            KindArg::Adversarial => ColoringKind::Adversarial,
        }
    }
}

/// Parses `argv` (program name first), runs the verb and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let _ = e.print();
            eprintln!("\n{}", flag_schema(&argv));
            return EXIT_USAGE;
        }
    };
    match serde_json::to_string(&cli) {
        Ok(config) => eprintln!("config: {config}"),
        Err(e) => eprintln!("config: <unprintable: {e}>"),
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SizeCapExceeded { .. } => EXIT_VIOLATION,
                _ => EXIT_USAGE,
            }
        }
    }
}

/// Help text of the subcommand named in `argv`, or of the whole tool.
fn flag_schema(argv: &[OsString]) -> String {
    let mut cmd = Cli::command();
    let name = argv.iter().skip(1).filter_map(|a| a.to_str()).find(|a| cmd.find_subcommand(a).is_some());
    match name {
        Some(name) => {
            let sub = cmd.find_subcommand_mut(name).expect("checked above");
            sub.render_help().to_string()
        }
        None => cmd.render_help().to_string(),
    }
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Classify { m, csv, json } => {
            let report = classify(*m);
            emit_with(csv.as_deref(), |buf| report.write_csv(buf))?;
            if let Some(path) = json {
                emit(Some(path), &to_json(&report)?)?;
            }
            eprintln!(
                "m={} candidates={} classes={} four_values={}",
                report.m, report.candidates, report.total_classes, report.four_values_classes
            );
            Ok(EXIT_OK)
        }
        Command::Fourvalues { set } => {
            let s = DistanceSet::new(parse_list(set)?)?;
            match four_values_counterexample(&s) {
                None => println!("true"),
                Some(cx) => {
                    println!("false");
                    println!("{cx}");
                }
            }
            Ok(EXIT_OK)
        }
        Command::Build { alphabet, rounds, budget, seed, size_cap, completion, out } => {
            let s = DistanceSet::new(parse_list(alphabet)?)?;
            let config = BuildConfig::new(*rounds, *budget)
                .seed(*seed)
                .size_cap(*size_cap)
                .completion((*completion).into());
            let approx = build_with(&s, &config)?;
            for r in &approx.log {
                println!(
                    "round {}: size {} missing {} added {} deferred {}",
                    r.round, r.size_before, r.missing, r.added, r.deferred
                );
            }
            match approx.closed_after {
                Some(r) => println!("closed after {r} rounds with {} points", approx.space.len()),
                None => println!("not closed after {rounds} rounds; {} points", approx.space.len()),
            }
            emit(Some(out), &to_json(&SpaceFile::approx(&approx))?)?;
            Ok(EXIT_OK)
        }
        Command::CheckExtension { input, k, alphabet, violations } => {
            let (x, file) = load(input)?;
            let alphabet = match (alphabet, file.alphabet) {
                (Some(a), _) => DistanceSet::new(parse_list(a)?)?.values().to_vec(),
                (None, Some(a)) => a,
                (None, None) => x.distance_values(),
            };
            let missing = check_extension(&x, &alphabet, *k);
            println!("unrealized {}", missing.len());
            if missing.is_empty() {
                return Ok(EXIT_OK);
            }
            let path = violations.clone().unwrap_or_else(|| sidecar(input));
            emit(Some(&path), &to_json(&ViolationsFile { k: *k, unrealized: &missing })?)?;
            eprintln!("unrealized profiles written to {}", path.display());
            Ok(EXIT_VIOLATION)
        }
        Command::Ceil { input, m, out } => {
            let (x, _) = load(input)?;
            emit(out.as_deref(), &to_json(&SpaceFile::plain(&ceil_metric(&x, *m)?))?)?;
            Ok(EXIT_OK)
        }
        Command::Collapse { input, m, out } => {
            let (x, _) = load(input)?;
            emit(out.as_deref(), &to_json(&SpaceFile::plain(&collapse_metric(&x, *m)?))?)?;
            Ok(EXIT_OK)
        }
        Command::Hedgehog { fine, m, max_tree, verify, max_cycle, graph, census, violations } => {
            let (x, _) = load(fine)?;
            let coarse = ceil_metric(&x, *m)?;
            let g = Hedgehog::build(&x, &coarse, *m, *max_tree)?;
            if let Some(path) = graph {
                emit(Some(path), &g.to_json()?)?;
            }
            println!("vertices {} edges {}", g.len(), g.edges().len());
            if !verify {
                return Ok(EXIT_OK);
            }
            let (report, cycles) = hedgehog::verify(&g, *max_cycle)?;
            if let Some(path) = census {
                emit_with(Some(path), |buf| cycles.write_csv(buf))?;
            }
            print!("{}", to_json(&report)?);
            if report.ok() {
                return Ok(EXIT_OK);
            }
            let path = violations.clone().unwrap_or_else(|| sidecar(fine));
            let bad: Vec<_> = cycles.cycles.iter().filter(|c| !c.violations.is_empty()).collect();
            emit(Some(&path), &to_json(&serde_json::json!({ "report": report, "cycles": bad }))?)?;
            eprintln!("verification failures written to {}", path.display());
            Ok(EXIT_VIOLATION)
        }
        Command::Experiment { input, targets, eps, k, seeds, kinds, timing, out } => {
            let (x, _) = load(input)?;
            let target_files: Vec<SpaceFile> = read_json(targets)?;
            let targets = target_files
                .iter()
                .map(|t| validated(t.space()?))
                .collect::<Result<Vec<FiniteMetricSpace>>>()?;
            let config = ExperimentConfig {
                k: *k,
                eps: eps.parse::<Rat>()?,
                seeds: parse_seeds(seeds)?,
                kinds: kinds.iter().map(|&k| k.into()).collect(),
                timing: *timing,
            };
            let report = experiment(&x, &targets, &config)?;
            emit_with(out.as_deref(), |buf| report.write_csv(buf))?;
            for s in report.summary() {
                eprintln!(
                    "{} target {}: {}/{} found, smallest witness {}",
                    s.coloring_kind.as_str(),
                    s.target_id,
                    s.successes,
                    s.runs,
                    s.min_witness_size.map_or("-".to_string(), |w| w.to_string())
                );
            }
            Ok(EXIT_OK)
        }
        Command::EmbedCm { input, m, out } => {
            let (x, _) = load(input)?;
            let e = kuratowski_embed(&x, *m)?;
            emit(out.as_deref(), &to_json(&e)?)?;
            if e.is_isometric_to(&x) {
                eprintln!("isometric: {} points into {} cells", x.len(), e.cells());
                Ok(EXIT_OK)
            } else {
                eprintln!("embedding is not isometric");
                Ok(EXIT_VIOLATION)
            }
        }
        Command::DenseCopy { ambient, target, m, steps, out } => {
            let (a, _) = load(ambient)?;
            let (t, _) = load(target)?;
            let copy = dense_discrete_copy(&a, &t, *m, *steps)?;
            emit(out.as_deref(), &to_json(&copy)?)?;
            eprintln!("outcome: {:?}; succeeded: {}", copy.outcome, copy.succeeded());
            Ok(EXIT_OK)
        }
        Command::Validate { input } => {
            let (x, _) = read_space(input)?;
            let violations = x.validate();
            if violations.is_empty() {
                println!("valid: {} points", x.len());
                return Ok(EXIT_OK);
            }
            for v in &violations {
                println!("{v}");
            }
            Ok(EXIT_VIOLATION)
        }
    }
}

fn load(path: &Path) -> Result<(FiniteMetricSpace, SpaceFile)> {
    let (x, file) = read_space(path)?;
    Ok((validated(x)?, file))
}

fn validated(x: FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    match x.validate().first() {
        None => Ok(x),
        Some(v) => Err(Error::NotMetric(v.to_string())),
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".violations.json");
    PathBuf::from(s)
}

/// Parses a half-open range `a..b`.
fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidArgument(format!("seed range {s:?} is not of the form a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a..b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("5..5").unwrap(), Vec::<u64>::new());
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("7").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["urysohn", "classify"]), EXIT_USAGE);
        assert_eq!(run(["urysohn", "classify", "--m", "2", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["urysohn", "no-such-verb"]), EXIT_USAGE);
    }

    #[test]
    fn schema_names_the_verb() {
        let argv: Vec<OsString> = ["urysohn", "fourvalues"].iter().map(OsString::from).collect();
        assert!(flag_schema(&argv).contains("--set"));
    }
}
