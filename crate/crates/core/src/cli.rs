//! The `penair` command line.
//!
//! ```text
//! penair [--gap-factor R] [--anomaly-threshold R] [--exact-limit N]
//!        [--format csv|md] [--out PATH] <command>
//!
//!   parse FILE        sample count, span, status transitions, pressure range
//!   segment FILE      one CSV row per stroke
//!   features MANIFEST one row per recording with the six features
//!   aggregate MANIFEST per (database, task, cohort) means and percentages
//!   compare MANIFEST  Mann-Whitney U tests between two cohorts
//!   synth --seed N --spec FILE --out DIR
//!   render FILE       SVG trajectory plot
//! ```
//!
//! Exit codes: 0 success, 1 usage error, 2 parse/format/I/O error,
//! 3 empty cohort or degenerate data.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::features::{aggregate_all, AnomalyPolicy, FeatureError};
use crate::ingest::{self, parse_session, validate_stream, ParseOptions};
use crate::pipeline::{extract_corpus, CorpusError};
use crate::ratio::parse_ratio;
use crate::report::{
    features_table, render_p_table, render_time_table, render_trajectories, results_table,
    strokes_table, validation_table, OutputFormat, RunConfig,
};
use crate::segmentation::{segment, SegmentationConfig};
use crate::stats::{compare_tasks, StatsError};
use crate::synth::{generate_corpus, CorpusSpec, SynthError};

#[derive(Debug, Parser)]
#[command(name = "penair", version, about = "On-surface / in-air stroke analysis of digitizer recordings")]
struct Cli {
    /// Gap threshold as a multiple of the modal sampling period.
    #[arg(long, global = true, default_value = "3")]
    gap_factor: String,
    /// In-air-long share of total time above which a recording is anomalous.
    #[arg(long, global = true, default_value = "0.7")]
    anomaly_threshold: String,
    /// Largest pooled sample size tested exactly.
    #[arg(long, global = true, default_value_t = crate::stats::DEFAULT_EXACT_LIMIT)]
    exact_limit: usize,
    /// Output format: csv or md.
    #[arg(long, global = true, default_value = "csv")]
    format: OutputFormat,
    /// Output file (the output directory for `synth`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a sample file and report basic statistics.
    Parse {
        file: PathBuf,
        #[arg(long)]
        derive_status_from_pressure: bool,
    },
    /// Segment a sample file into strokes.
    Segment {
        file: PathBuf,
        #[arg(long)]
        derive_status_from_pressure: bool,
    },
    /// Per-recording features for every manifest entry.
    Features {
        manifest: PathBuf,
        #[arg(long)]
        derive_status_from_pressure: bool,
    },
    /// Cohort means and relative times.
    Aggregate {
        manifest: PathBuf,
        #[arg(long)]
        derive_status_from_pressure: bool,
    },
    /// Mann-Whitney U tests between two cohorts, per task and feature.
    Compare {
        manifest: PathBuf,
        /// First cohort (defaults to the alphabetically first of exactly two).
        #[arg(long)]
        cohort_a: Option<String>,
        #[arg(long)]
        cohort_b: Option<String>,
        /// Restrict to one database.
        #[arg(long)]
        database: Option<String>,
        #[arg(long)]
        derive_status_from_pressure: bool,
    },
    /// Generate a synthetic corpus into --out.
    Synth {
        /// Master seed; the same seed and spec reproduce the corpus byte for byte.
        #[arg(long)]
        seed: u64,
        /// Corpus description (TOML).
        #[arg(long)]
        spec: PathBuf,
    },
    /// Plot on-surface and in-air trajectories as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        derive_status_from_pressure: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ingest::ManifestError> for CliError {
    fn from(e: ingest::ManifestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        match e {
            FeatureError::Threshold(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::AmbiguousPeriod { .. } => CliError::Data(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn run_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let usage = |e: &dyn std::fmt::Display| CliError::Usage(e.to_string());
    let gap_factor = parse_ratio(&cli.gap_factor).map_err(|e| usage(&e))?;
    let threshold = parse_ratio(&cli.anomaly_threshold).map_err(|e| usage(&e))?;
    Ok(RunConfig {
        segmentation: SegmentationConfig::new(gap_factor, None).map_err(|e| usage(&e))?,
        anomaly: AnomalyPolicy::new(threshold)?,
        exact_limit: cli.exact_limit,
        format: cli.format,
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))
}

fn parse_file(path: &Path, derive: bool, stderr: &mut dyn Write) -> Result<ingest::ParsedSession, CliError> {
    let text = read(path)?;
    let options = ParseOptions { derive_status_from_pressure: derive };
    let parsed = parse_session(&text, &path.display().to_string(), options)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        let _ = writeln!(stderr, "WARN {}:{} {w}", path.display(), w.line);
    }
    Ok(parsed)
}

fn corpus(
    manifest: &Path,
    config: &RunConfig,
    derive: bool,
    stderr: &mut dyn Write,
) -> Result<Vec<crate::FeatureVector>, CliError> {
    let manifest = ingest::load_manifest_file(manifest)?;
    let options = ParseOptions { derive_status_from_pressure: derive };
    let extracted = extract_corpus(&manifest, &config.segmentation, &config.anomaly, options)?;
    for (path, w) in &extracted.warnings {
        let _ = writeln!(stderr, "WARN {}:{} {w}", path.display(), w.line);
    }
    Ok(extracted.vectors)
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<Option<String>, CliError> {
    let config = run_config(cli)?;
    let format = config.format;
    let output = match &cli.command {
        Command::Parse { file, derive_status_from_pressure } => {
            let parsed = parse_file(file, *derive_status_from_pressure, stderr)?;
            let report = validate_stream(&parsed.stream);
            validation_table(&file.display().to_string(), &report, &parsed.warnings).render(format)
        }
        Command::Segment { file, derive_status_from_pressure } => {
            let parsed = parse_file(file, *derive_status_from_pressure, stderr)?;
            strokes_table(&segment(&parsed.stream, &config.segmentation)).render(format)
        }
        Command::Render { file, derive_status_from_pressure } => {
            let parsed = parse_file(file, *derive_status_from_pressure, stderr)?;
            let seg = segment(&parsed.stream, &config.segmentation);
            render_trajectories(&parsed.stream, &seg)
        }
        Command::Features { manifest, derive_status_from_pressure } => {
            let vectors = corpus(manifest, &config, *derive_status_from_pressure, stderr)?;
            features_table(&vectors).render(format)
        }
        Command::Aggregate { manifest, derive_status_from_pressure } => {
            let vectors = corpus(manifest, &config, *derive_status_from_pressure, stderr)?;
            if vectors.is_empty() {
                return Err(CliError::Data("manifest lists no recordings".into()));
            }
            render_time_table(&aggregate_all(&vectors)?, format)
        }
        Command::Compare { manifest, cohort_a, cohort_b, database, derive_status_from_pressure } => {
            let mut vectors = corpus(manifest, &config, *derive_status_from_pressure, stderr)?;
            if let Some(db) = database {
                vectors.retain(|v| v.source.as_ref().is_some_and(|r| &r.database == db));
            }
            let (a, b) = pick_cohorts(&vectors, cohort_a.as_deref(), cohort_b.as_deref())?;
            let results = compare_tasks(&vectors, &a, &b, config.exact_limit)?;
            if results.is_empty() {
                return Err(CliError::Data(format!("no recordings for cohorts `{a}` and `{b}`")));
            }
            match format {
                OutputFormat::Csv => results_table(&results).render(format),
                OutputFormat::Markdown => render_p_table(&results, format),
            }
        }
        Command::Synth { seed, spec } => {
            let out = cli
                .out
                .as_deref()
                .ok_or_else(|| CliError::Usage("synth needs --out DIR".into()))?;
            let spec = CorpusSpec::from_toml(&read(spec)?)?;
            let manifest = generate_corpus(&spec, *seed, out)?;
            let _ = writeln!(
                stderr,
                "wrote {} recordings and {}",
                manifest.records.len(),
                out.join("manifest.csv").display()
            );
            return Ok(None);
        }
    };
    Ok(Some(output))
}

fn pick_cohorts(
    vectors: &[crate::FeatureVector],
    a: Option<&str>,
    b: Option<&str>,
) -> Result<(String, String), CliError> {
    if let (Some(a), Some(b)) = (a, b) {
        if a == b {
            return Err(CliError::Usage("--cohort-a and --cohort-b must differ".into()));
        }
        return Ok((a.to_string(), b.to_string()));
    }
    let cohorts: BTreeSet<&str> =
        vectors.iter().filter_map(|v| v.source.as_ref().map(|r| r.cohort.as_str())).collect();
    match (a, b) {
        (None, None) if cohorts.len() == 2 => {
            let mut it = cohorts.into_iter();
            Ok((it.next().unwrap().to_string(), it.next().unwrap().to_string()))
        }
        (Some(x), None) | (None, Some(x)) => {
            let others: Vec<_> = cohorts.iter().filter(|c| **c != x).collect();
            match others.as_slice() {
                [other] if a.is_some() => Ok((x.to_string(), other.to_string())),
                [other] => Ok((other.to_string(), x.to_string())),
                _ => Err(CliError::Usage(format!("cannot infer the second cohort from {cohorts:?}"))),
            }
        }
        _ => Err(CliError::Usage(format!(
            "found cohorts {cohorts:?}; choose two with --cohort-a and --cohort-b"
        ))),
    }
}

/// Run the command line against explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    match execute(&cli, stderr) {
        Ok(None) => 0,
        Ok(Some(text)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, text.as_bytes())
                    .map_err(|e| CliError::Input(format!("writing {}: {e}", path.display()))),
                None => stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Input(format!("writing output: {e}"))),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
