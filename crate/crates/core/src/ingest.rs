//! Sample files and corpus manifests.
//!
//! A sample file holds one digitizer sample per line with whitespace-separated
//! integer columns, either the full layout
//!
//! ```text
//! x y t status azimuth altitude pressure
//! ```
//!
//! or the short layout `x y t status`. `status` is `1` while the pen touches
//! the surface and `0` while it hovers. The column count is fixed by the first
//! data row; files mixing widths are rejected. A leading line holding a single
//! integer (the sample count written by many tablet exporters) is skipped.
//!
//! A manifest is a CSV file with the header `path,database,task,subject,cohort`
//! mapping recordings to their labels.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::Tick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenStatus {
    OnSurface,
    InAir,
}

impl PenStatus {
    pub fn code(self) -> u8 {
        match self {
            PenStatus::OnSurface => 1,
            PenStatus::InAir => 0,
        }
    }
}

/// One digitizer sample. Azimuth and altitude are carried through but not
/// used by any analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub x: i64,
    pub y: i64,
    pub t: Tick,
    pub status: PenStatus,
    pub azimuth: i64,
    pub altitude: i64,
    pub pressure: i64,
}

/// A non-empty recording with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleStream {
    source_id: String,
    samples: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("a stream needs at least one sample")]
    Empty,
    #[error("sample {index}: timestamp {t} does not exceed previous timestamp {prev}")]
    NotIncreasing { index: usize, prev: Tick, t: Tick },
    #[error("sample {index}: negative pressure {pressure}")]
    NegativePressure { index: usize, pressure: i64 },
}

impl SampleStream {
    pub fn new(source_id: impl Into<String>, samples: Vec<Sample>) -> Result<Self, StreamError> {
        if samples.is_empty() {
            return Err(StreamError::Empty);
        }
        for (index, s) in samples.iter().enumerate() {
            if s.pressure < 0 {
                return Err(StreamError::NegativePressure { index, pressure: s.pressure });
            }
        }
        for (index, w) in samples.windows(2).enumerate() {
            if w[1].t <= w[0].t {
                return Err(StreamError::NotIncreasing { index: index + 1, prev: w[0].t, t: w[1].t });
            }
        }
        Ok(SampleStream { source_id: source_id.into(), samples })
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_t(&self) -> Tick {
        self.samples[0].t
    }

    pub fn last_t(&self) -> Tick {
        self.samples[self.samples.len() - 1].t
    }

    /// Write the stream in the seven-column layout, one sample per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 24);
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {} {}",
                s.x,
                s.y,
                s.t,
                s.status.code(),
                s.azimuth,
                s.altitude,
                s.pressure
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Ignore the status column and set `OnSurface` iff pressure > 0.
    /// Only meaningful for the seven-column layout.
    pub derive_status_from_pressure: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WarningKind {
    /// A row repeated the previous timestamp and was dropped.
    DuplicateTimestamp { t: Tick },
    /// The leading count line disagrees with the number of data rows.
    CountMismatch { declared: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub kind: WarningKind,
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            WarningKind::DuplicateTimestamp { t } => {
                write!(f, "duplicate timestamp {t}, row dropped")
            }
            WarningKind::CountMismatch { declared, found } => {
                write!(f, "header declares {declared} samples, found {found} rows")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSession {
    pub stream: SampleStream,
    pub warnings: Vec<ParseWarning>,
}

impl ParsedSession {
    pub fn duplicate_count(&self) -> usize {
        self.warnings
            .iter()
            .filter(|w| matches!(w.kind, WarningKind::DuplicateTimestamp { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input contains no samples")]
    Empty,
    #[error("line {line}: unsupported row width {found} (expected 4 or 7 columns)")]
    UnsupportedWidth { line: usize, found: usize },
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: column {column} value `{value}` is not an integer")]
    NotInteger { line: usize, column: usize, value: String },
    #[error("line {line}: pen status `{value}` is neither 0 nor 1")]
    BadStatus { line: usize, value: i64 },
    #[error("line {line}: negative pressure {value}")]
    NegativePressure { line: usize, value: i64 },
    #[error("line {line}: timestamp {t} is earlier than previous timestamp {prev}")]
    Order { line: usize, prev: Tick, t: Tick },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::UnsupportedWidth { line, .. }
            | ParseError::ColumnCount { line, .. }
            | ParseError::NotInteger { line, .. }
            | ParseError::BadStatus { line, .. }
            | ParseError::NegativePressure { line, .. }
            | ParseError::Order { line, .. } => Some(*line),
        }
    }
}

/// Parse a sample file. Line numbers in errors and warnings are 1-based.
pub fn parse_session(
    text: &str,
    source_id: &str,
    options: ParseOptions,
) -> Result<ParsedSession, ParseError> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    let mut declared = None;
    if let Some(&(_, first)) = rows.peek() {
        let mut fields = first.split_whitespace();
        if let (Some(only), None) = (fields.next(), fields.next()) {
            if let Ok(n) = only.parse::<usize>() {
                declared = Some(n);
                rows.next();
            }
        }
    }

    let mut width = None;
    let mut samples: Vec<Sample> = Vec::new();
    let mut warnings = Vec::new();
    let mut data_rows = 0usize;

    for (line, row) in rows {
        let fields: Vec<&str> = row.split_whitespace().collect();
        let expected = *width.get_or_insert(fields.len());
        if expected != 4 && expected != 7 {
            return Err(ParseError::UnsupportedWidth { line, found: expected });
        }
        if fields.len() != expected {
            return Err(ParseError::ColumnCount { line, expected, found: fields.len() });
        }
        data_rows += 1;

        let mut values = [0i64; 7];
        for (column, field) in fields.iter().enumerate() {
            values[column] = field.parse().map_err(|_| ParseError::NotInteger {
                line,
                column: column + 1,
                value: field.to_string(),
            })?;
        }
        let [x, y, t, status, azimuth, altitude, pressure] = values;
        if pressure < 0 {
            return Err(ParseError::NegativePressure { line, value: pressure });
        }
        let status = match status {
            1 => PenStatus::OnSurface,
            0 => PenStatus::InAir,
            value => return Err(ParseError::BadStatus { line, value }),
        };
        let status = if options.derive_status_from_pressure && expected == 7 {
            if pressure > 0 {
                PenStatus::OnSurface
            } else {
                PenStatus::InAir
            }
        } else {
            status
        };

        if let Some(prev) = samples.last() {
            if t < prev.t {
                return Err(ParseError::Order { line, prev: prev.t, t });
            }
            if t == prev.t {
                warnings.push(ParseWarning { line, kind: WarningKind::DuplicateTimestamp { t } });
                continue;
            }
        }
        samples.push(Sample { x, y, t, status, azimuth, altitude, pressure });
    }

    if let Some(declared) = declared {
        if declared != data_rows {
            warnings.push(ParseWarning {
                line: 1,
                kind: WarningKind::CountMismatch { declared, found: data_rows },
            });
        }
    }

    let stream = SampleStream::new(source_id, samples).map_err(|e| match e {
        StreamError::Empty => ParseError::Empty,
        // Ordering and pressure were checked row by row above.
        other => unreachable!("{other}"),
    })?;
    Ok(ParsedSession { stream, warnings })
}

/// Summary statistics of a stream; never modifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub samples: usize,
    pub first_t: Tick,
    pub last_t: Tick,
    pub span: Tick,
    pub transitions: usize,
    pub on_surface_samples: usize,
    pub min_pressure: i64,
    pub max_pressure: i64,
}

pub fn validate_stream(stream: &SampleStream) -> ValidationReport {
    let samples = stream.samples();
    let transitions = samples.windows(2).filter(|w| w[0].status != w[1].status).count();
    ValidationReport {
        samples: samples.len(),
        first_t: stream.first_t(),
        last_t: stream.last_t(),
        span: stream.last_t() - stream.first_t(),
        transitions,
        on_surface_samples: samples.iter().filter(|s| s.status == PenStatus::OnSurface).count(),
        min_pressure: samples.iter().map(|s| s.pressure).min().unwrap_or(0),
        max_pressure: samples.iter().map(|s| s.pressure).max().unwrap_or(0),
    }
}

pub const MANIFEST_HEADER: [&str; 5] = ["path", "database", "task", "subject", "cohort"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ManifestRecord {
    pub path: PathBuf,
    pub database: String,
    pub task: String,
    pub subject: String,
    pub cohort: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    pub records: Vec<ManifestRecord>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest header must be `path,database,task,subject,cohort`, found `{found}`")]
    Header { found: String },
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
    #[error("line {line}: column `{column}` is empty")]
    EmptyLabel { line: u64, column: &'static str },
    #[error("line {line}: duplicate record ({database}, {task}, {subject}, {path})")]
    Duplicate { line: u64, database: String, task: String, subject: String, path: String },
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Parse manifest text; relative paths are joined onto `base_dir`.
pub fn load_manifest(text: &str, base_dir: &Path) -> Result<CorpusManifest, ManifestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(|e| ManifestError::Format {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(MANIFEST_HEADER.iter().copied()) {
        return Err(ManifestError::Header { found: header.iter().collect::<Vec<_>>().join(",") });
    }

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| ManifestError::Format {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        for (value, column) in row.iter().zip(MANIFEST_HEADER) {
            if value.is_empty() {
                return Err(ManifestError::EmptyLabel { line, column });
            }
        }
        let raw_path = Path::new(&row[0]);
        let path = if raw_path.is_absolute() { raw_path.to_path_buf() } else { base_dir.join(raw_path) };
        let record = ManifestRecord {
            path,
            database: row[1].to_string(),
            task: row[2].to_string(),
            subject: row[3].to_string(),
            cohort: row[4].to_string(),
        };
        let key = (
            record.database.clone(),
            record.task.clone(),
            record.subject.clone(),
            record.path.clone(),
        );
        if !seen.insert(key) {
            return Err(ManifestError::Duplicate {
                line,
                database: record.database,
                task: record.task,
                subject: record.subject,
                path: record.path.display().to_string(),
            });
        }
        records.push(record);
    }
    Ok(CorpusManifest { records })
}

/// Read and parse a manifest file, resolving paths against its directory.
pub fn load_manifest_file(path: &Path) -> Result<CorpusManifest, ManifestError> {
    let text = fs::read_to_string(path)
        .map_err(|source| ManifestError::Io { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    load_manifest(&text, base)
}

impl CorpusManifest {
    /// Render as manifest CSV. Paths under `base_dir` are written relative to it.
    pub fn to_csv(&self, base_dir: &Path) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(MANIFEST_HEADER).expect("in-memory write");
        for r in &self.records {
            let path = r.path.strip_prefix(base_dir).unwrap_or(&r.path);
            // Manifests always use forward slashes so they travel between platforms.
            let path = path
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            writer
                .write_record([path.as_str(), &r.database, &r.task, &r.subject, &r.cohort])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ParsedSession, ParseError> {
        parse_session(text, "test", ParseOptions::default())
    }

    #[test]
    fn single_row() {
        let parsed = parse("10 20 100 1 0 0 512\n").unwrap();
        assert_eq!(parsed.stream.len(), 1);
        let s = parsed.stream.samples()[0];
        assert_eq!(s.status, PenStatus::OnSurface);
        assert_eq!((s.x, s.y, s.t, s.pressure), (10, 20, 100, 512));
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn four_column_rows_default_the_rest() {
        let parsed = parse("1 2 10 0\n3 4 12 1\n").unwrap();
        let s = parsed.stream.samples();
        assert_eq!(s[0].status, PenStatus::InAir);
        assert_eq!((s[1].azimuth, s[1].altitude, s[1].pressure), (0, 0, 0));
    }

    #[test]
    fn duplicate_timestamps_keep_first() {
        let parsed = parse("1 1 100 1 0 0 5\n2 2 100 0 0 0 0\n").unwrap();
        assert_eq!(parsed.stream.len(), 1);
        assert_eq!(parsed.stream.samples()[0].x, 1);
        assert_eq!(parsed.duplicate_count(), 1);
        assert_eq!(parsed.warnings[0].line, 2);
    }

    #[test]
    fn decreasing_timestamp_is_an_order_error() {
        let err = parse("1 1 100 1 0 0 5\n1 1 98 1 0 0 5\n").unwrap_err();
        assert_eq!(err, ParseError::Order { line: 2, prev: 100, t: 98 });
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse("").unwrap_err(), ParseError::Empty);
        assert_eq!(parse("\n  \n").unwrap_err(), ParseError::Empty);
        assert_eq!(parse("0\n").unwrap_err(), ParseError::Empty);
    }

    #[test]
    fn malformed_rows_report_their_line() {
        let err = parse("1 1 1 1 0 0 5\n1 1 2 1 0 0\n").unwrap_err();
        assert_eq!(err, ParseError::ColumnCount { line: 2, expected: 7, found: 6 });
        let err = parse("1 1 1 1\n1 x 2 1\n").unwrap_err();
        assert!(matches!(err, ParseError::NotInteger { line: 2, column: 2, .. }));
        let err = parse("1 1 1\n").unwrap_err();
        assert_eq!(err, ParseError::UnsupportedWidth { line: 1, found: 3 });
        let err = parse("1 1 1 2\n").unwrap_err();
        assert_eq!(err, ParseError::BadStatus { line: 1, value: 2 });
        let err = parse("1 1 1 1 0 0 -4\n").unwrap_err();
        assert_eq!(err, ParseError::NegativePressure { line: 1, value: -4 });
    }

    #[test]
    fn mixed_width_files_are_rejected() {
        let err = parse("1 1 1 1\n1 1 2 1 0 0 5\n").unwrap_err();
        assert_eq!(err, ParseError::ColumnCount { line: 2, expected: 4, found: 7 });
    }

    #[test]
    fn crlf_tabs_and_count_header() {
        let parsed = parse("2\r\n1\t1  10 1 0 0 9\r\n2 2\t12 0 0 0 0\r\n").unwrap();
        assert_eq!(parsed.stream.len(), 2);
        assert!(parsed.warnings.is_empty());

        let parsed = parse("3\n1 1 10 1 0 0 9\n").unwrap();
        assert_eq!(
            parsed.warnings,
            vec![ParseWarning { line: 1, kind: WarningKind::CountMismatch { declared: 3, found: 1 } }]
        );
    }

    #[test]
    fn status_from_pressure() {
        let opts = ParseOptions { derive_status_from_pressure: true };
        let parsed = parse_session("1 1 10 0 0 0 9\n1 1 12 1 0 0 0\n", "p", opts).unwrap();
        let s = parsed.stream.samples();
        assert_eq!(s[0].status, PenStatus::OnSurface);
        assert_eq!(s[1].status, PenStatus::InAir);
    }

    #[test]
    fn validation_report_counts() {
        let one = parse("5 5 7 1 0 0 3\n").unwrap().stream;
        let r = validate_stream(&one);
        assert_eq!((r.samples, r.span, r.transitions), (1, 0, 0));

        let text: String = (0..10).map(|i| format!("0 0 {} {} 0 0 {}\n", i * 2, i % 2, (i % 2) * 100)).collect();
        let r = validate_stream(&parse(&text).unwrap().stream);
        assert_eq!(r.samples, 10);
        assert_eq!(r.span, 18);
        assert_eq!(r.transitions, 9);
        assert_eq!((r.min_pressure, r.max_pressure), (0, 100));
    }

    #[test]
    fn manifest_basics() {
        let base = Path::new("/data");
        let m = load_manifest("path,database,task,subject,cohort\na.svc,DB,spiral,s1,control\n", base).unwrap();
        assert_eq!(m.records.len(), 1);
        assert_eq!(m.records[0].path, PathBuf::from("/data/a.svc"));
        assert_eq!(m.records[0].cohort, "control");

        let empty = load_manifest("path,database,task,subject,cohort\n", base).unwrap();
        assert!(empty.records.is_empty());
    }

    #[test]
    fn manifest_errors() {
        let base = Path::new(".");
        let dup = "path,database,task,subject,cohort\na,D,T,S,C\na,D,T,S,C\n";
        assert!(matches!(load_manifest(dup, base), Err(ManifestError::Duplicate { line: 3, .. })));

        let header = "path,databse,task,subject,cohort\na,D,T,S,C\n";
        assert!(matches!(load_manifest(header, base), Err(ManifestError::Header { .. })));
        assert!(matches!(load_manifest("", base), Err(ManifestError::Header { .. })));

        let empty = "path,database,task,subject,cohort\na,D,,S,C\n";
        assert!(matches!(
            load_manifest(empty, base),
            Err(ManifestError::EmptyLabel { line: 2, column: "task" })
        ));

        let short = "path,database,task,subject,cohort\na,D,T,S\n";
        assert!(matches!(load_manifest(short, base), Err(ManifestError::Format { .. })));
    }

    #[test]
    fn manifest_csv_round_trip() {
        let base = Path::new("/corpus");
        let m = load_manifest(
            "path,database,task,subject,cohort\nc/t/s1.svc,DB,t,s1,c\n/abs/x.svc,DB,t,s2,d\n",
            base,
        )
        .unwrap();
        let again = load_manifest(&m.to_csv(base), base).unwrap();
        assert_eq!(m, again);
    }
}
