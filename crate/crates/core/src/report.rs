//! Tables and plots.
//!
//! Every tabular output is built as a [`Table`] and rendered either as CSV
//! (machine format) or as a Markdown pipe table (human format); both carry
//! the same cell strings. Times and percentages use one decimal, mean stroke
//! counts two, p-values four with a trailing `*` when significant.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::features::{relative_times, AnomalyPolicy, CohortSummary, Feature, FeatureVector};
use crate::ingest::{ParseWarning, SampleStream, ValidationReport};
use crate::segmentation::{PerClass, SegmentationConfig, SessionSegmentation, StrokeClass};
use crate::stats::{TestResult, DEFAULT_EXACT_LIMIT};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            other => Err(format!("unknown format `{other}` (expected csv or md)")),
        }
    }
}

/// Settings shared by every command. The significance level is fixed at
/// [`crate::SIGNIFICANCE_LEVEL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub segmentation: SegmentationConfig,
    pub anomaly: AnomalyPolicy,
    pub exact_limit: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            segmentation: SegmentationConfig::default(),
            anomaly: AnomalyPolicy::default(),
            exact_limit: DEFAULT_EXACT_LIMIT,
            format: OutputFormat::Csv,
        }
    }
}

/// Header plus rows of preformatted cells.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Markdown => self.to_markdown(),
        }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are utf-8")
    }

    fn to_markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", self.header.iter().map(|h| esc(h)).collect::<Vec<_>>().join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", row.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | "));
        }
        out
    }
}

/// `"2857.6 (79.6%)"`.
pub fn time_cell(time: f64, percent: f64) -> String {
    format!("{time:.1} ({percent:.1}%)")
}

pub fn stroke_cell(mean: f64) -> String {
    format!("{mean:.2}")
}

/// `"0.0157*"` when significant, `"0.0500"` at the boundary.
pub fn p_cell(p: f64, significant: bool) -> String {
    format!("{p:.4}{}", if significant { "*" } else { "" })
}

fn round1(v: f64) -> f64 {
    format!("{v:.1}").parse().expect("formatted float")
}

/// Percentages as rendered: computed from the one-decimal means shown next
/// to them, so every row is internally consistent.
pub fn rendered_percentages(summary: &CohortSummary) -> PerClass<f64> {
    relative_times(summary.mean_times.map(round1)).unwrap_or(summary.percentages)
}

const TIME_HEADERS: [&str; 6] = ["T_S", "T_AS", "T_AL", "Strokes_S", "Strokes_AS", "Strokes_AL"];

pub fn render_time_table(summaries: &[CohortSummary], format: OutputFormat) -> String {
    let table = match format {
        OutputFormat::Csv => {
            let mut t = Table::new([
                "database", "task", "cohort", "n_files", "n_anomalous", "T_S", "T_S_pct", "T_AS",
                "T_AS_pct", "T_AL", "T_AL_pct", "Strokes_S", "Strokes_AS", "Strokes_AL",
            ]);
            for s in summaries {
                let pct = rendered_percentages(s);
                let mut row = vec![
                    s.database.clone(),
                    s.task.clone(),
                    s.cohort.clone(),
                    s.n_files.to_string(),
                    s.n_anomalous.to_string(),
                ];
                for class in StrokeClass::ALL {
                    row.push(format!("{:.1}", s.mean_times[class]));
                    row.push(format!("{:.1}", pct[class]));
                }
                row.extend(s.mean_strokes.0.iter().map(|&m| stroke_cell(m)));
                t.push(row);
            }
            t
        }
        OutputFormat::Markdown => {
            let mut header = vec!["Database", "Task", "Cohort", "Files", "Anomalous"];
            header.extend(TIME_HEADERS);
            let mut t = Table::new(header);
            for s in summaries {
                let pct = rendered_percentages(s);
                let mut row = vec![
                    s.database.clone(),
                    s.task.clone(),
                    s.cohort.clone(),
                    s.n_files.to_string(),
                    s.n_anomalous.to_string(),
                ];
                row.extend(StrokeClass::ALL.map(|c| time_cell(s.mean_times[c], pct[c])));
                row.extend(s.mean_strokes.0.iter().map(|&m| stroke_cell(m)));
                t.push(row);
            }
            t
        }
    };
    table.render(format)
}

/// One row per (database, task) in order of first appearance, six p columns.
pub fn render_p_table(results: &[TestResult], format: OutputFormat) -> String {
    let mut header = vec!["database".to_string(), "task".to_string()];
    header.extend(Feature::ALL.map(|f| format!("p {}", f.label())));
    let mut table = Table::new(header);
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in results {
        let key = (r.database.as_str(), r.task.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    for (database, task) in keys {
        let mut row = vec![database.to_string(), task.to_string()];
        for feature in Feature::ALL {
            let cell = results
                .iter()
                .find(|r| r.database == database && r.task == task && r.feature == feature)
                .map_or_else(|| "-".to_string(), |r| p_cell(r.p, r.significant));
            row.push(cell);
        }
        table.push(row);
    }
    table.render(format)
}

/// Long-form test results, one row per (task, feature).
pub fn results_table(results: &[TestResult]) -> Table {
    let mut t = Table::new(["task", "feature", "n_A", "n_B", "U_A", "p", "method", "significant"]);
    for r in results {
        t.push(vec![
            r.task.clone(),
            r.feature.label().to_string(),
            r.u.n_a.to_string(),
            r.u.n_b.to_string(),
            r.u.u_a.to_string(),
            r.p.to_string(),
            r.method.label().to_string(),
            r.significant.to_string(),
        ]);
    }
    t
}

pub fn strokes_table(seg: &SessionSegmentation) -> Table {
    let mut t = Table::new(["class", "start_t", "end_t", "duration", "n_samples"]);
    for s in &seg.strokes {
        t.push(vec![
            s.class.label().to_string(),
            s.start_t.to_string(),
            s.end_t.to_string(),
            s.duration().to_string(),
            s.sample_range.len().to_string(),
        ]);
    }
    t
}

pub fn features_table(vectors: &[FeatureVector]) -> Table {
    let mut header = vec!["path", "database", "task", "subject", "cohort"];
    header.extend(TIME_HEADERS);
    header.push("anomalous");
    let mut t = Table::new(header);
    for v in vectors {
        let mut row = match &v.source {
            Some(r) => vec![
                r.path.display().to_string(),
                r.database.clone(),
                r.task.clone(),
                r.subject.clone(),
                r.cohort.clone(),
            ],
            None => vec![String::new(); 5],
        };
        row.extend(v.times.0.iter().map(|t| t.to_string()));
        row.extend(v.strokes.0.iter().map(|c| c.to_string()));
        row.push(v.anomalous.to_string());
        t.push(row);
    }
    t
}

pub fn validation_table(source: &str, report: &ValidationReport, warnings: &[ParseWarning]) -> Table {
    let mut t = Table::new([
        "source", "samples", "first_t", "last_t", "span", "transitions", "on_surface_samples",
        "min_pressure", "max_pressure", "warnings",
    ]);
    t.push(vec![
        source.to_string(),
        report.samples.to_string(),
        report.first_t.to_string(),
        report.last_t.to_string(),
        report.span.to_string(),
        report.transitions.to_string(),
        report.on_surface_samples.to_string(),
        report.min_pressure.to_string(),
        report.max_pressure.to_string(),
        warnings.len().to_string(),
    ]);
    t
}

struct Xml<'a>(&'a str);

impl fmt::Display for Xml<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.0.chars() {
            match c {
                '&' => f.write_str("&amp;")?,
                '<' => f.write_str("&lt;")?,
                '>' => f.write_str("&gt;")?,
                '"' => f.write_str("&quot;")?,
                c => f.write_char(c)?,
            }
        }
        Ok(())
    }
}

const WIDTH: f64 = 800.0;
const PANEL_HEIGHT: f64 = 360.0;
const TIMELINE_HEIGHT: f64 = 70.0;

/// Two stacked panels (on-surface strokes above, in-air-short strokes below)
/// sharing one viewBox fitted to the pen coordinates with a 5 % margin, and a
/// timeline strip marking every in-air-long event. The y axis points up.
pub fn render_trajectories(stream: &SampleStream, seg: &SessionSegmentation) -> String {
    let samples = stream.samples();
    let (mut min_x, mut max_x) = (i64::MAX, i64::MIN);
    let (mut min_y, mut max_y) = (i64::MAX, i64::MIN);
    for s in samples {
        min_x = min_x.min(s.x);
        max_x = max_x.max(s.x);
        min_y = min_y.min(s.y);
        max_y = max_y.max(s.y);
    }
    let w = ((max_x - min_x) as f64).max(1.0);
    let h = ((max_y - min_y) as f64).max(1.0);
    let view_box = format!(
        "{:.2} {:.2} {:.2} {:.2}",
        min_x as f64 - 0.05 * w,
        -(max_y as f64) - 0.05 * h,
        1.1 * w,
        1.1 * h
    );

    let total_height = 2.0 * (PANEL_HEIGHT + 30.0) + TIMELINE_HEIGHT;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{total_height}" viewBox="0 0 {WIDTH} {total_height}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", Xml(stream.source_id()));
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    let panels = [
        (StrokeClass::OnSurface, "on-surface", "On-surface", "#1f3f8f"),
        (StrokeClass::InAirShort, "in-air-short", "In-air (short distance)", "#c0392b"),
    ];
    for (i, (class, id, title, colour)) in panels.into_iter().enumerate() {
        let top = i as f64 * (PANEL_HEIGHT + 30.0);
        let _ = writeln!(
            out,
            r#"<text x="10" y="{:.0}" font-family="sans-serif" font-size="14">{title} ({} strokes)</text>"#,
            top + 20.0,
            seg.counts[class]
        );
        let _ = writeln!(
            out,
            r#"<svg x="0" y="{:.0}" width="{WIDTH}" height="{PANEL_HEIGHT}" viewBox="{view_box}" preserveAspectRatio="xMidYMid meet">"#,
            top + 30.0
        );
        let _ = writeln!(out, r#"<g id="{id}" fill="none" stroke="{colour}" stroke-width="1.5" vector-effect="non-scaling-stroke">"#);
        for stroke in seg.strokes_of(class) {
            let points: Vec<String> = samples[stroke.sample_range.clone()]
                .iter()
                .map(|s| format!("{},{}", s.x, -s.y))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline data-start="{}" data-end="{}" points="{}"/>"#,
                stroke.start_t,
                stroke.end_t,
                points.join(" ")
            );
        }
        let _ = writeln!(out, "</g>\n</svg>");
    }

    let top = 2.0 * (PANEL_HEIGHT + 30.0);
    let axis_y = top + 35.0;
    let (x0, x1) = (20.0, WIDTH - 20.0);
    let (t0, t1) = (stream.first_t(), stream.last_t());
    let span = ((t1 - t0) as f64).max(1.0);
    let _ = writeln!(
        out,
        r#"<text x="10" y="{:.0}" font-family="sans-serif" font-size="14">In-air (long distance) events: {}</text>"#,
        top + 15.0,
        seg.counts[StrokeClass::InAirLong]
    );
    let _ = writeln!(out, r##"<g id="in-air-long" stroke="#555555" font-family="sans-serif" font-size="10">"##);
    let _ = writeln!(out, r#"<line x1="{x0:.2}" y1="{axis_y:.2}" x2="{x1:.2}" y2="{axis_y:.2}"/>"#);
    for (k, stroke) in seg.strokes_of(StrokeClass::InAirLong).enumerate() {
        let xs = x0 + (x1 - x0) * (stroke.start_t - t0) as f64 / span;
        let xe = x0 + (x1 - x0) * (stroke.end_t - t0) as f64 / span;
        let _ = writeln!(
            out,
            r##"<rect class="gap" x="{xs:.2}" y="{:.2}" width="{:.2}" height="8" fill="#e6b0aa" stroke="none"/>"##,
            axis_y - 4.0,
            (xe - xs).max(0.5)
        );
        let _ = writeln!(
            out,
            r#"<line class="tick" x1="{xs:.2}" y1="{:.2}" x2="{xs:.2}" y2="{:.2}"/>"#,
            axis_y - 10.0,
            axis_y + 10.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{xs:.2}" y="{:.2}" stroke="none" text-anchor="middle">L{} ({})</text>"#,
            axis_y + 22.0,
            k + 1,
            stroke.duration()
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}
