//! Segmentation and cohort analysis of online-handwriting recordings.
//!
//! A digitizing tablet reports pen samples while the tip touches the surface
//! and while it hovers close to it. When the pen is lifted higher the tablet
//! loses track of it and simply stops producing samples; the only trace left
//! in the recording is a jump in the timestamp sequence.
//!
//! This crate turns such recordings into three kinds of strokes:
//!
//! * [`StrokeClass::OnSurface`]: pen-down movement (visible ink),
//! * [`StrokeClass::InAirShort`]: tracked hover, status flag off,
//! * [`StrokeClass::InAirLong`]: untracked movement, detected as a timestamp gap,
//!
//! and builds the usual analysis on top:
//!
//! | module | purpose |
//! |---|---|
//! | [`ingest`] | sample-file and corpus-manifest parsing |
//! | [`segmentation`] | sampling period, gap detection, stroke partition |
//! | [`features`] | six per-file time/stroke features, anomaly flag, cohort means |
//! | [`stats`] | two-sided Mann-Whitney U test (exact and normal approximation) |
//! | [`synth`] | seeded session and corpus generator with ground truth |
//! | [`report`] | tables, CSV/Markdown output, SVG trajectory plots |
//! | [`cli`] | the `penair` command-line front end |
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory (`cargo run -p penair --example <name>`).

pub mod cli;
pub mod features;
pub mod pipeline;
pub mod ingest;
pub mod ratio;
pub mod report;
pub mod segmentation;
pub mod stats;
pub mod synth;

pub use features::{
    aggregate_cohort, feature_vector, relative_times, AnomalyPolicy, CohortSummary, Feature,
    FeatureError, FeatureVector,
};
pub use ingest::{
    load_manifest, parse_session, validate_stream, CorpusManifest, ManifestError, ManifestRecord,
    ParseError, ParseOptions, ParsedSession, PenStatus, Sample, SampleStream, ValidationReport,
};
pub use ratio::Ratio;
pub use report::{OutputFormat, RunConfig};
pub use segmentation::{
    detect_gaps, nominal_period, segment, Gap, PerClass, SegmentError, SegmentationConfig,
    SessionSegmentation, Stroke, StrokeClass,
};
pub use stats::{
    approx_p, compare_cohorts, exact_p, mann_whitney_u, midranks, ExactP, PValueMethod,
    StatsError, TestResult, UStat, SIGNIFICANCE_LEVEL,
};
pub use synth::{generate_corpus, generate_session, CorpusSpec, GroundTruth, SynthError, SynthSpec};

/// Timestamps and durations in the tablet's native units.
pub type Tick = i64;
