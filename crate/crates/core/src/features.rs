//! Per-file features and cohort aggregates.
//!
//! Each recording is reduced to six numbers: the time spent and the number of
//! strokes in each of the three stroke classes. A recording whose in-air-long
//! time is more than a fixed fraction (default 70 %) of its total time is
//! flagged as anomalous and left out of every cohort mean.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ingest::ManifestRecord;
use crate::ratio::{self, Ratio};
use crate::segmentation::{PerClass, SessionSegmentation, StrokeClass};
use crate::Tick;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("percentages are undefined when the total time is zero")]
    UndefinedPercentage,
    #[error("cohort ({database}, {task}, {cohort}) has no non-anomalous files")]
    EmptyCohort { database: String, task: String, cohort: String },
    #[error("cannot aggregate an empty set of feature vectors")]
    NoVectors,
    #[error("feature vectors mix groups: ({0}) and ({1})")]
    MixedGroups(String, String),
    #[error("anomaly threshold must lie in (0, 1], got {0}")]
    Threshold(String),
}

/// The six per-file features, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    TimeOnSurface,
    TimeInAirShort,
    TimeInAirLong,
    StrokesOnSurface,
    StrokesInAirShort,
    StrokesInAirLong,
}

impl Feature {
    pub const ALL: [Feature; 6] = [
        Feature::TimeOnSurface,
        Feature::TimeInAirShort,
        Feature::TimeInAirLong,
        Feature::StrokesOnSurface,
        Feature::StrokesInAirShort,
        Feature::StrokesInAirLong,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Feature::TimeOnSurface => "T_S",
            Feature::TimeInAirShort => "T_AS",
            Feature::TimeInAirLong => "T_AL",
            Feature::StrokesOnSurface => "Strokes_S",
            Feature::StrokesInAirShort => "Strokes_AS",
            Feature::StrokesInAirLong => "Strokes_AL",
        }
    }

    pub fn class(self) -> StrokeClass {
        match self {
            Feature::TimeOnSurface | Feature::StrokesOnSurface => StrokeClass::OnSurface,
            Feature::TimeInAirShort | Feature::StrokesInAirShort => StrokeClass::InAirShort,
            Feature::TimeInAirLong | Feature::StrokesInAirLong => StrokeClass::InAirLong,
        }
    }

    pub fn is_time(self) -> bool {
        matches!(self, Feature::TimeOnSurface | Feature::TimeInAirShort | Feature::TimeInAirLong)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Feature::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| format!("unknown feature `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnomalyPolicy {
    threshold: Ratio,
}

impl Default for AnomalyPolicy {
    fn default() -> Self {
        AnomalyPolicy { threshold: Ratio::new(7, 10) }
    }
}

impl AnomalyPolicy {
    pub fn new(threshold: Ratio) -> Result<Self, FeatureError> {
        if threshold <= Ratio::from_integer(0) || threshold > Ratio::from_integer(1) {
            return Err(FeatureError::Threshold(ratio::Display(threshold).to_string()));
        }
        Ok(AnomalyPolicy { threshold })
    }

    pub fn threshold(&self) -> Ratio {
        self.threshold
    }

    /// Strict: a fraction exactly at the threshold is not anomalous.
    pub fn is_anomalous(&self, times: &PerClass<Tick>) -> bool {
        let total: Tick = times.0.iter().sum();
        ratio::exceeds(times[StrokeClass::InAirLong], self.threshold, total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub times: PerClass<Tick>,
    pub strokes: PerClass<usize>,
    pub anomalous: bool,
    pub source: Option<ManifestRecord>,
}

impl FeatureVector {
    pub fn get(&self, feature: Feature) -> f64 {
        let class = feature.class();
        if feature.is_time() {
            self.times[class] as f64
        } else {
            self.strokes[class] as f64
        }
    }

    fn group_key(&self) -> (String, String, String) {
        match &self.source {
            Some(r) => (r.database.clone(), r.task.clone(), r.cohort.clone()),
            None => Default::default(),
        }
    }
}

pub fn feature_vector(
    seg: &SessionSegmentation,
    policy: &AnomalyPolicy,
    source: Option<ManifestRecord>,
) -> FeatureVector {
    FeatureVector {
        times: seg.times,
        strokes: seg.counts,
        anomalous: policy.is_anomalous(&seg.times),
        source,
    }
}

/// Share of each class in the total, in percent.
pub fn relative_times(times: PerClass<f64>) -> Result<PerClass<f64>, FeatureError> {
    let total: f64 = times.0.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(FeatureError::UndefinedPercentage);
    }
    Ok(times.map(|t| 100.0 * t / total))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortSummary {
    pub database: String,
    pub task: String,
    pub cohort: String,
    /// All inputs, anomalous ones included.
    pub n_files: usize,
    pub n_anomalous: usize,
    pub mean_times: PerClass<f64>,
    /// Ratio of the mean times, not the mean of per-file ratios.
    pub percentages: PerClass<f64>,
    pub mean_strokes: PerClass<f64>,
}

impl CohortSummary {
    pub fn n_used(&self) -> usize {
        self.n_files - self.n_anomalous
    }
}

/// Means over the non-anomalous vectors of one (database, task, cohort) group.
pub fn aggregate_cohort(vectors: &[FeatureVector]) -> Result<CohortSummary, FeatureError> {
    let first = vectors.first().ok_or(FeatureError::NoVectors)?;
    let key = first.group_key();
    if let Some(other) = vectors.iter().map(FeatureVector::group_key).find(|k| *k != key) {
        return Err(FeatureError::MixedGroups(
            format!("{}, {}, {}", key.0, key.1, key.2),
            format!("{}, {}, {}", other.0, other.1, other.2),
        ));
    }
    let (database, task, cohort) = key;

    let used: Vec<&FeatureVector> = vectors.iter().filter(|v| !v.anomalous).collect();
    if used.is_empty() {
        return Err(FeatureError::EmptyCohort { database, task, cohort });
    }
    let n = used.len() as f64;

    // Integer sums keep the means independent of input order.
    let mut time_sums = PerClass::<i128>::default();
    let mut stroke_sums = PerClass::<u128>::default();
    for v in &used {
        for class in StrokeClass::ALL {
            time_sums[class] += v.times[class] as i128;
            stroke_sums[class] += v.strokes[class] as u128;
        }
    }
    let mean_times = time_sums.map(|s| s as f64 / n);
    let mean_strokes = stroke_sums.map(|s| s as f64 / n);
    // A cohort of zero-length recordings has no defined split; report zeros.
    let percentages = relative_times(mean_times).unwrap_or_default();

    Ok(CohortSummary {
        database,
        task,
        cohort,
        n_files: vectors.len(),
        n_anomalous: vectors.len() - used.len(),
        mean_times,
        percentages,
        mean_strokes,
    })
}

/// Group vectors by (database, task, cohort) and summarise each group, in
/// sorted key order.
pub fn aggregate_all(vectors: &[FeatureVector]) -> Result<Vec<CohortSummary>, FeatureError> {
    let mut groups: BTreeMap<(String, String, String), Vec<FeatureVector>> = BTreeMap::new();
    for v in vectors {
        groups.entry(v.group_key()).or_default().push(v.clone());
    }
    groups.values().map(|g| aggregate_cohort(g)).collect()
}
