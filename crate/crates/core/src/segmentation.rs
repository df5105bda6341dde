//! Stroke segmentation.
//!
//! Every interval between consecutive samples is attributed to exactly one
//! stroke class: `InAirLong` when the interval is a detected timestamp gap,
//! otherwise the class implied by the pen status of the interval's *first*
//! sample. Maximal runs of equally classed intervals form strokes. If the
//! final sample's status disagrees with the class of the last interval it
//! forms a zero-duration stroke of its own, so that e.g. the statuses
//! `1 1 0 0 1` give on-surface, in-air, on-surface.
//!
//! A gap is an interval longer than
//! `max(gap_factor × nominal_period, min_gap_ticks)`, where the nominal
//! period is the most frequent timestamp difference of the stream.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Index, IndexMut, Range};
use std::str::FromStr;

use thiserror::Error;

use crate::ingest::{PenStatus, SampleStream};
use crate::ratio::{self, Ratio};
use crate::Tick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrokeClass {
    OnSurface,
    InAirShort,
    InAirLong,
}

impl StrokeClass {
    pub const ALL: [StrokeClass; 3] =
        [StrokeClass::OnSurface, StrokeClass::InAirShort, StrokeClass::InAirLong];

    pub fn label(self) -> &'static str {
        match self {
            StrokeClass::OnSurface => "on_surface",
            StrokeClass::InAirShort => "in_air_short",
            StrokeClass::InAirLong => "in_air_long",
        }
    }

    pub fn from_status(status: PenStatus) -> Self {
        match status {
            PenStatus::OnSurface => StrokeClass::OnSurface,
            PenStatus::InAir => StrokeClass::InAirShort,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StrokeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StrokeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrokeClass::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| format!("unknown stroke class `{s}`"))
    }
}

/// One value per stroke class, indexable by [`StrokeClass`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PerClass<T>(pub [T; 3]);

impl<T: Copy> PerClass<T> {
    pub fn new(on_surface: T, in_air_short: T, in_air_long: T) -> Self {
        PerClass([on_surface, in_air_short, in_air_long])
    }

    pub fn map<U>(self, f: impl FnMut(T) -> U) -> PerClass<U> {
        PerClass(self.0.map(f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (StrokeClass, T)> + '_ {
        StrokeClass::ALL.into_iter().zip(self.0.iter().copied())
    }
}

impl<T> Index<StrokeClass> for PerClass<T> {
    type Output = T;
    fn index(&self, class: StrokeClass) -> &T {
        &self.0[class.slot()]
    }
}

impl<T> IndexMut<StrokeClass> for PerClass<T> {
    fn index_mut(&mut self, class: StrokeClass) -> &mut T {
        &mut self.0[class.slot()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stroke {
    pub class: StrokeClass,
    pub start_t: Tick,
    pub end_t: Tick,
    /// Samples whose timestamps fall inside `[start_t, end_t]`; empty for
    /// `InAirLong`, which has no tracked samples.
    pub sample_range: Range<usize>,
}

impl Stroke {
    pub fn duration(&self) -> Tick {
        self.end_t - self.start_t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("need at least 2 samples to estimate the sampling period, got {0}")]
    InsufficientData(usize),
    #[error("gap factor must be greater than 1, got {0}")]
    GapFactor(String),
    #[error("minimum gap must be positive, got {0}")]
    MinGap(Tick),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentationConfig {
    gap_factor: Ratio,
    min_gap_ticks: Option<Tick>,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig { gap_factor: Ratio::from_integer(3), min_gap_ticks: None }
    }
}

impl SegmentationConfig {
    /// `min_gap_ticks = None` means "nominal period + 1".
    pub fn new(gap_factor: Ratio, min_gap_ticks: Option<Tick>) -> Result<Self, SegmentError> {
        if gap_factor <= Ratio::from_integer(1) {
            return Err(SegmentError::GapFactor(ratio::Display(gap_factor).to_string()));
        }
        if let Some(min) = min_gap_ticks {
            if min <= 0 {
                return Err(SegmentError::MinGap(min));
            }
        }
        Ok(SegmentationConfig { gap_factor, min_gap_ticks })
    }

    pub fn gap_factor(&self) -> Ratio {
        self.gap_factor
    }

    pub fn min_gap_ticks(&self) -> Option<Tick> {
        self.min_gap_ticks
    }

    /// Whether an interval of `diff` ticks is a gap at the given period.
    pub fn is_gap(&self, diff: Tick, period: Tick) -> bool {
        let min_gap = self.min_gap_ticks.unwrap_or(period + 1);
        ratio::exceeds(diff, self.gap_factor, period) && diff > min_gap
    }
}

/// Most frequent consecutive timestamp difference; ties go to the smaller value.
pub fn nominal_period(stream: &SampleStream) -> Result<Tick, SegmentError> {
    let samples = stream.samples();
    if samples.len() < 2 {
        return Err(SegmentError::InsufficientData(samples.len()));
    }
    let mut counts: HashMap<Tick, usize> = HashMap::new();
    for w in samples.windows(2) {
        *counts.entry(w[1].t - w[0].t).or_default() += 1;
    }
    let (period, _) = counts
        .into_iter()
        .max_by(|(da, ca), (db, cb)| ca.cmp(cb).then(db.cmp(da)))
        .expect("at least one difference");
    Ok(period)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gap {
    /// Index of the sample that opens the gap; the gap spans to `index + 1`.
    pub index: usize,
    pub ticks: Tick,
}

pub fn detect_gaps(stream: &SampleStream, config: &SegmentationConfig) -> Result<Vec<Gap>, SegmentError> {
    let period = nominal_period(stream)?;
    Ok(gaps_at_period(stream, config, period))
}

fn gaps_at_period(stream: &SampleStream, config: &SegmentationConfig, period: Tick) -> Vec<Gap> {
    stream
        .samples()
        .windows(2)
        .enumerate()
        .filter_map(|(index, w)| {
            let ticks = w[1].t - w[0].t;
            config.is_gap(ticks, period).then_some(Gap { index, ticks })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionSegmentation {
    pub strokes: Vec<Stroke>,
    /// `None` for single-sample streams.
    pub nominal_period: Option<Tick>,
    pub times: PerClass<Tick>,
    pub counts: PerClass<usize>,
}

impl SessionSegmentation {
    pub fn total_time(&self) -> Tick {
        self.times.0.iter().sum()
    }

    pub fn strokes_of(&self, class: StrokeClass) -> impl Iterator<Item = &Stroke> {
        self.strokes.iter().filter(move |s| s.class == class)
    }
}

pub fn segment(stream: &SampleStream, config: &SegmentationConfig) -> SessionSegmentation {
    let samples = stream.samples();
    let n = samples.len();
    let last = samples[n - 1];

    if n == 1 {
        let class = StrokeClass::from_status(last.status);
        let mut counts = PerClass::default();
        counts[class] = 1;
        return SessionSegmentation {
            strokes: vec![Stroke { class, start_t: last.t, end_t: last.t, sample_range: 0..1 }],
            nominal_period: None,
            times: PerClass::default(),
            counts,
        };
    }

    let period = nominal_period(stream).expect("two or more samples");
    let gaps = gaps_at_period(stream, config, period);
    let mut is_gap = vec![false; n - 1];
    for g in &gaps {
        is_gap[g.index] = true;
    }
    let interval_class = |i: usize| {
        if is_gap[i] {
            StrokeClass::InAirLong
        } else {
            StrokeClass::from_status(samples[i].status)
        }
    };

    let mut strokes = Vec::new();
    let mut run_start = 0;
    for i in 1..=n - 1 {
        if i == n - 1 || interval_class(i) != interval_class(run_start) {
            let class = interval_class(run_start);
            let sample_range = if class == StrokeClass::InAirLong { i..i } else { run_start..i + 1 };
            strokes.push(Stroke {
                class,
                start_t: samples[run_start].t,
                end_t: samples[i].t,
                sample_range,
            });
            run_start = i;
        }
    }
    let final_class = StrokeClass::from_status(last.status);
    if interval_class(n - 2) != final_class {
        strokes.push(Stroke { class: final_class, start_t: last.t, end_t: last.t, sample_range: n - 1..n });
    }

    let mut times = PerClass::default();
    let mut counts = PerClass::default();
    for s in &strokes {
        times[s.class] += s.duration();
        counts[s.class] += 1;
    }
    SessionSegmentation { strokes, nominal_period: Some(period), times, counts }
}
