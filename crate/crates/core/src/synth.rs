//! Seeded synthetic recordings with known stroke structure.
//!
//! A session is described by a *stroke plan*: an ordered list of
//! `(class, ticks)` entries. On-surface and in-air-short entries emit samples
//! every nominal period with the matching pen status; in-air-long entries
//! emit nothing and only advance the clock, so the next sample arrives
//! `ticks + step` after the previous one.
//!
//! Sample emission follows the segmentation conventions so the ground truth
//! is exact:
//!
//! * a tracked entry starts with a sample at its start time and steps until
//!   it has covered at least its planned ticks; the sample that closes it
//!   opens the next entry (or, before a gap or at the end of the stream,
//!   carries the entry's own status);
//! * the realized duration of each entry (which may overshoot the plan by
//!   less than one step, and which for a gap includes the missing step) is
//!   what [`GroundTruth`] reports.
//!
//! Jitter is applied to every third step only, which keeps the nominal
//! period the strict mode of the timestamp differences.
//!
//! Corpus generation derives one seed per file from the master seed: a
//! ChaCha8 generator seeded with the master seed draws one `u64` per file,
//! visiting cohorts in name order, then subjects in index order, then tasks
//! in the order listed.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::ingest::{CorpusManifest, ManifestRecord, PenStatus, Sample, SampleStream};
use crate::ratio::{self, Ratio};
use crate::segmentation::{nominal_period, PerClass, SegmentationConfig, StrokeClass};
use crate::Tick;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth spec: {0}")]
    Spec(String),
    #[error("generated stream has modal period {found} instead of {expected}; lengthen the tracked strokes")]
    AmbiguousPeriod { expected: Tick, found: Tick },
    #[error("reading corpus spec: {0}")]
    SpecFormat(#[from] toml::de::Error),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn spec_err<T>(msg: impl Into<String>) -> Result<T, SynthError> {
    Err(SynthError::Spec(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub nominal_period: Tick,
    /// Largest step deviation, in ticks.
    pub jitter: Tick,
    /// Must match the gap factor used to segment the output.
    pub gap_factor: Ratio,
    pub plan: Vec<(StrokeClass, Tick)>,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(nominal_period: Tick, jitter: Tick, plan: Vec<(StrokeClass, Tick)>, seed: u64) -> Self {
        SynthSpec { nominal_period, jitter, gap_factor: Ratio::from_integer(3), plan, seed }
    }

    /// Gap threshold that the segmentation will apply to this stream.
    pub fn gap_threshold(&self) -> Ratio {
        threshold(self.gap_factor, self.nominal_period)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        check_timing(self.nominal_period, self.jitter, self.gap_factor)?;
        let Some(first) = self.plan.first() else {
            return spec_err("stroke plan is empty");
        };
        let last = self.plan[self.plan.len() - 1];
        if first.0 == StrokeClass::InAirLong || last.0 == StrokeClass::InAirLong {
            return spec_err("a plan cannot start or end with an in-air-long stroke");
        }
        for w in self.plan.windows(2) {
            if w[0].0 == w[1].0 {
                return spec_err(format!("consecutive {} entries", w[0].0));
            }
        }
        let thr = self.gap_threshold();
        for &(class, ticks) in &self.plan {
            if ticks <= 0 {
                return spec_err(format!("{class} duration must be positive, got {ticks}"));
            }
            if class == StrokeClass::InAirLong && Ratio::from_integer(ticks) <= thr {
                return spec_err(format!(
                    "in-air-long duration {ticks} must exceed the gap threshold {}",
                    ratio::Display(thr)
                ));
            }
        }
        Ok(())
    }
}

fn threshold(gap_factor: Ratio, period: Tick) -> Ratio {
    (gap_factor * period).max(Ratio::from_integer(period + 1))
}

fn check_timing(period: Tick, jitter: Tick, gap_factor: Ratio) -> Result<(), SynthError> {
    if period < 1 {
        return spec_err(format!("nominal period must be positive, got {period}"));
    }
    if SegmentationConfig::new(gap_factor, None).is_err() {
        return spec_err("gap factor must exceed 1");
    }
    if jitter < 0 || jitter >= period {
        return spec_err(format!("jitter must lie in [0, period), got {jitter}"));
    }
    if Ratio::from_integer(jitter) >= (gap_factor - 1) * period {
        return spec_err(format!("jitter {jitter} must stay below (gap_factor - 1) x period"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthStroke {
    pub class: StrokeClass,
    pub start_t: Tick,
    pub end_t: Tick,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub times: PerClass<Tick>,
    pub counts: PerClass<usize>,
    pub strokes: Vec<TruthStroke>,
}

struct Pen {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
    azimuth: f64,
    altitude: f64,
    pressure: f64,
}

impl Pen {
    fn advance(&mut self, rng: &mut ChaCha8Rng) {
        self.vx = 0.9 * self.vx + rng.gen_range(-1.5..1.5);
        self.vy = 0.9 * self.vy + rng.gen_range(-1.5..1.5);
        self.x += self.vx;
        self.y += self.vy;
        self.azimuth = (self.azimuth + rng.gen_range(-2.0..2.0)).rem_euclid(360.0);
        self.altitude = (self.altitude + rng.gen_range(-1.0..1.0)).clamp(30.0, 90.0);
        self.pressure = (self.pressure + rng.gen_range(-40.0..40.0)).clamp(50.0, 1023.0);
    }

    fn sample(&self, t: Tick, status: PenStatus) -> Sample {
        Sample {
            x: self.x.round() as i64,
            y: self.y.round() as i64,
            t,
            status,
            azimuth: self.azimuth.round() as i64,
            altitude: self.altitude.round() as i64,
            pressure: if status == PenStatus::OnSurface { self.pressure.round() as i64 } else { 0 },
        }
    }
}

fn status_of(class: StrokeClass) -> PenStatus {
    match class {
        StrokeClass::OnSurface => PenStatus::OnSurface,
        _ => PenStatus::InAir,
    }
}

/// Generate one session and its ground truth. Identical specs give identical output.
pub fn generate_session(spec: &SynthSpec) -> Result<(SampleStream, GroundTruth), SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pen = Pen {
        x: rng.gen_range(2000.0..8000.0),
        y: rng.gen_range(2000.0..8000.0),
        vx: 0.0,
        vy: 0.0,
        azimuth: rng.gen_range(0.0..360.0),
        altitude: rng.gen_range(40.0..80.0),
        pressure: rng.gen_range(200.0..800.0),
    };
    let mut t: Tick = rng.gen_range(0..100_000);
    let mut step_index = 0u64;
    let mut next_step = |rng: &mut ChaCha8Rng| {
        step_index += 1;
        if spec.jitter > 0 && step_index.is_multiple_of(3) {
            spec.nominal_period + rng.gen_range(-spec.jitter..=spec.jitter)
        } else {
            spec.nominal_period
        }
    };

    let mut samples = Vec::new();
    let mut strokes = Vec::with_capacity(spec.plan.len());
    for (i, &(class, ticks)) in spec.plan.iter().enumerate() {
        let start = t;
        if class == StrokeClass::InAirLong {
            for _ in 0..3 {
                pen.advance(&mut rng);
            }
            t += ticks + next_step(&mut rng);
        } else {
            let status = status_of(class);
            samples.push(pen.sample(t, status));
            let mut covered = 0;
            loop {
                let step = next_step(&mut rng);
                t += step;
                covered += step;
                pen.advance(&mut rng);
                if covered >= ticks {
                    break;
                }
                samples.push(pen.sample(t, status));
            }
            let closes_itself = spec.plan.get(i + 1).is_none_or(|next| next.0 == StrokeClass::InAirLong);
            if closes_itself {
                samples.push(pen.sample(t, status));
            }
        }
        strokes.push(TruthStroke { class, start_t: start, end_t: t });
    }

    let mut times = PerClass::default();
    let mut counts = PerClass::default();
    for s in &strokes {
        times[s.class] += s.end_t - s.start_t;
        counts[s.class] += 1;
    }
    let stream = SampleStream::new(format!("synth-{:016x}", spec.seed), samples)
        .expect("generator emits increasing timestamps and non-negative pressure");
    let found = nominal_period(&stream).expect("every tracked entry emits two samples");
    if found != spec.nominal_period {
        return Err(SynthError::AmbiguousPeriod { expected: spec.nominal_period, found });
    }
    Ok((stream, GroundTruth { times, counts, strokes }))
}

/// Inclusive integer range, written `[lo, hi]` in spec files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "[i64; 2]")]
pub struct Span {
    pub lo: i64,
    pub hi: i64,
}

impl TryFrom<[i64; 2]> for Span {
    type Error = String;
    fn try_from([lo, hi]: [i64; 2]) -> Result<Self, String> {
        if lo > hi {
            return Err(format!("range [{lo}, {hi}] is reversed"));
        }
        Ok(Span { lo, hi })
    }
}

impl Span {
    pub fn new(lo: i64, hi: i64) -> Self {
        Span::try_from([lo, hi]).expect("lo <= hi")
    }

    pub fn fixed(v: i64) -> Self {
        Span { lo: v, hi: v }
    }

    fn draw(&self, rng: &mut (impl Rng + ?Sized)) -> i64 {
        rng.gen_range(self.lo..=self.hi)
    }

    fn scaled(&self, factor: i64) -> Self {
        Span { lo: self.lo * factor, hi: self.hi * factor }
    }
}

/// Distribution over stroke plans.
///
/// A plan has `on_surface_strokes` pen-down strokes separated by in-air
/// transitions. `in_air_long_events` of those transitions (the stroke count
/// grows if needed) contain a gap, in one of the forms `L`, `AS L`, `L AS`
/// or `AS L AS`; the rest are a single in-air-short stroke. The session may
/// also open or close with an in-air-short stroke.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDistribution {
    pub on_surface_strokes: Span,
    pub on_surface_ticks: Span,
    pub in_air_short_ticks: Span,
    pub in_air_long_events: Span,
    pub in_air_long_ticks: Span,
}

impl PlanDistribution {
    pub fn validate(&self, period: Tick, gap_factor: Ratio) -> Result<(), SynthError> {
        let thr = threshold(gap_factor, period);
        if self.on_surface_strokes.lo < 1 {
            return spec_err("on_surface_strokes must be at least 1");
        }
        if self.on_surface_ticks.lo < 1 || self.in_air_short_ticks.lo < 1 {
            return spec_err("tracked stroke durations must be positive");
        }
        if self.in_air_long_events.lo < 0 {
            return spec_err("in_air_long_events cannot be negative");
        }
        if Ratio::from_integer(self.in_air_long_ticks.lo) <= thr {
            return spec_err(format!(
                "in_air_long_ticks must exceed the gap threshold {}",
                ratio::Display(thr)
            ));
        }
        Ok(())
    }

    /// Same distribution with in-air-long durations multiplied by `factor`.
    pub fn with_long_gaps_scaled(&self, factor: i64) -> Self {
        PlanDistribution { in_air_long_ticks: self.in_air_long_ticks.scaled(factor), ..self.clone() }
    }

    pub fn sample_plan(&self, rng: &mut impl Rng) -> Vec<(StrokeClass, Tick)> {
        use StrokeClass::*;
        let gaps = self.in_air_long_events.draw(rng) as usize;
        let strokes = (self.on_surface_strokes.draw(rng) as usize).max(gaps + 1);
        let mut with_gap = vec![false; strokes - 1];
        with_gap[..gaps].fill(true);
        with_gap.shuffle(rng);

        let mut plan = Vec::new();
        let short = |rng: &mut dyn rand::RngCore| (InAirShort, self.in_air_short_ticks.draw(rng));
        let long = |rng: &mut dyn rand::RngCore| (InAirLong, self.in_air_long_ticks.draw(rng));
        if rng.gen_bool(0.5) {
            plan.push(short(rng));
        }
        for (i, gap) in with_gap.iter().copied().chain([false]).enumerate() {
            plan.push((OnSurface, self.on_surface_ticks.draw(rng)));
            if i == strokes - 1 {
                break;
            }
            if !gap {
                plan.push(short(rng));
                continue;
            }
            let (before, after) = match rng.gen_range(0..4) {
                0 => (false, false),
                1 => (true, false),
                2 => (false, true),
                _ => (true, true),
            };
            if before {
                plan.push(short(rng));
            }
            plan.push(long(rng));
            if after {
                plan.push(short(rng));
            }
        }
        if rng.gen_bool(0.5) {
            plan.push(short(rng));
        }
        plan
    }
}

/// Declarative corpus description, read from TOML:
///
/// ```toml
/// database = "SYNTH"
/// tasks = ["letter_l", "spiral"]
/// nominal_period = 2
/// jitter = 1
/// gap_factor = "3"            # optional, default 3
///
/// [cohorts.control]
/// files = 15
/// on_surface_strokes = [4, 8]
/// on_surface_ticks = [40, 120]
/// in_air_short_ticks = [10, 40]
/// in_air_long_events = [1, 4]
/// in_air_long_ticks = [30, 90]
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub database: String,
    pub tasks: Vec<String>,
    pub nominal_period: Tick,
    #[serde(default)]
    pub jitter: Tick,
    #[serde(default = "default_gap_factor", deserialize_with = "de_ratio")]
    pub gap_factor: Ratio,
    pub cohorts: BTreeMap<String, CohortSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct CohortSpec {
    pub files: usize,
    #[serde(flatten)]
    pub plan: PlanDistribution,
}

fn default_gap_factor() -> Ratio {
    Ratio::from_integer(3)
}

fn de_ratio<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Ratio, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(v) => Ok(Ratio::from_integer(v)),
        Raw::Text(s) => ratio::parse_ratio(&s).map_err(serde::de::Error::custom),
    }
}

impl CorpusSpec {
    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        let spec: CorpusSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        check_timing(self.nominal_period, self.jitter, self.gap_factor)?;
        let label_ok = |s: &str| !s.is_empty() && !s.contains([',', '/', '\\', '"']) && s != "." && s != "..";
        if !label_ok(&self.database) {
            return spec_err(format!("unusable database label `{}`", self.database));
        }
        if self.tasks.is_empty() {
            return spec_err("no tasks listed");
        }
        if self.cohorts.is_empty() {
            return spec_err("no cohorts listed");
        }
        for task in &self.tasks {
            if !label_ok(task) {
                return spec_err(format!("unusable task label `{task}`"));
            }
        }
        for (name, c) in &self.cohorts {
            if !label_ok(name) {
                return spec_err(format!("unusable cohort label `{name}`"));
            }
            if c.files < 1 {
                return spec_err(format!("cohort `{name}` needs at least one file"));
            }
            c.plan.validate(self.nominal_period, self.gap_factor)?;
        }
        Ok(())
    }
}

/// One generated file, before it is written.
#[derive(Debug, Clone)]
pub struct GeneratedFile {
    pub record: ManifestRecord,
    pub stream: SampleStream,
    pub truth: GroundTruth,
}

/// Generate every file of a corpus in memory. `record.path` is relative.
pub fn generate_corpus_files(spec: &CorpusSpec, master_seed: u64) -> Result<Vec<GeneratedFile>, SynthError> {
    spec.validate()?;
    let mut seeds = ChaCha8Rng::seed_from_u64(master_seed);
    let mut files = Vec::new();
    for (cohort, cohort_spec) in &spec.cohorts {
        for index in 0..cohort_spec.files {
            let subject = format!("{cohort}_{:03}", index + 1);
            for task in &spec.tasks {
                let seed: u64 = seeds.gen();
                let mut plan_rng = ChaCha8Rng::seed_from_u64(seed);
                let session = SynthSpec {
                    nominal_period: spec.nominal_period,
                    jitter: spec.jitter,
                    gap_factor: spec.gap_factor,
                    plan: cohort_spec.plan.sample_plan(&mut plan_rng),
                    seed: plan_rng.gen(),
                };
                let (stream, truth) = generate_session(&session)?;
                let path: PathBuf = [cohort.as_str(), task.as_str(), &format!("{subject}.svc")].iter().collect();
                let record = ManifestRecord {
                    path,
                    database: spec.database.clone(),
                    task: task.clone(),
                    subject: subject.clone(),
                    cohort: cohort.clone(),
                };
                files.push(GeneratedFile { record, stream, truth });
            }
        }
    }
    Ok(files)
}

/// Write a corpus under `out_dir` (sample files plus `manifest.csv`) and
/// return its manifest with absolute paths.
pub fn generate_corpus(spec: &CorpusSpec, master_seed: u64, out_dir: &Path) -> Result<CorpusManifest, SynthError> {
    let files = generate_corpus_files(spec, master_seed)?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SynthError::Io { path, source }
    };
    let mut manifest = CorpusManifest::default();
    for mut f in files {
        let path = out_dir.join(&f.record.path);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        fs::write(&path, f.stream.to_text()).map_err(io_err(&path))?;
        f.record.path = path;
        manifest.records.push(f.record);
    }
    let manifest_path = out_dir.join("manifest.csv");
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    fs::write(&manifest_path, manifest.to_csv(out_dir)).map_err(io_err(&manifest_path))?;
    Ok(manifest)
}
