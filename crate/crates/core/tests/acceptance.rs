//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{brute_force_p, mixed_plans};
use penair::features::{feature_vector, relative_times, AnomalyPolicy, Feature};
use penair::ingest::{load_manifest_file, parse_session, ParseOptions};
use penair::pipeline::extract_corpus;
use penair::report::{self, time_cell};
use penair::segmentation::{segment, PerClass, SegmentationConfig, StrokeClass};
use penair::stats::{approx_p, compare_tasks, exact_p, mann_whitney_u};
use penair::synth::{generate_corpus, generate_session, CorpusSpec, SynthSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(id: &str, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut outcome = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            outcome.pass = false;
            outcome.detail.push_str(&format!("; exceeded time limit {limit:?}"));
        }
    }
    println!(
        "[{}] {id} {title}: {} ({:.2?})",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed
    );
    outcome.pass
}

/// BIOSECUR-ID cohort mean times per task and their reference percentages,
/// as shown in parentheses next to each mean.
const REFERENCE_MEANS: [(&str, [f64; 3], [f64; 3]); 5] = [
    ("genuine signature", [2857.6, 715.4, 17.5], [79.6, 19.9, 0.5]),
    ("skilled forgeries", [5447.9, 2373.4, 128.5], [68.5, 29.9, 1.6]),
    ("lower case words", [110445.1, 76454.0, 10644.4], [55.9, 38.7, 5.4]),
    ("numbers", [3677.3, 3071.1, 117.0], [53.6, 44.7, 1.7]),
    ("uppercase words", [73608.8, 47756.2, 14073.4], [54.4, 35.3, 10.4]),
];

fn relative_time_rounding() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    let mut bad = Vec::new();
    for (task, times, expected_pct) in REFERENCE_MEANS {
        let pct = relative_times(PerClass(times)).expect("non-zero totals");
        for k in 0..3 {
            let shown: f64 = format!("{:.1}", pct.0[k]).parse().unwrap();
            let err = (shown - expected_pct[k]).abs();
            worst = worst.max(err);
            cells += 1;
            if err > 0.1 + 1e-9 {
                bad.push(format!("{task}[{k}] {shown} vs {}", expected_pct[k]));
            }
        }
    }
    let first = time_cell(2857.6, relative_times(PerClass(REFERENCE_MEANS[0].1)).unwrap().0[0]);
    let pass = bad.is_empty() && cells == 15 && first == "2857.6 (79.6%)";
    Outcome { pass, detail: format!("{cells} cells, max |error| {worst:.3} pp, first cell `{first}` {bad:?}") }
}

fn exact_vs_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let total = rng.gen_range(2..=10);
        let n_a = rng.gen_range(1..total);
        let mut draw = |n: usize| (0..n).map(|_| f64::from(rng.gen_range(1u8..=5))).collect::<Vec<_>>();
        let a = draw(n_a);
        let mut b = draw(total - n_a);
        let mut pool: Vec<f64> = a.iter().chain(&b).copied().collect();
        pool.sort_by(f64::total_cmp);
        if pool.windows(2).all(|w| w[0] != w[1]) {
            *b.last_mut().unwrap() = a[0];
        }
        let p = exact_p(&a, &b, 20).unwrap();
        if (p.extreme, p.total) != brute_force_p(&a, &b) {
            mismatches += 1;
        }
    }
    Outcome { pass: mismatches == 0, detail: format!("1000 tied pairs, {mismatches} mismatches") }
}

fn approximation_quality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let shift = rng.gen_range(0.0..40.0);
        let a: Vec<f64> = (0..15).map(|_| rng.gen_range(0.0..100.0)).collect();
        let b: Vec<f64> = (0..15).map(|_| rng.gen_range(shift..100.0 + shift)).collect();
        let u = mann_whitney_u(&a, &b).unwrap();
        assert!(u.tie_profile.is_empty());
        let exact = exact_p(&a, &b, 30).unwrap().value();
        worst = worst.max((approx_p(&u) - exact).abs());
    }
    Outcome { pass: worst <= 0.02, detail: format!("200 pairs of 15 vs 15, max |approx - exact| = {worst:.5}") }
}

fn round_trip_and_tiling() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut errors, mut tiling_errors, mut gaps_seen) = (0, 0, [false; 11]);
    let cfg = SegmentationConfig::default();
    for i in 0..1000 {
        let max_gaps = (i % 11) as i64;
        let mut plan_rng = ChaCha8Rng::seed_from_u64(rng.gen());
        let period = rng.gen_range(2..=4);
        let spec = SynthSpec::new(period, period - 1, mixed_plans(max_gaps).sample_plan(&mut plan_rng), rng.gen());
        let (stream, truth) = generate_session(&spec).unwrap();
        let parsed = parse_session(&stream.to_text(), "ac4", ParseOptions::default()).unwrap();
        let seg = segment(&parsed.stream, &cfg);
        if seg.times != truth.times || seg.counts != truth.counts {
            errors += 1;
        }
        if seg.times.0.iter().sum::<i64>() != parsed.stream.last_t() - parsed.stream.first_t() {
            tiling_errors += 1;
        }
        gaps_seen[truth.counts[StrokeClass::InAirLong].min(10)] = true;
    }
    let coverage = gaps_seen.iter().filter(|s| **s).count();
    (
        Outcome {
            pass: errors == 0 && coverage == 11,
            detail: format!("1000 sessions, gap counts 0..=10 covered: {coverage}/11, {errors} mismatches"),
        },
        Outcome { pass: tiling_errors == 0, detail: format!("1000 sessions, {tiling_errors} tiling violations") },
    )
}

fn anomaly_boundary() -> Outcome {
    use StrokeClass::*;
    let policy = AnomalyPolicy::default();
    let cfg = SegmentationConfig::default();
    let mut flags = Vec::new();
    // total 1000 ticks; the gap adds one 2-tick step to its planned duration
    for (long_total, a, b) in [(690, 156, 154), (700, 150, 150), (710, 146, 144)] {
        let plan = vec![(OnSurface, a), (InAirLong, long_total - 2), (OnSurface, b)];
        let (stream, _) = generate_session(&SynthSpec::new(2, 0, plan, 6)).unwrap();
        let seg = segment(&stream, &cfg);
        assert_eq!((seg.total_time(), seg.times[InAirLong]), (1000, long_total));
        flags.push(feature_vector(&seg, &policy, None).anomalous);
    }
    Outcome { pass: flags == [false, false, true], detail: format!("fractions 0.69/0.70/0.71 -> {flags:?}") }
}

const BASE_SPEC: &str = r#"
database = "SYNTH"
tasks = ["letter_l"]
nominal_period = 2
jitter = 1

[cohorts.control]
files = 15
on_surface_strokes = [4, 8]
on_surface_ticks = [40, 120]
in_air_short_ticks = [10, 40]
in_air_long_events = [2, 4]
in_air_long_ticks = [40, 120]
"#;

fn two_cohort_spec(long_scale: i64) -> CorpusSpec {
    let mut spec = CorpusSpec::from_toml(BASE_SPEC).unwrap();
    let mut patient = spec.cohorts["control"].clone();
    patient.plan = patient.plan.with_long_gaps_scaled(long_scale);
    spec.cohorts.insert("patient".into(), patient);
    spec
}

fn t_al_p(spec: &CorpusSpec, seed: u64, dir: &Path) -> f64 {
    let manifest = generate_corpus(spec, seed, dir).unwrap();
    let features = extract_corpus(
        &manifest,
        &SegmentationConfig::default(),
        &AnomalyPolicy::default(),
        ParseOptions::default(),
    )
    .unwrap();
    let results = compare_tasks(&features.vectors, "control", "patient", 20).unwrap();
    results.iter().find(|r| r.feature == Feature::TimeInAirLong).unwrap().p
}

fn shift_detection() -> Outcome {
    let shifted = two_cohort_spec(3);
    let control = two_cohort_spec(1);
    let (mut detected, mut quiet) = (0, 0);
    let mut worst_shift: f64 = 0.0;
    for seed in 1..=20u64 {
        let dir = tempfile::tempdir().unwrap();
        let p = t_al_p(&shifted, seed, &dir.path().join("shift"));
        worst_shift = worst_shift.max(p);
        detected += usize::from(p < 0.05);
        quiet += usize::from(t_al_p(&control, seed, &dir.path().join("null")) >= 0.05);
    }
    Outcome {
        pass: detected >= 18 && quiet >= 18,
        detail: format!(
            "shifted p<0.05 in {detected}/20 (max p {worst_shift:.2e}), no-shift p>=0.05 in {quiet}/20"
        ),
    }
}

fn rank_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = 0;
    for _ in 0..200 {
        let n_a = rng.gen_range(1..=10);
        let n_b = rng.gen_range(1..=10);
        let mut draw = |n| (0..n).map(|_| f64::from(rng.gen_range(0u16..30))).collect::<Vec<_>>();
        let a = draw(n_a);
        let b = draw(n_b);
        let f = |v: &[f64]| v.iter().map(|x| 2.0 * x + 1.0).collect::<Vec<_>>();
        if exact_p(&a, &b, 20).unwrap() != exact_p(&f(&a), &f(&b), 20).unwrap() {
            failures += 1;
        }
    }
    Outcome { pass: failures == 0, detail: format!("200 cases, {failures} changed") }
}

fn cli_output(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_penair")).args(args).output().expect("penair runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = two_cohort_spec(3);
    spec.tasks.push("spiral".into());
    let manifest_a = generate_corpus(&spec, 99, &dir.path().join("a")).unwrap();
    generate_corpus(&spec, 99, &dir.path().join("b")).unwrap();
    let same_corpus = manifest_a
        .records
        .iter()
        .all(|r| {
            let twin = dir.path().join("b").join(r.path.strip_prefix(dir.path().join("a")).unwrap());
            std::fs::read(&r.path).unwrap() == std::fs::read(twin).unwrap()
        });
    let manifest = dir.path().join("a/manifest.csv");
    let m = manifest.to_str().unwrap();
    let mut identical = 0;
    let runs = [
        vec!["aggregate", m],
        vec!["aggregate", m, "--format", "md"],
        vec!["compare", m],
        vec!["compare", m, "--format", "md"],
    ];
    for args in &runs {
        if cli_output(args) == cli_output(args) {
            identical += 1;
        }
    }
    let records = load_manifest_file(&manifest).unwrap().records.len();
    let md = String::from_utf8(cli_output(&runs[1])).unwrap();
    let consistent = md.lines().skip(2).all(|line| {
        // every "time (pct%)" triple re-derives its own percentages
        let cells: Vec<&str> = line.split(" | ").collect();
        let parsed: Vec<(f64, f64)> = cells[5..8]
            .iter()
            .map(|c| {
                let (t, p) = c.split_once(" (").unwrap();
                (t.parse().unwrap(), p.trim_end_matches("%)").parse().unwrap())
            })
            .collect();
        let pct = relative_times(PerClass([parsed[0].0, parsed[1].0, parsed[2].0])).unwrap();
        (0..3).all(|k| format!("{:.1}", pct.0[k]).parse::<f64>().unwrap() == parsed[k].1)
    });
    let _ = report::OutputFormat::Csv;
    Outcome {
        pass: identical == runs.len() && same_corpus && consistent,
        detail: format!(
            "{records} recordings; {identical}/{} command outputs byte-identical; corpus regenerated identically: {same_corpus}; rendered percentages self-consistent: {consistent}",
            runs.len()
        ),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = vec![
        check("AC1", "relative-time percentages of reference means", Some(secs(1)), relative_time_rounding),
        check("AC2", "exact test equals brute-force enumeration", Some(secs(30)), exact_vs_brute_force),
        check("AC3", "normal approximation within 0.02 of exact", Some(secs(120)), approximation_quality),
    ];
    let start = Instant::now();
    let (ac4, ac5) = round_trip_and_tiling();
    let elapsed = start.elapsed();
    results.push(check("AC4", "segmentation round-trip against ground truth", Some(secs(30)), || Outcome {
        pass: ac4.pass && elapsed <= secs(30),
        detail: format!("{} (generation+segmentation {elapsed:.2?})", ac4.detail),
    }));
    results.push(check("AC5", "tiling invariant", None, || ac5));
    results.push(check("AC6", "anomaly boundary at 70%", None, anomaly_boundary));
    results.push(check("AC7", "end-to-end shift detection", Some(secs(60)), shift_detection));
    results.push(check("AC8", "exact p invariant under x -> 2x+1", None, rank_invariance));
    results.push(check("AC9", "deterministic aggregate/compare output", None, determinism));

    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
