// Six per-file features and the anomaly flag for long untracked pauses.

use std::error::Error;

use penair::segmentation::StrokeClass::*;
use penair::{feature_vector, generate_session, segment, AnomalyPolicy, Feature, SegmentationConfig, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = SegmentationConfig::default();
    let policy = AnomalyPolicy::default();

    let sessions = [
        ("ordinary", vec![(OnSurface, 300), (InAirShort, 80), (InAirLong, 40), (OnSurface, 200)]),
        // the writer stopped for a long time between two strokes
        ("interrupted", vec![(OnSurface, 100), (InAirLong, 2000), (OnSurface, 100)]),
    ];
    for (name, plan) in sessions {
        let (stream, _) = generate_session(&SynthSpec::new(2, 1, plan, 17))?;
        let v = feature_vector(&segment(&stream, &config), &policy, None);
        let cells: Vec<String> = Feature::ALL.iter().map(|f| format!("{f}={}", v.get(*f))).collect();
        println!("{name:<12} {}  anomalous={}", cells.join(" "), v.anomalous);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("feature_vectors example");
}
