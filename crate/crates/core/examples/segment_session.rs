// Sampling period, gap detection and stroke segmentation of one recording.

use std::error::Error;

use penair::report::strokes_table;
use penair::{detect_gaps, nominal_period, parse_session, segment, OutputFormat, ParseOptions, SegmentationConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let parsed = parse_session(include_str!("data/lift.svc"), "lift", ParseOptions::default())?;
    let stream = &parsed.stream;
    let config = SegmentationConfig::default();

    println!("modal sampling period: {} ticks", nominal_period(stream)?);
    for gap in detect_gaps(stream, &config)? {
        println!("timestamp gap after sample {}: {} ticks", gap.index, gap.ticks);
    }

    let seg = segment(stream, &config);
    print!("{}", strokes_table(&seg).render(OutputFormat::Markdown));
    for (class, ticks) in seg.times.iter() {
        println!("{class:>12}: {ticks:>4} ticks in {} stroke(s)", seg.counts[class]);
    }
    assert_eq!(seg.total_time(), stream.last_t() - stream.first_t());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("segment_session example");
}
