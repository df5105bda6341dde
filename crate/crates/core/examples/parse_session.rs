// Parse a digitizer sample file and print its validation report.
//
// `cargo run -p penair --example parse_session [FILE]`

use std::error::Error;

use penair::{parse_session, validate_stream, ParseOptions};

const SAMPLE: &str = include_str!("data/lift.svc");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run(None)
}

fn run(arg: Option<String>) -> Result<(), Box<dyn Error>> {
    let path = arg;
    let text = match &path {
        Some(p) => std::fs::read_to_string(p)?,
        None => SAMPLE.to_string(),
    };
    let source = path.as_deref().unwrap_or("data/lift.svc");
    let parsed = parse_session(&text, source, ParseOptions::default())?;
    for w in &parsed.warnings {
        eprintln!("WARN {source}:{} {w}", w.line);
    }

    let report = validate_stream(&parsed.stream);
    println!("source            {source}");
    println!("samples           {}", report.samples);
    println!("time span         {} .. {} ({} ticks)", report.first_t, report.last_t, report.span);
    println!("status changes    {}", report.transitions);
    println!("pen-down samples  {}", report.on_surface_samples);
    println!("pressure range    {} .. {}", report.min_pressure, report.max_pressure);

    // duplicate timestamps are dropped with a warning rather than failing the file
    let glitchy = "0 0 10 1\n1 1 12 1\n1 1 12 1\n2 2 14 0\n";
    let parsed = parse_session(glitchy, "glitchy", ParseOptions::default())?;
    println!("glitchy input: {} samples, {} duplicate(s)", parsed.stream.len(), parsed.duplicate_count());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run(std::env::args().nth(1)).expect("parse_session example");
}
