// Generate a seeded two-cohort corpus on disk and list its manifest.
//
// `cargo run -p penair --example synth_corpus [OUT_DIR]`

use std::error::Error;
use std::path::PathBuf;

use penair::{generate_corpus, CorpusSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run(None)
}

fn run(arg: Option<String>) -> Result<(), Box<dyn Error>> {
    let spec = CorpusSpec::from_toml(include_str!("data/two_cohorts.toml"))?;
    let scratch = tempfile::tempdir()?;
    let out = arg.map_or_else(|| scratch.path().join("corpus"), PathBuf::from);

    let manifest = generate_corpus(&spec, 2024, &out)?;
    println!("{} recordings under {}", manifest.records.len(), out.display());
    for r in manifest.records.iter().take(4) {
        println!("  {:<10} {:<9} {:<12} {}", r.cohort, r.task, r.subject, r.path.display());
    }
    println!("  ...");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run(std::env::args().nth(1)).expect("synth_corpus example");
}
