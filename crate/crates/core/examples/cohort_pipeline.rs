// End to end: corpus -> per-file features -> cohort table -> U tests.

use std::error::Error;

use penair::pipeline::extract_corpus;
use penair::report::{render_p_table, render_time_table};
use penair::stats::compare_tasks;
use penair::{features::aggregate_all, generate_corpus, CorpusSpec, OutputFormat, ParseOptions, RunConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let spec = CorpusSpec::from_toml(include_str!("data/two_cohorts.toml"))?;
    let manifest = generate_corpus(&spec, 7, dir.path())?;

    let config = RunConfig::default();
    let corpus = extract_corpus(&manifest, &config.segmentation, &config.anomaly, ParseOptions::default())?;
    let anomalous = corpus.vectors.iter().filter(|v| v.anomalous).count();
    println!("{} recordings, {anomalous} flagged anomalous\n", corpus.vectors.len());

    print!("{}", render_time_table(&aggregate_all(&corpus.vectors)?, OutputFormat::Markdown));
    println!();
    let results = compare_tasks(&corpus.vectors, "control", "patient", config.exact_limit)?;
    print!("{}", render_p_table(&results, OutputFormat::Markdown));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("cohort_pipeline example");
}
