//! Every runnable example must keep working.

macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(parse_session, "parse_session.rs");
example!(segment_session, "segment_session.rs");
example!(feature_vectors, "feature_vectors.rs");
example!(relative_times, "relative_times.rs");
example!(mann_whitney, "mann_whitney.rs");
example!(synth_corpus, "synth_corpus.rs");
example!(cohort_pipeline, "cohort_pipeline.rs");
example!(render_svg, "render_svg.rs");

#[test]
fn examples_run() {
    parse_session::run_example().unwrap();
    segment_session::run_example().unwrap();
    feature_vectors::run_example().unwrap();
    relative_times::run_example().unwrap();
    mann_whitney::run_example().unwrap();
    synth_corpus::run_example().unwrap();
    cohort_pipeline::run_example().unwrap();
    render_svg::run_example().unwrap();
}
