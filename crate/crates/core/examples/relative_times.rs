// Relative time per stroke class from cohort means, rendered as
// `mean (percent%)` cells.
//
// The inputs are per-task mean times and stroke counts for BIOSECUR-ID.

use std::error::Error;

use penair::report::render_time_table;
use penair::{relative_times, CohortSummary, OutputFormat, PerClass};

const ROWS: [(&str, [f64; 3], [f64; 3]); 5] = [
    ("genuine signature", [2857.6, 715.4, 17.5], [6.62, 5.94, 0.32]),
    ("skilled forgeries", [5447.9, 2373.4, 128.5], [6.58, 6.21, 0.63]),
    ("lower case words", [110445.1, 76454.0, 10644.4], [335.01, 367.16, 33.16]),
    ("numbers", [3677.3, 3071.1, 117.0], [11.66, 11.46, 0.79]),
    ("uppercase words", [73608.8, 47756.2, 14073.4], [313.49, 343.29, 30.81]),
];

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut summaries = Vec::new();
    for (task, times, strokes) in ROWS {
        let mean_times = PerClass(times);
        summaries.push(CohortSummary {
            database: "BIOSECUR-ID".into(),
            task: task.into(),
            cohort: "all".into(),
            n_files: 0,
            n_anomalous: 0,
            mean_times,
            percentages: relative_times(mean_times)?,
            mean_strokes: PerClass(strokes),
        });
    }
    print!("{}", render_time_table(&summaries, OutputFormat::Markdown));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("relative_times example");
}
