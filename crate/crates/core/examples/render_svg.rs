// Plot on-surface and in-air trajectories of a recording as SVG.
//
// `cargo run -p penair --example render_svg > lift.svg`

use std::error::Error;

use penair::report::render_trajectories;
use penair::segmentation::StrokeClass::*;
use penair::{generate_session, segment, SegmentationConfig, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let plan = vec![
        (InAirShort, 30),
        (OnSurface, 120),
        (InAirShort, 40),
        (OnSurface, 90),
        (InAirLong, 60),
        (InAirShort, 20),
        (OnSurface, 150),
    ];
    let (stream, _) = generate_session(&SynthSpec::new(2, 1, plan, 3))?;
    let seg = segment(&stream, &SegmentationConfig::default());
    let svg = render_trajectories(&stream, &seg);
    print!("{svg}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("render_svg example");
}
