//! Test-only oracles, written without the library's rank machinery.

#![allow(dead_code)]

use penair::segmentation::StrokeClass;
use penair::synth::{PlanDistribution, Span};

/// Twice the U statistic of `a`, by counting pairwise wins (ties count half).
pub fn twice_u_by_pairs(a: &[f64], b: &[f64]) -> i64 {
    let mut twice = 0i64;
    for x in a {
        for y in b {
            if x > y {
                twice += 2;
            } else if x == y {
                twice += 1;
            }
        }
    }
    twice
}

/// Two-sided exact p as `(extreme, total)` by visiting every subset of the
/// pooled positions of size `a.len()` (bitmask enumeration).
pub fn brute_force_p(a: &[f64], b: &[f64]) -> (u128, u128) {
    let pool: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pool.len();
    assert!(n <= 24, "brute force is for small pools");
    let n_a = a.len();
    let centre = (n_a * b.len()) as i64;
    let observed = (twice_u_by_pairs(a, b) - centre).abs();
    let (mut extreme, mut total) = (0u128, 0u128);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n_a {
            continue;
        }
        let (ga, gb): (Vec<f64>, Vec<f64>) = {
            let mut ga = Vec::new();
            let mut gb = Vec::new();
            for (i, &v) in pool.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    ga.push(v)
                } else {
                    gb.push(v)
                }
            }
            (ga, gb)
        };
        total += 1;
        if (twice_u_by_pairs(&ga, &gb) - centre).abs() >= observed {
            extreme += 1;
        }
    }
    (extreme, total)
}

/// Mixed plan distribution used by the round-trip suites.
pub fn mixed_plans(max_gaps: i64) -> PlanDistribution {
    PlanDistribution {
        on_surface_strokes: Span::new(1, 8),
        on_surface_ticks: Span::new(4, 150),
        in_air_short_ticks: Span::new(2, 60),
        in_air_long_events: Span::new(0, max_gaps),
        in_air_long_ticks: Span::new(13, 400),
    }
}

/// Status transitions implied by a ground-truth stroke list.
pub fn truth_transitions(classes: &[StrokeClass]) -> usize {
    let tracked: Vec<_> = classes.iter().filter(|c| **c != StrokeClass::InAirLong).collect();
    tracked.windows(2).filter(|w| w[0] != w[1]).count()
}
