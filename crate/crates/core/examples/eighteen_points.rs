//! Inverse 1-median on the 18-site instance for several goal points.

use std::time::Instant;

use invloc::{parse_instance, solve_inverse, InverseOptions, Point};

fn main() {
    let inst = parse_instance(include_str!("../data/eighteen.inst")).expect("bundled instance");
    for (x, y) in [(3.0, 5.0), (2.0, 2.0), (7.0, 7.0)] {
        let start = Instant::now();
        let trace = solve_inverse(&inst, Point::new(x, y), &InverseOptions::default()).expect("valid input");
        println!(
            "x_bar = ({x}, {y}): {} in {} iterations, cost {:.5}, final x {} ({:.0?})",
            trace.outcome,
            trace.iterations(),
            trace.final_cost().unwrap_or(f64::NAN),
            trace.last().x_k,
            start.elapsed()
        );
    }
}
