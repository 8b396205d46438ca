//! Writes the iteration trace of an inverse run as CSV, ready for plotting
//! cost and weight change against the iteration number.

use invloc::report::trace_csv;
use invloc::{parse_instance, solve_inverse, InverseOptions, Point};

fn main() {
    let inst = parse_instance(include_str!("../data/eighteen.inst")).expect("bundled instance");
    let opts = InverseOptions {
        eps: 1e-3,
        ..Default::default()
    };
    let trace = solve_inverse(&inst, Point::new(3.0, 5.0), &opts).expect("valid input");
    print!("{}", trace_csv(&trace));
    eprintln!("{} after {} iterations", trace.outcome, trace.iterations());
}
