//! Inverse 1-median on the four-site example: find the cheapest weight
//! change that makes the origin optimal.

use invloc::{parse_instance, solve_inverse, InverseOptions, Point};

fn main() {
    let inst = parse_instance(include_str!("../data/example1.inst")).expect("bundled instance");
    let trace = solve_inverse(&inst, Point::new(0.0, 0.0), &InverseOptions::default()).expect("valid input");
    for r in &trace.records {
        println!("k={:>2}  x=({:+.4}, {:+.4})  cost={:.4}  dw={:.4}", r.k, r.x_k.x, r.x_k.y, r.cost, r.delta_w);
    }
    let plan = trace.final_plan.clone().expect("converged");
    println!("{} ({}) after {} iterations", trace.outcome, trace.stop, trace.iterations());
    println!("new weights {:?}", plan.w_hat);
    println!("cost {:.5}", plan.cost);
}
