//! Weighted 1-median under the Euclidean norm with the Weiszfeld iteration,
//! printing the objective after every step.

use invloc::forward::{weiszfeld, ForwardOptions};
use invloc::{ClientSite, Instance, Norm, Objective, Point};

fn main() {
    let sites = vec![
        ClientSite::fixed(Point::new(0.0, 0.0), 3.0),
        ClientSite::fixed(Point::new(10.0, 0.0), 2.0),
        ClientSite::fixed(Point::new(4.0, 8.0), 2.0),
        ClientSite::fixed(Point::new(9.0, 7.0), 1.0),
    ];
    let inst = Instance::new(sites, Norm::EUCLIDEAN, Objective::Minisum);
    let run = weiszfeld(&inst, &inst.weights(), &ForwardOptions::default()).expect("positive weights");
    for (k, f) in run.objective_path.iter().enumerate() {
        println!("step {k:>3}: f = {f:.9}");
    }
    let r = run.result;
    println!("median {} with f = {:.9} after {} iterations", r.x_star, r.objective_value, r.iterations);
}
