//! Weighted 1-center (minimax) for several L_p norms.

use invloc::forward::{solve, ForwardOptions};
use invloc::{ClientSite, Instance, Norm, Objective, Point};

fn main() {
    let sites = vec![
        ClientSite::fixed(Point::new(0.0, 0.0), 1.0),
        ClientSite::fixed(Point::new(6.0, 1.0), 2.0),
        ClientSite::fixed(Point::new(2.0, 5.0), 1.5),
        ClientSite::fixed(Point::new(5.0, 6.0), 1.0),
    ];
    for p in [1.0, 2.0, 3.0, 8.0, f64::INFINITY] {
        let inst = Instance::new(sites.clone(), Norm::new(p).unwrap(), Objective::Minimax);
        let r = solve(&inst, &inst.weights(), &ForwardOptions::default()).expect("valid instance");
        println!("p = {p:>3}: center {} with max weighted distance {:.6}", r.x_star, r.objective_value);
    }
}
