//! Inverse 1-center. Every site that is closer to some forward optimum than
//! to the goal must end with zero weight, so the outcome hinges on the
//! reduction budgets: with full budgets the run converges, while a fixed
//! weight on a forced site makes the master infeasible.

use invloc::{solve_inverse, ClientSite, Instance, InverseOptions, Norm, Objective, Point};

fn sites(triangle_budget: f64) -> Vec<ClientSite> {
    let site = |x: f64, y: f64, w: f64, u_minus: f64| ClientSite {
        location: Point::new(x, y),
        weight: w,
        u_minus,
        u_plus: 2.0,
        c_minus: 1.0,
        c_plus: 1.0,
    };
    vec![
        site(0.0, 0.0, 1.0, triangle_budget),
        site(4.0, 0.0, 1.0, triangle_budget),
        site(2.0, 3.4641016151377544, 1.0, triangle_budget),
        site(5.0, 5.0, 1.5, 1.5),
    ]
}

fn main() {
    // circumcentre of the triangle; the outlier pulls the center away
    let x_bar = Point::new(2.0, 1.1547005383792515);
    for budget in [1.0, 0.0] {
        let inst = Instance::new(sites(budget), Norm::EUCLIDEAN, Objective::Minimax);
        let trace = solve_inverse(&inst, x_bar, &InverseOptions::default()).expect("valid input");
        println!("triangle reduction budget {budget}:");
        println!("  {} ({}) after {} iterations", trace.outcome, trace.stop, trace.iterations());
        println!("  forward optima {:?}", trace.pool.generated_points());
        match &trace.final_plan {
            Some(plan) => println!("  new weights {:?} at cost {:.4}", plan.w_hat, plan.cost),
            None => println!("  no plan"),
        }
    }
}
