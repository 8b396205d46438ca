//! A small bounded-variable LP solved with the built-in simplex, with the
//! dual values that certify optimality.

use invloc::{solve_lp, LpProblem, LpStatus};

fn main() {
    // minimise -3a - 2b  s.t.  a + b <= 4,  a + 3b <= 6,  a - b = 1,  0 <= a <= 3,  0 <= b <= 5
    let mut lp = LpProblem::new(vec![-3.0, -2.0]);
    lp.add_le(vec![1.0, 1.0], 4.0)
        .add_le(vec![1.0, 3.0], 6.0)
        .add_eq(vec![1.0, -1.0], 1.0)
        .set_bounds(0, 0.0, 3.0)
        .set_bounds(1, 0.0, 5.0);
    let sol = solve_lp(&lp).expect("well-formed problem");
    assert_eq!(sol.status, LpStatus::Optimal);
    println!("x = {:?}", sol.x.as_ref().unwrap());
    println!("primal objective {}", sol.objective);
    println!("dual objective   {}", sol.dual_objective(&lp).unwrap());
    println!("equality duals {:?}, inequality duals {:?}", sol.dual_eq.unwrap(), sol.dual_le.unwrap());
    println!("{} pivots", sol.pivots);
}
