//! Inverse 1-median on generated Ruspini data across L_p norms, run in
//! parallel.

use invloc::{ingest_coordinates, solve_inverse, GeneratorConfig, InverseOptions, Norm, Objective, Point};
use rayon::prelude::*;

fn main() {
    let coords = include_str!("../data/ruspini75.txt");
    let cases: Vec<(u64, f64)> = [1u64, 2, 3].iter().flat_map(|&s| [2.0, 3.0, 5.0, 8.0].map(|p| (s, p))).collect();
    let rows: Vec<String> = cases
        .par_iter()
        .map(|&(seed, p)| {
            let inst = ingest_coordinates(
                coords,
                &GeneratorConfig::with_seed(seed),
                Norm::new(p).unwrap(),
                Objective::Minisum,
            )
            .expect("bundled coordinates");
            let t = solve_inverse(&inst, Point::new(50.0, 50.0), &InverseOptions::default()).expect("valid input");
            format!(
                "seed {seed} p {p}: {} t={} cost={:.4} dw={:.5}",
                t.outcome,
                t.iterations(),
                t.final_cost().unwrap_or(f64::NAN),
                t.last().delta_w
            )
        })
        .collect();
    for r in rows {
        println!("{r}");
    }
}
