//! Forward solvers against independent references.

mod common;

use invloc::forward::{evaluate, solve, solve_minisum_smoothed, weiszfeld, ForwardOptions};
use invloc::{
    eval_minimax, ingest_coordinates, lp_distance, ClientSite, GeneratorConfig, Instance, Norm,
    Objective, Point, SplitMix64,
};
use proptest::prelude::*;

use common::{grid_oracle, instance_from, random_sites, ref_objective, rel_diff};

const PS: [f64; 4] = [2.0, 3.0, 5.0, 8.0];

#[test]
fn minimax_textbook_cases() {
    let opts = ForwardOptions::default();
    let inst = instance_from(
        &[(Point::new(0.0, 0.0), 1.0), (Point::new(3.0, 0.0), 2.0)],
        2.0,
        Objective::Minimax,
    );
    let r = solve(&inst, &inst.weights(), &opts).unwrap();
    assert!(r.x_star.euclid(&Point::new(2.0, 0.0)) < 1e-4, "{}", r.x_star);
    assert!((r.objective_value - 2.0).abs() < 1e-4);

    let circle: Vec<(Point, f64)> = [0.3f64, 2.2, 4.4]
        .iter()
        .map(|t| (Point::new(t.cos(), t.sin()), 1.0))
        .collect();
    let inst = instance_from(&circle, 2.0, Objective::Minimax);
    let r = solve(&inst, &inst.weights(), &opts).unwrap();
    assert!(r.x_star.euclid(&Point::new(0.0, 0.0)) < 1e-4, "{}", r.x_star);
    assert!((r.objective_value - 1.0).abs() < 1e-4);
}

#[test]
fn ruspini_unit_weights_against_grid() {
    let coords = common::data("ruspini75.txt");
    let mut inst = ingest_coordinates(&coords, &GeneratorConfig::default(), Norm::EUCLIDEAN, Objective::Minisum)
        .unwrap();
    for s in &mut inst.sites {
        s.weight = 1.0;
    }
    let sites: Vec<(Point, f64)> = inst.locations().map(|a| (a, 1.0)).collect();
    let r = solve(&inst, &inst.weights(), &ForwardOptions::default()).unwrap();
    let (_, reference) = grid_oracle(&sites, 2.0, Objective::Minisum);
    assert!(rel_diff(r.objective_value, reference) <= 1e-2, "{} vs {reference}", r.objective_value);
}

#[test]
fn weiszfeld_agrees_with_smoothed_descent() {
    let mut rng = SplitMix64::new(11);
    let opts = ForwardOptions::default();
    for _ in 0..25 {
        let inst = instance_from(&random_sites(&mut rng, 6), 2.0, Objective::Minisum);
        let w = inst.weights();
        let a = weiszfeld(&inst, &w, &opts).unwrap().result.objective_value;
        let b = solve_minisum_smoothed(&inst, &w, &opts).unwrap().objective_value;
        assert!(rel_diff(a, b) <= 1e-4, "{a} vs {b}");
    }
}

#[test]
fn zero_weight_sites_are_ignored() {
    let sites = vec![
        ClientSite::fixed(Point::new(0.0, 0.0), 1.0),
        ClientSite::fixed(Point::new(100.0, 100.0), 0.0),
        ClientSite::fixed(Point::new(2.0, 0.0), 1.0),
        ClientSite::fixed(Point::new(1.0, 3.0), 1.0),
    ];
    for objective in [Objective::Minisum, Objective::Minimax] {
        let full = Instance::new(sites.clone(), Norm::EUCLIDEAN, objective);
        let reduced = Instance::new(
            sites.iter().filter(|s| s.weight > 0.0).cloned().collect(),
            Norm::EUCLIDEAN,
            objective,
        );
        let a = solve(&full, &full.weights(), &ForwardOptions::default()).unwrap();
        let b = solve(&reduced, &reduced.weights(), &ForwardOptions::default()).unwrap();
        assert!(rel_diff(a.objective_value, b.objective_value) < 1e-9);
    }
}

fn sites_strategy() -> impl Strategy<Value = Vec<(Point, f64)>> {
    prop::collection::vec(((0.0..10.0, 0.0..10.0), 0.5..10.0), 2..8)
        .prop_map(|v| v.into_iter().map(|((x, y), w)| (Point::new(x, y), w)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimum_survives_axis_probes(sites in sites_strategy(), pi in 0usize..4, minimax in any::<bool>()) {
        let p = PS[pi];
        let objective = if minimax { Objective::Minimax } else { Objective::Minisum };
        let inst = instance_from(&sites, p, objective);
        let w = inst.weights();
        let r = solve(&inst, &w, &ForwardOptions::default()).unwrap();
        let f = r.objective_value;
        let tol = 1e-6 * f.max(1.0);
        for (dx, dy) in [(1e-3, 0.0), (-1e-3, 0.0), (0.0, 1e-3), (0.0, -1e-3)] {
            let probe = Point::new(r.x_star.x + dx, r.x_star.y + dy);
            prop_assert!(f <= evaluate(&inst, probe, &w) + tol);
        }
        let recomputed = ref_objective(&sites, r.x_star, p, objective);
        prop_assert!(rel_diff(f, recomputed) <= 1e-9);
    }

    #[test]
    fn eval_minimax_is_max_of_terms(sites in sites_strategy(), x in 0.0..10.0f64, y in 0.0..10.0f64, pi in 0usize..4) {
        let inst = instance_from(&sites, PS[pi], Objective::Minimax);
        let x = Point::new(x, y);
        let mut direct = 0.0f64;
        for (s, w) in inst.sites.iter().zip(inst.weights()) {
            direct = direct.max(w * lp_distance(x, s.location, inst.norm));
        }
        prop_assert_eq!(eval_minimax(x, &inst.weights(), &inst), direct);
    }
}
