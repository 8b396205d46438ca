//! Inverse single-facility location with variable weights.
//!
//! Given client sites with weights, a goal point `x_bar`, and per-site
//! budgets and unit costs for raising or lowering each weight, find the
//! cheapest weight modification that makes `x_bar` an optimal facility
//! location. The solver alternates between a forward location problem
//! (where is the facility optimal under the current weights?) and a
//! restricted master problem over the points found so far, adding one cut per
//! round until the weights stop moving.
//!
//! Both the weighted-sum (1-median) and weighted-maximum (1-center)
//! objectives are supported under any L_p norm with `p >= 1`.

pub mod cli;
pub mod distance;
pub mod forward;
pub mod hull;
pub mod ingest;
pub mod master;
pub mod model;
pub mod report;
pub mod rowgen;
pub mod simplex;

pub use distance::{gap_row, lp_distance, lp_distance_gradient, DistGapRow, DistanceError};
pub use forward::{
    eval_minimax, eval_minisum, solve_minimax, solve_minisum, ForwardError, ForwardOptions,
    ForwardResult,
};
pub use model::{
    validate_instance, ClientSite, Instance, IterationRecord, ModificationPlan, Norm, Objective,
    Outcome, Point, Violation,
};
pub use simplex::{solve_lp, LpError, LpProblem, LpSolution, LpStatus};
pub use master::{solve_master, CutPool, MasterError, MasterOutcome};
pub use rowgen::{
    hull_precheck, solve_inverse, verify_plan, HullStatus, InverseError, InverseOptions, RunTrace,
    StopReason, Verification,
};
pub use ingest::{
    ingest_coordinates, next_uniform, parse_instance, write_instance, GeneratorConfig, ParseError,
    SplitMix64,
};
