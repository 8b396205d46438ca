//! Row-generation driver for the inverse problem.
//!
//! Each round solves the master over the current cut pool, re-solves the
//! forward problem with the master's weights, and adds the cut generated by
//! the new forward optimum. The run stops as soon as one of three optimality
//! certificates holds:
//!
//! * the weights moved by at most `eps` since the previous round;
//! * `x_bar` is within `cert_rel * max(1, f(x_bar))` of the forward optimum
//!   value;
//! * the forward optimum lies within `cert_rel * max(1, extent)` of `x_bar`,
//!   where `extent` is the larger side of the sites' bounding box.

use thiserror::Error;

use crate::forward::{self, ForwardError, ForwardOptions};
use crate::hull::{convex_hull, hull_contains};
use crate::master::{solve_master, CutPool, MasterError, MasterOutcome};
use crate::model::{
    validate_instance, weight_change, Instance, IterationRecord, ModificationPlan, Objective,
    Outcome, Point, Violation,
};

/// Two generated points closer than this produce the same cut.
pub const STALL_TOL: f64 = 1e-9;
/// Boundary tolerance of the hull pre-check, relative to the site extent.
pub const HULL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InverseError {
    #[error("eps must be positive and finite, got {0}")]
    InvalidEps(f64),
    #[error("relative certificate tolerance must be finite and nonnegative, got {0}")]
    InvalidCertificateTolerance(f64),
    #[error("goal point {0} is not finite")]
    InvalidGoal(Point),
    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),
    #[error(transparent)]
    Forward(#[from] ForwardError),
    #[error(transparent)]
    Master(#[from] MasterError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseOptions {
    pub eps: f64,
    /// Relative tolerance of the objective-gap and point-distance
    /// certificates. The default accepts only agreement to working
    /// precision, leaving `eps` on the weight change as the working stop.
    pub cert_rel: f64,
    /// Maximum number of master solves.
    pub max_outer: usize,
    pub forward: ForwardOptions,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions {
            eps: 0.01,
            cert_rel: 1e-12,
            max_outer: 200,
            forward: ForwardOptions::default(),
        }
    }
}

/// Why a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// `x_bar` was optimal for the original weights.
    AlreadyOptimal,
    WeightsStable,
    ObjectiveGap,
    PointReached,
    /// The forward optimum repeated an earlier generated point without any
    /// certificate holding.
    Stalled,
    OutsideHull,
    MasterInfeasible,
    IterationLimit,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::AlreadyOptimal => "already-optimal",
            StopReason::WeightsStable => "weights-stable",
            StopReason::ObjectiveGap => "objective-gap",
            StopReason::PointReached => "point-reached",
            StopReason::Stalled => "stalled",
            StopReason::OutsideHull => "outside-hull",
            StopReason::MasterInfeasible => "master-infeasible",
            StopReason::IterationLimit => "iteration-limit",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full history of one inverse run.
///
/// `records[0]` holds the forward optimum for the original weights; record
/// `k >= 1` holds the master weights of round `k` and their forward optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub x_bar: Point,
    pub records: Vec<IterationRecord>,
    pub outcome: Outcome,
    pub stop: StopReason,
    /// Last master plan; present unless the run was infeasible.
    pub final_plan: Option<ModificationPlan>,
    pub pool: CutPool,
}

impl RunTrace {
    /// Number of master solves.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("a trace holds at least one record")
    }

    pub fn final_cost(&self) -> Option<f64> {
        self.final_plan.as_ref().map(|p| p.cost)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullStatus {
    Inside,
    Outside,
    NotApplicable,
}

/// Classifies `x_bar` against the convex hull of the sites. Only the
/// Euclidean minisum problem is covered: there every optimum lies in the hull.
pub fn hull_precheck(inst: &Instance, x_bar: Point) -> HullStatus {
    if inst.objective != Objective::Minisum || !inst.norm.is_euclidean() || inst.is_empty() {
        return HullStatus::NotApplicable;
    }
    let pts: Vec<Point> = inst.locations().collect();
    if hull_contains(&convex_hull(&pts), x_bar, HULL_TOL * extent(inst)) {
        HullStatus::Inside
    } else {
        HullStatus::Outside
    }
}

/// Larger side of the sites' bounding box, at least 1.
fn extent(inst: &Instance) -> f64 {
    let mut pts = inst.locations();
    let Some(first) = pts.next() else { return 1.0 };
    let (lo, hi) = pts.fold((first, first), |(lo, hi), p| {
        (
            Point::new(lo.x.min(p.x), lo.y.min(p.y)),
            Point::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    });
    (hi.x - lo.x).max(hi.y - lo.y).max(1.0)
}

fn gap_tolerance(rel: f64, f_bar: f64) -> f64 {
    rel * f_bar.max(1.0)
}

/// Runs row generation until a certificate holds, a master turns infeasible,
/// or `opts.max_outer` masters have been solved.
pub fn solve_inverse(
    inst: &Instance,
    x_bar: Point,
    opts: &InverseOptions,
) -> Result<RunTrace, InverseError> {
    if !(opts.eps > 0.0 && opts.eps.is_finite()) {
        return Err(InverseError::InvalidEps(opts.eps));
    }
    if !(opts.cert_rel >= 0.0 && opts.cert_rel.is_finite()) {
        return Err(InverseError::InvalidCertificateTolerance(opts.cert_rel));
    }
    if !x_bar.is_finite() {
        return Err(InverseError::InvalidGoal(x_bar));
    }
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(InverseError::InvalidInstance(violations));
    }

    let w0 = inst.weights();
    let first = forward::solve(inst, &w0, &opts.forward)?;
    let mut pool = CutPool::new();
    let mut trace = RunTrace {
        x_bar,
        records: vec![IterationRecord {
            k: 0,
            x_k: first.x_star,
            weights: w0.clone(),
            cost: 0.0,
            delta_w: 0.0,
        }],
        outcome: Outcome::Converged,
        stop: StopReason::AlreadyOptimal,
        final_plan: Some(ModificationPlan::unchanged(inst)),
        pool: CutPool::new(),
    };

    let f_bar = forward::evaluate(inst, x_bar, &w0);
    if f_bar - first.objective_value <= gap_tolerance(opts.cert_rel, f_bar) {
        pool.add_point(inst, x_bar, first.x_star);
        trace.pool = pool;
        return Ok(trace);
    }

    let zero_reachable = inst.sites.iter().all(|s| s.weight <= s.u_minus);
    if hull_precheck(inst, x_bar) == HullStatus::Outside && !zero_reachable {
        trace.outcome = Outcome::Infeasible;
        trace.stop = StopReason::OutsideHull;
        trace.final_plan = None;
        pool.add_point(inst, x_bar, first.x_star);
        trace.pool = pool;
        return Ok(trace);
    }

    pool.add_point(inst, x_bar, first.x_star);
    let point_tol = opts.cert_rel * extent(inst);
    let mut prev_w = w0;
    for k in 1..=opts.max_outer {
        let plan = match solve_master(inst, &pool)? {
            MasterOutcome::Optimal(plan) => plan,
            MasterOutcome::Infeasible => {
                trace.outcome = Outcome::Infeasible;
                trace.stop = StopReason::MasterInfeasible;
                trace.final_plan = None;
                trace.pool = pool;
                return Ok(trace);
            }
        };
        let fwd = forward::solve(inst, &plan.w_hat, &opts.forward)?;
        let x_k = fwd.x_star;
        let delta_w = weight_change(&plan.w_hat, &prev_w);
        let f_bar_k = forward::evaluate(inst, x_bar, &plan.w_hat);
        let gap = f_bar_k - fwd.objective_value;
        let stalled = pool.find_near(x_k, STALL_TOL).is_some();

        trace.records.push(IterationRecord {
            k,
            x_k,
            weights: plan.w_hat.clone(),
            cost: plan.cost,
            delta_w,
        });
        prev_w = plan.w_hat.clone();
        trace.final_plan = Some(plan);

        let stop = if delta_w <= opts.eps {
            Some((Outcome::Converged, StopReason::WeightsStable))
        } else if gap <= gap_tolerance(opts.cert_rel, f_bar_k) {
            Some((Outcome::Converged, StopReason::ObjectiveGap))
        } else if x_bar.euclid(&x_k) <= point_tol {
            Some((Outcome::Converged, StopReason::PointReached))
        } else if stalled {
            Some((Outcome::IterationLimit, StopReason::Stalled))
        } else {
            None
        };
        pool.add_point(inst, x_bar, x_k);
        if let Some((outcome, reason)) = stop {
            trace.outcome = outcome;
            trace.stop = reason;
            trace.pool = pool;
            return Ok(trace);
        }
    }
    trace.outcome = Outcome::IterationLimit;
    trace.stop = StopReason::IterationLimit;
    trace.pool = pool;
    Ok(trace)
}

/// Result of re-solving the forward problem under a plan's weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    /// `f(x_bar, w_hat) - f(x_fwd, w_hat)`.
    pub gap: f64,
    pub f_bar: f64,
    pub x_fwd: Point,
    /// Euclidean distance from `x_bar` to `x_fwd`.
    pub distance: f64,
    pub pass: bool,
}

/// Checks whether `x_bar` is optimal, up to `tol` in objective, under the
/// plan's weights.
pub fn verify_plan(
    inst: &Instance,
    x_bar: Point,
    plan: &ModificationPlan,
    tol: f64,
    opts: &ForwardOptions,
) -> Result<Verification, InverseError> {
    let fwd = forward::solve(inst, &plan.w_hat, opts)?;
    let f_bar = forward::evaluate(inst, x_bar, &plan.w_hat);
    let gap = f_bar - fwd.objective_value;
    Ok(Verification {
        gap,
        f_bar,
        x_fwd: fwd.x_star,
        distance: x_bar.euclid(&fwd.x_star),
        pass: gap <= tol,
    })
}
