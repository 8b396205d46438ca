//! Restricted inverse problems over a finite pool of cuts.
//!
//! Variables are laid out as `[w_hat (n) | p (n) | q (n)]`. Every master
//! shares the objective `sum c+ p + c- q`, the linkage rows
//! `w_hat - p + q = w` and the bounds `0 <= p <= u+`, `0 <= q <= u-`,
//! `w_hat >= 0`; only the cut rows differ between the objectives.

use thiserror::Error;

use crate::distance::{gap_row, DistGapRow};
use crate::model::{Instance, ModificationPlan, Objective, Point};
use crate::simplex::{solve_lp, LpError, LpProblem, LpStatus};

/// A gap above this counts as positive when decomposing a minimax cut.
pub const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MasterError {
    #[error("cut pool is empty")]
    EmptyPool,
    #[error("cut row {k} has {got} coefficients, instance has {expected} sites")]
    RowLength { k: usize, expected: usize, got: usize },
    #[error("master problem reported unbounded; its objective is bounded below by zero")]
    Unbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Points generated so far and the cut rows derived from them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CutPool {
    rows: Vec<DistGapRow>,
    points: Vec<Point>,
}

impl CutPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the cut generated by `point` and returns its index.
    pub fn add_point(&mut self, inst: &Instance, x_bar: Point, point: Point) -> usize {
        let row = gap_row(inst, x_bar, point);
        self.push_row(point, row)
    }

    /// Adds an externally computed row.
    pub fn push_row(&mut self, point: Point, mut row: DistGapRow) -> usize {
        let k = self.rows.len();
        row.k = k;
        self.rows.push(row);
        self.points.push(point);
        k
    }

    pub fn rows(&self) -> &[DistGapRow] {
        &self.rows
    }

    pub fn generated_points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Index of a generated point within Euclidean distance `tol` of `p`.
    pub fn find_near(&self, p: Point, tol: f64) -> Option<usize> {
        self.points.iter().position(|q| q.euclid(&p) <= tol)
    }
}

fn base_problem(inst: &Instance) -> LpProblem {
    let n = inst.len();
    let mut c = vec![0.0; 3 * n];
    for (i, s) in inst.sites.iter().enumerate() {
        c[n + i] = s.c_plus;
        c[2 * n + i] = s.c_minus;
    }
    let mut lp = LpProblem::new(c);
    for (i, s) in inst.sites.iter().enumerate() {
        let mut row = vec![0.0; 3 * n];
        row[i] = 1.0;
        row[n + i] = -1.0;
        row[2 * n + i] = 1.0;
        lp.add_eq(row, s.weight);
        lp.set_bounds(n + i, 0.0, s.u_plus);
        lp.set_bounds(2 * n + i, 0.0, s.u_minus);
    }
    lp
}

fn check_pool(inst: &Instance, pool: &CutPool) -> Result<(), MasterError> {
    if pool.is_empty() {
        return Err(MasterError::EmptyPool);
    }
    for row in pool.rows() {
        if row.delta.len() != inst.len() {
            return Err(MasterError::RowLength {
                k: row.k,
                expected: inst.len(),
                got: row.delta.len(),
            });
        }
    }
    Ok(())
}

/// One linear cut `sum_i delta_i w_hat_i <= 0` per pool row.
pub fn build_minisum_master(inst: &Instance, pool: &CutPool) -> Result<LpProblem, MasterError> {
    check_pool(inst, pool)?;
    let n = inst.len();
    let mut lp = base_problem(inst);
    for row in pool.rows() {
        let mut coeffs = vec![0.0; 3 * n];
        coeffs[..n].copy_from_slice(&row.delta);
        lp.add_le(coeffs, 0.0);
    }
    Ok(lp)
}

/// Sites whose weight must vanish under the minimax cuts of `pool`.
pub fn forced_zero_sites(pool: &CutPool) -> Vec<usize> {
    let mut forced: Vec<usize> = pool
        .rows()
        .iter()
        .flat_map(|r| {
            r.delta
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > GAP_TOL)
                .map(|(i, _)| i)
        })
        .collect();
    forced.sort_unstable();
    forced.dedup();
    forced
}

/// The cut `max_i w_hat_i delta_i <= 0` holds with `w_hat >= 0` exactly when
/// `w_hat_i = 0` for every site with a positive gap, so each such site gets
/// the row `w_hat_i <= 0`.
///
/// This is stronger than requiring the weighted maximum at `x_bar` to be no
/// larger than the one at the generating point, so plans can cost more than
/// the true optimum of the minimax inverse problem.
pub fn build_minimax_master(inst: &Instance, pool: &CutPool) -> Result<LpProblem, MasterError> {
    check_pool(inst, pool)?;
    let n = inst.len();
    let mut lp = base_problem(inst);
    for i in forced_zero_sites(pool) {
        let mut coeffs = vec![0.0; 3 * n];
        coeffs[i] = 1.0;
        lp.add_le(coeffs, 0.0);
    }
    Ok(lp)
}

#[derive(Clone, Debug, PartialEq)]
pub enum MasterOutcome {
    Optimal(ModificationPlan),
    /// The restricted problem has no feasible plan, hence neither has the
    /// full inverse problem.
    Infeasible,
}

/// Builds and solves the master of the instance's objective kind.
pub fn solve_master(inst: &Instance, pool: &CutPool) -> Result<MasterOutcome, MasterError> {
    let lp = match inst.objective {
        Objective::Minisum => build_minisum_master(inst, pool)?,
        Objective::Minimax => build_minimax_master(inst, pool)?,
    };
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok(MasterOutcome::Infeasible),
        LpStatus::Unbounded => Err(MasterError::Unbounded),
        LpStatus::Optimal => {
            let n = inst.len();
            let x = sol.x.expect("optimal solution carries a point");
            Ok(MasterOutcome::Optimal(ModificationPlan::from_amounts(
                inst,
                &x[n..2 * n],
                &x[2 * n..],
            )))
        }
    }
}
