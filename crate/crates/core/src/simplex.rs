//! Dense two-phase primal simplex with explicit variable bounds.
//!
//! Problems have the form
//!
//! ```text
//! minimize    c^T x
//! subject to  A_eq x  = b_eq
//!             A_le x <= b_le
//!             lower <= x <= upper
//! ```
//!
//! with finite lower bounds and possibly infinite upper bounds. Nonbasic
//! variables rest at either bound. Pricing is Dantzig's largest reduced cost,
//! switching to Bland's rule after a long run of degenerate pivots.

use thiserror::Error;

pub const FEASIBILITY_TOL: f64 = 1e-8;
pub const OPTIMALITY_TOL: f64 = 1e-9;
pub const PIVOT_TOL: f64 = 1e-10;

const MAX_PIVOTS: usize = 100_000;
/// Primal infeasibility tolerated by the ratio test in exchange for a
/// larger pivot element.
const HARRIS_TOL: f64 = 1e-9;
/// Relative row residual of the returned point beyond which the solve is
/// reported as unstable instead of optimal.
const UNSTABLE_TOL: f64 = 1e-6;
/// Pivots between rebuilds of the tableau from the original rows.
const REFACTOR_EVERY: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("{what} has length {got}, expected {expected}")]
    Dimension {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("variable {index}: bounds [{lower}, {upper}] are invalid")]
    Bounds { index: usize, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("simplex exceeded {0} pivots")]
    PivotLimit(usize),
    #[error("final point violates row {row} by {residual:e}; the basis is numerically unstable")]
    Unstable { row: usize, residual: f64 },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct LpProblem {
    pub c: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_le: Vec<Vec<f64>>,
    pub b_le: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Problem with objective `c`, no constraints, and bounds `[0, inf)`.
    pub fn new(c: Vec<f64>) -> Self {
        let n = c.len();
        LpProblem {
            c,
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.a_eq.push(row);
        self.b_eq.push(rhs);
        self
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.a_le.push(row);
        self.b_le.push(rhs);
        self
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.c.len();
        let dim = |what: &str, expected, got| {
            if expected == got {
                Ok(())
            } else {
                Err(LpError::Dimension {
                    what: what.to_string(),
                    expected,
                    got,
                })
            }
        };
        dim("lower", n, self.lower.len())?;
        dim("upper", n, self.upper.len())?;
        dim("b_eq", self.a_eq.len(), self.b_eq.len())?;
        dim("b_le", self.a_le.len(), self.b_le.len())?;
        for (i, row) in self.a_eq.iter().enumerate() {
            dim(&format!("a_eq row {i}"), n, row.len())?;
        }
        for (i, row) in self.a_le.iter().enumerate() {
            dim(&format!("a_le row {i}"), n, row.len())?;
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if !l.is_finite() || u.is_nan() || u < l || u == f64::NEG_INFINITY {
                return Err(LpError::Bounds {
                    index: j,
                    lower: l,
                    upper: u,
                });
            }
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.c) {
            return Err(LpError::NonFinite("c".into()));
        }
        if !finite(&self.b_eq) || !self.a_eq.iter().all(|r| finite(r)) {
            return Err(LpError::NonFinite("equality constraints".into()));
        }
        if !finite(&self.b_le) || !self.a_le.iter().all(|r| finite(r)) {
            return Err(LpError::NonFinite("inequality constraints".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver result. `x`, the duals and the reduced costs are present iff the
/// status is `Optimal`.
///
/// Sign convention: the duals satisfy `c - A_eq^T y_eq - A_le^T y_le = r`,
/// with `y_le <= 0` and `r_j > 0` only at a lower bound, `r_j < 0` only at an
/// upper bound.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Option<Vec<f64>>,
    pub dual_eq: Option<Vec<f64>>,
    pub dual_le: Option<Vec<f64>>,
    pub reduced_costs: Option<Vec<f64>>,
    pub pivots: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        let objective = match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        };
        LpSolution {
            status,
            objective,
            x: None,
            dual_eq: None,
            dual_le: None,
            reduced_costs: None,
            pivots,
        }
    }

    /// `b^T y` plus the bound terms of the reduced costs.
    pub fn dual_objective(&self, prob: &LpProblem) -> Option<f64> {
        let (ye, yl, r) = (
            self.dual_eq.as_ref()?,
            self.dual_le.as_ref()?,
            self.reduced_costs.as_ref()?,
        );
        let mut v: f64 = prob.b_eq.iter().zip(ye).map(|(b, y)| b * y).sum::<f64>()
            + prob.b_le.iter().zip(yl).map(|(b, y)| b * y).sum::<f64>();
        for (j, &rj) in r.iter().enumerate() {
            if rj > 0.0 {
                v += rj * prob.lower[j];
            } else if rj < 0.0 && prob.upper[j].is_finite() {
                v += rj * prob.upper[j];
            }
        }
        Some(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    m: usize,
    cols: usize,
    /// Row-major `m x cols`, holding `B^-1 A`.
    t: Vec<f64>,
    /// Value of the basic variable of each row.
    xb: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    /// Upper bounds of the shifted variables (lower bounds are all zero).
    ub: Vec<f64>,
    kind: Vec<Kind>,
    pivots: usize,
    /// Sign-normalized constraint matrix and right-hand side, kept for
    /// refactorization.
    a0: Vec<f64>,
    b0: Vec<f64>,
    since_refactor: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.cols + j]
    }

    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => 0.0,
            VarState::AtUpper => self.ub[j],
            VarState::Basic => {
                let r = self.basis.iter().position(|&b| b == j).expect("basic var has a row");
                self.xb[r]
            }
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.cols..(i + 1) * self.cols];
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, q: usize, d: &mut [f64]) {
        let cols = self.cols;
        let piv = self.at(r, q);
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[q] = 1.0;
        }
        let pivot_row: Vec<f64> = self.t[r * cols..(r + 1) * cols].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            row[q] = 0.0;
        }
        let dq = d[q];
        if dq != 0.0 {
            for (dj, p) in d.iter_mut().zip(&pivot_row) {
                *dj -= dq * p;
            }
            d[q] = 0.0;
        }
        self.pivots += 1;
        self.since_refactor += 1;
    }

    /// Recomputes `B^-1 A` and the basic values from the original rows.
    /// Returns false, leaving the tableau untouched, if the basis matrix is
    /// numerically singular.
    fn refactor(&mut self) -> bool {
        let (m, cols) = (self.m, self.cols);
        // Gauss-Jordan on [B | I] with partial pivoting
        let w = 2 * m;
        let mut aug = vec![0.0; m * w];
        for i in 0..m {
            for (k, &b) in self.basis.iter().enumerate() {
                aug[i * w + k] = self.a0[i * cols + b];
            }
            aug[i * w + m + i] = 1.0;
        }
        for k in 0..m {
            let (pr, pv) = (k..m)
                .map(|i| (i, aug[i * w + k].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if pv < 1e-12 {
                return false;
            }
            if pr != k {
                for j in 0..w {
                    aug.swap(k * w + j, pr * w + j);
                }
            }
            let piv = aug[k * w + k];
            for j in 0..w {
                aug[k * w + j] /= piv;
            }
            let prow: Vec<f64> = aug[k * w..(k + 1) * w].to_vec();
            for i in 0..m {
                let f = aug[i * w + k];
                if i != k && f != 0.0 {
                    for (v, p) in aug[i * w..(i + 1) * w].iter_mut().zip(&prow) {
                        *v -= f * p;
                    }
                }
            }
        }
        let binv = |r: usize, i: usize| aug[r * w + m + i];
        let mut rhs = self.b0.clone();
        for j in 0..cols {
            if self.state[j] == VarState::AtUpper {
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r -= self.a0[i * cols + j] * self.ub[j];
                }
            }
        }
        let mut t = vec![0.0; m * cols];
        for r in 0..m {
            for i in 0..m {
                let f = binv(r, i);
                if f != 0.0 {
                    let src = &self.a0[i * cols..(i + 1) * cols];
                    for (v, a) in t[r * cols..(r + 1) * cols].iter_mut().zip(src) {
                        *v += f * a;
                    }
                }
            }
            self.xb[r] = (0..m).map(|i| binv(r, i) * rhs[i]).sum();
        }
        for (r, &b) in self.basis.iter().enumerate() {
            for i in 0..m {
                t[i * cols + b] = if i == r { 1.0 } else { 0.0 };
            }
        }
        self.t = t;
        self.since_refactor = 0;
        true
    }

    /// Runs primal simplex iterations for `cost`, never letting variables in
    /// `frozen` enter the basis.
    fn optimize(&mut self, cost: &[f64], frozen: &[bool]) -> Result<PhaseEnd, LpError> {
        let mut d = self.reduced_costs(cost);
        let mut stalled = 0usize;
        let stall_limit = 3 * (self.m + self.cols);
        let mut bland = false;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::PivotLimit(MAX_PIVOTS));
            }
            // entering variable
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.cols {
                if frozen[j] || self.ub[j] == 0.0 {
                    continue;
                }
                let score = match self.state[j] {
                    VarState::Basic => continue,
                    VarState::AtLower if d[j] < -OPTIMALITY_TOL => -d[j],
                    VarState::AtUpper if d[j] > OPTIMALITY_TOL => d[j],
                    _ => continue,
                };
                match entering {
                    None => entering = Some((j, score)),
                    Some((_, best)) if !bland && score > best => entering = Some((j, score)),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some((q, _)) = entering else {
                // confirm optimality on a fresh factorization
                if self.since_refactor > 0 && self.refactor() {
                    d = self.reduced_costs(cost);
                    continue;
                }
                return Ok(PhaseEnd::Optimal);
            };
            let sigma = if self.state[q] == VarState::AtLower { 1.0 } else { -1.0 };

            // Harris ratio test: bound the step with relaxed limits, then
            // take the largest pivot among rows blocking within that bound.
            let limits: Vec<Option<(f64, f64, bool)>> = (0..self.m)
                .map(|i| {
                    let a = sigma * self.at(i, q);
                    let b = self.basis[i];
                    if a > PIVOT_TOL {
                        Some((self.xb[i].max(0.0) / a, a, false))
                    } else if a < -PIVOT_TOL && self.ub[b].is_finite() {
                        Some(((self.ub[b] - self.xb[i]).max(0.0) / -a, -a, true))
                    } else {
                        None
                    }
                })
                .collect();
            let relaxed = limits
                .iter()
                .flatten()
                .map(|&(lim, a, _)| lim + HARRIS_TOL / a)
                .fold(f64::INFINITY, f64::min);
            let mut leave: Option<(usize, bool, f64)> = None; // (row, to_upper, |alpha|)
            for (i, l) in limits.iter().enumerate() {
                let Some((lim, a, to_upper)) = *l else { continue };
                if lim > relaxed {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((lr, _, la)) => {
                        if bland {
                            self.basis[i] < self.basis[lr]
                        } else {
                            a > la
                        }
                    }
                };
                if better {
                    leave = Some((i, to_upper, a));
                }
            }
            let row_theta = leave.map_or(f64::INFINITY, |(r, _, _)| limits[r].unwrap().0);
            let theta = if self.ub[q] <= row_theta {
                leave = None;
                self.ub[q]
            } else {
                row_theta
            };
            if theta.is_infinite() {
                return Ok(PhaseEnd::Unbounded);
            }

            let gain = theta * d[q].abs();
            for i in 0..self.m {
                let a = self.at(i, q);
                if a != 0.0 {
                    self.xb[i] -= theta * sigma * a;
                }
            }
            match leave {
                None => {
                    self.state[q] = if sigma > 0.0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.pivots += 1;
                    self.since_refactor += 1;
                }
                Some((r, to_upper, _)) => {
                    let entering_value = if sigma > 0.0 { theta } else { self.ub[q] - theta };
                    let out = self.basis[r];
                    self.state[out] = if to_upper {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.pivot(r, q, &mut d);
                    self.basis[r] = q;
                    self.state[q] = VarState::Basic;
                    self.xb[r] = entering_value;
                }
            }
            if self.since_refactor >= REFACTOR_EVERY && self.refactor() {
                d = self.reduced_costs(cost);
            }
            if gain <= 1e-12 {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            } else {
                stalled = 0;
                bland = false;
            }
        }
    }
}

/// Solves `prob`. Dimension and bound errors are reported before any pivot.
pub fn solve_lp(prob: &LpProblem) -> Result<LpSolution, LpError> {
    prob.validate()?;
    let n = prob.num_vars();
    let m_eq = prob.a_eq.len();
    let m_le = prob.a_le.len();
    let m = m_eq + m_le;

    // Shift x = lower + y, so 0 <= y <= upper - lower.
    let rows: Vec<&Vec<f64>> = prob.a_eq.iter().chain(prob.a_le.iter()).collect();
    let rhs: Vec<f64> = prob
        .b_eq
        .iter()
        .chain(prob.b_le.iter())
        .zip(&rows)
        .map(|(b, row)| b - row.iter().zip(&prob.lower).map(|(a, l)| a * l).sum::<f64>())
        .collect();

    // Columns: structural | slacks (one per <= row) | artificials (as needed).
    let mut needs_art = vec![false; m];
    // Each row is scaled to unit largest coefficient and negated if its
    // right-hand side is negative.
    let mut sign = vec![1.0; m];
    for i in 0..m {
        let is_le = i >= m_eq;
        let scale = rows[i].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale > 0.0 {
            sign[i] = 1.0 / scale;
        }
        if rhs[i] < 0.0 {
            sign[i] = -sign[i];
        }
        needs_art[i] = !is_le || rhs[i] < 0.0;
    }
    let n_art = needs_art.iter().filter(|&&a| a).count();
    let cols = n + m_le + n_art;

    let mut t = vec![0.0; m * cols];
    let mut kind = vec![Kind::Structural; n];
    kind.extend(std::iter::repeat_n(Kind::Slack, m_le));
    kind.extend(std::iter::repeat_n(Kind::Artificial, n_art));
    let mut ub: Vec<f64> = (0..n).map(|j| prob.upper[j] - prob.lower[j]).collect();
    ub.extend(std::iter::repeat_n(f64::INFINITY, m_le + n_art));
    let mut basis = vec![0; m];
    let mut init_col = vec![0; m];
    let mut next_art = n + m_le;
    for i in 0..m {
        let s = sign[i];
        for j in 0..n {
            t[i * cols + j] = s * rows[i][j];
        }
        if i >= m_eq {
            t[i * cols + n + (i - m_eq)] = s;
        }
        if needs_art[i] {
            t[i * cols + next_art] = 1.0;
            basis[i] = next_art;
            next_art += 1;
        } else {
            basis[i] = n + (i - m_eq);
        }
        init_col[i] = basis[i];
    }
    let mut state = vec![VarState::AtLower; cols];
    for &b in &basis {
        state[b] = VarState::Basic;
    }
    let xb: Vec<f64> = rhs.iter().zip(&sign).map(|(r, s)| r * s).collect();
    let a0 = t.clone();
    let b0 = xb.clone();
    let mut tab = Tableau {
        m,
        cols,
        t,
        xb,
        basis,
        state,
        ub,
        kind,
        pivots: 0,
        a0,
        b0,
        since_refactor: 0,
    };

    // Phase I
    if n_art > 0 {
        let cost: Vec<f64> = tab
            .kind
            .iter()
            .map(|k| if *k == Kind::Artificial { 1.0 } else { 0.0 })
            .collect();
        let frozen = vec![false; cols];
        tab.optimize(&cost, &frozen)?;
        let infeas: f64 = (0..cols)
            .filter(|&j| tab.kind[j] == Kind::Artificial)
            .map(|j| tab.value(j))
            .sum();
        let scale = rhs.iter().fold(1.0f64, |a, r| a.max(r.abs()));
        if infeas > FEASIBILITY_TOL * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, tab.pivots));
        }
        // Drive zero-valued artificials out of the basis where possible.
        for r in 0..m {
            if tab.kind[tab.basis[r]] != Kind::Artificial {
                continue;
            }
            let candidate = (0..cols)
                .filter(|&j| tab.kind[j] != Kind::Artificial && tab.state[j] != VarState::Basic)
                .max_by(|&a, &b| {
                    tab.at(r, a)
                        .abs()
                        .partial_cmp(&tab.at(r, b).abs())
                        .unwrap()
                        .then(b.cmp(&a))
                });
            if let Some(q) = candidate.filter(|&q| tab.at(r, q).abs() > 1e-7) {
                let value = tab.value(q);
                let out = tab.basis[r];
                let mut scratch = vec![0.0; cols];
                tab.pivot(r, q, &mut scratch);
                tab.state[out] = VarState::AtLower;
                tab.basis[r] = q;
                tab.state[q] = VarState::Basic;
                tab.xb[r] = value;
            }
        }
        for j in 0..cols {
            if tab.kind[j] == Kind::Artificial {
                tab.ub[j] = 0.0;
                if tab.state[j] == VarState::Basic {
                    let r = tab.basis.iter().position(|&b| b == j).unwrap();
                    tab.xb[r] = 0.0;
                }
            }
        }
    }

    // Phase II
    let mut cost = prob.c.clone();
    cost.extend(std::iter::repeat_n(0.0, cols - n));
    let frozen: Vec<bool> = tab.kind.iter().map(|k| *k == Kind::Artificial).collect();
    if let PhaseEnd::Unbounded = tab.optimize(&cost, &frozen)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, tab.pivots));
    }

    let x: Vec<f64> = (0..n)
        .map(|j| (prob.lower[j] + tab.value(j)).clamp(prob.lower[j], prob.upper[j]))
        .collect();
    for (i, row) in rows.iter().enumerate() {
        let b = if i < m_eq { prob.b_eq[i] } else { prob.b_le[i - m_eq] };
        let ax: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
        let residual = if i < m_eq { (ax - b).abs() } else { ax - b };
        let scale = row.iter().zip(&x).fold(b.abs().max(1.0), |acc, (a, v)| acc.max((a * v).abs()));
        if residual > UNSTABLE_TOL * scale {
            return Err(LpError::Unstable { row: i, residual });
        }
    }
    let objective = prob.c.iter().zip(&x).map(|(c, x)| c * x).sum();
    // Row i started with column sign_i e_i (slack) or e_i (artificial), both
    // of zero cost, so its reduced cost exposes the scaled row's dual.
    let d = tab.reduced_costs(&cost);
    let y: Vec<f64> = (0..m)
        .map(|i| {
            let init_coef = if tab.kind[init_col[i]] == Kind::Artificial { 1.0 } else { sign[i] };
            -d[init_col[i]] * sign[i] / init_coef
        })
        .collect();
    let reduced: Vec<f64> = (0..n)
        .map(|j| prob.c[j] - (0..m).map(|i| y[i] * rows[i][j]).sum::<f64>())
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        x: Some(x),
        dual_eq: Some(y[..m_eq].to_vec()),
        dual_le: Some(y[m_eq..].to_vec()),
        reduced_costs: Some(reduced),
        pivots: tab.pivots,
    })
}
