//! Domain types shared by every solver stage.
//!
//! Site indices are 0-based internally; anything rendered for a user
//! (violations, reports, plan files) counts sites from 1.

use std::fmt;

use thiserror::Error;

/// A point in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean distance, used for displacement checks regardless of the
    /// instance norm.
    pub fn euclid(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("norm exponent must be >= 1, got {0}")]
    InvalidNorm(f64),
}

/// An L_p norm exponent, `p >= 1`. `f64::INFINITY` selects the Chebyshev norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norm {
    p: f64,
}

impl Norm {
    pub const EUCLIDEAN: Norm = Norm { p: 2.0 };

    pub fn new(p: f64) -> Result<Self, ModelError> {
        if p.is_nan() || p < 1.0 {
            return Err(ModelError::InvalidNorm(p));
        }
        Ok(Norm { p })
    }

    /// Builds a norm without checking `p`. Instances holding such a norm are
    /// reported by [`validate_instance`].
    pub fn unchecked(p: f64) -> Self {
        Norm { p }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_valid(&self) -> bool {
        !self.p.is_nan() && self.p >= 1.0
    }

    pub fn is_euclidean(&self) -> bool {
        self.p == 2.0
    }
}

/// Client site with its weight and modification budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClientSite {
    pub location: Point,
    pub weight: f64,
    /// Largest allowed weight reduction.
    pub u_minus: f64,
    /// Largest allowed weight augmentation.
    pub u_plus: f64,
    /// Cost per unit of reduction.
    pub c_minus: f64,
    /// Cost per unit of augmentation.
    pub c_plus: f64,
}

impl ClientSite {
    /// A site whose weight cannot be modified.
    pub fn fixed(location: Point, weight: f64) -> Self {
        ClientSite {
            location,
            weight,
            u_minus: 0.0,
            u_plus: 0.0,
            c_minus: 0.0,
            c_plus: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Weighted sum of distances (1-median).
    Minisum,
    /// Weighted maximum distance (1-center).
    Minimax,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::Minisum => "minisum",
            Objective::Minimax => "minimax",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "minisum" => Ok(Objective::Minisum),
            "minimax" => Ok(Objective::Minimax),
            other => Err(format!("unknown objective `{other}` (expected minisum|minimax)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub sites: Vec<ClientSite>,
    pub norm: Norm,
    pub objective: Objective,
}

impl Instance {
    pub fn new(sites: Vec<ClientSite>, norm: Norm, objective: Objective) -> Self {
        Instance {
            sites,
            norm,
            objective,
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.weight).collect()
    }

    pub fn locations(&self) -> impl Iterator<Item = Point> + '_ {
        self.sites.iter().map(|s| s.location)
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }
}

/// One broken invariant. `site` is 1-based; `None` means the instance as a whole.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub site: Option<usize>,
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.site {
            Some(i) => write!(f, "site {i}, field {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

/// Lists every broken invariant of `inst`. An empty result means the instance
/// is usable by the solvers.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if inst.sites.is_empty() {
        out.push(Violation {
            site: None,
            field: "n",
            message: "instance has no sites".into(),
        });
    }
    if !inst.norm.is_valid() {
        out.push(Violation {
            site: None,
            field: "norm",
            message: format!("exponent p must be >= 1, got {}", inst.norm.p()),
        });
    }
    for (idx, site) in inst.sites.iter().enumerate() {
        let i = idx + 1;
        if !site.location.is_finite() {
            out.push(Violation {
                site: Some(i),
                field: "location",
                message: format!("coordinates must be finite, got {}", site.location),
            });
        }
        let fields = [
            ("w", site.weight),
            ("u_minus", site.u_minus),
            ("u_plus", site.u_plus),
            ("c_minus", site.c_minus),
            ("c_plus", site.c_plus),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                out.push(Violation {
                    site: Some(i),
                    field: name,
                    message: format!("must be a finite nonnegative number, got {v}"),
                });
            }
        }
    }
    out
}

/// New weights `w_hat = w + p_plus - q_minus` and their cost.
#[derive(Clone, Debug, PartialEq)]
pub struct ModificationPlan {
    pub w_hat: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub q_minus: Vec<f64>,
    pub cost: f64,
}

impl ModificationPlan {
    /// The plan that leaves every weight untouched.
    pub fn unchanged(inst: &Instance) -> Self {
        let n = inst.len();
        ModificationPlan {
            w_hat: inst.weights(),
            p_plus: vec![0.0; n],
            q_minus: vec![0.0; n],
            cost: 0.0,
        }
    }

    /// Builds a canonical plan from raw augmentation/reduction amounts.
    ///
    /// Amounts are clipped to their bounds, the common part `min(p, q)` is
    /// cancelled, any residual negative weight (solver round-off) is absorbed
    /// into the reduction, and the weights and cost are recomputed.
    pub fn from_amounts(inst: &Instance, p_plus: &[f64], q_minus: &[f64]) -> Self {
        let n = inst.len();
        let mut p = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        let mut w_hat = Vec::with_capacity(n);
        for (i, site) in inst.sites.iter().enumerate() {
            let mut pi = p_plus[i].clamp(0.0, site.u_plus);
            let mut qi = q_minus[i].clamp(0.0, site.u_minus);
            let common = pi.min(qi);
            pi -= common;
            qi -= common;
            let mut wi = site.weight + pi - qi;
            if wi < 0.0 {
                qi = site.weight + pi;
                wi = 0.0;
            }
            p.push(pi);
            q.push(qi);
            w_hat.push(wi);
        }
        let cost = plan_cost(inst, &p, &q);
        ModificationPlan {
            w_hat,
            p_plus: p,
            q_minus: q,
            cost,
        }
    }

    /// Plan reaching the target weights with the cheapest split: raise with
    /// `p`, lower with `q`. Targets outside the budget are clipped.
    pub fn from_weights(inst: &Instance, target: &[f64]) -> Self {
        let (p, q): (Vec<f64>, Vec<f64>) = inst
            .sites
            .iter()
            .zip(target)
            .map(|(s, &t)| ((t - s.weight).max(0.0), (s.weight - t).max(0.0)))
            .unzip();
        Self::from_amounts(inst, &p, &q)
    }

    /// Checks the plan invariants against `inst` with absolute tolerance `tol`.
    pub fn check(&self, inst: &Instance, tol: f64) -> Vec<String> {
        let mut errs = Vec::new();
        let n = inst.len();
        if self.w_hat.len() != n || self.p_plus.len() != n || self.q_minus.len() != n {
            errs.push(format!(
                "plan has {} / {} / {} entries, instance has {n} sites",
                self.w_hat.len(),
                self.p_plus.len(),
                self.q_minus.len()
            ));
            return errs;
        }
        for (i, site) in inst.sites.iter().enumerate() {
            let (w, p, q) = (self.w_hat[i], self.p_plus[i], self.q_minus[i]);
            if (w - (site.weight + p - q)).abs() > tol {
                errs.push(format!("site {}: w_hat != w + p - q", i + 1));
            }
            if p < -tol || p > site.u_plus + tol {
                errs.push(format!("site {}: p_plus {p} outside [0, {}]", i + 1, site.u_plus));
            }
            if q < -tol || q > site.u_minus + tol {
                errs.push(format!("site {}: q_minus {q} outside [0, {}]", i + 1, site.u_minus));
            }
            if w < -tol {
                errs.push(format!("site {}: negative weight {w}", i + 1));
            }
            if p > tol && q > tol {
                errs.push(format!("site {}: both augmented and reduced", i + 1));
            }
        }
        let cost = plan_cost(inst, &self.p_plus, &self.q_minus);
        if (cost - self.cost).abs() > tol * cost.abs().max(1.0) {
            errs.push(format!("cost {} != recomputed {cost}", self.cost));
        }
        errs
    }
}

pub fn plan_cost(inst: &Instance, p_plus: &[f64], q_minus: &[f64]) -> f64 {
    inst.sites
        .iter()
        .zip(p_plus.iter().zip(q_minus))
        .map(|(s, (p, q))| s.c_plus * p + s.c_minus * q)
        .sum()
}

/// Euclidean length of `a - b`.
pub fn weight_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// State of the row-generation loop after iteration `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Forward optimum for `weights`.
    pub x_k: Point,
    pub weights: Vec<f64>,
    /// Master objective that produced `weights` (0 for the original weights).
    pub cost: f64,
    /// Euclidean change of the weights since the previous record.
    pub delta_w: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    Infeasible,
    IterationLimit,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Converged => "converged",
            Outcome::Infeasible => "infeasible",
            Outcome::IterationLimit => "iteration-limit",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
