//! Forward location problems: find the point minimizing the weighted sum or
//! the weighted maximum of distances to the sites.
//!
//! * Minisum with the Euclidean norm runs the Weiszfeld fixed-point map,
//!   with an explicit optimality test whenever the iterate reaches a site.
//! * Minisum with any other norm minimizes a smoothed objective by damped
//!   Newton steps, tightening the smoothing over four stages.
//! * Minimax minimizes a log-sum-exp smoothing of the maximum, tightening the
//!   temperature stage by stage.
//!
//! Sites with zero weight never contribute. When every weight is zero the
//! objective is identically zero; the solvers then return the first site and
//! flag the result as degenerate.

mod smooth;

use thiserror::Error;

use crate::distance::lp_distance;
use crate::model::{Instance, Objective, Point};
use smooth::{newton_minimize, smooth_distance, Eval, NewtonSettings};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForwardError {
    #[error("weight vector has {got} entries, instance has {expected} sites")]
    WeightLength { expected: usize, got: usize },
    #[error("site {site}: weight must be finite and nonnegative, got {value}")]
    InvalidWeight { site: usize, value: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForwardOptions {
    /// Relative accuracy. Displacements are measured against the extent of
    /// the active sites and gradients against the total weight.
    pub tol: f64,
    /// Iteration cap per stage.
    pub max_iter: usize,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        ForwardOptions {
            tol: 1e-6,
            max_iter: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForwardResult {
    pub x_star: Point,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// All weights were zero; any point is optimal.
    pub degenerate: bool,
}

/// `sum_i w_i d(x, A_i)`.
pub fn eval_minisum(x: Point, w: &[f64], inst: &Instance) -> f64 {
    inst.locations()
        .zip(w)
        .filter(|(_, &wi)| wi > 0.0)
        .map(|(a, &wi)| wi * lp_distance(x, a, inst.norm))
        .sum()
}

/// `max_i w_i d(x, A_i)`, zero when every weight is zero.
pub fn eval_minimax(x: Point, w: &[f64], inst: &Instance) -> f64 {
    inst.locations()
        .zip(w)
        .filter(|(_, &wi)| wi > 0.0)
        .map(|(a, &wi)| wi * lp_distance(x, a, inst.norm))
        .fold(0.0, f64::max)
}

/// Objective of the instance's own kind.
pub fn evaluate(inst: &Instance, x: Point, w: &[f64]) -> f64 {
    match inst.objective {
        Objective::Minisum => eval_minisum(x, w, inst),
        Objective::Minimax => eval_minimax(x, w, inst),
    }
}

/// Solves the forward problem of the instance's own kind.
pub fn solve(inst: &Instance, w: &[f64], opts: &ForwardOptions) -> Result<ForwardResult, ForwardError> {
    match inst.objective {
        Objective::Minisum => solve_minisum(inst, w, opts),
        Objective::Minimax => solve_minimax(inst, w, opts),
    }
}

struct Active {
    sites: Vec<(Point, f64)>,
    total: f64,
    scale: f64,
    centroid: Point,
}

fn prepare(inst: &Instance, w: &[f64], opts: &ForwardOptions) -> Result<Active, ForwardError> {
    if w.len() != inst.len() {
        return Err(ForwardError::WeightLength {
            expected: inst.len(),
            got: w.len(),
        });
    }
    if let Some((i, &v)) = w.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(ForwardError::InvalidWeight { site: i + 1, value: v });
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(ForwardError::InvalidTolerance(opts.tol));
    }
    let sites: Vec<(Point, f64)> = inst
        .locations()
        .zip(w.iter().copied())
        .filter(|&(_, wi)| wi > 0.0)
        .collect();
    let total: f64 = sites.iter().map(|s| s.1).sum();
    let (mut lo, mut hi) = (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN));
    let (mut cx, mut cy) = (0.0, 0.0);
    for &(a, wi) in &sites {
        lo = Point::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Point::new(hi.x.max(a.x), hi.y.max(a.y));
        cx += wi * a.x;
        cy += wi * a.y;
    }
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let scale = if extent > 0.0 { extent } else { 1.0 };
    let centroid = if total > 0.0 {
        Point::new(cx / total, cy / total)
    } else {
        Point::default()
    };
    Ok(Active {
        sites,
        total,
        scale,
        centroid,
    })
}

fn degenerate(inst: &Instance) -> ForwardResult {
    ForwardResult {
        x_star: inst.sites.first().map(|s| s.location).unwrap_or_default(),
        objective_value: 0.0,
        iterations: 0,
        converged: true,
        degenerate: true,
    }
}

/// If every active site sits at one location, that location is optimal for
/// both objectives.
fn single_location(active: &Active) -> Option<Point> {
    let first = active.sites.first()?.0;
    active
        .sites
        .iter()
        .all(|(a, _)| *a == first)
        .then_some(first)
}

fn finish(inst: &Instance, w: &[f64], x: Point, iterations: usize, converged: bool) -> ForwardResult {
    ForwardResult {
        x_star: x,
        objective_value: evaluate(inst, x, w),
        iterations,
        converged,
        degenerate: false,
    }
}

/// Minimizes `sum_i w_i d(x, A_i)`.
pub fn solve_minisum(
    inst: &Instance,
    w: &[f64],
    opts: &ForwardOptions,
) -> Result<ForwardResult, ForwardError> {
    let active = prepare(inst, w, opts)?;
    if active.sites.is_empty() {
        return Ok(degenerate(inst));
    }
    if let Some(x) = single_location(&active) {
        return Ok(finish(inst, w, x, 0, true));
    }
    if inst.norm.is_euclidean() {
        let run = weiszfeld_run(&active, opts);
        return Ok(finish(inst, w, run.x, run.iterations, run.converged));
    }
    let (x, iterations, converged) = smoothed_minisum(&active, inst.norm.p(), opts);
    Ok(finish(inst, w, x, iterations, converged))
}

/// Minisum by damped Newton on the smoothed objective, shrinking the
/// smoothing radius from 1e-2 to 1e-8 of the site extent.
fn smoothed_minisum(active: &Active, p: f64, opts: &ForwardOptions) -> (Point, usize, bool) {
    let mut x = active.centroid;
    let mut iterations = 0;
    let mut converged = false;
    for rel in [1e-2, 1e-4, 1e-6, 1e-8] {
        let delta = rel * active.scale;
        let f = |x: Point| {
            let mut acc = Eval::ZERO;
            for &(a, wi) in &active.sites {
                acc.add_scaled(wi, &smooth_distance([x.x - a.x, x.y - a.y], delta, p));
            }
            acc
        };
        let run = newton_minimize(f, x, &newton_settings(active, opts, active.total));
        x = run.x;
        iterations += run.iterations;
        converged = run.converged;
    }
    (x, iterations, converged)
}

fn newton_settings(active: &Active, opts: &ForwardOptions, grad_scale: f64) -> NewtonSettings {
    NewtonSettings {
        grad_tol: opts.tol * grad_scale,
        step_tol: 1e-3 * opts.tol * active.scale,
        max_step: active.scale,
        max_iter: opts.max_iter,
    }
}

/// Minimizes `max_i w_i d(x, A_i)`.
pub fn solve_minimax(
    inst: &Instance,
    w: &[f64],
    opts: &ForwardOptions,
) -> Result<ForwardResult, ForwardError> {
    let active = prepare(inst, w, opts)?;
    if active.sites.is_empty() {
        return Ok(degenerate(inst));
    }
    if let Some(x) = single_location(&active) {
        return Ok(finish(inst, w, x, 0, true));
    }
    let p = inst.norm.p();
    let delta = 1e-9 * active.scale;
    let mut x = active.centroid;
    let level = eval_minimax(x, w, inst);
    let wmax = active.sites.iter().map(|s| s.1).fold(0.0, f64::max);
    let mut iterations = 0;
    let mut converged = false;
    let mut sharpness = 10.0;
    while sharpness <= 1e8 {
        let t = sharpness / level;
        let f = |x: Point| log_sum_exp(&active.sites, x, t, delta, p);
        let run = newton_minimize(f, x, &newton_settings(&active, opts, wmax));
        x = run.x;
        iterations += run.iterations;
        converged = run.converged;
        sharpness *= 10.0;
    }
    Ok(finish(inst, w, x, iterations, converged))
}

/// `(1/t) log sum_i exp(t w_i d_delta(x, A_i))` with its derivatives.
fn log_sum_exp(sites: &[(Point, f64)], x: Point, t: f64, delta: f64, p: f64) -> Eval {
    let terms: Vec<Eval> = sites
        .iter()
        .map(|&(a, wi)| {
            let mut e = Eval::ZERO;
            e.add_scaled(wi, &smooth_distance([x.x - a.x, x.y - a.y], delta, p));
            e
        })
        .collect();
    let top = terms.iter().map(|e| e.value).fold(f64::MIN, f64::max);
    let weights: Vec<f64> = terms.iter().map(|e| (t * (e.value - top)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut out = Eval::ZERO;
    out.value = top + z.ln() / t;
    for (e, &pi) in terms.iter().zip(&weights) {
        let pi = pi / z;
        for j in 0..2 {
            out.grad[j] += pi * e.grad[j];
            for k in 0..2 {
                out.hess[j][k] += pi * (e.hess[j][k] + t * e.grad[j] * e.grad[k]);
            }
        }
    }
    for j in 0..2 {
        for k in 0..2 {
            out.hess[j][k] -= t * out.grad[j] * out.grad[k];
        }
    }
    out
}

/// Result of the Euclidean Weiszfeld iteration together with the objective
/// value after every step (starting with the initial point).
#[derive(Clone, Debug)]
pub struct WeiszfeldRun {
    pub result: ForwardResult,
    pub objective_path: Vec<f64>,
}

/// Runs the Weiszfeld iteration regardless of the instance norm setting
/// (distances are Euclidean) and keeps the objective history.
pub fn weiszfeld(inst: &Instance, w: &[f64], opts: &ForwardOptions) -> Result<WeiszfeldRun, ForwardError> {
    let active = prepare(inst, w, opts)?;
    let euclid = inst.clone().with_norm(crate::model::Norm::EUCLIDEAN);
    if active.sites.is_empty() {
        return Ok(WeiszfeldRun {
            result: degenerate(inst),
            objective_path: vec![0.0],
        });
    }
    let run = weiszfeld_run(&active, opts);
    Ok(WeiszfeldRun {
        result: finish(&euclid, w, run.x, run.iterations, run.converged),
        objective_path: run.path,
    })
}

struct FixedPointRun {
    x: Point,
    iterations: usize,
    converged: bool,
    path: Vec<f64>,
}

fn euclid_sum(sites: &[(Point, f64)], x: Point) -> f64 {
    sites.iter().map(|(a, wi)| wi * x.euclid(a)).sum()
}

/// Resultant pull `sum_{i != skip} w_i (A_i - x) / d_i` and `sum w_i / d_i`.
fn pull(sites: &[(Point, f64)], x: Point, skip: Option<usize>) -> ([f64; 2], f64, [f64; 2]) {
    let mut r = [0.0; 2];
    let mut den = 0.0;
    let mut num = [0.0; 2];
    for (i, &(a, wi)) in sites.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let d = x.euclid(&a);
        r[0] += wi * (a.x - x.x) / d;
        r[1] += wi * (a.y - x.y) / d;
        den += wi / d;
        num[0] += wi * a.x / d;
        num[1] += wi * a.y / d;
    }
    (r, den, num)
}

fn weiszfeld_run(active: &Active, opts: &ForwardOptions) -> FixedPointRun {
    let sites = &active.sites;
    let at_site_tol = 1e-12 * active.scale;
    let mut x = active.centroid;
    let mut fx = euclid_sum(sites, x);
    let mut path = vec![fx];

    for it in 0..opts.max_iter {
        let (nearest, dmin) = sites
            .iter()
            .enumerate()
            .map(|(i, (a, _))| (i, x.euclid(a)))
            .fold((0, f64::MAX), |acc, v| if v.1 < acc.1 { v } else { acc });

        // A site is optimal iff the pull of the other sites does not exceed
        // its own weight.
        let anchor = sites[nearest];
        let (r_site, den_site, _) = pull(sites, anchor.0, Some(nearest));
        let r_site_norm = r_site[0].hypot(r_site[1]);
        if r_site_norm <= anchor.1 {
            let f_site = euclid_sum(sites, anchor.0);
            if dmin <= at_site_tol || f_site <= fx {
                if f_site < fx {
                    path.push(f_site);
                }
                return FixedPointRun {
                    x: anchor.0,
                    iterations: it,
                    converged: true,
                    path,
                };
            }
        }

        let mut next = if dmin <= at_site_tol {
            // Leave a non-optimal site along the steepest descent direction.
            let step = (r_site_norm - anchor.1) / den_site;
            Point::new(
                anchor.0.x + step * r_site[0] / r_site_norm,
                anchor.0.y + step * r_site[1] / r_site_norm,
            )
        } else {
            let (r, den, num) = pull(sites, x, None);
            if r[0].hypot(r[1]) <= opts.tol * active.total {
                return FixedPointRun {
                    x,
                    iterations: it,
                    converged: true,
                    path,
                };
            }
            Point::new(num[0] / den, num[1] / den)
        };

        let mut f_next = euclid_sum(sites, next);
        let mut halvings = 0;
        while f_next > fx && halvings < 60 {
            next = Point::new(0.5 * (x.x + next.x), 0.5 * (x.y + next.y));
            f_next = euclid_sum(sites, next);
            halvings += 1;
        }
        if f_next > fx {
            return FixedPointRun {
                x,
                iterations: it,
                converged: true,
                path,
            };
        }
        let moved = x.euclid(&next);
        x = next;
        fx = f_next;
        path.push(fx);
        if moved <= opts.tol * active.scale {
            return FixedPointRun {
                x,
                iterations: it + 1,
                converged: true,
                path,
            };
        }
    }
    FixedPointRun {
        x,
        iterations: opts.max_iter,
        converged: false,
        path,
    }
}

/// Minisum solution by the smoothed Newton path for every norm, including
/// the Euclidean one. Used to cross-check the Weiszfeld iteration.
pub fn solve_minisum_smoothed(
    inst: &Instance,
    w: &[f64],
    opts: &ForwardOptions,
) -> Result<ForwardResult, ForwardError> {
    let active = prepare(inst, w, opts)?;
    if active.sites.is_empty() {
        return Ok(degenerate(inst));
    }
    let (x, iterations, converged) = smoothed_minisum(&active, inst.norm.p(), opts);
    Ok(finish(inst, w, x, iterations, converged))
}
