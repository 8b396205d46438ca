//! Smooth surrogates of the L_p distance and a damped Newton minimizer for
//! two-dimensional convex functions.

use crate::model::Point;

pub(crate) type Hess = [[f64; 2]; 2];

/// Value, gradient and Hessian of a smooth function of the facility location.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Eval {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: Hess,
}

impl Eval {
    pub const ZERO: Eval = Eval {
        value: 0.0,
        grad: [0.0; 2],
        hess: [[0.0; 2]; 2],
    };

    pub fn add_scaled(&mut self, w: f64, other: &Eval) {
        self.value += w * other.value;
        for j in 0..2 {
            self.grad[j] += w * other.grad[j];
            for k in 0..2 {
                self.hess[j][k] += w * other.hess[j][k];
            }
        }
    }
}

/// Smoothed distance `d_delta(u)` for `u = x - a`.
///
/// Finite `p` replaces every `|u_j|` by `sqrt(u_j^2 + delta^2)` inside the
/// p-norm; the result is convex, smooth, and within `2^(1/p) delta` of the
/// exact distance. The Chebyshev norm is handled through the planar identity
/// `max(|s|, |t|) = (|s + t| + |s - t|) / 2`, smoothed the same way.
pub(crate) fn smooth_distance(u: [f64; 2], delta: f64, p: f64) -> Eval {
    if p.is_infinite() {
        let rot = [[1.0, 1.0], [1.0, -1.0]];
        let mut out = Eval::ZERO;
        for r in rot {
            let v = r[0] * u[0] + r[1] * u[1];
            let s = (v * v + delta * delta).sqrt();
            let curv = delta * delta / (s * s * s);
            out.value += 0.5 * s;
            for j in 0..2 {
                out.grad[j] += 0.5 * v / s * r[j];
                for k in 0..2 {
                    out.hess[j][k] += 0.5 * curv * r[j] * r[k];
                }
            }
        }
        return out;
    }

    let s = [
        (u[0] * u[0] + delta * delta).sqrt(),
        (u[1] * u[1] + delta * delta).sqrt(),
    ];
    let m = s[0].max(s[1]);
    let f = if p == 2.0 {
        (s[0] * s[0] + s[1] * s[1]).sqrt()
    } else {
        m * ((s[0] / m).powf(p) + (s[1] / m).powf(p)).powf(1.0 / p)
    };
    let r = [s[0] / f, s[1] / f];
    let grad = [
        r[0].powf(p - 1.0) * u[0] / s[0],
        r[1].powf(p - 1.0) * u[1] / s[1],
    ];
    let mut hess = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            hess[j][k] = (1.0 - p) / f * grad[j] * grad[k];
        }
        hess[j][j] +=
            r[j].powf(p - 2.0) * ((p - 1.0) * u[j] * u[j] + delta * delta) / (s[j] * s[j] * f);
    }
    Eval {
        value: f,
        grad,
        hess,
    }
}

pub(crate) struct NewtonSettings {
    /// Stop once the gradient norm drops to this value.
    pub grad_tol: f64,
    /// Stop once an accepted step is shorter than this.
    pub step_tol: f64,
    /// Longest step taken in one iteration.
    pub max_step: f64,
    pub max_iter: usize,
}

pub(crate) struct NewtonRun {
    pub x: Point,
    pub iterations: usize,
    pub converged: bool,
}

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 80;

/// Damped Newton descent with Armijo backtracking. Falls back to steepest
/// descent whenever the regularized Newton direction is not a descent
/// direction.
pub(crate) fn newton_minimize(
    f: impl Fn(Point) -> Eval,
    x0: Point,
    cfg: &NewtonSettings,
) -> NewtonRun {
    let mut x = x0;
    let mut cur = f(x);
    for it in 0..cfg.max_iter {
        let gnorm = cur.grad[0].hypot(cur.grad[1]);
        if gnorm <= cfg.grad_tol {
            return NewtonRun {
                x,
                iterations: it,
                converged: true,
            };
        }
        let steepest = scale_to(
            [-cur.grad[0], -cur.grad[1]],
            cfg.max_step.min(gnorm.max(f64::MIN_POSITIVE)),
        );
        let mut accepted = None;
        for dir in newton_direction(&cur).into_iter().chain([steepest]) {
            let dir = cap(dir, cfg.max_step);
            let slope = cur.grad[0] * dir[0] + cur.grad[1] * dir[1];
            if slope >= 0.0 {
                continue;
            }
            if let Some(step) = armijo(&f, x, &cur, dir, slope) {
                accepted = Some(step);
                break;
            }
        }
        let Some((x_new, next)) = accepted else {
            // no representable decrease left
            return NewtonRun {
                x,
                iterations: it,
                converged: true,
            };
        };
        let moved = x.euclid(&x_new);
        x = x_new;
        cur = next;
        if moved <= cfg.step_tol {
            return NewtonRun {
                x,
                iterations: it + 1,
                converged: true,
            };
        }
    }
    NewtonRun {
        x,
        iterations: cfg.max_iter,
        converged: false,
    }
}

fn newton_direction(e: &Eval) -> Option<[f64; 2]> {
    let h = e.hess;
    let lambda = 1e-12 * (h[0][0].abs() + h[1][1].abs()) + f64::MIN_POSITIVE;
    let a = h[0][0] + lambda;
    let d = h[1][1] + lambda;
    let b = 0.5 * (h[0][1] + h[1][0]);
    let det = a * d - b * b;
    if !(det > 0.0 && a > 0.0) || !det.is_finite() {
        return None;
    }
    let g = e.grad;
    Some([-(d * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det])
}

fn scale_to(v: [f64; 2], len: f64) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    if n == 0.0 {
        return v;
    }
    [v[0] * len / n, v[1] * len / n]
}

fn cap(v: [f64; 2], max_len: f64) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    if n > max_len {
        scale_to(v, max_len)
    } else {
        v
    }
}

fn armijo(
    f: &impl Fn(Point) -> Eval,
    x: Point,
    cur: &Eval,
    dir: [f64; 2],
    slope: f64,
) -> Option<(Point, Eval)> {
    let mut alpha = 1.0;
    for _ in 0..MAX_HALVINGS {
        let cand = Point::new(x.x + alpha * dir[0], x.y + alpha * dir[1]);
        if cand == x {
            return None;
        }
        let e = f(cand);
        if e.value <= cur.value + ARMIJO_C * alpha * slope {
            return Some((cand, e));
        }
        alpha *= 0.5;
    }
    None
}
