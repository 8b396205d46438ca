//! L_p distances in the plane and the distance-gap rows that become cuts.

use thiserror::Error;

use crate::model::{Instance, Norm, Point};

/// Below this distance the gradient of `d(x, a)` is treated as undefined.
pub const SINGULAR_DISTANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum DistanceError {
    #[error("distance gradient undefined: points coincide (d = {0:e})")]
    Singular(f64),
}

/// `(|dx|^p + |dy|^p)^(1/p)`, with `p = 1` and `p = inf` special-cased.
///
/// For general `p` the components are scaled by the larger one before the
/// power is taken, which keeps `p = 8` finite for coordinates in the
/// thousands.
pub fn lp_distance(a: Point, b: Point, norm: Norm) -> f64 {
    component_norm((a.x - b.x).abs(), (a.y - b.y).abs(), norm.p())
}

pub(crate) fn component_norm(dx: f64, dy: f64, p: f64) -> f64 {
    if p == 2.0 {
        dx.hypot(dy)
    } else if p == 1.0 {
        dx + dy
    } else if p.is_infinite() {
        dx.max(dy)
    } else {
        let m = dx.max(dy);
        if m == 0.0 {
            return 0.0;
        }
        m * ((dx / m).powf(p) + (dy / m).powf(p)).powf(1.0 / p)
    }
}

/// Gradient of `x -> d(x, a)`.
///
/// Component `j` is `sign(u_j) |u_j|^(p-1) / d^(p-1)` with `u = x - a`; the
/// result has unit dual norm. At `p = inf` and a tie between the components
/// the subgradient splitting the mass evenly is returned.
pub fn lp_distance_gradient(x: Point, a: Point, norm: Norm) -> Result<[f64; 2], DistanceError> {
    let d = lp_distance(x, a, norm);
    if d < SINGULAR_DISTANCE {
        return Err(DistanceError::Singular(d));
    }
    let (ux, uy) = (x.x - a.x, x.y - a.y);
    let p = norm.p();
    let g = if p == 1.0 {
        [sign(ux), sign(uy)]
    } else if p.is_infinite() {
        match ux.abs().partial_cmp(&uy.abs()) {
            Some(std::cmp::Ordering::Greater) => [sign(ux), 0.0],
            Some(std::cmp::Ordering::Less) => [0.0, sign(uy)],
            _ => [0.5 * sign(ux), 0.5 * sign(uy)],
        }
    } else {
        [
            sign(ux) * (ux.abs() / d).powf(p - 1.0),
            sign(uy) * (uy.abs() / d).powf(p - 1.0),
        ]
    };
    Ok(g)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Coefficients of the cut generated from `x_k`:
/// `delta_i = d(x_bar, A_i) - d(x_k, A_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistGapRow {
    /// Position of the generating point in its cut pool.
    pub k: usize,
    pub delta: Vec<f64>,
}

impl DistGapRow {
    /// `sum_i w_i delta_i`, i.e. `f(x_bar) - f(x_k)` for the minisum objective.
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.delta.iter().zip(w).map(|(d, w)| d * w).sum()
    }
}

pub fn gap_row(inst: &Instance, x_bar: Point, x_k: Point) -> DistGapRow {
    let delta = inst
        .locations()
        .map(|a| lp_distance(x_bar, a, inst.norm) - lp_distance(x_k, a, inst.norm))
        .collect();
    DistGapRow { k: 0, delta }
}
