//! Independent reference computations and case generators shared by the
//! integration tests and the acceptance suite.

#![allow(dead_code)]

use std::path::PathBuf;

use invloc::{ClientSite, Instance, LpProblem, Norm, Objective, Point, SplitMix64};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn data(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).expect("bundled data file")
}

pub fn load(name: &str) -> Instance {
    invloc::parse_instance(&data(name)).expect("bundled instance parses")
}

/// Dense solve of `m x = r` by Gaussian elimination with partial pivoting.
fn solve_square(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))?;
        if m[p][k].abs() < 1e-9 {
            return None;
        }
        m.swap(k, p);
        r.swap(k, p);
        let pivot = m[k].clone();
        for i in k + 1..n {
            let f = m[i][k] / pivot[k];
            for (a, b) in m[i][k..].iter_mut().zip(&pivot[k..]) {
                *a -= f * b;
            }
            r[i] -= f * r[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (r[k] - s) / m[k][k];
    }
    Some(x)
}

fn combinations(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Optimal value of a problem with finite bounds, found by enumerating every
/// basic solution; `None` when no vertex is feasible. A vertex is fixed by
/// `n` linearly independent active constraints drawn from the equalities,
/// the inequalities and the bounds, so rank-deficient equality systems need
/// no special handling.
pub fn vertex_enumeration(prob: &LpProblem) -> Option<f64> {
    let n = prob.c.len();
    let mut active: Vec<(Vec<f64>, f64)> = Vec::new();
    for (row, &b) in prob.a_eq.iter().zip(&prob.b_eq) {
        active.push((row.clone(), b));
    }
    for (row, &b) in prob.a_le.iter().zip(&prob.b_le) {
        active.push((row.clone(), b));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        active.push((e.clone(), prob.lower[j]));
        active.push((e, prob.upper[j]));
    }
    let feasible = |x: &[f64]| {
        let tol = 1e-9;
        let dot = |r: &[f64]| r.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        prob.a_eq
            .iter()
            .zip(&prob.b_eq)
            .all(|(r, &b)| (dot(r) - b).abs() <= tol * (1.0 + b.abs()))
            && prob
                .a_le
                .iter()
                .zip(&prob.b_le)
                .all(|(r, &b)| dot(r) <= b + tol * (1.0 + b.abs()))
            && (0..n).all(|j| x[j] >= prob.lower[j] - tol && x[j] <= prob.upper[j] + tol)
    };
    let mut best: Option<f64> = None;
    combinations(active.len(), n, &mut |pick| {
        let rows = pick.iter().map(|&i| active[i].0.clone()).collect();
        let rhs = pick.iter().map(|&i| active[i].1).collect();
        if let Some(x) = solve_square(rows, rhs) {
            if feasible(&x) {
                let v: f64 = prob.c.iter().zip(&x).map(|(c, x)| c * x).sum();
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    });
    best
}

/// A random LP with at most six variables and six rows and finite bounds.
/// About one case in eight has its right-hand sides perturbed so that it may
/// be infeasible; the rest are feasible by construction.
pub fn random_lp(rng: &mut SplitMix64) -> LpProblem {
    let n = 1 + (rng.next_f64() * 6.0) as usize;
    let rows = (rng.next_f64() * 7.0) as usize;
    let m_eq = ((rng.next_f64() * 3.0) as usize).min(rows).min(n);
    let c: Vec<f64> = (0..n).map(|_| rng.uniform(-5.0, 5.0)).collect();
    let mut lp = LpProblem::new(c);
    let mut x0 = Vec::with_capacity(n);
    for j in 0..n {
        let lo = rng.uniform(-3.0, 1.0);
        let hi = lo + rng.uniform(0.5, 5.0);
        lp.set_bounds(j, lo, hi);
        x0.push(rng.uniform(lo, hi));
    }
    let perturb = rng.next_f64() < 0.125;
    for r in 0..rows {
        let row: Vec<f64> = (0..n)
            .map(|_| {
                // integer-valued and zero entries exercise degeneracy
                if rng.next_f64() < 0.3 {
                    0.0
                } else {
                    (rng.uniform(-5.0, 5.0)).round()
                }
            })
            .collect();
        let ax: f64 = row.iter().zip(&x0).map(|(a, x)| a * x).sum();
        let shift = if perturb { rng.uniform(-20.0, 0.0) } else { 0.0 };
        if r < m_eq {
            lp.add_eq(row, ax + shift);
        } else {
            lp.add_le(row, ax + rng.uniform(0.0, 2.0) + shift);
        }
    }
    lp
}

/// Exact L_p distance written independently of the library.
pub fn ref_distance(a: Point, b: Point, p: f64) -> f64 {
    let (dx, dy) = ((a.x - b.x).abs(), (a.y - b.y).abs());
    if p.is_infinite() {
        return dx.max(dy);
    }
    let m = dx.max(dy);
    if m == 0.0 {
        return 0.0;
    }
    m * ((dx / m).powf(p) + (dy / m).powf(p)).powf(1.0 / p)
}

pub fn ref_objective(sites: &[(Point, f64)], x: Point, p: f64, objective: Objective) -> f64 {
    let terms = sites.iter().map(|&(a, w)| w * ref_distance(x, a, p));
    match objective {
        Objective::Minisum => terms.sum(),
        Objective::Minimax => terms.fold(0.0, f64::max),
    }
}

/// Minimum of a location objective over the sites' bounding box by grid
/// refinement with Lipschitz pruning. The box holds an optimum for every L_p
/// norm since projecting onto it shortens every coordinate difference.
///
/// Each distance is 1-Lipschitz in the L_p norm, which is dominated by the
/// L_1 norm, so on a square cell of side `s` centred at `c` the objective is
/// at least `f(c) - lip * s`. Cells whose bound exceeds the incumbent are
/// dropped and the rest are split in four until `lip * s` certifies the
/// returned value to within `1e-4` relative.
pub fn grid_oracle(sites: &[(Point, f64)], p: f64, objective: Objective) -> (Point, f64) {
    const G: usize = 16;
    let lip = match objective {
        Objective::Minisum => sites.iter().map(|s| s.1).sum(),
        Objective::Minimax => sites.iter().map(|s| s.1).fold(0.0, f64::max),
    };
    let (mut lo, mut hi) = (sites[0].0, sites[0].0);
    for &(a, _) in sites {
        lo = Point::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Point::new(hi.x.max(a.x), hi.y.max(a.y));
    }
    let mut s = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9) / G as f64;
    let eval = |c: Point| (c, ref_objective(sites, c, p, objective));
    let mut cells: Vec<(Point, f64)> = (0..G * G)
        .map(|k| {
            let (i, j) = (k / G, k % G);
            eval(Point::new(lo.x + (i as f64 + 0.5) * s, lo.y + (j as f64 + 0.5) * s))
        })
        .collect();
    let mut best = cells.iter().copied().fold(cells[0], |b, c| if c.1 < b.1 { c } else { b });
    while lip * s > 1e-4 * best.1.max(1.0) {
        let h = s / 4.0;
        cells = cells
            .iter()
            .filter(|c| c.1 - lip * s <= best.1)
            .flat_map(|&(c, _)| {
                [(-h, -h), (-h, h), (h, -h), (h, h)].map(|(dx, dy)| eval(Point::new(c.x + dx, c.y + dy)))
            })
            .collect();
        s /= 2.0;
        for &c in &cells {
            if c.1 < best.1 {
                best = c;
            }
        }
    }
    best
}

/// `n` fixed-weight sites on `[0, 10]^2` with weights in `[1, 10)`.
pub fn random_sites(rng: &mut SplitMix64, n: usize) -> Vec<(Point, f64)> {
    (0..n)
        .map(|_| {
            (
                Point::new(rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)),
                rng.uniform(1.0, 10.0),
            )
        })
        .collect()
}

pub fn instance_from(sites: &[(Point, f64)], p: f64, objective: Objective) -> Instance {
    Instance::new(
        sites.iter().map(|&(a, w)| ClientSite::fixed(a, w)).collect(),
        Norm::new(p).unwrap(),
        objective,
    )
}

/// Relative difference scaled by `max(1, |reference|)`.
pub fn rel_diff(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1.0)
}
