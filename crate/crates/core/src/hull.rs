//! Planar convex hull (Andrew's monotone chain) and point classification.

use crate::model::Point;

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Hull vertices in counter-clockwise order without repeating the first one.
/// Collinear boundary points are dropped; degenerate inputs yield one or two
/// vertices.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.euclid(&a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.euclid(&Point::new(a.x + t * dx, a.y + t * dy))
}

/// Whether `p` lies in the hull, counting points within `tol` of the boundary
/// as inside.
pub fn hull_contains(hull: &[Point], p: Point, tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => p.euclid(&hull[0]) <= tol,
        2 => segment_distance(p, hull[0], hull[1]) <= tol,
        n => {
            let mut inside = true;
            for i in 0..n {
                let (a, b) = (hull[i], hull[(i + 1) % n]);
                if cross(a, b, p) < 0.0 {
                    inside = false;
                    break;
                }
            }
            inside
                || (0..n).any(|i| segment_distance(p, hull[i], hull[(i + 1) % n]) <= tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn square_with_interior_points() {
        let h = convex_hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.0, 1.0), (0.5, 0.0)]));
        assert_eq!(h, pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]));
        assert!(hull_contains(&h, Point::new(0.5, 0.5), 1e-9));
        assert!(hull_contains(&h, Point::new(1.0, 0.5), 1e-9));
        assert!(hull_contains(&h, Point::new(1.0 + 1e-10, 0.5), 1e-9));
        assert!(!hull_contains(&h, Point::new(2.0, 2.0), 1e-9));
        assert!(!hull_contains(&h, Point::new(1.0 + 1e-6, 0.5), 1e-9));
    }

    #[test]
    fn degenerate_hulls() {
        let h = convex_hull(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]));
        assert_eq!(h.len(), 2);
        assert!(hull_contains(&h, Point::new(1.5, 1.5), 1e-9));
        assert!(!hull_contains(&h, Point::new(1.5, 1.0), 1e-9));
        let h = convex_hull(&pts(&[(3.0, 3.0), (3.0, 3.0)]));
        assert_eq!(h.len(), 1);
        assert!(hull_contains(&h, Point::new(3.0, 3.0), 1e-9));
    }
}
