//! Distance and intersection predicates on points, segments and triangles.
//!
//! All routines are closed-form and branch on degenerate configurations
//! explicitly; callers compare the returned distances against
//! [`TOL_GEOM`](super::TOL_GEOM).

use super::{Point3, Vec3};

/// Closest points between segments `[p0,p1]` and `[q0,q1]`.
///
/// Returns `(distance, s, t)` with the closest points at `p0 + s(p1-p0)` and
/// `q0 + t(q1-q0)`.
pub fn segment_segment(p0: &Point3, p1: &Point3, q0: &Point3, q1: &Point3) -> (f64, f64, f64) {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let eps = 1e-300;

    let (s, t) = if a <= eps && e <= eps {
        (0.0, 0.0)
    } else if a <= eps {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(&r);
        if e <= eps {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s = if denom > 1e-14 * a * e { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    let c1 = p0 + d1 * s;
    let c2 = q0 + d2 * t;
    ((c1 - c2).norm(), s, t)
}

/// Closest point on triangle `abc` to `p`.
pub fn closest_point_triangle(p: &Point3, a: &Point3, b: &Point3, c: &Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

pub fn point_triangle_distance(p: &Point3, tri: &[Point3; 3]) -> f64 {
    (p - closest_point_triangle(p, &tri[0], &tri[1], &tri[2])).norm()
}

/// True when the segment crosses the interior of the triangle plane inside
/// the triangle (transversal piercing only; coplanar contact is picked up by
/// the distance routines).
pub fn segment_pierces_triangle(p0: &Point3, p1: &Point3, tri: &[Point3; 3]) -> bool {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let dir = p1 - p0;
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    let scale = dir.norm() * e1.norm() * e2.norm();
    if det.abs() <= 1e-14 * scale {
        return false;
    }
    let inv = 1.0 / det;
    let s = p0 - tri[0];
    let u = s.dot(&h) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let t = e2.dot(&q) * inv;
    (0.0..=1.0).contains(&t)
}

/// Minimum distance between a segment and a triangle.
pub fn segment_triangle_distance(p0: &Point3, p1: &Point3, tri: &[Point3; 3]) -> f64 {
    if segment_pierces_triangle(p0, p1, tri) {
        return 0.0;
    }
    let mut best = point_triangle_distance(p0, tri).min(point_triangle_distance(p1, tri));
    for k in 0..3 {
        let (d, _, _) = segment_segment(p0, p1, &tri[k], &tri[(k + 1) % 3]);
        best = best.min(d);
    }
    best
}

/// Minimum distance between two triangles.
pub fn triangle_distance(t1: &[Point3; 3], t2: &[Point3; 3]) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..3 {
        let (a, b) = (&t1[k], &t1[(k + 1) % 3]);
        if segment_pierces_triangle(a, b, t2) {
            return 0.0;
        }
        let (c, d) = (&t2[k], &t2[(k + 1) % 3]);
        if segment_pierces_triangle(c, d, t1) {
            return 0.0;
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let (d, _, _) = segment_segment(&t1[i], &t1[(i + 1) % 3], &t2[j], &t2[(j + 1) % 3]);
            best = best.min(d);
        }
        best = best.min(point_triangle_distance(&t1[i], t2)).min(point_triangle_distance(&t2[i], t1));
    }
    best
}

/// Radius of the circle through three points; infinite for collinear input.
pub fn circumradius(a: &Point3, b: &Point3, c: &Point3) -> f64 {
    let ab = (b - a).norm();
    let bc = (c - b).norm();
    let ca = (a - c).norm();
    let area2 = (b - a).cross(&(c - a)).norm();
    if area2 <= 1e-15 * ab * ca {
        f64::INFINITY
    } else {
        ab * bc * ca / (2.0 * area2)
    }
}

/// Any unit vector orthogonal to `v`.
pub fn any_perpendicular(v: &Vec3) -> Vec3 {
    let ax = v.x.abs();
    let ay = v.y.abs();
    let az = v.z.abs();
    let axis = if ax <= ay && ax <= az {
        Vec3::x()
    } else if ay <= az {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let p = axis - v * (v.dot(&axis) / v.norm_squared());
    p.normalize()
}
