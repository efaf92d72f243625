//! Rotation-minimizing frames along polylines (double-reflection method).

use nalgebra::{Rotation3, Unit};

use super::predicates::any_perpendicular;
use super::{Point3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t: Vec3,
    pub n: Vec3,
    pub b: Vec3,
}

pub fn tangents(pts: &[Point3], closed: bool) -> Vec<Vec3> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (prev, next) = if closed {
                (pts[(i + n - 1) % n], pts[(i + 1) % n])
            } else {
                (pts[i.saturating_sub(1)], pts[(i + 1).min(n - 1)])
            };
            (next - prev).normalize()
        })
        .collect()
}

fn reflect(v: &Vec3, axis: &Vec3, c: f64) -> Vec3 {
    v - axis * (2.0 / c * axis.dot(v))
}

fn initial_normal(pts: &[Point3], t0: &Vec3) -> Vec3 {
    let centroid = pts.iter().fold(Vec3::zeros(), |acc, p| acc + p.coords) / pts.len() as f64;
    let d = pts[0].coords - centroid;
    let d = d - t0 * t0.dot(&d);
    let scale = pts.iter().map(|p| (p.coords - centroid).norm()).fold(0.0, f64::max);
    if d.norm() > 1e-6 * scale.max(1e-300) {
        d.normalize()
    } else {
        any_perpendicular(t0)
    }
}

/// Parallel-transported frames at every vertex.
///
/// For closed polylines the mismatch angle after one full turn is returned as
/// holonomy and removed by rotating frame `i` through `-holonomy * i / n`, so
/// the frames close up exactly. Open polylines report zero holonomy.
pub fn transport_frames(pts: &[Point3], closed: bool) -> (Vec<Frame>, f64) {
    let n = pts.len();
    let ts = tangents(pts, closed);
    let mut normals = Vec::with_capacity(n + 1);
    normals.push(initial_normal(pts, &ts[0]));
    let steps = if closed { n } else { n - 1 };
    for i in 0..steps {
        let j = (i + 1) % n;
        let v1 = pts[j] - pts[i];
        let c1 = v1.norm_squared();
        let r_l = reflect(&normals[i], &v1, c1);
        let t_l = reflect(&ts[i], &v1, c1);
        let v2 = ts[j] - t_l;
        let c2 = v2.norm_squared();
        let r = if c2 > 1e-30 { reflect(&r_l, &v2, c2) } else { r_l };
        let r = r - ts[j] * ts[j].dot(&r);
        normals.push(r.normalize());
    }
    let mut holonomy = 0.0;
    if closed {
        let (n0, nn) = (normals[0], normals[n]);
        holonomy = n0.cross(&nn).dot(&ts[0]).atan2(n0.dot(&nn));
        normals.truncate(n);
        for (i, nrm) in normals.iter_mut().enumerate() {
            let axis = Unit::new_normalize(ts[i]);
            *nrm = Rotation3::from_axis_angle(&axis, -holonomy * i as f64 / n as f64) * *nrm;
        }
    }
    let frames = (0..n).map(|i| Frame { t: ts[i], n: normals[i], b: ts[i].cross(&normals[i]) }).collect();
    (frames, holonomy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn planar_circle_has_radial_normals_and_no_holonomy() {
        let pts: Vec<Point3> = (0..48)
            .map(|k| {
                let a = TAU * k as f64 / 48.0;
                Point3::new(a.cos(), a.sin(), 0.0)
            })
            .collect();
        let (fr, hol) = transport_frames(&pts, true);
        assert!(hol.abs() < 1e-12);
        for (p, f) in pts.iter().zip(&fr) {
            assert!((f.n - p.coords).norm() < 1e-9);
            assert!((f.b - Vec3::new(0., 0., -1.)).norm() < 1e-9);
        }
    }

    #[test]
    fn helix_frames_are_orthonormal_and_close() {
        let n = 200;
        let pts: Vec<Point3> = (0..n)
            .map(|k| {
                let a = TAU * k as f64 / n as f64;
                Point3::new(
                    (2.0 + (3.0 * a).cos()) * (2.0 * a).cos(),
                    (2.0 + (3.0 * a).cos()) * (2.0 * a).sin(),
                    (3.0 * a).sin(),
                )
            })
            .collect();
        let (fr, _) = transport_frames(&pts, true);
        for f in &fr {
            assert!(f.t.dot(&f.n).abs() < 1e-9 && (f.n.norm() - 1.0).abs() < 1e-9);
            assert!((f.t.cross(&f.n) - f.b).norm() < 1e-12);
        }
        // Consecutive normals turn by a small angle everywhere, including the seam.
        for i in 0..n {
            assert!(fr[i].n.dot(&fr[(i + 1) % n].n) > 0.9);
        }
    }
}
