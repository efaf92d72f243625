use std::f64::consts::TAU;

use super::{Point3, PolyCurve3};
use crate::error::{Error, Result};

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// PL approximation of the `(p, q)` curve on the standard torus: `p` turns
/// along the core circle of radius `major_radius`, `q` turns around it.
///
/// The meridional turn is right-handed about the core tangent, so the
/// resulting curve has `lk` with its surface pushoff equal to `p * q`.
pub fn make_torus_knot_curve(p: i64, q: i64, major_radius: f64, minor_radius: f64, n: usize) -> Result<PolyCurve3> {
    if gcd(p, q) != 1 {
        return Err(Error::input(format!("gcd({p}, {q}) must be 1")));
    }
    if !(minor_radius > 0.0 && minor_radius < major_radius) {
        return Err(Error::input(format!(
            "radii must satisfy 0 < minor < major, got minor = {minor_radius}, major = {major_radius}"
        )));
    }
    let min_n = 12 * (p.unsigned_abs() + q.unsigned_abs()) as usize;
    if n < min_n {
        return Err(Error::input(format!("n = {n} is below the minimum {min_n}")));
    }
    let pts = (0..n)
        .map(|k| {
            let phi = TAU * k as f64 / n as f64;
            let (a, b) = (p as f64 * phi, q as f64 * phi);
            let rho = major_radius + minor_radius * b.cos();
            Point3::new(rho * a.cos(), rho * a.sin(), -minor_radius * b.sin())
        })
        .collect();
    PolyCurve3::closed(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longitude_is_round() {
        let c = make_torus_knot_curve(1, 0, 2.0, 0.5, 64).unwrap();
        assert_eq!(c.len(), 64);
        assert!(c.vertices().iter().all(|v| ((v.x.hypot(v.y)) - 2.5).abs() < 1e-12 && v.z == 0.0));
    }

    #[test]
    fn trefoil_has_requested_vertex_count() {
        let c = make_torus_knot_curve(2, 3, 2.0, 0.5, 240).unwrap();
        assert_eq!(c.len(), 240);
    }

    #[test]
    fn preconditions() {
        assert!(make_torus_knot_curve(2, 2, 2.0, 0.5, 240).is_err());
        assert!(make_torus_knot_curve(2, 3, 0.5, 2.0, 240).is_err());
        assert!(make_torus_knot_curve(2, 3, 2.0, 0.5, 59).is_err());
        assert!(make_torus_knot_curve(0, 1, 2.0, 0.5, 12).is_ok());
    }
}
