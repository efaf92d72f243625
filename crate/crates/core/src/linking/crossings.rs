//! Linking number by counting signed crossings in a generic projection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{PolyCurve3, Vec3};

/// Relative tolerance for projection degeneracies.
pub const TOL_PROJ: f64 = 1e-7;
pub const MAX_ATTEMPTS: usize = 32;

/// How to choose the projection direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    /// Random directions from a generator seeded with the given value.
    Auto { seed: u64 },
    /// Try this direction first, then fall back to seeded random ones.
    Fixed(Vec3),
}

impl Default for Direction {
    fn default() -> Self {
        Direction::Auto { seed: 0 }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Half the signed count of crossings between the projections of `c1` and
/// `c2`. A crossing of segment directions `t1`, `t2` at points `p1`, `p2`
/// (with `p1 - p2` along the view axis) has sign `det[t1, t2, p1 - p2]`.
pub fn linking_number_crossings(c1: &PolyCurve3, c2: &PolyCurve3, direction: Direction) -> Result<i64> {
    if !c1.is_closed() || !c2.is_closed() {
        return Err(Error::input("linking numbers need closed curves"));
    }
    let (mut rng, first) = match direction {
        Direction::Auto { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_unit(&mut rng);
            (rng, d)
        }
        Direction::Fixed(d) => {
            let n = d.norm();
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::input("projection direction must be a nonzero finite vector"));
            }
            (ChaCha8Rng::seed_from_u64(0), d / n)
        }
    };
    let mut d = first;
    for _ in 0..MAX_ATTEMPTS {
        if let Some(twice) = signed_crossings(c1, c2, &d) {
            debug_assert!(twice % 2 == 0);
            return Ok(twice / 2);
        }
        d = random_unit(&mut rng);
    }
    Err(Error::DegenerateProjection { attempts: MAX_ATTEMPTS })
}

type P2 = [f64; 2];

struct Projected {
    pts: Vec<P2>,
    depth: Vec<f64>,
}

fn project(c: &PolyCurve3, e1: &Vec3, e2: &Vec3, d: &Vec3) -> Projected {
    Projected {
        pts: c.vertices().iter().map(|p| [p.coords.dot(e1), p.coords.dot(e2)]).collect(),
        depth: c.vertices().iter().map(|p| p.coords.dot(d)).collect(),
    }
}

/// Twice the linking number, or `None` when the direction is not generic.
fn signed_crossings(c1: &PolyCurve3, c2: &PolyCurve3, d: &Vec3) -> Option<i64> {
    let e1 = crate::geom::predicates::any_perpendicular(d);
    let e2 = d.cross(&e1);
    let a = project(c1, &e1, &e2, d);
    let b = project(c2, &e1, &e2, d);
    let (na, nb) = (a.pts.len(), b.pts.len());
    let bbox = |p: &Projected, k: usize, n: usize| {
        let (x, y) = (p.pts[k], p.pts[(k + 1) % n]);
        [x[0].min(y[0]), x[0].max(y[0]), x[1].min(y[1]), x[1].max(y[1])]
    };
    let scale = a.pts.iter().chain(&b.pts).fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs())).max(1.0);
    let pad = TOL_PROJ * scale;
    let boxes_b: Vec<[f64; 4]> = (0..nb).map(|k| bbox(&b, k, nb)).collect();
    let mut twice = 0i64;
    for i in 0..na {
        let ba = bbox(&a, i, na);
        let (p0, p1) = (a.pts[i], a.pts[(i + 1) % na]);
        let r = [p1[0] - p0[0], p1[1] - p0[1]];
        for (j, bb) in boxes_b.iter().enumerate() {
            if ba[1] + pad < bb[0] || bb[1] + pad < ba[0] || ba[3] + pad < bb[2] || bb[3] + pad < ba[2] {
                continue;
            }
            let (q0, q1) = (b.pts[j], b.pts[(j + 1) % nb]);
            let s = [q1[0] - q0[0], q1[1] - q0[1]];
            let w = [q0[0] - p0[0], q0[1] - p0[1]];
            let denom = r[0] * s[1] - r[1] * s[0];
            let lr = r[0].hypot(r[1]);
            let ls = s[0].hypot(s[1]);
            if lr <= pad || ls <= pad {
                return None; // a segment seen end-on
            }
            if denom.abs() <= TOL_PROJ * lr * ls {
                // Near-parallel: degenerate only if the supporting lines nearly coincide.
                let off = (w[0] * r[1] - w[1] * r[0]).abs() / lr;
                if off <= pad {
                    return None;
                }
                continue;
            }
            let t = (w[0] * s[1] - w[1] * s[0]) / denom; // along segment i
            let u = (w[0] * r[1] - w[1] * r[0]) / denom; // along segment j
            let (et, eu) = (pad / lr, pad / ls);
            if t < -et || t > 1.0 + et || u < -eu || u > 1.0 + eu {
                continue;
            }
            if t.abs() <= et || (1.0 - t).abs() <= et || u.abs() <= eu || (1.0 - u).abs() <= eu {
                return None; // crossing too close to a vertex
            }
            let za = a.depth[i] + t * (a.depth[(i + 1) % na] - a.depth[i]);
            let zb = b.depth[j] + u * (b.depth[(j + 1) % nb] - b.depth[j]);
            if (za - zb).abs() <= pad {
                return None; // the curves nearly meet
            }
            // det[t1, t2, (za - zb) d] = (za - zb) * (t1 x t2) . d, and the
            // projected frame (e1, e2, d) is right-handed.
            let orient = denom.signum();
            twice += if (za - zb) * orient > 0.0 { 1 } else { -1 };
        }
    }
    Some(twice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;
    use std::f64::consts::TAU;

    pub(crate) fn circle(c: Point3, u: Vec3, v: Vec3, n: usize) -> PolyCurve3 {
        PolyCurve3::closed(
            (0..n)
                .map(|k| {
                    let a = TAU * (k as f64 + 0.37) / n as f64;
                    c + u * a.cos() + v * a.sin()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn distant_circles_are_unlinked() {
        let a = circle(Point3::origin(), Vec3::x(), Vec3::y(), 40);
        let b = circle(Point3::new(0.0, 0.0, 10.0), Vec3::x(), Vec3::y(), 40);
        assert_eq!(linking_number_crossings(&a, &b, Direction::default()).unwrap(), 0);
    }

    #[test]
    fn hopf_link() {
        // At (1, 0, 0) the first circle runs along +y while the second turns
        // from +x to +z around it, a left-handed meridian: linking number -1.
        let a = circle(Point3::origin(), Vec3::x(), Vec3::y(), 60);
        let b = circle(Point3::new(1.0, 0.0, 0.0), Vec3::x(), Vec3::z(), 60);
        let lk = linking_number_crossings(&a, &b, Direction::default()).unwrap();
        assert_eq!(lk, -1);
        assert_eq!(linking_number_crossings(&b, &a, Direction::default()).unwrap(), -1);
        let rev = linking_number_crossings(&a, &b.reversed(), Direction::default()).unwrap();
        assert_eq!(rev, -lk);
    }

    #[test]
    fn degenerate_first_direction_is_retried() {
        // Looking along the line through a vertex of each curve, the two
        // vertices project onto the same point.
        let a = circle(Point3::origin(), Vec3::x(), Vec3::y(), 40);
        let b = circle(Point3::new(1.0, 0.0, 0.0), Vec3::x(), Vec3::z(), 40);
        let d = a.vertices()[0] - b.vertices()[0];
        assert!(signed_crossings(&a, &b, &d.normalize()).is_none());
        let lk = linking_number_crossings(&a, &b, Direction::Fixed(d)).unwrap();
        assert_eq!(lk.abs(), 1);
    }
}
