use serde::{Deserialize, Serialize};

use super::broadphase::{self, Aabb};
use super::predicates::{circumradius, segment_segment};
use super::{Point3, PolyCurve3, TOL_GEOM};
use crate::error::{Error, Result};

/// Where an arc endpoint lands on a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attachment {
    pub circle: usize,
    /// Arc length along the circle, measured from its first vertex.
    pub position: f64,
}

/// A connected spatial graph made of closed curves (`circles`) and open
/// curves (`arcs`) whose endpoints sit on the circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct SpatialGraph {
    circles: Vec<PolyCurve3>,
    arcs: Vec<PolyCurve3>,
    #[serde(skip)]
    ends: Vec<[Attachment; 2]>,
}

#[derive(Deserialize)]
struct RawGraph {
    circles: Vec<PolyCurve3>,
    #[serde(default)]
    arcs: Vec<PolyCurve3>,
}

impl TryFrom<RawGraph> for SpatialGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        SpatialGraph::new(raw.circles, raw.arcs)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl SpatialGraph {
    pub fn new(circles: Vec<PolyCurve3>, arcs: Vec<PolyCurve3>) -> Result<Self> {
        if circles.is_empty() {
            return Err(Error::input("graph needs at least one circle"));
        }
        if circles.iter().any(|c| !c.is_closed()) {
            return Err(Error::input("every circle must be a closed curve"));
        }
        if arcs.iter().any(|a| a.is_closed()) {
            return Err(Error::input("every arc must be an open curve"));
        }
        let mut ends = Vec::with_capacity(arcs.len());
        for (k, arc) in arcs.iter().enumerate() {
            let first = arc.vertices()[0];
            let last = *arc.vertices().last().unwrap();
            let a = Self::attach(&circles, &first)
                .ok_or_else(|| Error::input(format!("arc {k} starts off every circle")))?;
            let b =
                Self::attach(&circles, &last).ok_or_else(|| Error::input(format!("arc {k} ends off every circle")))?;
            ends.push([a, b]);
        }
        let g = SpatialGraph { circles, arcs, ends };
        g.check_disjoint()?;
        g.check_connected()?;
        Ok(g)
    }

    /// A single closed curve.
    pub fn knot(k: PolyCurve3) -> Result<Self> {
        Self::new(vec![k], vec![])
    }

    fn attach(circles: &[PolyCurve3], p: &Point3) -> Option<Attachment> {
        circles.iter().enumerate().find_map(|(i, c)| {
            let (pos, d) = c.project(p);
            (d <= TOL_GEOM).then_some(Attachment { circle: i, position: pos })
        })
    }

    pub fn circles(&self) -> &[PolyCurve3] {
        &self.circles
    }

    pub fn arcs(&self) -> &[PolyCurve3] {
        &self.arcs
    }

    pub fn arc_ends(&self, arc: usize) -> [Attachment; 2] {
        self.ends[arc]
    }

    /// `#vertices − #edges` of the underlying abstract graph.
    pub fn euler_characteristic(&self) -> i64 {
        -(self.arcs.len() as i64)
    }

    /// Genus of the boundary of a regular neighbourhood.
    pub fn neighbourhood_genus(&self) -> i64 {
        1 - self.euler_characteristic()
    }

    fn all_curves(&self) -> Vec<&PolyCurve3> {
        self.circles.iter().chain(self.arcs.iter()).collect()
    }

    fn check_disjoint(&self) -> Result<()> {
        let curves = self.all_curves();
        let nc = self.circles.len();
        for i in 0..curves.len() {
            for j in (i + 1)..curves.len() {
                let (a, b) = (curves[i], curves[j]);
                let boxes_a: Vec<Aabb> = a.segments().map(|(p, q)| Aabb::of_points([&p, &q])).collect();
                let boxes_b: Vec<Aabb> = b.segments().map(|(p, q)| Aabb::of_points([&p, &q])).collect();
                for (si, sj) in broadphase::cross_pairs(&boxes_a, &boxes_b, TOL_GEOM) {
                    let (a0, a1) = a.segment(si);
                    let (b0, b1) = b.segment(sj);
                    let (d, _, t) = segment_segment(&a0, &a1, &b0, &b1);
                    if d > TOL_GEOM {
                        continue;
                    }
                    // A circle may touch an arc only at that arc's own endpoint.
                    let allowed = i < nc && j >= nc && {
                        let arc = j - nc;
                        let last = b.segment_count() - 1;
                        let at_end = (sj == 0 && t <= TOL_GEOM) || (sj == last && t >= 1.0 - TOL_GEOM);
                        at_end && self.ends[arc].iter().any(|e| e.circle == i)
                    };
                    if !allowed {
                        return Err(Error::Geometry {
                            message: format!("graph curves {i} and {j} intersect (segments {si}, {sj})"),
                            clearance: d,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<()> {
        let mut parent: Vec<usize> = (0..self.circles.len()).collect();
        for e in &self.ends {
            let (a, b) = (find(&mut parent, e[0].circle), find(&mut parent, e[1].circle));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..self.circles.len()).any(|i| find(&mut parent, i) != root) {
            return Err(Error::input("spatial graph is not connected"));
        }
        Ok(())
    }

    /// Reach estimate: the smallest local circumradius of consecutive
    /// vertex triples, and half the distance of every segment pair whose
    /// closest points are interior to both segments.
    pub fn clearance(&self) -> f64 {
        let curves = self.all_curves();
        let mut best = f64::INFINITY;
        for c in &curves {
            let v = c.vertices();
            let n = v.len();
            let triples = if c.is_closed() { n } else { n.saturating_sub(2) };
            for k in 0..triples {
                best = best.min(circumradius(&v[k], &v[(k + 1) % n], &v[(k + 2) % n]));
            }
        }
        let mut segs: Vec<(usize, usize, Point3, Point3)> = Vec::new();
        for (ci, c) in curves.iter().enumerate() {
            for (k, (a, b)) in c.segments().enumerate() {
                segs.push((ci, k, a, b));
            }
        }
        let boxes: Vec<Aabb> = segs.iter().map(|s| Aabb::of_points([&s.2, &s.3])).collect();
        let total: f64 = curves.iter().map(|c| c.length()).sum();
        let pad = if best.is_finite() { best } else { total };
        for (i, j) in broadphase::self_pairs(&boxes, pad) {
            let (ci, ki, a0, a1) = segs[i];
            let (cj, kj, b0, b1) = segs[j];
            if ci == cj {
                let n = curves[ci].segment_count();
                let d = ki.abs_diff(kj);
                if d <= 1 || (curves[ci].is_closed() && d == n - 1) {
                    continue;
                }
            }
            if let Some(d) = critical_distance(&a0, &a1, &b0, &b1) {
                best = best.min(0.5 * d);
            }
        }
        best
    }
}

/// Distance of a segment pair when it is a local minimum of the distance
/// between the two curves: closest points interior to both segments, or
/// overlapping near-parallel segments.
fn critical_distance(a0: &Point3, a1: &Point3, b0: &Point3, b1: &Point3) -> Option<f64> {
    let da = a1 - a0;
    let db = b1 - b0;
    let sin = da.cross(&db).norm() / (da.norm() * db.norm());
    let (d, s, t) = segment_segment(a0, a1, b0, b1);
    let eps = 1e-9;
    if sin < 1e-6 {
        let u = da.normalize();
        let (lo, hi) = {
            let x = (b0 - a0).dot(&u);
            let y = (b1 - a0).dot(&u);
            (x.min(y), x.max(y))
        };
        return (hi > eps && lo < da.norm() - eps).then_some(d);
    }
    (s > eps && s < 1.0 - eps && t > eps && t < 1.0 - eps).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn circle(c: Point3, r: f64, n: usize) -> PolyCurve3 {
        PolyCurve3::closed(
            (0..n)
                .map(|k| {
                    let a = TAU * k as f64 / n as f64;
                    c + nalgebra::Vector3::new(r * a.cos(), r * a.sin(), 0.0)
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn dumbbell_is_connected_with_genus_two() {
        let a = circle(Point3::new(-2.5, 0., 0.), 1.0, 64);
        let b = circle(Point3::new(2.5, 0., 0.), 1.0, 64);
        let arc = PolyCurve3::open(vec![Point3::new(-1.5, 0., 0.), Point3::new(1.5, 0., 0.)]).unwrap();
        let g = SpatialGraph::new(vec![a, b], vec![arc]).unwrap();
        assert_eq!(g.neighbourhood_genus(), 2);
        let c = g.clearance();
        assert!(c > 0.99 && c <= 1.0, "{c}");
    }

    #[test]
    fn disconnected_graph_is_input_error() {
        let a = circle(Point3::new(-2.5, 0., 0.), 1.0, 32);
        let b = circle(Point3::new(2.5, 0., 0.), 1.0, 32);
        assert!(matches!(SpatialGraph::new(vec![a, b], vec![]), Err(Error::Input(_))));
    }

    #[test]
    fn crossing_circles_rejected() {
        let a = circle(Point3::new(0., 0., 0.), 1.0, 32);
        let b = PolyCurve3::closed(vec![Point3::new(0., -2., 0.), Point3::new(0., 2., 0.), Point3::new(0., 0., 3.)])
            .unwrap();
        assert!(matches!(SpatialGraph::new(vec![a, b], vec![]), Err(Error::Geometry { .. })));
    }

    #[test]
    fn clearance_sees_close_strands() {
        let g = SpatialGraph::knot(circle(Point3::new(0., 0., 0.), 1.0, 64)).unwrap();
        assert!((g.clearance() - 1.0).abs() < 1e-2);
        let strip = PolyCurve3::closed(vec![
            Point3::new(0., 0., 0.),
            Point3::new(4., 0., 0.),
            Point3::new(4., 0.2, 0.),
            Point3::new(0., 0.2, 0.),
        ])
        .unwrap();
        let g = SpatialGraph::knot(strip).unwrap();
        assert!((g.clearance() - 0.1).abs() < 1e-12);
    }
}
