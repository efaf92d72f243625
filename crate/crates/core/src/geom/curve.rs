use serde::{Deserialize, Serialize};

use super::broadphase::{self, Aabb};
use super::predicates::segment_segment;
use super::{Point3, TOL_GEOM};
use crate::error::{Error, Result};

/// A piecewise-linear curve in Euclidean 3-space.
///
/// Closed curves carry an implicit segment from the last vertex back to the
/// first. A validated curve has finite coordinates, no repeated consecutive
/// vertices and no self-contact between non-adjacent segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct PolyCurve3 {
    closed: bool,
    vertices: Vec<Point3>,
}

#[derive(Deserialize)]
struct RawCurve {
    closed: bool,
    vertices: Vec<[f64; 3]>,
}

impl TryFrom<RawCurve> for PolyCurve3 {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        let pts = raw.vertices.iter().map(|v| Point3::new(v[0], v[1], v[2])).collect();
        PolyCurve3::new(pts, raw.closed)
    }
}

/// A pair of non-adjacent segments closer than [`TOL_GEOM`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfContact {
    pub first: usize,
    pub second: usize,
    pub distance: f64,
}

impl PolyCurve3 {
    pub fn new(vertices: Vec<Point3>, closed: bool) -> Result<Self> {
        let curve = Self::new_unchecked(vertices, closed);
        curve.validate_basic()?;
        if let Some(c) = curve.find_self_contact() {
            return Err(Error::Refinement(format!(
                "curve is not simple: segments {} and {} are {:.3e} apart",
                c.first, c.second, c.distance
            )));
        }
        Ok(curve)
    }

    pub fn closed(vertices: Vec<Point3>) -> Result<Self> {
        Self::new(vertices, true)
    }

    pub fn open(vertices: Vec<Point3>) -> Result<Self> {
        Self::new(vertices, false)
    }

    /// Builds a curve without the simplicity check; finiteness and
    /// vertex-count rules still apply at the next validation.
    pub(crate) fn new_unchecked(vertices: Vec<Point3>, closed: bool) -> Self {
        PolyCurve3 { closed, vertices }
    }

    fn validate_basic(&self) -> Result<()> {
        let min = if self.closed { 3 } else { 2 };
        if self.vertices.len() < min {
            return Err(Error::input(format!(
                "{} curve needs at least {min} vertices, got {}",
                if self.closed { "closed" } else { "open" },
                self.vertices.len()
            )));
        }
        if let Some(i) = self.vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::input(format!("vertex {i} has a non-finite coordinate")));
        }
        for k in 0..self.segment_count() {
            let (a, b) = self.segment(k);
            if (b - a).norm() <= TOL_GEOM {
                return Err(Error::input(format!("segment {k} is degenerate (repeated vertex)")));
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len().saturating_sub(1)
        }
    }

    pub fn segment(&self, k: usize) -> (Point3, Point3) {
        let n = self.vertices.len();
        (self.vertices[k], self.vertices[(k + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point3, Point3)> + '_ {
        (0..self.segment_count()).map(move |k| self.segment(k))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    fn segment_boxes(&self) -> Vec<Aabb> {
        self.segments().map(|(a, b)| Aabb::of_points([&a, &b])).collect()
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.segment_count();
        let d = i.abs_diff(j);
        d <= 1 || (self.closed && d == n - 1)
    }

    /// First pair of non-adjacent segments closer than [`TOL_GEOM`], if any.
    pub fn find_self_contact(&self) -> Option<SelfContact> {
        let boxes = self.segment_boxes();
        let mut worst: Option<SelfContact> = None;
        for (i, j) in broadphase::self_pairs(&boxes, TOL_GEOM) {
            if self.adjacent(i, j) {
                continue;
            }
            let (a0, a1) = self.segment(i);
            let (b0, b1) = self.segment(j);
            let (d, _, _) = segment_segment(&a0, &a1, &b0, &b1);
            if d <= TOL_GEOM && worst.is_none_or(|w| (i, j) < (w.first, w.second)) {
                worst = Some(SelfContact { first: i, second: j, distance: d });
            }
        }
        worst
    }

    /// Minimum distance between this curve and `other`.
    pub fn distance_to(&self, other: &PolyCurve3) -> f64 {
        self.distance_to_within(other, f64::INFINITY)
    }

    /// Minimum distance, only resolved exactly below `cap`; returns a value
    /// `>= cap` when the curves are at least `cap` apart.
    pub fn distance_to_within(&self, other: &PolyCurve3, cap: f64) -> f64 {
        let a = self.segment_boxes();
        let b = other.segment_boxes();
        let pad = if cap.is_finite() {
            cap
        } else {
            let ba = Aabb::of_points(self.vertices.iter());
            let bb = Aabb::of_points(other.vertices.iter());
            let mut d: f64 = 0.0;
            for k in 0..3 {
                d = d.max(bb.max[k] - ba.min[k]).max(ba.max[k] - bb.min[k]);
            }
            d
        };
        let mut best = cap;
        for (i, j) in broadphase::cross_pairs(&a, &b, pad * 0.5) {
            let (a0, a1) = self.segment(i);
            let (b0, b1) = other.segment(j);
            let (d, _, _) = segment_segment(&a0, &a1, &b0, &b1);
            best = best.min(d);
        }
        best
    }

    /// Inserts the midpoint of every segment.
    pub fn subdivided(&self) -> PolyCurve3 {
        let mut out = Vec::with_capacity(self.vertices.len() * 2);
        for k in 0..self.segment_count() {
            let (a, b) = self.segment(k);
            out.push(a);
            out.push(nalgebra::center(&a, &b));
        }
        if !self.closed {
            out.push(*self.vertices.last().unwrap());
        }
        PolyCurve3::new_unchecked(out, self.closed)
    }

    pub fn reversed(&self) -> PolyCurve3 {
        let mut v = self.vertices.clone();
        v.reverse();
        PolyCurve3::new_unchecked(v, self.closed)
    }

    /// Point at arc length `t` from the first vertex (wrapping for closed curves).
    pub fn point_at_length(&self, t: f64) -> Point3 {
        let total = self.length();
        let mut t = if self.closed { t.rem_euclid(total) } else { t.clamp(0.0, total) };
        for (a, b) in self.segments() {
            let l = (b - a).norm();
            if t <= l {
                return a + (b - a) * (t / l);
            }
            t -= l;
        }
        if self.closed {
            self.vertices[0]
        } else {
            *self.vertices.last().unwrap()
        }
    }

    /// Arc-length coordinate of the point of the curve closest to `p`, with
    /// the distance to it.
    pub fn project(&self, p: &Point3) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        let mut acc = 0.0;
        for (a, b) in self.segments() {
            let ab = b - a;
            let l2 = ab.norm_squared();
            let t = ((p - a).dot(&ab) / l2).clamp(0.0, 1.0);
            let d = (a + ab * t - p).norm();
            if d < best.0 {
                best = (d, acc + t * l2.sqrt());
            }
            acc += l2.sqrt();
        }
        (best.1, best.0)
    }

    /// Uniformly resamples by arc length. Closed curves get `n` vertices,
    /// open curves `n + 1` (both ends kept).
    pub fn resampled(&self, n: usize) -> PolyCurve3 {
        let total = self.length();
        let pts: Vec<Point3> = if self.closed {
            (0..n).map(|k| self.point_at_length(total * k as f64 / n as f64)).collect()
        } else {
            (0..=n).map(|k| self.point_at_length(total * k as f64 / n as f64)).collect()
        };
        PolyCurve3::new_unchecked(pts, self.closed)
    }

    /// Sub-curve of an open curve between two arc-length positions.
    pub fn trimmed(&self, from: f64, to: f64, n: usize) -> PolyCurve3 {
        let pts = (0..=n).map(|k| self.point_at_length(from + (to - from) * k as f64 / n as f64)).collect();
        PolyCurve3::new_unchecked(pts, false)
    }

    /// Re-runs the full validation (used after unchecked construction).
    pub fn validated(self) -> Result<Self> {
        PolyCurve3::new(self.vertices, self.closed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(z: f64) -> Vec<Point3> {
        vec![Point3::new(0., 0., z), Point3::new(1., 0., z), Point3::new(1., 1., z), Point3::new(0., 1., z)]
    }

    #[test]
    fn closed_curve_needs_three_vertices() {
        let err = PolyCurve3::closed(square(0.)[..2].to_vec()).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn repeated_vertex_rejected() {
        let mut v = square(0.);
        v.insert(1, v[0]);
        assert!(PolyCurve3::closed(v).is_err());
    }

    #[test]
    fn figure_of_eight_is_not_simple() {
        let v =
            vec![Point3::new(0., 0., 0.), Point3::new(1., 1., 0.), Point3::new(1., 0., 0.), Point3::new(0., 1., 0.)];
        let err = PolyCurve3::closed(v).unwrap_err();
        assert!(matches!(err, Error::Refinement(ref m) if m.contains("segments 0 and 2")), "{err}");
    }

    #[test]
    fn distance_and_subdivision() {
        let a = PolyCurve3::closed(square(0.)).unwrap();
        let b = PolyCurve3::closed(square(2.)).unwrap();
        assert!((a.distance_to(&b) - 2.0).abs() < 1e-12);
        let s = a.subdivided();
        assert_eq!(s.len(), 8);
        assert!((s.length() - 4.0).abs() < 1e-12);
        assert!(s.validated().is_ok());
    }

    #[test]
    fn json_shape() {
        let a = PolyCurve3::open(square(0.)).unwrap();
        let js = serde_json::to_value(&a).unwrap();
        assert_eq!(js["closed"], false);
        assert_eq!(js["vertices"][1], serde_json::json!([1.0, 0.0, 0.0]));
        let back: PolyCurve3 = serde_json::from_value(js).unwrap();
        assert_eq!(back, a);
        let bad = serde_json::json!({"closed": true, "vertices": [[0,0,0],[1,0,0]]});
        assert!(serde_json::from_value::<PolyCurve3>(bad).is_err());
    }

    #[test]
    fn resample_keeps_length_of_circle_close() {
        let n = 200;
        let pts = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                Point3::new(a.cos(), a.sin(), 0.0)
            })
            .collect();
        let c = PolyCurve3::closed(pts).unwrap();
        let r = c.resampled(50);
        assert_eq!(r.len(), 50);
        assert!((r.length() - std::f64::consts::TAU).abs() < 0.01);
    }
}
