//! Reference configurations used by the tests, the self-test and the CLI.

use std::f64::consts::{PI, TAU};

use crate::error::Result;
use crate::geom::{Point3, PolyCurve3, SpatialGraph, TubeOptions, Vec3};

fn planar_circle(centre: Point3, radius: f64, n: usize) -> PolyCurve3 {
    PolyCurve3::new_unchecked(
        (0..n)
            .map(|k| {
                let a = TAU * k as f64 / n as f64;
                centre + Vec3::new(radius * a.cos(), radius * a.sin(), 0.0)
            })
            .collect(),
        true,
    )
}

/// Core circle of the standard torus (major radius 2 in the `xy`-plane).
pub fn standard_torus() -> Result<SpatialGraph> {
    SpatialGraph::knot(planar_circle(Point3::origin(), 2.0, 128).validated()?)
}

pub fn standard_torus_options() -> TubeOptions {
    TubeOptions { radius: Some(0.5), ..Default::default() }
}

/// Round planar unknot of radius 1.
pub fn unknot() -> Result<SpatialGraph> {
    SpatialGraph::knot(planar_circle(Point3::origin(), 1.0, 96).validated()?)
}

pub fn unknot_options() -> TubeOptions {
    TubeOptions { radius: Some(0.2), ..Default::default() }
}

/// Unknot with one tunnel arc: a half circle over the top in the `xz`-plane.
pub fn unknot_with_tunnel() -> Result<SpatialGraph> {
    let knot = planar_circle(Point3::origin(), 1.0, 96).validated()?;
    let n = 48;
    let arc = (0..=n)
        .map(|k| {
            let a = PI * k as f64 / n as f64;
            Point3::new(a.cos(), 0.0, a.sin())
        })
        .collect();
    SpatialGraph::new(vec![knot], vec![PolyCurve3::open(arc)?])
}

pub fn unknot_with_tunnel_options() -> TubeOptions {
    TubeOptions { radius: Some(0.12), ..Default::default() }
}

/// Two unit circles joined by a straight arc.
pub fn dumbbell() -> Result<SpatialGraph> {
    let a = planar_circle(Point3::new(-2.5, 0.0, 0.0), 1.0, 96).validated()?;
    let b = planar_circle(Point3::new(2.5, 0.0, 0.0), 1.0, 96).validated()?;
    let arc = PolyCurve3::open((0..=12).map(|k| Point3::new(-1.5 + 3.0 * k as f64 / 12.0, 0.0, 0.0)).collect())?;
    SpatialGraph::new(vec![a, b], vec![arc])
}

pub fn dumbbell_options() -> TubeOptions {
    TubeOptions { radius: Some(0.2), ..Default::default() }
}

/// Chart of the dumbbell's connecting tube.
pub const DUMBBELL_BELT_CHART: usize = 2;

const FIG8_N: usize = 240;

fn figure_eight_point(t: f64) -> Point3 {
    let rho = 2.0 + (2.0 * t).cos();
    Point3::new(rho * (3.0 * t).cos(), rho * (3.0 * t).sin(), (4.0 * t).sin())
}

/// Figure-eight knot with a crossing arc between the strands over
/// `(-1.5, 0)` (parameters `π/3` and `5π/3`).
pub fn figure_eight() -> Result<SpatialGraph> {
    let knot = PolyCurve3::closed((0..FIG8_N).map(|k| figure_eight_point(TAU * k as f64 / FIG8_N as f64)).collect())?;
    let v = knot.vertices();
    let (i1, i2) = (FIG8_N / 6, 5 * FIG8_N / 6);
    let tangent = |i: usize| (v[(i + 1) % FIG8_N] - v[(i + FIG8_N - 1) % FIG8_N]).normalize();
    let (p1, p2) = (v[i1], v[i2]);
    let chord = p2 - p1;
    let leave = |t: Vec3, d: Vec3| (d - t * t.dot(&d)).normalize();
    let n1 = leave(tangent(i1), chord);
    let n2 = leave(tangent(i2), -chord);
    let h = 0.35 * chord.norm();
    let (c1, c2) = (p1 + n1 * h, p2 + n2 * h);
    let m = 48;
    let arc = (0..=m)
        .map(|k| {
            let t = k as f64 / m as f64;
            let s = 1.0 - t;
            Point3::from(
                p1.coords * (s * s * s)
                    + c1.coords * (3.0 * s * s * t)
                    + c2.coords * (3.0 * s * t * t)
                    + p2.coords * (t * t * t),
            )
        })
        .collect();
    SpatialGraph::new(vec![knot], vec![PolyCurve3::open(arc)?])
}

pub fn figure_eight_options() -> TubeOptions {
    TubeOptions::default()
}
