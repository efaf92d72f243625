//! Surface slope of a curve on a surface in space, read off from linking
//! numbers of its two surface pushoffs.

use serde::{Deserialize, Serialize};

use super::crossings::{linking_number_crossings, Direction};
use super::gauss::linking_number_gauss;
use crate::error::{Error, Result};
use crate::geom::chart::ChartKind;
use crate::geom::{surface_pushoff_curves, CurveOnSurface, PolyCurve3, TubeChart};

pub const ENGINES: [&str; 2] = ["crossings", "gauss"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeResult {
    pub slope: i64,
    pub lk_pushoffs: i64,
    pub lk_knot_pushoff: i64,
    pub engines: Vec<String>,
}

/// Linking number computed by both engines; they must agree.
pub fn linking_number(c1: &PolyCurve3, c2: &PolyCurve3, seed: u64) -> Result<i64> {
    let crossings = linking_number_crossings(c1, c2, Direction::Auto { seed })?;
    let gauss = linking_number_gauss(c1, c2)?;
    if crossings != gauss {
        return Err(Error::EngineDisagreement { crossings, gauss });
    }
    Ok(crossings)
}

/// Pushoff distance used when none is given: a fifth of the tube radius.
pub fn default_epsilon(curve: &CurveOnSurface) -> f64 {
    0.2 * curve.host().radius()
}

pub fn surface_slope(curve: &CurveOnSurface, epsilon: f64) -> Result<SlopeResult> {
    surface_slope_with(curve, epsilon, 0)
}

/// `lk(α1, α2)`, cross-checked against `lk(K, α1)` and `lk(K, α2)`.
pub fn surface_slope_with(curve: &CurveOnSurface, epsilon: f64, seed: u64) -> Result<SlopeResult> {
    let p = surface_pushoff_curves(curve, epsilon)?;
    let (a1, a2) = (p.alpha1.points(), p.alpha2.points());
    let lk_pushoffs = linking_number(a1, a2, seed)?;
    let lk_knot_a1 = linking_number(curve.points(), a1, seed)?;
    let lk_knot_a2 = linking_number(curve.points(), a2, seed)?;
    if lk_pushoffs != lk_knot_a1 || lk_knot_a1 != lk_knot_a2 {
        return Err(Error::PushoffIdentity { lk_pushoffs, lk_knot_a1, lk_knot_a2 });
    }
    Ok(SlopeResult {
        slope: lk_pushoffs,
        lk_pushoffs,
        lk_knot_pushoff: lk_knot_a1,
        engines: ENGINES.iter().map(|s| s.to_string()).collect(),
    })
}

/// The surface slope, which in the meridian/preferred-longitude basis of the
/// knot's boundary torus is the integer `m` of the slope `m/1`.
pub fn slope_in_canonical_basis(curve: &CurveOnSurface, epsilon: f64) -> Result<i64> {
    Ok(surface_slope(curve, epsilon)?.slope)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalFraming {
    pub chart: usize,
    /// Meridional wraps `f` making the chart longitude null-homologous in the
    /// knot complement: `lk(core, pushoff_f) = 0`.
    pub framing_offset: i64,
}

/// The `θ = 0` longitude of a chart as a closed polygon.
fn chart_longitude(chart: &TubeChart) -> Result<PolyCurve3> {
    let n = chart.n_circ();
    PolyCurve3::closed((0..chart.n_rings()).map(|i| chart.grid()[i * n]).collect())
}

pub fn canonical_framing(chart: &TubeChart, seed: u64) -> Result<CanonicalFraming> {
    if chart.kind() != ChartKind::Circle {
        return Err(Error::input("canonical framing needs a chart around a closed curve"));
    }
    let core = chart.core();
    let w = linking_number(core, &chart_longitude(chart)?, seed)?;
    let f = -w;
    // lk(core, pushoff_f) = w + f; confirm on the relabeled chart.
    let check = linking_number(core, &chart_longitude(&chart.relabeled(f))?, seed)?;
    if check != 0 {
        return Err(Error::GeometricMismatch { expected: 0, found: check });
    }
    Ok(CanonicalFraming { chart: chart.id(), framing_offset: f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::{curve_on_tube, make_torus_knot_curve, make_tube_surface, SpatialGraph, TubeOptions};
    use std::f64::consts::TAU;
    use std::sync::Arc;

    fn line(p: i64, q: i64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let t = k as f64 / n as f64;
                (p as f64 * t, TAU * q as f64 * t + 0.1)
            })
            .collect()
    }

    #[test]
    fn torus_curve_slopes() {
        let s = Arc::new(
            make_tube_surface(&fixtures::standard_torus().unwrap(), &fixtures::standard_torus_options()).unwrap(),
        );
        for (p, q) in [(1, 0), (0, 1), (1, 1), (2, 3), (3, 2)] {
            let c = curve_on_tube(&s, 0, &line(p, q, 200)).unwrap();
            let r = surface_slope(&c, 0.1).unwrap();
            assert_eq!(r.slope, p * q, "({p},{q})");
        }
    }

    #[test]
    fn planar_unknot_has_zero_framing() {
        let s = make_tube_surface(&fixtures::unknot().unwrap(), &fixtures::unknot_options()).unwrap();
        assert_eq!(canonical_framing(&s.charts()[0], 0).unwrap().framing_offset, 0);
    }

    #[test]
    fn trefoil_framing_and_relabeling() {
        let k = make_torus_knot_curve(2, 3, 2.0, 0.8, 240).unwrap();
        let s = make_tube_surface(
            &SpatialGraph::knot(k).unwrap(),
            &TubeOptions { radius: Some(0.08), ..Default::default() },
        )
        .unwrap();
        let chart = &s.charts()[0];
        let w = linking_number(chart.core(), &chart_longitude(chart).unwrap(), 3).unwrap();
        let f = canonical_framing(chart, 0).unwrap().framing_offset;
        assert_eq!(f, -w);
        for k in [-2, 1, 3] {
            let g = canonical_framing(&chart.relabeled(k), 0).unwrap().framing_offset;
            assert_eq!(g, f - k);
        }
    }
}
