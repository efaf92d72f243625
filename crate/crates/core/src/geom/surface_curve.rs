use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chart::TubeChart;
use super::tube::{cells_touching, TubeSurface};
use super::PolyCurve3;
use crate::error::{Error, Result};

/// Grid-unit tolerance for "lies on a grid line".
pub(crate) const TOL_GRID: f64 = 1e-9;

/// JSON form of a chart curve: `{"chart": id, "coords": [[s, theta], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartCurveSpec {
    pub chart: usize,
    pub coords: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveRepr {
    /// Closed curve in one tube chart. `coords` are the input samples lifted
    /// to the universal cover; `refined` are grid-unit points after splitting
    /// at every mesh edge, so consecutive points share a mesh triangle.
    TubeCoords { chart: usize, coords: Vec<(f64, f64)>, refined: Vec<(f64, f64)>, longitude: i64, meridian: i64 },
    /// Closed walk along mesh edges.
    EdgePath { vertices: Vec<usize> },
}

/// A simple closed curve drawn on a tube surface.
#[derive(Debug, Clone)]
pub struct CurveOnSurface {
    host: Arc<TubeSurface>,
    repr: CurveRepr,
    points: PolyCurve3,
}

impl CurveOnSurface {
    pub fn host(&self) -> &Arc<TubeSurface> {
        &self.host
    }

    pub fn repr(&self) -> &CurveRepr {
        &self.repr
    }

    /// The curve as a polyline in space; every vertex lies on the mesh.
    pub fn points(&self) -> &PolyCurve3 {
        &self.points
    }

    pub fn chart(&self) -> Option<&TubeChart> {
        match &self.repr {
            CurveRepr::TubeCoords { chart, .. } => self.host.charts().get(*chart),
            CurveRepr::EdgePath { .. } => None,
        }
    }

    /// `(longitude, meridian)` wrapping numbers of a chart curve.
    pub fn classes(&self) -> Option<(i64, i64)> {
        match &self.repr {
            CurveRepr::TubeCoords { longitude, meridian, .. } => Some((*longitude, *meridian)),
            CurveRepr::EdgePath { .. } => None,
        }
    }

    /// Input samples of a chart curve in `(s, θ)`.
    pub fn chart_coords(&self) -> Option<(usize, Vec<(f64, f64)>)> {
        match &self.repr {
            CurveRepr::TubeCoords { chart, coords, .. } => {
                let c = &self.host.charts()[*chart];
                Some((*chart, coords.iter().map(|&(u, v)| c.st(u, v)).collect()))
            }
            CurveRepr::EdgePath { .. } => None,
        }
    }

    pub fn spec(&self) -> Option<ChartCurveSpec> {
        self.chart_coords()
            .map(|(chart, coords)| ChartCurveSpec { chart, coords: coords.into_iter().map(|(s, t)| [s, t]).collect() })
    }

    /// Re-embeds the same chart curve on another surface sharing the chart.
    pub fn rehost(&self, host: Arc<TubeSurface>) -> Result<CurveOnSurface> {
        match self.chart_coords() {
            Some((chart, coords)) => curve_on_tube(&host, chart, &coords),
            None => match &self.repr {
                CurveRepr::EdgePath { vertices } => edge_path(&host, vertices.clone()),
                CurveRepr::TubeCoords { .. } => unreachable!(),
            },
        }
    }

    pub fn from_spec(host: &Arc<TubeSurface>, spec: &ChartCurveSpec) -> Result<CurveOnSurface> {
        let coords: Vec<(f64, f64)> = spec.coords.iter().map(|c| (c[0], c[1])).collect();
        curve_on_tube(host, spec.chart, &coords)
    }
}

fn near_int(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= TOL_GRID).then_some(r)
}

fn snap(p: (f64, f64)) -> (f64, f64) {
    (near_int(p.0).unwrap_or(p.0), near_int(p.1).unwrap_or(p.1))
}

/// Points where the segment `p -> q` crosses the lines `u = k`, `v = k` or
/// `u - v = k`, in order, excluding the endpoints.
fn crossings(p: (f64, f64), q: (f64, f64)) -> Vec<(f64, f64)> {
    let mut events: Vec<(f64, u8, f64)> = Vec::new();
    let mut family = |a: f64, b: f64, tag: u8| {
        if (b - a).abs() <= 0.0 {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let mut k = lo.floor() + 1.0;
        while k < hi {
            let t = (k - a) / (b - a);
            if t > TOL_GRID && t < 1.0 - TOL_GRID {
                events.push((t, tag, k));
            }
            k += 1.0;
        }
    };
    family(p.0, q.0, 0);
    family(p.1, q.1, 1);
    family(p.0 - p.1, q.0 - q.1, 2);
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (t, tag, k) in events {
        let mut pt =
            if t - last_t <= 1e-12 { out.pop().unwrap() } else { (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)) };
        match tag {
            0 => pt.0 = k,
            1 => pt.1 = k,
            _ => {
                if near_int(pt.0).is_none() {
                    pt.1 = pt.0 - k;
                }
            }
        }
        out.push(snap(pt));
        last_t = t;
    }
    out
}

/// Lifted points and the deck translation `(longitude, meridian)` closing the loop.
type Lift = (Vec<(f64, f64)>, (i64, i64));

/// Lifts chart samples to the universal cover.
pub(crate) fn lift(chart: &TubeChart, uv: &[(f64, f64)]) -> Result<Lift> {
    let pu = chart.is_periodic().then_some(chart.n_cells_s() as f64);
    let pv = chart.n_circ() as f64;
    let nearest = |from: f64, x: f64, period: Option<f64>| -> Result<(f64, i64)> {
        match period {
            None => Ok((x, 0)),
            Some(per) => {
                let k = ((from - x) / per).round();
                let y = x + k * per;
                if (y - from).abs() >= 0.5 * per - TOL_GRID {
                    return Err(Error::input("consecutive chart samples are half a period or more apart; add samples"));
                }
                Ok((y, k as i64))
            }
        }
    };
    let mut out = vec![uv[0]];
    for &(u, v) in &uv[1..] {
        let prev = *out.last().unwrap();
        let (lu, _) = nearest(prev.0, u, pu)?;
        let (lv, _) = nearest(prev.1, v, Some(pv))?;
        out.push((lu, lv));
    }
    let last = *out.last().unwrap();
    let (_, a) = nearest(last.0, uv[0].0, pu)?;
    let (_, b) = nearest(last.1, uv[0].1, Some(pv))?;
    Ok((out, (a, b)))
}

/// Splits a lifted closed curve at every mesh edge.
pub(crate) fn refine_closed(chart: &TubeChart, lifted: &[(f64, f64)], deck: (i64, i64)) -> Vec<(f64, f64)> {
    let shift = (deck.0 as f64 * chart.n_cells_s() as f64, deck.1 as f64 * chart.n_circ() as f64);
    let n = lifted.len();
    let mut out = Vec::with_capacity(n * 4);
    for k in 0..n {
        let p = snap(lifted[k]);
        let q = if k + 1 < n {
            snap(lifted[k + 1])
        } else {
            let f = snap(lifted[0]);
            (f.0 + shift.0, f.1 + shift.1)
        };
        out.push(p);
        out.extend(crossings(p, q));
    }
    out
}

/// Places a closed chart curve on a tube surface.
///
/// Rejects curves entering cells removed from the surface (junctions and
/// stabilization sites), curves leaving an arc chart, and curves whose image
/// is not simple.
pub fn curve_on_tube(host: &Arc<TubeSurface>, chart_id: usize, coords: &[(f64, f64)]) -> Result<CurveOnSurface> {
    let chart = host.chart(chart_id)?;
    if coords.len() < 3 {
        return Err(Error::input("a closed chart curve needs at least 3 samples"));
    }
    if coords.iter().any(|c| !c.0.is_finite() || !c.1.is_finite()) {
        return Err(Error::input("chart coordinates must be finite"));
    }
    let uv: Vec<(f64, f64)> = coords.iter().map(|&(s, t)| chart.uv(s, t)).collect();
    let (lifted, deck) = lift(chart, &uv)?;
    let refined = refine_closed(chart, &lifted, deck);
    for (k, &(u, v)) in refined.iter().enumerate() {
        for (i, j) in cells_touching(u, v, TOL_GRID) {
            if chart.cell_blocked(i, j) {
                return Err(Error::input(format!(
                    "chart curve point {k} at (s, θ) = {:?} touches a cell outside the surface chart",
                    chart.st(u, v)
                )));
            }
        }
    }
    let pts: Vec<_> = refined.iter().map(|&(u, v)| chart.eval_uv(u, v)).collect();
    let points = PolyCurve3::closed(pts).map_err(|e| match e {
        Error::Refinement(m) | Error::Input(m) => Error::input(format!("chart curve is not simple: {m}")),
        other => other,
    })?;
    Ok(CurveOnSurface {
        host: host.clone(),
        repr: CurveRepr::TubeCoords { chart: chart_id, coords: lifted, refined, longitude: deck.0, meridian: deck.1 },
        points,
    })
}

/// A closed walk along mesh edges, given by its vertex ids (no repeat of
/// the first vertex at the end).
pub fn edge_path(host: &Arc<TubeSurface>, vertices: Vec<usize>) -> Result<CurveOnSurface> {
    let mesh = host.mesh();
    if vertices.len() < 3 {
        return Err(Error::input("an edge path needs at least 3 vertices"));
    }
    let edges = mesh.edge_faces();
    let n = vertices.len();
    for k in 0..n {
        let (a, b) = (vertices[k], vertices[(k + 1) % n]);
        let key = (a.min(b), a.max(b));
        if a >= mesh.vertices().len() || !edges.contains_key(&key) {
            return Err(Error::input(format!("edge path step {k} ({a} -> {b}) is not a mesh edge")));
        }
    }
    let mut seen = std::collections::HashSet::new();
    if !vertices.iter().all(|v| seen.insert(*v)) {
        return Err(Error::input("edge path revisits a vertex"));
    }
    let points = PolyCurve3::closed(vertices.iter().map(|&v| mesh.vertices()[v]).collect())?;
    Ok(CurveOnSurface { host: host.clone(), repr: CurveRepr::EdgePath { vertices }, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::make_tube_surface;
    use std::f64::consts::TAU;

    fn torus() -> Arc<TubeSurface> {
        Arc::new(make_tube_surface(&fixtures::standard_torus().unwrap(), &fixtures::standard_torus_options()).unwrap())
    }

    fn line(p: i64, q: i64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let t = k as f64 / n as f64;
                (p as f64 * t, TAU * q as f64 * t + 0.1)
            })
            .collect()
    }

    #[test]
    fn classes_are_recorded() {
        let s = torus();
        for (p, q) in [(1, 0), (0, 1), (2, 3), (3, -2), (1, 4)] {
            let c = curve_on_tube(&s, 0, &line(p, q, 40)).unwrap();
            assert_eq!(c.classes(), Some((p, q)));
        }
    }

    #[test]
    fn points_lie_on_the_mesh() {
        let s = torus();
        let c = curve_on_tube(&s, 0, &line(2, 3, 40)).unwrap();
        let m = s.mesh();
        let tris: Vec<[crate::geom::Point3; 3]> = (0..m.triangles().len()).map(|f| m.triangle(f)).collect();
        for p in c.points().vertices().iter().step_by(7) {
            let d = tris
                .iter()
                .map(|t| crate::geom::predicates::point_triangle_distance(p, t))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9, "{d}");
        }
    }

    #[test]
    fn wrapped_input_is_lifted() {
        let s = torus();
        let wrapped: Vec<(f64, f64)> = line(1, 2, 30).into_iter().map(|(a, b)| (a, b.rem_euclid(TAU))).collect();
        let c = curve_on_tube(&s, 0, &wrapped).unwrap();
        assert_eq!(c.classes(), Some((1, 2)));
    }

    #[test]
    fn self_crossing_curve_rejected() {
        let s = torus();
        let bow = vec![(0.0, 0.1), (0.1, 1.0), (0.1, 0.1), (0.0, 1.0)];
        assert!(matches!(curve_on_tube(&s, 0, &bow), Err(Error::Input(_))));
    }

    #[test]
    fn crossings_are_ordered_and_snapped() {
        let pts = crossings((0.5, 0.25), (2.5, 1.25));
        assert!(pts.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(pts.contains(&(1.0, 0.5)) && pts.contains(&(2.0, 1.0)));
    }
}
