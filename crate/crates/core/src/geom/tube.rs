//! Boundary of a regular neighbourhood of a spatial graph.
//!
//! Every circle gets a periodic tube of radius `r`; every arc gets an open
//! tube of radius `r/2` that stops about `2r` away from the circles it joins.
//! Where an arc meets a circle, a rectangular block of cells is cut out of
//! the circle's tube and its boundary is zipped to the arc's end ring by an
//! angular merge. Curves on the surface live in the tube charts and may not
//! enter those junction cells.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::f64::consts::TAU;

use super::chart::{ChartKind, TubeChart};
use super::mesh::{MeshReport, SurfaceMesh};
use super::predicates::any_perpendicular;
use super::{Point3, SpatialGraph, Vec3};
use crate::error::{Error, Result};

/// Slack on the default radius absorbing polygon-sampling error in the
/// clearance estimate.
const RADIUS_SLACK: f64 = 1.02;
const MIN_RINGS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeOptions {
    /// Tube radius around circles; defaults to a quarter of the graph
    /// clearance and may only be lowered.
    pub radius: Option<f64>,
    /// Vertices per ring, at least 8.
    pub n_circ: usize,
    /// Rings per unit of core length; defaults to square cells.
    pub n_long_per_unit: Option<f64>,
}

impl Default for TubeOptions {
    fn default() -> Self {
        TubeOptions { radius: None, n_circ: 16, n_long_per_unit: None }
    }
}

/// A tube surface together with its charts (circles first, then arcs).
#[derive(Debug, Clone)]
pub struct TubeSurface {
    mesh: SurfaceMesh,
    charts: Vec<TubeChart>,
    graph: SpatialGraph,
    radius: f64,
    clearance: f64,
    handles: usize,
    report: MeshReport,
}

impl TubeSurface {
    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }

    pub fn charts(&self) -> &[TubeChart] {
        &self.charts
    }

    pub fn chart(&self, id: usize) -> Result<&TubeChart> {
        self.charts.get(id).ok_or_else(|| Error::input(format!("no chart {id} (surface has {})", self.charts.len())))
    }

    pub fn graph(&self) -> &SpatialGraph {
        &self.graph
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn report(&self) -> &MeshReport {
        &self.report
    }

    pub fn genus(&self) -> i64 {
        self.report.genus
    }

    /// Handles added by stabilization on top of the graph neighbourhood.
    pub fn handles(&self) -> usize {
        self.handles
    }

    pub(crate) fn with_handles(mut self, handles: usize) -> Self {
        self.handles = handles;
        self
    }

    pub(crate) fn from_parts(
        mesh: SurfaceMesh,
        charts: Vec<TubeChart>,
        graph: SpatialGraph,
        radius: f64,
        clearance: f64,
    ) -> Result<Self> {
        let report = mesh.validate()?;
        Ok(TubeSurface { mesh, charts, graph, radius, clearance, handles: 0, report })
    }
}

struct Junction {
    arc_chart: usize,
    ring: usize,
    circle: usize,
    ic: i64,
    jc: i64,
    hs: i64,
    ht: i64,
}

/// Builds `∂η(Γ)` for a connected spatial graph.
pub fn make_tube_surface(graph: &SpatialGraph, opts: &TubeOptions) -> Result<TubeSurface> {
    if opts.n_circ < 8 {
        return Err(Error::input(format!("n_circ must be at least 8, got {}", opts.n_circ)));
    }
    let clearance = graph.clearance();
    let default_r = 0.25 * clearance;
    let r = match opts.radius {
        None => default_r,
        Some(r) if !(r > 0.0 && r.is_finite()) => {
            return Err(Error::input(format!("tube radius must be positive, got {r}")))
        }
        Some(r) if r > default_r * RADIUS_SLACK => {
            return Err(Error::input(format!(
                "tube radius {r} exceeds the default {default_r:.6} (a quarter of the graph clearance); it may only be lowered"
            )))
        }
        Some(r) => r,
    };
    let n_circ = opts.n_circ;
    let per_unit = |radius: f64| opts.n_long_per_unit.unwrap_or(n_circ as f64 / (TAU * radius));
    let geometry_err = |message: String| Error::Geometry { message, clearance };

    let mut charts = Vec::new();
    for (i, c) in graph.circles().iter().enumerate() {
        let rings = ((c.length() * per_unit(r)).ceil() as usize).max(MIN_RINGS);
        charts.push(TubeChart::new(i, ChartKind::Circle, c.resampled(rings), r, n_circ));
    }

    let mut junctions = Vec::new();
    for (k, arc) in graph.arcs().iter().enumerate() {
        let ends = graph.arc_ends(k);
        let total = arc.length();
        let clear_of = |circle: usize, from_start: bool| -> f64 {
            let step = r / 8.0;
            let mut t = 0.0;
            while t < total {
                let p = arc.point_at_length(if from_start { t } else { total - t });
                if graph.circles()[circle].project(&p).1 >= 2.0 * r {
                    return t;
                }
                t += step;
            }
            total
        };
        let ta = clear_of(ends[0].circle, true);
        let tb = clear_of(ends[1].circle, false);
        if ta + tb + r >= total {
            return Err(geometry_err(format!("arc {k} is too short for a tube of radius {r}")));
        }
        let len = total - ta - tb;
        let segs = ((len * per_unit(r / 2.0)).ceil() as usize).max(3);
        let core = arc.trimmed(ta, total - tb, segs);
        let id = charts.len();
        let chart = TubeChart::new(id, ChartKind::Arc, core, r / 2.0, n_circ);
        let last = chart.n_rings() - 1;
        for (end, ring) in [(0usize, 0usize), (1, last)] {
            let att = ends[end];
            let host = &charts[att.circle];
            let rings = host.n_rings();
            let ic = ((att.position / host.core_length() * rings as f64).round() as usize) % rings;
            let junction_pt = if end == 0 { arc.vertices()[0] } else { *arc.vertices().last().unwrap() };
            let d = chart.core().vertices()[ring] - junction_pt;
            let t = host.frames()[ic].t;
            let d = d - t * t.dot(&d);
            let theta = host.angle_of(ic, &d);
            let jc = (theta * n_circ as f64 / TAU).round() as i64;
            let ds = host.core_length() / rings as f64;
            let hs = ((0.7 * r / ds).ceil() as i64).max(1);
            let ht = ((0.7 * n_circ as f64 / TAU).ceil() as i64).max(1);
            if 2 * hs + 2 >= rings as i64 || 2 * ht + 2 >= n_circ as i64 {
                return Err(geometry_err(format!("junction of arc {k} does not fit on circle {}", att.circle)));
            }
            junctions.push(Junction { arc_chart: id, ring, circle: att.circle, ic: ic as i64, jc, hs, ht });
        }
        charts.push(chart);
    }

    // Junction holes must be separated by at least one intact cell.
    let mut occupied: HashSet<(usize, usize, usize)> = HashSet::new();
    for j in &junctions {
        let chart = &charts[j.circle];
        for di in -j.hs - 1..=j.hs {
            for dj in -j.ht - 1..=j.ht {
                let cell = chart.cell(j.ic + di, j.jc + dj).unwrap();
                if occupied.contains(&(j.circle, cell.0, cell.1)) {
                    return Err(geometry_err(format!("junctions on circle {} are too close together", j.circle)));
                }
            }
        }
        for di in -j.hs..j.hs {
            for dj in -j.ht..j.ht {
                let cell = chart.cell(j.ic + di, j.jc + dj).unwrap();
                occupied.insert((j.circle, cell.0, cell.1));
            }
        }
    }
    for &(c, i, j) in &occupied {
        charts[c].add_hole((i, j));
    }

    // Vertices and chart faces.
    let mut vertices: Vec<Point3> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for chart in charts.iter_mut() {
        let base = vertices.len();
        vertices.extend_from_slice(chart.grid());
        chart.set_vertex_ids((base..vertices.len()).collect());
        for i in 0..chart.n_cells_s() as i64 {
            for j in 0..n_circ as i64 {
                if chart.cell_blocked(i, j) {
                    continue;
                }
                for t in chart.cell_triangles(i, j).unwrap() {
                    triangles.push(t.map(|g| base + g));
                }
            }
        }
    }

    // Zip each hole to its arc ring.
    let mut next: HashMap<usize, usize> = HashMap::new();
    {
        let directed: HashSet<(usize, usize)> =
            triangles.iter().flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3]))).collect();
        for &(a, b) in &directed {
            if !directed.contains(&(b, a)) && next.insert(a, b).is_some() {
                return Err(geometry_err(format!("vertex {a} lies on two boundary loops")));
            }
        }
    }
    let walk = |start: usize| -> Result<Vec<usize>> {
        let mut loop_ = vec![start];
        let mut cur = start;
        loop {
            cur =
                *next.get(&cur).ok_or_else(|| geometry_err(format!("boundary loop through vertex {start} is open")))?;
            if cur == start {
                return Ok(loop_);
            }
            loop_.push(cur);
            if loop_.len() > next.len() {
                return Err(geometry_err("runaway boundary loop".into()));
            }
        }
    };
    for j in &junctions {
        let host = &charts[j.circle];
        let arc = &charts[j.arc_chart];
        let hole = walk(host.vertex_id(j.ic - j.hs, j.jc - j.ht).unwrap())?;
        let expected = (4 * (j.hs + j.ht)) as usize;
        if hole.len() != expected {
            return Err(geometry_err(format!(
                "junction hole on circle {} has a boundary of {} vertices, expected {expected}",
                j.circle,
                hole.len()
            )));
        }
        let ring = walk(arc.vertex_id(j.ring as i64, 0).unwrap())?;
        if ring.len() != n_circ {
            return Err(geometry_err("arc end ring is not a boundary loop".into()));
        }
        let band_side: Vec<usize> = hole.iter().rev().copied().collect();
        let centre = arc.core().vertices()[j.ring];
        let axis = arc.frames()[j.ring].t;
        triangles.extend(zip_loops(&vertices, &band_side, &ring, &centre, &axis).map_err(geometry_err)?);
    }

    let mut mesh = SurfaceMesh::new_unchecked(vertices, triangles);
    let map = mesh.compact();
    for c in charts.iter_mut() {
        c.remap_vertex_ids(&map);
    }
    if mesh.signed_volume() < 0.0 {
        mesh.flip();
    }
    let surface = TubeSurface::from_parts(mesh, charts, graph.clone(), r, clearance).map_err(|e| match e {
        Error::Geometry { message, .. } => Error::Geometry { message: format!("tubes overlap: {message}"), clearance },
        other => other,
    })?;
    if surface.genus() != graph.neighbourhood_genus() {
        return Err(geometry_err(format!(
            "tube surface has genus {}, expected {}",
            surface.genus(),
            graph.neighbourhood_genus()
        )));
    }
    Ok(surface)
}

/// Triangulates the annulus between two loops around a common axis.
///
/// `a` must be traversed in the direction the new faces use, `b` in the
/// direction the existing faces use; both then turn the same way about the
/// axis and are merged by angle.
pub(crate) fn zip_loops(
    vertices: &[Point3],
    a: &[usize],
    b: &[usize],
    centre: &Point3,
    axis: &Vec3,
) -> std::result::Result<Vec<[usize; 3]>, String> {
    let e1 = any_perpendicular(axis);
    let e2 = axis.normalize().cross(&e1);
    let angle = |v: usize| {
        let d = vertices[v] - centre;
        d.dot(&e2).atan2(d.dot(&e1))
    };
    let unwrap = |ids: &[usize]| -> Vec<f64> {
        let mut out = Vec::with_capacity(ids.len());
        let mut acc = angle(ids[0]);
        out.push(acc);
        for w in ids.windows(2) {
            let mut d = angle(w[1]) - angle(w[0]);
            d -= TAU * (d / TAU).round();
            acc += d;
            out.push(acc);
        }
        let mut d = angle(ids[0]) - angle(*ids.last().unwrap());
        d -= TAU * (d / TAU).round();
        out.push(acc + d);
        out
    };
    let mut alpha = unwrap(a);
    let mut beta_raw = unwrap(b);
    let (wa, wb) = (alpha[a.len()] - alpha[0], beta_raw[b.len()] - beta_raw[0]);
    if (wa.abs() - TAU).abs() > 1e-6 || (wb.abs() - TAU).abs() > 1e-6 {
        return Err("junction loops do not wind once around the arc axis".into());
    }
    if wa < 0.0 {
        alpha.iter_mut().for_each(|x| *x = -*x);
        beta_raw.iter_mut().for_each(|x| *x = -*x);
    }
    if beta_raw[b.len()] < beta_raw[0] {
        return Err("junction loops turn in opposite directions".into());
    }
    // Rotate b to start next to a[0], and lift its angles accordingly.
    let (na, nb) = (a.len(), b.len());
    let j0 = (0..nb)
        .min_by(|&x, &y| {
            let dx = (beta_raw[x] - alpha[0]).rem_euclid(TAU);
            let dy = (beta_raw[y] - alpha[0]).rem_euclid(TAU);
            dx.min(TAU - dx).total_cmp(&dy.min(TAU - dy))
        })
        .unwrap();
    let shift = {
        let d = beta_raw[j0] - alpha[0];
        TAU * (d / TAU).round()
    };
    let beta: Vec<f64> = (0..=nb)
        .map(|k| {
            let idx = j0 + k;
            let wrap = (idx / nb) as f64 * (beta_raw[nb] - beta_raw[0]);
            beta_raw[idx % nb] + wrap - shift
        })
        .collect();
    let bv = |k: usize| b[(j0 + k) % nb];
    let mut tris = Vec::with_capacity(na + nb);
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        let advance_a = if i == na {
            false
        } else if j == nb {
            true
        } else {
            alpha[i + 1] <= beta[j + 1]
        };
        if advance_a {
            tris.push([a[i % na], a[(i + 1) % na], bv(j)]);
            i += 1;
        } else {
            tris.push([a[i % na], bv(j + 1), bv(j)]);
            j += 1;
        }
    }
    Ok(tris)
}

/// Cells of a chart whose closure contains a point in grid units.
pub(crate) fn cells_touching(u: f64, v: f64, tol: f64) -> BTreeSet<(i64, i64)> {
    let is = |x: f64| {
        let f = x.floor();
        let mut s = vec![f as i64];
        if (x - f) <= tol {
            s.push(f as i64 - 1);
        }
        if (f + 1.0 - x) <= tol {
            s.push(f as i64 + 1);
        }
        s
    };
    let mut out = BTreeSet::new();
    for i in is(u) {
        for j in is(v) {
            out.insert((i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PolyCurve3;

    fn circle(c: Point3, r: f64, n: usize) -> PolyCurve3 {
        PolyCurve3::closed(
            (0..n)
                .map(|k| {
                    let a = TAU * k as f64 / n as f64;
                    c + Vec3::new(r * a.cos(), r * a.sin(), 0.0)
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn unknot_tube_is_a_torus() {
        let g = SpatialGraph::knot(circle(Point3::origin(), 1.0, 64)).unwrap();
        let s = make_tube_surface(&g, &TubeOptions { radius: Some(0.2), ..Default::default() }).unwrap();
        assert_eq!(s.genus(), 1);
        assert_eq!(s.report().euler_characteristic, 0);
        assert_eq!(s.charts().len(), 1);
    }

    #[test]
    fn dumbbell_has_genus_two() {
        let a = circle(Point3::new(-2.5, 0., 0.), 1.0, 64);
        let b = circle(Point3::new(2.5, 0., 0.), 1.0, 64);
        let arc = PolyCurve3::open(vec![Point3::new(-1.5, 0., 0.), Point3::new(1.5, 0., 0.)]).unwrap();
        let g = SpatialGraph::new(vec![a, b], vec![arc]).unwrap();
        let s = make_tube_surface(&g, &TubeOptions { radius: Some(0.2), ..Default::default() }).unwrap();
        let m = s.mesh();
        let chi = m.vertices().len() as i64 - m.edge_count() as i64 + m.triangles().len() as i64;
        assert_eq!(chi, -2);
        assert_eq!(s.genus(), 2);
    }

    #[test]
    fn radius_may_only_be_lowered() {
        let g = SpatialGraph::knot(circle(Point3::origin(), 1.0, 64)).unwrap();
        let err = make_tube_surface(&g, &TubeOptions { radius: Some(0.5), ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        assert!(make_tube_surface(&g, &TubeOptions { n_circ: 6, ..Default::default() }).is_err());
    }

    #[test]
    fn touching_cells() {
        assert_eq!(cells_touching(0.5, 0.5, 1e-9).len(), 1);
        assert_eq!(cells_touching(1.0, 0.5, 1e-9).len(), 2);
        assert_eq!(cells_touching(1.0, 2.0, 1e-9).len(), 4);
    }
}
