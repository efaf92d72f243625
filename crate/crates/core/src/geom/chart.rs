use std::collections::BTreeSet;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::frame::{transport_frames, Frame};
use super::{Point3, PolyCurve3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// Tube around a closed curve; periodic in both coordinates.
    Circle,
    /// Tube around an open arc between two junctions; periodic in θ only.
    Arc,
}

/// `(s, θ)` parameterization of the tube around one edge of a spatial graph.
///
/// Internally the chart works in grid units `u = s * n_cells_s`,
/// `v = θ * n_circ / 2π`, with ring `i` and angle index `j` at integer
/// coordinates. The chart map is the piecewise-linear interpolation of the
/// grid over the triangles `(i,j)(i+1,j)(i+1,j+1)` and `(i,j)(i+1,j+1)(i,j+1)`,
/// so evaluated points lie exactly on the meshed surface.
#[derive(Debug, Clone)]
pub struct TubeChart {
    id: usize,
    kind: ChartKind,
    core: PolyCurve3,
    frames: Vec<Frame>,
    radius: f64,
    n_circ: usize,
    frame_holonomy: f64,
    twist: i64,
    holes: BTreeSet<(usize, usize)>,
    grid: Vec<Point3>,
    vertex_ids: Vec<usize>,
}

impl TubeChart {
    /// `core` lists the ring centres (closed for circles, open for arcs).
    pub fn new(id: usize, kind: ChartKind, core: PolyCurve3, radius: f64, n_circ: usize) -> Self {
        debug_assert_eq!(core.is_closed(), kind == ChartKind::Circle);
        let (frames, frame_holonomy) = transport_frames(core.vertices(), core.is_closed());
        let mut chart = TubeChart {
            id,
            kind,
            core,
            frames,
            radius,
            n_circ,
            frame_holonomy,
            twist: 0,
            holes: BTreeSet::new(),
            grid: Vec::new(),
            vertex_ids: Vec::new(),
        };
        chart.rebuild_grid();
        chart
    }

    fn rebuild_grid(&mut self) {
        let n_cells = self.n_cells_s() as f64;
        let mut grid = Vec::with_capacity(self.n_rings() * self.n_circ);
        for (i, (c, f)) in self.core.vertices().iter().zip(&self.frames).enumerate() {
            let s = i as f64 / n_cells;
            for j in 0..self.n_circ {
                let phi = TAU * (j as f64 / self.n_circ as f64 + self.twist as f64 * s);
                grid.push(c + (f.n * phi.cos() + f.b * phi.sin()) * self.radius);
            }
        }
        self.grid = grid;
    }

    /// Same tube with the meridian labeling twisted `k` more times: the point
    /// labeled `θ` before is labeled `θ' = θ - 2π k s`, so the new `θ' = const`
    /// longitudes wind `k` more times around the core. The result is detached
    /// from any mesh.
    pub fn relabeled(&self, k: i64) -> TubeChart {
        let mut c = self.clone();
        c.twist += k;
        c.vertex_ids.clear();
        c.rebuild_grid();
        c
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn core(&self) -> &PolyCurve3 {
        &self.core
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_circ(&self) -> usize {
        self.n_circ
    }

    pub fn frame_holonomy(&self) -> f64 {
        self.frame_holonomy
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    pub fn is_periodic(&self) -> bool {
        self.kind == ChartKind::Circle
    }

    pub fn n_rings(&self) -> usize {
        self.core.len()
    }

    pub fn n_cells_s(&self) -> usize {
        match self.kind {
            ChartKind::Circle => self.n_rings(),
            ChartKind::Arc => self.n_rings() - 1,
        }
    }

    /// Length of the core polyline, the metric scale of `s`.
    pub fn core_length(&self) -> f64 {
        self.core.length()
    }

    /// Flat metric scale of one grid unit in `u` and in `v`.
    pub fn cell_size(&self) -> (f64, f64) {
        (self.core_length() / self.n_cells_s() as f64, TAU * self.radius / self.n_circ as f64)
    }

    pub fn uv(&self, s: f64, theta: f64) -> (f64, f64) {
        (s * self.n_cells_s() as f64, theta * self.n_circ as f64 / TAU)
    }

    pub fn st(&self, u: f64, v: f64) -> (f64, f64) {
        (u / self.n_cells_s() as f64, v * TAU / self.n_circ as f64)
    }

    fn wrap_i(&self, i: i64) -> Option<usize> {
        match self.kind {
            ChartKind::Circle => Some(i.rem_euclid(self.n_rings() as i64) as usize),
            ChartKind::Arc => (0..self.n_rings() as i64).contains(&i).then_some(i as usize),
        }
    }

    fn wrap_j(&self, j: i64) -> usize {
        j.rem_euclid(self.n_circ as i64) as usize
    }

    /// Grid vertex `(i, j)` after wrapping; `None` past the ends of an arc.
    pub fn grid_index(&self, i: i64, j: i64) -> Option<usize> {
        self.wrap_i(i).map(|i| i * self.n_circ + self.wrap_j(j))
    }

    pub fn grid_point(&self, i: i64, j: i64) -> Option<Point3> {
        self.grid_index(i, j).map(|k| self.grid[k])
    }

    pub fn grid(&self) -> &[Point3] {
        &self.grid
    }

    /// Mesh vertex id of grid vertex `(i, j)`, when the chart is meshed.
    pub fn vertex_id(&self, i: i64, j: i64) -> Option<usize> {
        let k = self.grid_index(i, j)?;
        self.vertex_ids.get(k).copied()
    }

    pub fn is_meshed(&self) -> bool {
        !self.vertex_ids.is_empty()
    }

    pub(crate) fn set_vertex_ids(&mut self, ids: Vec<usize>) {
        debug_assert_eq!(ids.len(), self.grid.len());
        self.vertex_ids = ids;
    }

    pub(crate) fn remap_vertex_ids(&mut self, map: &[usize]) {
        for id in &mut self.vertex_ids {
            *id = map[*id];
        }
    }

    /// Normalised cell index, or `None` when the cell lies outside an arc chart.
    pub fn cell(&self, i: i64, j: i64) -> Option<(usize, usize)> {
        let i = match self.kind {
            ChartKind::Circle => i.rem_euclid(self.n_cells_s() as i64) as usize,
            ChartKind::Arc => {
                if !(0..self.n_cells_s() as i64).contains(&i) {
                    return None;
                }
                i as usize
            }
        };
        Some((i, self.wrap_j(j)))
    }

    pub fn holes(&self) -> &BTreeSet<(usize, usize)> {
        &self.holes
    }

    pub(crate) fn add_hole(&mut self, cell: (usize, usize)) {
        self.holes.insert(cell);
    }

    /// True when the cell is removed from the surface or lies off the chart.
    pub fn cell_blocked(&self, i: i64, j: i64) -> bool {
        self.cell(i, j).is_none_or(|c| self.holes.contains(&c))
    }

    /// Piecewise-linear chart map in grid units.
    pub fn eval_uv(&self, u: f64, v: f64) -> Point3 {
        let mut i = u.floor() as i64;
        if self.kind == ChartKind::Arc {
            i = i.clamp(0, self.n_cells_s() as i64 - 1);
        }
        let j = v.floor() as i64;
        let a = u - i as f64;
        let b = v - j as f64;
        let p = |di: i64, dj: i64| self.grid_point(i + di, j + dj).expect("cell inside chart");
        let p00 = p(0, 0);
        let p11 = p(1, 1);
        if a >= b {
            let p10 = p(1, 0);
            p00 + (p10 - p00) * a + (p11 - p10) * b
        } else {
            let p01 = p(0, 1);
            p00 + (p01 - p00) * b + (p11 - p01) * a
        }
    }

    /// Chart map `(s, θ) -> Point3`.
    pub fn eval(&self, s: f64, theta: f64) -> Point3 {
        let (u, v) = self.uv(s, theta);
        self.eval_uv(u, v)
    }

    /// The two triangles of cell `(i, j)` as grid-index triples, lower first,
    /// ordered so that the normal points out of the tube.
    pub fn cell_triangles(&self, i: i64, j: i64) -> Option<[[usize; 3]; 2]> {
        let g = |di: i64, dj: i64| self.grid_index(i + di, j + dj);
        let (p00, p10, p11, p01) = (g(0, 0)?, g(1, 0)?, g(1, 1)?, g(0, 1)?);
        Some([[p00, p11, p10], [p00, p01, p11]])
    }

    /// Angle label `θ` of the direction `d` seen from ring `i`.
    pub fn angle_of(&self, i: usize, d: &super::Vec3) -> f64 {
        let f = &self.frames[i];
        let phi = d.dot(&f.b).atan2(d.dot(&f.n));
        let s = i as f64 / self.n_cells_s() as f64;
        (phi - TAU * self.twist as f64 * s).rem_euclid(TAU)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize, r: f64) -> PolyCurve3 {
        PolyCurve3::closed(
            (0..n)
                .map(|k| {
                    let a = TAU * k as f64 / n as f64;
                    Point3::new(r * a.cos(), r * a.sin(), 0.0)
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn grid_vertices_are_exact_and_interpolation_is_continuous() {
        let c = TubeChart::new(0, ChartKind::Circle, ring(40, 2.0), 0.5, 16);
        assert_eq!(c.n_cells_s(), 40);
        let p = c.eval_uv(3.0, 5.0);
        assert_eq!(p, c.grid_point(3, 5).unwrap());
        // Wrapping in both directions lands on the same point.
        let q = c.eval_uv(43.0, -11.0);
        assert!((p - q).norm() < 1e-12);
        // Continuity across the diagonal.
        let a = c.eval_uv(3.5, 5.5 - 1e-12);
        let b = c.eval_uv(3.5, 5.5 + 1e-12);
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn relabeling_shifts_the_angle() {
        let c = TubeChart::new(0, ChartKind::Circle, ring(40, 2.0), 0.5, 16);
        let t = c.relabeled(1);
        // At s = 1/4 the label θ' = θ - π/2.
        let p = c.eval(0.25, 0.0);
        let q = t.eval(0.25, -std::f64::consts::FRAC_PI_2);
        assert!((p - q).norm() < 1e-9);
        assert!(!t.is_meshed());
    }

    #[test]
    fn outward_orientation_of_cell_triangles() {
        let c = TubeChart::new(0, ChartKind::Circle, ring(40, 2.0), 0.5, 16);
        let [lo, _] = c.cell_triangles(0, 0).unwrap();
        let g = c.grid();
        let nrm = (g[lo[1]] - g[lo[0]]).cross(&(g[lo[2]] - g[lo[0]]));
        let centre = Point3::new(2.0, 0.0, 0.0);
        assert!(nrm.dot(&(g[lo[0]] - centre)) > 0.0);
    }
}
