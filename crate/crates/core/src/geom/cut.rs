//! Cutting a surface along a curve and counting the pieces.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::mesh::SurfaceMesh;
use super::planar::{bounded_faces, ear_clip, signed_area, P2};
use super::surface_curve::{CurveOnSurface, CurveRepr, TOL_GRID};
use super::Point3;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CutReport {
    /// Connected components of the surface cut open along the curve.
    pub components: usize,
    pub euler_before: i64,
    pub euler_after: i64,
    pub separating: bool,
}

/// True iff cutting the host surface along the curve leaves two pieces.
pub fn is_separating(curve: &CurveOnSurface) -> Result<bool> {
    Ok(cut_report(curve)?.separating)
}

pub fn cut_report(curve: &CurveOnSurface) -> Result<CutReport> {
    let (mesh, path) = match curve.repr() {
        CurveRepr::EdgePath { vertices } => (curve.host().mesh().clone(), vertices.clone()),
        CurveRepr::TubeCoords { chart, refined, .. } => refine_along(curve, *chart, refined)?,
    };
    cut_along(&mesh, &path)
}

/// Cuts `mesh` along the closed vertex path and reports the result.
pub(crate) fn cut_along(mesh: &SurfaceMesh, path: &[usize]) -> Result<CutReport> {
    let edges = mesh.edge_faces();
    let n = path.len();
    let mut cut: HashSet<(usize, usize)> = HashSet::new();
    for k in 0..n {
        let (a, b) = (path[k], path[(k + 1) % n]);
        let key = (a.min(b), a.max(b));
        match edges.get(&key) {
            Some(f) if f.len() == 2 => {
                cut.insert(key);
            }
            _ => {
                return Err(Error::Refinement(format!(
                    "curve step {k} ({a} -> {b}) is not an interior mesh edge after refinement"
                )))
            }
        }
    }
    let nf = mesh.triangles().len();
    let mut uf = UnionFind::new(nf);
    for (key, faces) in &edges {
        if !cut.contains(key) {
            for w in faces.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    let components = (0..nf).map(|f| uf.find(f)).collect::<HashSet<_>>().len();

    // Vertices on the curve split into one copy per fan of faces joined
    // across uncut edges.
    let on_curve: HashSet<usize> = path.iter().copied().collect();
    let mut fans: HashMap<usize, UnionFind> = HashMap::new();
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (f, t) in mesh.triangles().iter().enumerate() {
        for v in t {
            if on_curve.contains(v) {
                incident.entry(*v).or_default().push(f);
            }
        }
    }
    for (&v, faces) in &incident {
        let mut local = UnionFind::new(faces.len());
        for (x, &fx) in faces.iter().enumerate() {
            for (y, &fy) in faces.iter().enumerate().skip(x + 1) {
                let shared: Vec<usize> = mesh.triangles()[fx]
                    .iter()
                    .filter(|w| **w != v && mesh.triangles()[fy].contains(w))
                    .copied()
                    .collect();
                if let Some(&w) = shared.first() {
                    if !cut.contains(&(v.min(w), v.max(w))) {
                        local.union(x, y);
                    }
                }
            }
        }
        fans.insert(v, local);
    }
    let extra_vertices: usize = fans
        .values_mut()
        .map(|u| {
            let k = u.parent.len();
            (0..k).map(|x| u.find(x)).collect::<HashSet<_>>().len() - 1
        })
        .sum();
    let euler_before = mesh.euler_characteristic()?;
    let euler_after = euler_before + extra_vertices as i64 - cut.len() as i64;
    Ok(CutReport { components, euler_before, euler_after, separating: components == 2 })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Where a refined curve point sits on the mesh.
#[derive(Debug, Clone, Copy)]
enum Site {
    Vertex(usize),
    /// On the edge `a < b` at parameter `t` from `a`.
    Edge {
        a: usize,
        b: usize,
        t: f64,
    },
    Face {
        face: usize,
        local: P2,
    },
}

fn near_int(x: f64) -> bool {
    (x - x.round()).abs() <= TOL_GRID
}

/// Inserts the curve into the mesh 1-skeleton by splitting every triangle it
/// passes through. Returns the refined mesh and the curve as a vertex path.
fn refine_along(curve: &CurveOnSurface, chart_id: usize, refined: &[(f64, f64)]) -> Result<(SurfaceMesh, Vec<usize>)> {
    let host = curve.host();
    let chart = host.chart(chart_id)?;
    let mesh = host.mesh();
    let mut face_of: HashMap<[usize; 3], usize> = HashMap::new();
    for (f, t) in mesh.triangles().iter().enumerate() {
        let mut k = *t;
        k.sort_unstable();
        face_of.insert(k, f);
    }
    let vid = |i: i64, j: i64| -> Result<usize> {
        chart.vertex_id(i, j).ok_or_else(|| Error::Refinement(format!("grid vertex ({i}, {j}) is not on the surface")))
    };
    // Mesh face of the chart triangle containing local point (a, b) of cell (i, j).
    let face_at = |i: i64, j: i64, lower: bool| -> Result<(usize, [usize; 3])> {
        let c = [vid(i, j)?, vid(i + 1, j + 1)?, if lower { vid(i + 1, j)? } else { vid(i, j + 1)? }];
        let mut k = c;
        k.sort_unstable();
        face_of
            .get(&k)
            .map(|&f| (f, c))
            .ok_or_else(|| Error::Refinement(format!("chart cell ({i}, {j}) is not meshed")))
    };

    let mut vertices: Vec<Point3> = mesh.vertices().to_vec();
    let mut sites: Vec<Site> = Vec::with_capacity(refined.len());
    let mut path: Vec<usize> = Vec::with_capacity(refined.len());
    for &(u, v) in refined {
        let (iu, iv, id) = (near_int(u), near_int(v), near_int(u - v));
        let (fu, fv) = (u.floor() as i64, v.floor() as i64);
        let site = if iu && iv {
            Site::Vertex(vid(u.round() as i64, v.round() as i64)?)
        } else if iu {
            let k = u.round() as i64;
            edge_site(vid(k, fv)?, vid(k, fv + 1)?, v - fv as f64)
        } else if iv {
            let k = v.round() as i64;
            edge_site(vid(fu, k)?, vid(fu + 1, k)?, u - fu as f64)
        } else if id {
            edge_site(vid(fu, fv)?, vid(fu + 1, fv + 1)?, u - fu as f64)
        } else {
            let (a, b) = (u - fu as f64, v - fv as f64);
            let lower = a >= b;
            let (face, ids) = face_at(fu, fv, lower)?;
            Site::Face { face, local: face_local(mesh.triangles()[face], ids, (a, b), lower) }
        };
        let id = match site {
            Site::Vertex(x) => x,
            _ => {
                vertices.push(chart.eval_uv(u, v));
                vertices.len() - 1
            }
        };
        sites.push(site);
        path.push(id);
    }

    // Points on each mesh edge, and chords inside each face.
    let mut on_edge: HashMap<(usize, usize), Vec<(f64, usize)>> = HashMap::new();
    let mut in_face: HashMap<usize, Vec<(P2, usize)>> = HashMap::new();
    for (k, s) in sites.iter().enumerate() {
        match *s {
            Site::Edge { a, b, t } => on_edge.entry((a, b)).or_default().push((t, path[k])),
            Site::Face { face, local } => in_face.entry(face).or_default().push((local, path[k])),
            Site::Vertex(_) => {}
        }
    }
    let mut chords: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    let n = refined.len();
    for k in 0..n {
        let p = refined[k];
        let mut q = refined[(k + 1) % n];
        if k + 1 == n {
            // Close the loop in the lift of the last point.
            let shift = |x: f64, y: f64, per: f64| y + ((x - y) / per).round() * per;
            if chart.is_periodic() {
                q.0 = shift(p.0, q.0, chart.n_cells_s() as f64);
            }
            q.1 = shift(p.1, q.1, chart.n_circ() as f64);
        }
        let mid = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
        if near_int(mid.0) || near_int(mid.1) || near_int(mid.0 - mid.1) {
            continue; // runs along a mesh edge
        }
        let (fu, fv) = (mid.0.floor() as i64, mid.1.floor() as i64);
        let (face, _) = face_at(fu, fv, mid.0 - fu as f64 >= mid.1 - fv as f64)?;
        chords.entry(face).or_default().push((path[k], path[(k + 1) % n]));
    }

    let mut affected: HashSet<usize> = chords.keys().copied().collect();
    affected.extend(in_face.keys().copied());
    let edges = mesh.edge_faces();
    for key in on_edge.keys() {
        if let Some(fs) = edges.get(key) {
            affected.extend(fs.iter().copied());
        }
    }

    let mut triangles: Vec<[usize; 3]> = Vec::with_capacity(mesh.triangles().len() + 4 * affected.len());
    for (f, t) in mesh.triangles().iter().enumerate() {
        if !affected.contains(&f) {
            triangles.push(*t);
        }
    }
    let mut affected: Vec<usize> = affected.into_iter().collect();
    affected.sort_unstable();
    for f in affected {
        let tri = mesh.triangles()[f];
        triangles.extend(split_face(
            f,
            tri,
            &on_edge,
            in_face.get(&f).map(|v| v.as_slice()).unwrap_or(&[]),
            chords.get(&f).map(|v| v.as_slice()).unwrap_or(&[]),
        )?);
    }
    let refined_mesh = SurfaceMesh::new_unchecked(vertices, triangles);
    refined_mesh.check_closed()?;
    refined_mesh.check_orientable()?;
    if refined_mesh.euler_characteristic()? != mesh.euler_characteristic()? {
        return Err(Error::Refinement("refinement changed the Euler characteristic".into()));
    }
    Ok((refined_mesh, path))
}

fn edge_site(a: usize, b: usize, t: f64) -> Site {
    if a < b {
        Site::Edge { a, b, t }
    } else {
        Site::Edge { a: b, b: a, t: 1.0 - t }
    }
}

/// Re-triangulates one face with the curve points on its edges and inside
/// it, keeping the chords as edges.
fn split_face(
    face: usize,
    tri: [usize; 3],
    on_edge: &HashMap<(usize, usize), Vec<(f64, usize)>>,
    inner: &[(P2, usize)],
    chords: &[(usize, usize)],
) -> Result<Vec<[usize; 3]>> {
    // Work in barycentric-style local coordinates of the face itself; any
    // affine image of the chart triangle keeps the combinatorics.
    let corner: [P2; 3] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
    let mut pts: Vec<P2> = corner.to_vec();
    let mut ids: Vec<usize> = tri.to_vec();
    let mut index: BTreeMap<usize, usize> = tri.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut boundary: Vec<usize> = Vec::new();
    for e in 0..3 {
        let (x, y) = (tri[e], tri[(e + 1) % 3]);
        boundary.push(e);
        let key = (x.min(y), x.max(y));
        if let Some(list) = on_edge.get(&key) {
            let mut along: Vec<(f64, usize)> =
                list.iter().map(|&(t, id)| (if x < y { t } else { 1.0 - t }, id)).collect();
            along.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (p, q) = (corner[e], corner[(e + 1) % 3]);
            for (t, id) in along {
                let local = pts.len();
                pts.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
                ids.push(id);
                index.insert(id, local);
                boundary.push(local);
            }
        }
    }
    for &(l, id) in inner {
        index.insert(id, pts.len());
        pts.push(l);
        ids.push(id);
    }
    let mut edges: Vec<(usize, usize)> =
        (0..boundary.len()).map(|k| (boundary[k], boundary[(k + 1) % boundary.len()])).collect();
    for &(a, b) in chords {
        let (Some(&la), Some(&lb)) = (index.get(&a), index.get(&b)) else {
            return Err(Error::Refinement(format!("chord endpoint missing from face {face}")));
        };
        if la != lb && !edges.contains(&(la, lb)) && !edges.contains(&(lb, la)) {
            edges.push((la, lb));
        }
    }
    let mut out = Vec::new();
    let mut area = 0.0;
    for cycle in bounded_faces(&pts, &edges) {
        area += signed_area(&cycle.iter().map(|&i| pts[i]).collect::<Vec<_>>());
        let tris = ear_clip(&pts, &cycle)
            .ok_or_else(|| Error::Refinement(format!("could not triangulate a piece of face {face}")))?;
        out.extend(tris.into_iter().map(|t| [ids[t[0]], ids[t[1]], ids[t[2]]]));
    }
    if (area - 0.5).abs() > 1e-9 {
        return Err(Error::Refinement(format!("pieces of face {face} do not tile it")));
    }
    Ok(out)
}

/// Coordinates of cell point `(a, b)` in the frame where the mesh face's
/// corners sit at `(0,0)`, `(1,0)`, `(0,1)` in their stored order.
fn face_local(tri: [usize; 3], chart_ids: [usize; 3], (a, b): P2, lower: bool) -> P2 {
    // Barycentric weights for the chart corners (P00, P11, P10) or (P00, P11, P01).
    let w = if lower { [1.0 - a, b, a - b] } else { [1.0 - b, a, b - a] };
    let corner: [P2; 3] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
    let mut out = (0.0, 0.0);
    for (k, id) in chart_ids.iter().enumerate() {
        let pos = tri.iter().position(|x| x == id).expect("same face");
        out.0 += w[k] * corner[pos].0;
        out.1 += w[k] * corner[pos].1;
    }
    out
}
