use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::broadphase::{self, Aabb};
use super::predicates::{segment_triangle_distance, triangle_distance};
use super::{Point3, Vec3, TOL_GEOM};
use crate::error::{Error, Result};

/// Triangulated surface with counter-clockwise (outward) faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
}

/// Summary of a successful validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub genus: i64,
    pub components: usize,
    pub signed_volume: f64,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl SurfaceMesh {
    /// Builds and fully validates a closed, orientable, embedded surface.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let m = Self::new_unchecked(vertices, triangles);
        m.validate()?;
        Ok(m)
    }

    pub fn new_unchecked(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Self {
        SurfaceMesh { vertices, triangles }
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, f: usize) -> [Point3; 3] {
        let [a, b, c] = self.triangles[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Face count per undirected edge.
    pub fn edge_faces(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::with_capacity(self.triangles.len() * 3 / 2);
        for (f, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                m.entry(key(t[k], t[(k + 1) % 3])).or_default().push(f);
            }
        }
        m
    }

    fn check_indices(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.triangles.is_empty() {
            return Err(Error::input("mesh has no triangles"));
        }
        for (f, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::input(format!("triangle {f} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::input(format!("triangle {f} is degenerate")));
            }
        }
        if let Some(i) = self.vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::input(format!("vertex {i} has a non-finite coordinate")));
        }
        let mut used = vec![false; n];
        for t in &self.triangles {
            for &v in t {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::input(format!("vertex {v} is not used by any triangle")));
        }
        Ok(())
    }

    pub fn check_closed(&self) -> Result<()> {
        self.check_indices()?;
        for (e, fs) in self.edge_faces() {
            if fs.len() != 2 {
                return Err(Error::input(format!(
                    "edge ({}, {}) belongs to {} triangles; a closed surface needs exactly 2",
                    e.0,
                    e.1,
                    fs.len()
                )));
            }
        }
        Ok(())
    }

    /// Every directed edge appears once, so neighbouring faces agree.
    pub fn check_orientable(&self) -> Result<()> {
        let mut seen = HashMap::with_capacity(self.triangles.len() * 3);
        for (f, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                if let Some(g) = seen.insert((t[k], t[(k + 1) % 3]), f) {
                    return Err(Error::input(format!(
                        "triangles {g} and {f} traverse edge ({}, {}) in the same direction",
                        t[k],
                        t[(k + 1) % 3]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The faces around every vertex form a single disk.
    pub fn check_vertex_manifold(&self) -> Result<()> {
        let mut link: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                link.entry(t[k]).or_default().push((t[(k + 1) % 3], t[(k + 2) % 3]));
            }
        }
        for (v, edges) in link {
            let next: HashMap<usize, usize> = edges.iter().copied().collect();
            let start = edges[0].0;
            let mut cur = start;
            let mut steps = 0;
            loop {
                cur = match next.get(&cur) {
                    Some(&c) => c,
                    None => return Err(Error::input(format!("vertex {v} has an open link"))),
                };
                steps += 1;
                if cur == start || steps > edges.len() {
                    break;
                }
            }
            if steps != edges.len() {
                return Err(Error::input(format!("vertex {v} is a non-manifold (pinched) vertex")));
            }
        }
        Ok(())
    }

    /// Number of edge-connected face components.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.triangles.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for fs in self.edge_faces().values() {
            for w in fs.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        (0..self.triangles.len()).filter(|&f| find(&mut parent, f) == f).count()
    }

    /// Minimum distance over pairs of faces that share no vertex among the
    /// pairs selected by `filter`, stopping early at contact.
    fn min_separation(&self, filter: impl Fn(usize, usize) -> bool) -> (f64, Option<(usize, usize)>) {
        let boxes: Vec<Aabb> = (0..self.triangles.len()).map(|f| Aabb::of_points(self.triangle(f).iter())).collect();
        let mut best = (f64::INFINITY, None);
        for (a, b) in broadphase::self_pairs(&boxes, TOL_GEOM) {
            if !filter(a, b) {
                continue;
            }
            let (ta, tb) = (self.triangles[a], self.triangles[b]);
            let shared: Vec<usize> = ta.iter().copied().filter(|v| tb.contains(v)).collect();
            let d = match shared.len() {
                0 => triangle_distance(&self.triangle(a), &self.triangle(b)),
                1 => {
                    // Faces meeting at a vertex may still cross along their far edges.
                    let far = |t: [usize; 3]| {
                        let k = t.iter().position(|&v| v == shared[0]).unwrap();
                        (self.vertices[t[(k + 1) % 3]], self.vertices[t[(k + 2) % 3]])
                    };
                    let (p, q) = far(ta);
                    let (r, s) = far(tb);
                    segment_triangle_distance(&p, &q, &self.triangle(b)).min(segment_triangle_distance(
                        &r,
                        &s,
                        &self.triangle(a),
                    ))
                }
                _ => continue,
            };
            if d < best.0 {
                best = (d, Some((a, b)));
                if d <= TOL_GEOM {
                    break;
                }
            }
        }
        best
    }

    /// No two triangles without a shared vertex come within [`TOL_GEOM`].
    pub fn check_embedded(&self) -> Result<()> {
        match self.min_separation(|_, _| true) {
            (d, Some((a, b))) if d <= TOL_GEOM => Err(Error::Geometry {
                message: format!("mesh is not embedded: triangles {a} and {b} intersect"),
                clearance: d,
            }),
            _ => Ok(()),
        }
    }

    /// Embeddedness restricted to pairs involving at least one face of `faces`.
    pub fn check_embedded_faces(&self, faces: &[usize]) -> Result<()> {
        let mut mark = vec![false; self.triangles.len()];
        for &f in faces {
            mark[f] = true;
        }
        match self.min_separation(|a, b| mark[a] || mark[b]) {
            (d, Some((a, b))) if d <= TOL_GEOM => Err(Error::Placement(format!(
                "new triangles intersect the surface (faces {a} and {b}, distance {d:.3e})"
            ))),
            _ => Ok(()),
        }
    }

    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|v| self.vertices[v].coords);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn edge_count(&self) -> usize {
        self.edge_faces().len()
    }

    /// `V − E + F`; requires a closed mesh.
    pub fn euler_characteristic(&self) -> Result<i64> {
        self.check_closed()?;
        Ok(self.vertices.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64)
    }

    /// `(2 − χ) / 2`; rejects odd or negative values.
    pub fn genus(&self) -> Result<i64> {
        let chi = self.euler_characteristic()?;
        if (2 - chi) % 2 != 0 || chi > 2 {
            return Err(Error::input(format!("Euler characteristic {chi} is not that of a closed orientable surface")));
        }
        Ok((2 - chi) / 2)
    }

    /// Full check: closed, orientable, manifold, connected, embedded,
    /// integer genus, outward orientation.
    pub fn validate(&self) -> Result<MeshReport> {
        self.check_closed()?;
        self.check_orientable()?;
        self.check_vertex_manifold()?;
        let components = self.components();
        if components != 1 {
            return Err(Error::input(format!("mesh has {components} components")));
        }
        let genus = self.genus()?;
        self.check_embedded()?;
        let signed_volume = self.signed_volume();
        if signed_volume <= 0.0 {
            return Err(Error::input("faces are oriented inward (non-positive enclosed volume)"));
        }
        Ok(MeshReport {
            vertices: self.vertices.len(),
            edges: self.edge_count(),
            faces: self.triangles.len(),
            euler_characteristic: 2 - 2 * genus,
            genus,
            components,
            signed_volume,
        })
    }

    pub(crate) fn flip(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
    }

    /// Latitude/longitude sphere with `n_lat` bands and `n_lon` sectors,
    /// outward oriented.
    pub fn uv_sphere(centre: Point3, radius: f64, n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat < 2 || n_lon < 3 || !(radius.is_finite() && radius > 0.0) {
            return Err(Error::input("a sphere needs n_lat >= 2, n_lon >= 3 and a positive radius"));
        }
        let mut vertices = vec![centre + Vec3::z() * radius];
        for i in 1..n_lat {
            let phi = std::f64::consts::PI * i as f64 / n_lat as f64;
            for j in 0..n_lon {
                let th = std::f64::consts::TAU * j as f64 / n_lon as f64;
                vertices.push(centre + Vec3::new(phi.sin() * th.cos(), phi.sin() * th.sin(), phi.cos()) * radius);
            }
        }
        vertices.push(centre - Vec3::z() * radius);
        let south = vertices.len() - 1;
        let ring = |i: usize, j: usize| 1 + (i - 1) * n_lon + j % n_lon;
        let mut triangles = Vec::new();
        for j in 0..n_lon {
            triangles.push([0, ring(1, j), ring(1, j + 1)]);
            triangles.push([south, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)]);
            for i in 1..n_lat - 1 {
                triangles.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
                triangles.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
            }
        }
        let mesh = SurfaceMesh::new_unchecked(vertices, triangles);
        mesh.validate()?;
        Ok(mesh)
    }

    /// Drops unused vertices; returns the old-to-new index map
    /// (`usize::MAX` for dropped vertices).
    pub(crate) fn compact(&mut self) -> Vec<usize> {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut verts = Vec::with_capacity(self.vertices.len());
        for t in &mut self.triangles {
            for v in t.iter_mut() {
                if map[*v] == usize::MAX {
                    map[*v] = verts.len();
                    verts.push(self.vertices[*v]);
                }
                *v = map[*v];
            }
        }
        self.vertices = verts;
        map
    }

    /// Wavefront OBJ text: `v x y z` records, then 1-based `f a b c`.
    pub fn to_obj(&self) -> String {
        let mut s = String::with_capacity(self.vertices.len() * 40 + self.triangles.len() * 24);
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        s
    }

    /// Parses OBJ vertex and face records; polygons are fan-triangulated.
    /// The result is not validated.
    pub fn from_obj(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let c: Vec<f64> = it
                        .take(3)
                        .map(|x| x.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::input(format!("OBJ line {}: {e}", ln + 1)))?;
                    if c.len() != 3 {
                        return Err(Error::input(format!("OBJ line {}: vertex needs 3 coordinates", ln + 1)));
                    }
                    vertices.push(Point3::new(c[0], c[1], c[2]));
                }
                Some("f") => {
                    let idx: Vec<usize> = it
                        .map(|x| {
                            x.split('/')
                                .next()
                                .and_then(|i| i.parse::<usize>().ok())
                                .filter(|&i| i >= 1)
                                .map(|i| i - 1)
                                .ok_or_else(|| Error::input(format!("OBJ line {}: bad face index {x:?}", ln + 1)))
                        })
                        .collect::<Result<_>>()?;
                    if idx.len() < 3 {
                        return Err(Error::input(format!("OBJ line {}: face needs 3 indices", ln + 1)));
                    }
                    for k in 1..idx.len() - 1 {
                        triangles.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                _ => {}
            }
        }
        Ok(SurfaceMesh { vertices, triangles })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> SurfaceMesh {
        let v =
            vec![Point3::new(0., 0., 0.), Point3::new(1., 0., 0.), Point3::new(0., 1., 0.), Point3::new(0., 0., 1.)];
        let t = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]];
        SurfaceMesh::new(v, t).unwrap()
    }

    #[test]
    fn tetrahedron_is_a_sphere() {
        let m = tetra();
        let r = m.validate().unwrap();
        assert_eq!((r.vertices, r.edges, r.faces), (4, 6, 4));
        assert_eq!(r.euler_characteristic, 2);
        assert_eq!(r.genus, 0);
        assert!((r.signed_volume - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn uv_sphere_has_genus_zero() {
        let m = SurfaceMesh::uv_sphere(Point3::origin(), 1.0, 8, 12).unwrap();
        let r = m.validate().unwrap();
        assert_eq!((r.euler_characteristic, r.genus), (2, 0));
        assert!(r.signed_volume > 3.0 && r.signed_volume < 4.0 * std::f64::consts::PI / 3.0);
    }

    #[test]
    fn open_and_misoriented_meshes_rejected() {
        let m = tetra();
        let mut open = m.clone();
        open.triangles.pop();
        open.vertices.truncate(4);
        assert!(open.check_closed().is_err());
        let mut bad = m.clone();
        bad.triangles[0].swap(1, 2);
        assert!(bad.check_orientable().is_err());
        let mut inward = m;
        inward.flip();
        assert!(inward.validate().is_err());
    }

    #[test]
    fn obj_round_trip() {
        let m = tetra();
        let back = SurfaceMesh::from_obj(&m.to_obj()).unwrap();
        assert_eq!(back, m);
        assert!(SurfaceMesh::from_obj("f 1 2").is_err());
    }
}
