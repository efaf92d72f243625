//! Geometric stabilization: a handle attached to the surface at two disks
//! away from the knot.
//!
//! Each disk is a block of chart cells. The block faces are removed and the
//! two boundary loops are joined by a tube that leaves the surface along its
//! normal, arches over it along a cubic Bézier path and comes back down. The
//! knot and its pushoffs are untouched as point sets.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::broadphase::{cross_pairs, Aabb};
use super::frame::transport_frames;
use super::mesh::SurfaceMesh;
use super::predicates::segment_triangle_distance;
use super::surface_curve::{CurveOnSurface, CurveRepr, TOL_GRID};
use super::tube::{cells_touching, TubeSurface};
use super::{Point3, Vec3};
use crate::error::{Error, Result};

/// Two blocks of `size = (cells along s, cells along θ)` cells of one chart,
/// given by their lowest cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationSite {
    pub chart: usize,
    pub disks: [(i64, i64); 2],
    pub size: (i64, i64),
}

/// Minimum distance kept between the handle and the knot, in tube radii.
const KNOT_MARGIN: f64 = 0.3;

fn block(site: &StabilizationSite, d: usize, grow: i64) -> Vec<(i64, i64)> {
    let (i0, j0) = site.disks[d];
    let mut out = Vec::new();
    for di in -grow..site.size.0 + grow {
        for dj in -grow..site.size.1 + grow {
            out.push((i0 + di, j0 + dj));
        }
    }
    out
}

/// Chart cells the knot and its pushoff corridor may occupy.
fn knot_cells(surface: &TubeSurface, knot: &CurveOnSurface, chart: usize) -> Result<HashSet<(usize, usize)>> {
    let c = surface.chart(chart)?;
    let mut out = HashSet::new();
    let CurveRepr::TubeCoords { chart: kc, refined, .. } = knot.repr() else {
        return Ok(out);
    };
    if *kc != chart {
        return Ok(out);
    }
    let (du, dv) = c.cell_size();
    let margin = KNOT_MARGIN * surface.radius();
    let (mu, mv) = ((margin / du).ceil() as i64, (margin / dv).ceil() as i64);
    for &(u, v) in refined {
        for (i, j) in cells_touching(u, v, TOL_GRID) {
            for di in -mu..=mu {
                for dj in -mv..=mv {
                    if let Some(cell) = c.cell(i + di, j + dj) {
                        out.insert(cell);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Checks a site against the chart: both blocks intact with an intact
/// one-cell rim, disjoint rims, and clear of the knot corridor.
pub fn check_site(surface: &TubeSurface, knot: &CurveOnSurface, site: &StabilizationSite) -> Result<()> {
    let chart = surface.chart(site.chart)?;
    if site.size.0 < 1 || site.size.1 < 1 {
        return Err(Error::input("stabilization disks need at least one cell each way"));
    }
    if 2 * site.size.1 + 2 >= chart.n_circ() as i64 {
        return Err(Error::Placement("stabilization disk wraps around the tube".into()));
    }
    let corridor = knot_cells(surface, knot, site.chart)?;
    let mut rims: [HashSet<(usize, usize)>; 2] = [HashSet::new(), HashSet::new()];
    for (d, rim) in rims.iter_mut().enumerate() {
        for (i, j) in block(site, d, 1) {
            if chart.cell_blocked(i, j) {
                return Err(Error::Placement(format!(
                    "stabilization disk {d} runs into a removed or missing cell ({i}, {j})"
                )));
            }
            rim.insert(chart.cell(i, j).unwrap());
        }
        for (i, j) in block(site, d, 0) {
            if corridor.contains(&chart.cell(i, j).unwrap()) {
                return Err(Error::Placement(format!("stabilization disk {d} touches the knot")));
            }
        }
    }
    if !rims[0].is_disjoint(&rims[1]) {
        return Err(Error::Placement("stabilization disks overlap".into()));
    }
    Ok(())
}

/// Draws a random site of roughly square disks on one of the circle charts
/// that passes [`check_site`].
pub fn random_site(surface: &TubeSurface, knot: &CurveOnSurface, rng: &mut ChaCha8Rng) -> Result<StabilizationSite> {
    let circles: Vec<usize> = surface.charts().iter().filter(|c| c.is_periodic()).map(|c| c.id()).collect();
    for _ in 0..2000 {
        let chart = &surface.charts()[circles[rng.gen_range(0..circles.len())]];
        let (du, dv) = chart.cell_size();
        let ht: i64 = 1;
        let hs = ((ht as f64 * dv / du).round() as i64).max(1);
        let ns = chart.n_cells_s() as i64;
        let nc = chart.n_circ() as i64;
        let i0 = rng.gen_range(0..ns);
        let j0 = rng.gen_range(0..nc);
        let gap = rng.gen_range(hs + 2..=3 * hs + 2);
        let j1 = j0 + rng.gen_range(-2..=2);
        let site = StabilizationSite { chart: chart.id(), disks: [(i0, j0), (i0 + hs + gap, j1)], size: (hs, ht) };
        if check_site(surface, knot, &site).is_ok() {
            return Ok(site);
        }
    }
    Err(Error::Placement("no admissible stabilization site found".into()))
}

fn cubic(p: [Point3; 4], t: f64) -> Point3 {
    let s = 1.0 - t;
    Point3::from(
        p[0].coords * (s * s * s)
            + p[1].coords * (3.0 * s * s * t)
            + p[2].coords * (3.0 * s * t * t)
            + p[3].coords * (t * t * t),
    )
}

/// Adds one handle at `site`, returning the new surface and the knot on it.
pub fn k_stabilize_geometric(
    surface: &Arc<TubeSurface>,
    knot: &CurveOnSurface,
    site: &StabilizationSite,
) -> Result<(Arc<TubeSurface>, CurveOnSurface)> {
    check_site(surface, knot, site)?;
    let chart = surface.chart(site.chart)?;
    let mesh = surface.mesh();

    // Remove the block faces.
    let mut face_of: HashMap<[usize; 3], usize> = HashMap::new();
    for (f, t) in mesh.triangles().iter().enumerate() {
        let mut k = *t;
        k.sort_unstable();
        face_of.insert(k, f);
    }
    let mut removed: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    let mut holes = BTreeSet::new();
    for (d, faces) in removed.iter_mut().enumerate() {
        for (i, j) in block(site, d, 0) {
            holes.insert(chart.cell(i, j).unwrap());
            for tri in chart.cell_triangles(i, j).unwrap() {
                let n = chart.n_circ();
                let mut k = tri.map(|g| chart.vertex_id((g / n) as i64, (g % n) as i64).unwrap());
                k.sort_unstable();
                let f = *face_of.get(&k).ok_or_else(|| Error::Placement(format!("cell ({i}, {j}) is not meshed")))?;
                faces.push(f);
            }
        }
    }
    let gone: HashSet<usize> = removed.iter().flatten().copied().collect();
    let mut triangles: Vec<[usize; 3]> =
        mesh.triangles().iter().enumerate().filter(|(f, _)| !gone.contains(f)).map(|(_, t)| *t).collect();
    let mut vertices = mesh.vertices().to_vec();

    // Boundary loops in the direction the remaining faces traverse them.
    let directed: HashSet<(usize, usize)> =
        triangles.iter().flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3]))).collect();
    let next: HashMap<usize, usize> =
        directed.iter().filter(|(a, b)| !directed.contains(&(*b, *a))).map(|&(a, b)| (a, b)).collect();
    let walk = |start: usize| -> Result<Vec<usize>> {
        let mut out = vec![start];
        let mut cur = start;
        loop {
            cur =
                *next.get(&cur).ok_or_else(|| Error::Placement("stabilization hole boundary is not a loop".into()))?;
            if cur == start {
                return Ok(out);
            }
            out.push(cur);
            if out.len() > next.len() {
                return Err(Error::Placement("runaway hole boundary".into()));
            }
        }
    };
    let expected = 2 * (site.size.0 + site.size.1) as usize;
    let mut loops = Vec::new();
    for d in 0..2 {
        let (i0, j0) = site.disks[d];
        let l = walk(chart.vertex_id(i0, j0).unwrap())?;
        if l.len() != expected {
            return Err(Error::Placement(format!(
                "stabilization hole {d} has {} boundary vertices, expected {expected}",
                l.len()
            )));
        }
        loops.push(l);
    }
    // The tube runs the first loop against the surface's direction and the
    // second with it (see the quad orientation below).
    let loop1: Vec<usize> = loops[0].iter().rev().copied().collect();
    let loop2 = loops[1].clone();

    let centre = |l: &[usize]| Point3::from(l.iter().map(|&v| vertices[v].coords).sum::<Vec3>() / l.len() as f64);
    let normal = |faces: &[usize]| -> Vec3 {
        let s: Vec3 = faces
            .iter()
            .map(|&f| {
                let [a, b, c] = mesh.triangle(f);
                (b - a).cross(&(c - a))
            })
            .sum();
        s.normalize()
    };
    let (c1, c2) = (centre(&loop1), centre(&loop2));
    let (n1, n2) = (normal(&removed[0]), normal(&removed[1]));
    let diam = loop1.iter().map(|&v| (vertices[v] - c1).norm()).fold(0.0, f64::max) * 2.0;
    let span = (c2 - c1).norm();
    let h = (0.5 * span).max(1.5 * diam);
    let ctrl = [c1, c1 + n1 * h, c2 + n2 * h, c2];

    let approx_len: f64 =
        (0..32).map(|k| (cubic(ctrl, (k + 1) as f64 / 32.0) - cubic(ctrl, k as f64 / 32.0)).norm()).sum();
    let step = diam / (site.size.0 + site.size.1) as f64;
    let rings = ((approx_len / step).ceil() as usize).max(8);
    let path: Vec<Point3> = (0..=rings).map(|k| cubic(ctrl, k as f64 / rings as f64)).collect();
    let (frames, _) = transport_frames(&path, false);
    let local = |p: &Point3, c: &Point3, f: &super::frame::Frame| {
        let d = p - c;
        Vec3::new(d.dot(&f.t), d.dot(&f.n), d.dot(&f.b))
    };
    let o1: Vec<Vec3> = loop1.iter().map(|&v| local(&vertices[v], &c1, &frames[0])).collect();
    let o2_raw: Vec<Vec3> = loop2.iter().map(|&v| local(&vertices[v], &c2, &frames[rings])).collect();
    let m = loop1.len();
    let shift = (0..m)
        .min_by(|&a, &b| {
            let cost = |s: usize| -> f64 {
                (0..m)
                    .map(|k| {
                        let (x, y) = (o1[k], o2_raw[(k + s) % m]);
                        (x.y - y.y).powi(2) + (x.z - y.z).powi(2)
                    })
                    .sum()
            };
            cost(a).total_cmp(&cost(b))
        })
        .unwrap();
    let loop2: Vec<usize> = (0..m).map(|k| loop2[(k + shift) % m]).collect();
    let o2: Vec<Vec3> = (0..m).map(|k| o2_raw[(k + shift) % m]).collect();

    let first_new_face = triangles.len();
    let mut prev = loop1.clone();
    for r in 1..=rings {
        let ring: Vec<usize> = if r == rings {
            loop2.clone()
        } else {
            let t = r as f64 / rings as f64;
            let w = t * t * (3.0 - 2.0 * t);
            let f = &frames[r];
            (0..m)
                .map(|k| {
                    let o = o1[k] * (1.0 - w) + o2[k] * w;
                    vertices.push(path[r] + f.t * o.x + f.n * o.y + f.b * o.z);
                    vertices.len() - 1
                })
                .collect()
        };
        for k in 0..m {
            let k1 = (k + 1) % m;
            triangles.push([prev[k], prev[k1], ring[k1]]);
            triangles.push([prev[k], ring[k1], ring[k]]);
        }
        prev = ring;
    }
    let handle_faces: Vec<usize> = (first_new_face..triangles.len()).collect();

    // Interior block vertices are now unused; compact keeps the face order.
    let mut new_mesh = SurfaceMesh::new_unchecked(vertices, triangles);
    let map = new_mesh.compact();
    new_mesh.check_closed()?;
    new_mesh.check_orientable()?;
    new_mesh.check_embedded_faces(&handle_faces)?;
    check_knot_clearance(&new_mesh, &handle_faces, knot, KNOT_MARGIN * surface.radius())?;

    let mut charts = surface.charts().to_vec();
    for c in charts.iter_mut() {
        c.remap_vertex_ids(&map);
    }
    for cell in holes {
        charts[site.chart].add_hole(cell);
    }
    let out = TubeSurface::from_parts(new_mesh, charts, surface.graph().clone(), surface.radius(), surface.clearance())
        .map_err(|e| match e {
            Error::Geometry { message, .. } => Error::Placement(format!("handle breaks the surface: {message}")),
            other => other,
        })?
        .with_handles(surface.handles() + 1);
    let expected_genus = surface.genus() + 1;
    if out.genus() != expected_genus {
        return Err(Error::Placement(format!(
            "stabilized surface has genus {}, expected {expected_genus}",
            out.genus()
        )));
    }
    let out = Arc::new(out);
    let knot = knot.rehost(out.clone())?;
    Ok((out, knot))
}

fn check_knot_clearance(mesh: &SurfaceMesh, faces: &[usize], knot: &CurveOnSurface, margin: f64) -> Result<()> {
    let boxes: Vec<Aabb> = faces.iter().map(|&f| Aabb::of_points(mesh.triangle(f).iter())).collect();
    let segs: Vec<Aabb> = knot.points().segments().map(|(a, b)| Aabb::of_points([a, b].iter())).collect();
    for (i, j) in cross_pairs(&boxes, &segs, margin) {
        let (a, b) = knot.points().segment(j);
        let d = segment_triangle_distance(&a, &b, &mesh.triangle(faces[i]));
        if d < margin {
            return Err(Error::Placement(format!("handle passes within {d:.3e} of the knot")));
        }
    }
    Ok(())
}

/// Stabilizes at the first random admissible site whose handle embeds.
pub fn k_stabilize_random(
    surface: &Arc<TubeSurface>,
    knot: &CurveOnSurface,
    rng: &mut ChaCha8Rng,
) -> Result<(Arc<TubeSurface>, CurveOnSurface, StabilizationSite)> {
    let mut last = Error::Placement("no admissible stabilization site found".into());
    for _ in 0..64 {
        let site = random_site(surface, knot, rng)?;
        match k_stabilize_geometric(surface, knot, &site) {
            Ok((s, k)) => return Ok((s, k, site)),
            Err(e @ Error::Placement(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::{curve_on_tube, make_tube_surface};
    use std::f64::consts::TAU;

    fn torus_with_trefoil() -> (Arc<TubeSurface>, CurveOnSurface) {
        let s = Arc::new(
            make_tube_surface(&fixtures::standard_torus().unwrap(), &fixtures::standard_torus_options()).unwrap(),
        );
        let line: Vec<(f64, f64)> = (0..200)
            .map(|k| {
                let t = k as f64 / 200.0;
                (2.0 * t, TAU * 3.0 * t + 0.1)
            })
            .collect();
        let k = curve_on_tube(&s, 0, &line).unwrap();
        (s, k)
    }

    #[test]
    fn one_handle_adds_one_to_the_genus() {
        let (s, k) = torus_with_trefoil();
        let mut rng = seeded_rng(7);
        let (t, k2, _) = k_stabilize_random(&s, &k, &mut rng).unwrap();
        assert_eq!(t.genus(), 2);
        assert_eq!(t.report().euler_characteristic, s.report().euler_characteristic - 2);
        assert_eq!(k2.points().vertices(), k.points().vertices());
    }

    #[test]
    fn disk_on_the_knot_is_rejected() {
        let (s, k) = torus_with_trefoil();
        // The curve starts at (0, 0.1); a disk at the origin cell meets it.
        let site = StabilizationSite { chart: 0, disks: [(0, 0), (20, 0)], size: (4, 2) };
        match k_stabilize_geometric(&s, &k, &site) {
            Err(Error::Placement(m)) => assert!(m.contains("knot"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
