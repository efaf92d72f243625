//! Small planar routines used when refining triangles along curves.

use std::collections::HashMap;

pub type P2 = (f64, f64);

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

pub fn signed_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<f64>()
        / 2.0
}

/// Bounded faces of a planar straight-line graph, as counter-clockwise node
/// cycles. `edges` are undirected and must not cross except at nodes.
pub fn bounded_faces(points: &[P2], edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut around: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in edges {
        around.entry(a).or_default().push(b);
        around.entry(b).or_default().push(a);
    }
    for (&v, nbrs) in around.iter_mut() {
        let o = points[v];
        nbrs.sort_by(|&x, &y| {
            let ax = (points[x].1 - o.1).atan2(points[x].0 - o.0);
            let ay = (points[y].1 - o.1).atan2(points[y].0 - o.0);
            ax.total_cmp(&ay)
        });
    }
    let mut used: HashMap<(usize, usize), bool> = HashMap::new();
    for &(a, b) in edges {
        used.insert((a, b), false);
        used.insert((b, a), false);
    }
    let mut keys: Vec<(usize, usize)> = used.keys().copied().collect();
    keys.sort_unstable();
    let mut faces = Vec::new();
    for start in keys {
        if used[&start] {
            continue;
        }
        let mut cycle = Vec::new();
        let (mut u, mut v) = start;
        loop {
            used.insert((u, v), true);
            cycle.push(u);
            // Next edge: the neighbour of v just before u in counter-clockwise order.
            let nbrs = &around[&v];
            let pos = nbrs.iter().position(|&x| x == u).unwrap();
            let w = nbrs[(pos + nbrs.len() - 1) % nbrs.len()];
            (u, v) = (v, w);
            if (u, v) == start || cycle.len() > used.len() {
                break;
            }
        }
        let poly: Vec<P2> = cycle.iter().map(|&i| points[i]).collect();
        if signed_area(&poly) > 0.0 {
            faces.push(cycle);
        }
    }
    faces
}

fn in_triangle_closed(p: P2, a: P2, b: P2, c: P2, eps: f64) -> bool {
    cross(a, b, p) >= -eps && cross(b, c, p) >= -eps && cross(c, a, p) >= -eps
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon that may
/// contain collinear vertices. Returns index triples into `poly_ids`'s
/// coordinate table `points`.
pub fn ear_clip(points: &[P2], poly_ids: &[usize]) -> Option<Vec<[usize; 3]>> {
    let mut ring: Vec<usize> = poly_ids.to_vec();
    let mut out = Vec::with_capacity(ring.len().saturating_sub(2));
    let scale = ring.iter().map(|&i| points[i].0.abs().max(points[i].1.abs())).fold(1.0, f64::max);
    let eps = 1e-14 * scale * scale;
    while ring.len() > 3 {
        let n = ring.len();
        let mut clipped = false;
        for k in 0..n {
            let (ip, ic, inx) = (ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]);
            let (a, b, c) = (points[ip], points[ic], points[inx]);
            if cross(a, b, c) <= eps {
                continue;
            }
            let blocked =
                ring.iter().any(|&o| o != ip && o != ic && o != inx && in_triangle_closed(points[o], a, b, c, eps));
            if blocked {
                continue;
            }
            out.push([ip, ic, inx]);
            ring.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return None;
        }
    }
    let (a, b, c) = (points[ring[0]], points[ring[1]], points[ring[2]]);
    if cross(a, b, c) <= eps {
        return None;
    }
    out.push([ring[0], ring[1], ring[2]]);
    Some(out)
}
