//! Uniform hash-grid broadphase over axis-aligned boxes.

use std::collections::HashMap;

use super::Point3;

#[derive(Debug, Clone, Copy)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Point3>) -> Self {
        let mut min = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut max = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            for k in 0..3 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        Aabb { min, max }
    }

    pub fn padded(&self, pad: f64) -> Self {
        let d = nalgebra::Vector3::new(pad, pad, pad);
        Aabb { min: self.min - d, max: self.max + d }
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.max[k] && other.min[k] <= self.max[k])
    }

    fn extent(&self) -> f64 {
        (0..3).map(|k| self.max[k] - self.min[k]).fold(0.0, f64::max)
    }
}

fn cell_size(boxes: &[Aabb]) -> f64 {
    let mut ext: Vec<f64> = boxes.iter().map(Aabb::extent).collect();
    if ext.is_empty() {
        return 1.0;
    }
    ext.sort_by(|a, b| a.total_cmp(b));
    let q = ext[(ext.len() * 9) / 10];
    if q > 0.0 {
        q
    } else {
        1.0
    }
}

struct Grid {
    size: f64,
    cells: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl Grid {
    fn new(size: f64) -> Self {
        Grid { size, cells: HashMap::new() }
    }

    fn range(&self, b: &Aabb) -> [(i64, i64); 3] {
        let mut r = [(0, 0); 3];
        for (k, slot) in r.iter_mut().enumerate() {
            *slot = ((b.min[k] / self.size).floor() as i64, (b.max[k] / self.size).floor() as i64);
        }
        r
    }

    fn insert(&mut self, id: usize, b: &Aabb) {
        let [rx, ry, rz] = self.range(b);
        for x in rx.0..=rx.1 {
            for y in ry.0..=ry.1 {
                for z in rz.0..=rz.1 {
                    self.cells.entry((x, y, z)).or_default().push(id);
                }
            }
        }
    }

    fn query(&self, b: &Aabb, out: &mut Vec<usize>) {
        out.clear();
        let [rx, ry, rz] = self.range(b);
        for x in rx.0..=rx.1 {
            for y in ry.0..=ry.1 {
                for z in rz.0..=rz.1 {
                    if let Some(v) = self.cells.get(&(x, y, z)) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// Index pairs `(i, j)`, `i < j`, whose padded boxes overlap.
pub fn self_pairs(boxes: &[Aabb], pad: f64) -> Vec<(usize, usize)> {
    let padded: Vec<Aabb> = boxes.iter().map(|b| b.padded(pad)).collect();
    let mut grid = Grid::new(cell_size(&padded));
    for (i, b) in padded.iter().enumerate() {
        grid.insert(i, b);
    }
    let mut out = Vec::new();
    let mut hits = Vec::new();
    for (i, b) in padded.iter().enumerate() {
        grid.query(b, &mut hits);
        for &j in &hits {
            if j > i && padded[j].overlaps(b) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Pairs `(i, j)` with `a[i]` and `b[j]` overlapping after padding.
pub fn cross_pairs(a: &[Aabb], b: &[Aabb], pad: f64) -> Vec<(usize, usize)> {
    let pa: Vec<Aabb> = a.iter().map(|x| x.padded(pad)).collect();
    let pb: Vec<Aabb> = b.iter().map(|x| x.padded(pad)).collect();
    let mut all = pa.clone();
    all.extend_from_slice(&pb);
    let mut grid = Grid::new(cell_size(&all));
    for (j, bx) in pb.iter().enumerate() {
        grid.insert(j, bx);
    }
    let mut out = Vec::new();
    let mut hits = Vec::new();
    for (i, ax) in pa.iter().enumerate() {
        grid.query(ax, &mut hits);
        for &j in &hits {
            if pb[j].overlaps(ax) {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_exactly_the_overlapping_pairs() {
        let mk = |x: f64| Aabb { min: Point3::new(x, 0.0, 0.0), max: Point3::new(x + 1.0, 1.0, 1.0) };
        let boxes = vec![mk(0.0), mk(0.5), mk(3.0), mk(3.9)];
        let pairs = self_pairs(&boxes, 0.0);
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
        let cross = cross_pairs(&boxes[..2], &boxes[2..], 0.0);
        assert!(cross.is_empty());
        let cross = cross_pairs(&boxes[..2], &boxes[2..], 0.8);
        assert_eq!(cross, vec![(1, 0)]);
    }
}
