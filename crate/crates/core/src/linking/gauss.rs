//! Linking number from the Gauss double integral, evaluated exactly per
//! segment pair as a signed solid angle.

use crate::error::{Error, Result};
use crate::geom::{Point3, PolyCurve3, Vec3};

/// Largest accepted distance of the raw Gauss sum from an integer.
pub const ROUNDING_WINDOW: f64 = 0.1;

/// `tan(Ω/2)` of the triangle `r1 r2 r3` seen from the origin, as the
/// pair `(numerator, denominator)` (Van Oosterom–Strackee).
#[inline]
fn half_angle(r1: &Vec3, r2: &Vec3, r3: &Vec3, n1: f64, n2: f64, n3: f64) -> (f64, f64) {
    let num = r1.dot(&r2.cross(r3));
    let den = n1 * n2 * n3 + r1.dot(r2) * n3 + r1.dot(r3) * n2 + r2.dot(r3) * n1;
    (num, den)
}

/// Solid angle of the parallelogram with corners `r00, r01, r11, r10`,
/// negated. The two triangle half-angles are added as arguments of a
/// complex product; the total stays below `2π` in magnitude because the
/// parallelogram is planar and misses the origin.
#[inline]
fn quad(r00: &Vec3, r01: &Vec3, r11: &Vec3, r10: &Vec3, n: [f64; 4]) -> f64 {
    let (y1, x1) = half_angle(r00, r01, r11, n[0], n[1], n[2]);
    let (y2, x2) = half_angle(r00, r11, r10, n[0], n[2], n[3]);
    -2.0 * (y1 * x2 + x1 * y2).atan2(x1 * x2 - y1 * y2)
}

/// Signed solid angle subtended between segment `a0 a1` and segment `b0 b1`:
/// the directions `b(t) - a(s)` sweep the parallelogram with corners
/// `b0 - a0, b1 - a0, b1 - a1, b0 - a1`. The sign is that of
/// `(a1 - a0) x (b1 - b0) . (a0 - b0)`.
#[cfg(test)]
pub(crate) fn segment_pair(a0: &Point3, a1: &Point3, b0: &Point3, b1: &Point3) -> f64 {
    let (r00, r01, r11, r10) = (b0 - a0, b1 - a0, b1 - a1, b0 - a1);
    quad(&r00, &r01, &r11, &r10, [r00.norm(), r01.norm(), r11.norm(), r10.norm()])
}

/// Rows of the segment-pair sum handled as one unit of work. Partial sums
/// are combined in row order, so the result does not depend on the number
/// of threads.
const ROWS_PER_CHUNK: usize = 64;

/// Sum over segments `a[i] a[i+1]` for `i` in `rows` against every segment
/// of the polyline `b`. Corner vectors `b[j] - a[i]` and their norms are
/// shared by neighbouring pairs, so each row computes one new set.
fn chunk_sum(a: &[Point3], rows: std::ops::Range<usize>, b: &[Point3]) -> f64 {
    let m = b.len();
    let mut prev: Vec<Vec3> = b.iter().map(|p| p - a[rows.start]).collect();
    let mut prev_n: Vec<f64> = prev.iter().map(|v| v.norm()).collect();
    let mut cur = vec![Vec3::zeros(); m];
    let mut cur_n = vec![0.0; m];
    let mut total = 0.0;
    for i in rows {
        for j in 0..m {
            cur[j] = b[j] - a[i + 1];
            cur_n[j] = cur[j].norm();
        }
        let mut row = 0.0;
        for j in 0..m - 1 {
            row +=
                quad(&prev[j], &prev[j + 1], &cur[j + 1], &cur[j], [prev_n[j], prev_n[j + 1], cur_n[j + 1], cur_n[j]]);
        }
        total += row;
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut prev_n, &mut cur_n);
    }
    total
}

/// Vertices with the first repeated at the end when the curve is closed.
fn polyline(c: &PolyCurve3) -> Vec<Point3> {
    let mut v = c.vertices().to_vec();
    if c.is_closed() && !v.is_empty() {
        v.push(v[0]);
    }
    v
}

/// The Gauss sum divided by `4π`, before rounding.
pub fn gauss_raw(c1: &PolyCurve3, c2: &PolyCurve3) -> f64 {
    let (a, b) = (polyline(c1), polyline(c2));
    if a.len() < 2 || b.len() < 2 {
        return 0.0;
    }
    let segments = a.len() - 1;
    let chunks: Vec<std::ops::Range<usize>> =
        (0..segments).step_by(ROWS_PER_CHUNK).map(|s| s..(s + ROWS_PER_CHUNK).min(segments)).collect();
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(chunks.len());
    let mut sums = vec![0.0; chunks.len()];
    if threads <= 1 || segments * b.len() < 1 << 16 {
        for (s, r) in sums.iter_mut().zip(&chunks) {
            *s = chunk_sum(&a, r.clone(), &b);
        }
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let (chunks, a, b) = (&chunks, &a, &b);
                    scope.spawn(move || {
                        (t..chunks.len())
                            .step_by(threads)
                            .map(|k| (k, chunk_sum(a, chunks[k].clone(), b)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (k, v) in h.join().expect("Gauss worker panicked") {
                    sums[k] = v;
                }
            }
        });
    }
    sums.iter().sum::<f64>() / (4.0 * std::f64::consts::PI)
}

/// Linking number by the Gauss integral; fails loudly when the raw sum is
/// not within [`ROUNDING_WINDOW`] of an integer.
pub fn linking_number_gauss(c1: &PolyCurve3, c2: &PolyCurve3) -> Result<i64> {
    if !c1.is_closed() || !c2.is_closed() {
        return Err(Error::input("linking numbers need closed curves"));
    }
    let raw = gauss_raw(c1, c2);
    if !raw.is_finite() || (raw - raw.round()).abs() >= ROUNDING_WINDOW {
        return Err(Error::Precision { raw });
    }
    Ok(raw.round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn circle(c: Point3, u: Vec3, v: Vec3, n: usize) -> PolyCurve3 {
        PolyCurve3::closed(
            (0..n)
                .map(|k| {
                    let a = TAU * (k as f64 + 0.37) / n as f64;
                    c + u * a.cos() + v * a.sin()
                })
                .collect(),
        )
        .unwrap()
    }

    fn unit_cross(a: &Vec3, b: &Vec3) -> Vec3 {
        let c = a.cross(b);
        let n = c.norm();
        if n > 0.0 {
            c / n
        } else {
            Vec3::zeros()
        }
    }

    /// Reference per-pair formula: area of the spherical quadrilateral from
    /// the arcsines of consecutive face normals, signed separately.
    fn segment_pair_arcsine(a0: &Point3, a1: &Point3, b0: &Point3, b1: &Point3) -> f64 {
        let (r00, r01, r10, r11) = (b0 - a0, b1 - a0, b0 - a1, b1 - a1);
        let n = [unit_cross(&r00, &r01), unit_cross(&r01, &r11), unit_cross(&r11, &r10), unit_cross(&r10, &r00)];
        let omega: f64 = (0..4).map(|k| n[k].dot(&n[(k + 1) % 4]).clamp(-1.0, 1.0).asin()).sum();
        let orient = (a1 - a0).cross(&(b1 - b0)).dot(&(a0 - b0));
        omega * orient.signum()
    }

    #[test]
    fn pair_formula_matches_the_arcsine_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut p = || Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for _ in 0..2000 {
            let (a0, a1, b0, b1) = (p(), p(), p(), p());
            let (x, y) = (segment_pair(&a0, &a1, &b0, &b1), segment_pair_arcsine(&a0, &a1, &b0, &b1));
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn row_sweep_matches_pairwise_sum() {
        let a = circle(Point3::origin(), Vec3::x(), Vec3::y(), 150);
        let b = circle(Point3::new(1.0, 0.1, 0.0), Vec3::x() * 0.7, Vec3::z(), 37);
        let mut direct = 0.0;
        for (a0, a1) in a.segments() {
            for (b0, b1) in b.segments() {
                direct += segment_pair(&a0, &a1, &b0, &b1);
            }
        }
        let direct = direct / (4.0 * std::f64::consts::PI);
        assert!((gauss_raw(&a, &b) - direct).abs() < 1e-12);
    }

    /// Independent oracle: midpoint-rule quadrature of
    /// `(r1 - r2) . (dr1 x dr2) / |r1 - r2|^3 / 4π` on subdivided segments.
    fn quadrature(c1: &PolyCurve3, c2: &PolyCurve3, sub: usize) -> f64 {
        let pieces = |c: &PolyCurve3| -> Vec<(Point3, Vec3)> {
            c.segments()
                .flat_map(|(a, b)| {
                    let d = (b - a) / sub as f64;
                    (0..sub).map(move |k| (a + d * (k as f64 + 0.5), d))
                })
                .collect()
        };
        let (p, q) = (pieces(c1), pieces(c2));
        let mut total = 0.0;
        for (x, dx) in &p {
            for (y, dy) in &q {
                let r = x - y;
                total += r.dot(&dx.cross(dy)) / r.norm().powi(3);
            }
        }
        total / (4.0 * std::f64::consts::PI)
    }

    #[test]
    fn matches_quadrature_on_a_hopf_link() {
        let a = circle(Point3::origin(), Vec3::x(), Vec3::y(), 24);
        let b = circle(Point3::new(1.0, 0.0, 0.0), Vec3::x(), Vec3::z(), 24);
        let exact = gauss_raw(&a, &b);
        let approx = quadrature(&a, &b, 8);
        assert!((exact - approx).abs() < 2e-3, "{exact} vs {approx}");
        assert!((exact + 1.0).abs() < 1e-9, "{exact}");
    }

    #[test]
    fn matches_quadrature_on_an_unlinked_pair() {
        let a = circle(Point3::origin(), Vec3::x(), Vec3::y(), 16);
        let b = circle(Point3::new(0.3, 0.2, 1.5), Vec3::y(), Vec3::z() * 0.8, 16);
        let exact = gauss_raw(&a, &b);
        let approx = quadrature(&a, &b, 8);
        assert!((exact - approx).abs() < 1e-3, "{exact} vs {approx}");
        assert_eq!(linking_number_gauss(&a, &b).unwrap(), 0);
    }

    #[test]
    fn touching_curves_fail_loudly() {
        // b passes straight through an edge of a, so the pair's solid angle
        // is undefined and the raw sum lands half way between integers.
        let a = PolyCurve3::closed(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ])
        .unwrap();
        let b = PolyCurve3::closed(vec![
            Point3::new(0.5, 0.0, -1.0),
            Point3::new(0.5, 0.0, 1.0),
            Point3::new(0.5, -2.0, 0.0),
        ])
        .unwrap();
        assert!(matches!(linking_number_gauss(&a, &b), Err(Error::Precision { .. })));
    }
}
