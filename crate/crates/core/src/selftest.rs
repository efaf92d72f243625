//! Seeded invariant suite behind `ksplit selftest`.

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{
    amalgamate_all, census, common_stabilization, connect_sum, dehn_twist, k_stabilize, peel_collar, replay,
    second_stabilize, ComponentKind, GeometricRef, KSplittingRecord, KnotInfo, Manifold, TWIST_SIGN,
};
use crate::fixtures;
use crate::geom::{curve_on_tube, dehn_twist_curve, is_separating, make_tube_surface, PolyCurve3, TubeSurface};
use crate::linking::{gauss_raw, linking_number_crossings, linking_number_gauss, surface_slope, Direction};
use crate::sampling::{random_link, random_record, record_for};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub properties: Vec<PropertyReport>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.properties {
            let tag = if p.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{tag}] {}: {}\n", p.name, p.detail));
        }
        let passed = self.properties.iter().filter(|p| p.passed).count();
        out.push_str(&format!("selftest seed {}: {passed}/{} properties hold\n", self.seed, self.properties.len()));
        out
    }
}

type Check = std::result::Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

const LINKS: usize = 40;
const RECORDS: usize = 40;

fn linking_properties(rng: &mut ChaCha8Rng) -> [Check; 4] {
    let links: Vec<_> = (0..LINKS).map(|_| random_link(rng)).collect();
    let seed: u64 = rng.gen();
    let cross = |a: &PolyCurve3, b: &PolyCurve3| linking_number_crossings(a, b, Direction::Auto { seed }).map_err(err);
    let symmetry = (|| {
        for (i, l) in links.iter().enumerate() {
            let (ab, ba) = (cross(&l.a, &l.b)?, cross(&l.b, &l.a)?);
            check(ab == ba, || format!("link {i}: {ab} vs {ba}"))?;
        }
        Ok(format!("{LINKS} links"))
    })();
    let subdivision = (|| {
        for (i, l) in links.iter().enumerate() {
            let (x, y) = (cross(&l.a, &l.b)?, cross(&l.a.subdivided(), &l.b.subdivided())?);
            check(x == y, || format!("link {i}: {x} vs {y}"))?;
        }
        Ok(format!("{LINKS} links"))
    })();
    let agreement = (|| {
        for (i, l) in links.iter().enumerate() {
            let (x, g) = (cross(&l.a, &l.b)?, linking_number_gauss(&l.a, &l.b).map_err(err)?);
            check(x == g && g == l.expected, || format!("link {i}: {x}, {g}, expected {}", l.expected))?;
        }
        Ok(format!("{LINKS} links"))
    })();
    let integrality = (|| {
        let worst = links
            .iter()
            .map(|l| {
                let raw = gauss_raw(&l.a, &l.b);
                (raw - raw.round()).abs()
            })
            .fold(0.0, f64::max);
        check(worst < 0.1, || format!("deviation {worst}"))?;
        Ok(format!("max |raw - round| = {worst:.1e}"))
    })();
    [symmetry, subdivision, agreement, integrality]
}

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

fn torus_slopes() -> Check {
    let s = torus();
    for (p, q) in [(1, 1), (2, 3), (3, 2)] {
        let c = curve_on_tube(&s, 0, &line(p, q, 150)).map_err(err)?;
        let m = surface_slope(&c, 0.1).map_err(err)?.slope;
        check(m == p * q, || format!("({p},{q}) has slope {m}"))?;
    }
    Ok("(1,1), (2,3), (3,2) have slope pq".into())
}

fn separating_belt() -> Check {
    let g = fixtures::dumbbell().map_err(err)?;
    let s = Arc::new(make_tube_surface(&g, &fixtures::dumbbell_options()).map_err(err)?);
    let m: Vec<(f64, f64)> = (0..24).map(|k| (0.5, TAU * k as f64 / 24.0)).collect();
    let c = curve_on_tube(&s, fixtures::DUMBBELL_BELT_CHART, &m).map_err(err)?;
    check(is_separating(&c).map_err(err)?, || "belt does not separate".into())?;
    let slope = surface_slope(&c, 0.2 * s.radius()).map_err(err)?.slope;
    check(slope == 0, || format!("belt slope {slope}"))?;
    Ok("dumbbell belt separates with slope 0".into())
}

fn twist_action(rng: &mut ChaCha8Rng) -> Check {
    let g = fixtures::unknot().map_err(err)?;
    let s = Arc::new(make_tube_surface(&g, &fixtures::unknot_options()).map_err(err)?);
    let c = curve_on_tube(&s, 0, &line(1, 0, 96)).map_err(err)?;
    let k = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
    let eps = 0.2 * s.radius();
    let base = surface_slope(&c, eps).map_err(err)?.slope;
    let t = dehn_twist_curve(&c, k, None).map_err(err)?;
    let m = surface_slope(&t, eps).map_err(err)?.slope;
    check(m - base == TWIST_SIGN * k, || format!("{k} twists moved the slope from {base} to {m}"))?;
    Ok(format!("{k} twists shift the unknot slope by {k}"))
}

fn geometric_stabilization(rng: &mut ChaCha8Rng) -> Check {
    let c = curve_on_tube(&torus(), 0, &line(2, 3, 150)).map_err(err)?;
    let knot = KnotInfo::new("trefoil", Some(1)).map_err(err)?;
    let r = KSplittingRecord::from_geometry(knot, GeometricRef::new(c, Some(0.1), rng.gen())).map_err(err)?;
    let s = k_stabilize(&r).map_err(err)?;
    let host = s.geometry().expect("geometric").curve.host();
    host.mesh().validate().map_err(err)?;
    check(s.genus() == 2 && host.genus() == 2 && s.slope() == 6, || {
        format!("genus {} slope {}", s.genus(), s.slope())
    })?;
    Ok("torus (2,3): genus 1 -> 2, slope 6 kept, mesh valid".into())
}

fn symbolic_moves(rng: &mut ChaCha8Rng) -> [Check; 2] {
    let records: Vec<_> = (0..RECORDS).map(|_| random_record(rng)).collect();
    let ledger = (|| {
        for r in &records {
            let s = k_stabilize(r).map_err(err)?;
            let (p, d1) = peel_collar(r);
            let (w, _) = second_stabilize(&p, &d1).map_err(err)?;
            check(s.genus() == r.genus() + 1 && w.genus() == r.genus() + 2, || "genus".into())?;
            check([s.slope(), p.slope(), w.slope()].iter().all(|&m| m == r.slope()), || "slope".into())?;
            let t = dehn_twist(r, 3).map_err(err)?;
            check(t.slope() == r.slope() + 3 && t.genus() == r.genus(), || "twist".into())?;
        }
        Ok(format!("{RECORDS} records"))
    })();
    let sums = (|| {
        for pair in records.chunks(2) {
            let s = connect_sum(&pair[0], &pair[1]).map_err(err)?;
            check(s.genus() == pair[0].genus() + pair[1].genus(), || "genus".into())?;
            check(s.slope() == pair[0].slope() + pair[1].slope(), || "slope".into())?;
        }
        Ok(format!("{} sums", RECORDS / 2))
    })();
    [ledger, sums]
}

fn reduction_properties(rng: &mut ChaCha8Rng) -> [Check; 2] {
    let records: Vec<_> = (0..RECORDS).map(|_| random_record(rng)).collect();
    let shape = (|| {
        for r in &records {
            let gs = census(r).map_err(err)?;
            let c = gs.components();
            let g = r.genus();
            check(c.len() == 4, || "four pieces".into())?;
            let kinds = [
                ComponentKind::SolidTorus,
                ComponentKind::ProductT2xI,
                ComponentKind::CompressionBodyC3,
                ComponentKind::HandlebodyGenusG,
            ];
            check(c.iter().map(|c| c.kind).eq(kinds), || "kinds".into())?;
            check(c.iter().map(|c| c.plus_genus).eq([1, 2, g + 1, g]), || "plus genera".into())?;
            check(c.iter().map(|c| c.carries_knot).eq([true, true, false, false]), || "knot flags".into())?;
        }
        Ok(format!("{RECORDS} censuses"))
    })();
    let round_trip = (|| {
        let orders = [["Sigma", "T1", "T2"], ["T2", "Sigma", "T1"], ["T1", "T2", "Sigma"]];
        for r in &records {
            let gs = census(r).map_err(err)?;
            let (p, d1) = peel_collar(r);
            let (w, _) = second_stabilize(&p, &d1).map_err(err)?;
            for order in orders {
                let order: Vec<String> = order.iter().map(|s| s.to_string()).collect();
                check(amalgamate_all(&gs, &order).map_err(err)? == w, || format!("order {order:?}"))?;
            }
        }
        Ok(format!("{RECORDS} records, {} orders each", orders.len()))
    })();
    [shape, round_trip]
}

fn common_stabilizations(rng: &mut ChaCha8Rng) -> [Check; 2] {
    let equal = (|| {
        for _ in 0..RECORDS {
            let a = random_record(rng);
            let b = record_for(rng, a.knot().clone());
            let b = KSplittingRecord::new(Manifold::S3, b.genus(), a.slope(), b.knot().clone(), false).map_err(err)?;
            let extra = rng.gen_range(0..3);
            let (r, ta, tb) = common_stabilization(&a, &b, extra).map_err(err)?;
            check(r.genus() == a.genus().max(b.genus()) + 2 + extra, || "genus".into())?;
            check(replay(&ta).map_err(err)? == r && replay(&tb).map_err(err)? == r, || "replay".into())?;
        }
        Ok(format!("{RECORDS} pairs replay to one record"))
    })();
    let mismatch = (|| {
        for _ in 0..RECORDS {
            let a = random_record(rng);
            let b = record_for(rng, a.knot().clone());
            if b.slope() == a.slope() {
                continue;
            }
            match common_stabilization(&a, &b, 0) {
                Err(crate::Error::SlopeMismatch { .. }) => {}
                other => return Err(format!("{other:?}")),
            }
        }
        Ok("unequal slopes always rejected".into())
    })();
    [equal, mismatch]
}

fn fixture_meshes() -> Check {
    let cases = [
        (fixtures::standard_torus(), fixtures::standard_torus_options(), 1),
        (fixtures::unknot_with_tunnel(), fixtures::unknot_with_tunnel_options(), 2),
        (fixtures::dumbbell(), fixtures::dumbbell_options(), 2),
        (fixtures::figure_eight(), fixtures::figure_eight_options(), 2),
    ];
    for (g, o, genus) in cases {
        let s = make_tube_surface(&g.map_err(err)?, &o).map_err(err)?;
        let r = s.mesh().validate().map_err(err)?;
        check(r.genus == genus, || format!("genus {} != {genus}", r.genus))?;
    }
    Ok("4 fixture surfaces closed, orientable, embedded, right genus".into())
}

fn guarded(f: impl FnOnce() -> Check) -> Check {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

/// Runs every property with generators seeded from `seed`.
pub fn run_selftest(seed: u64) -> SelfTestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut props: Vec<(&'static str, Check)> = Vec::new();
    let [a, b, c, d] = guarded_array(|| linking_properties(&mut rng));
    props.extend([
        ("linking symmetry", a),
        ("linking subdivision invariance", b),
        ("linking engine agreement", c),
        ("Gauss sum integrality", d),
    ]);
    props.push(("torus slopes", guarded(torus_slopes)));
    props.push(("separating implies slope 0", guarded(separating_belt)));
    props.push(("twist action", guarded(|| twist_action(&mut rng))));
    props.push(("geometric stabilization", guarded(|| geometric_stabilization(&mut rng))));
    let [a, b] = guarded_array(|| symbolic_moves(&mut rng));
    props.extend([("genus and slope ledger", a), ("connected sum additivity", b)]);
    let [a, b] = guarded_array(|| reduction_properties(&mut rng));
    props.extend([("weak-reduction census", a), ("amalgamation round trip", b)]);
    let [a, b] = guarded_array(|| common_stabilizations(&mut rng));
    props.extend([("common stabilization replay", a), ("slope mismatch rejected", b)]);
    props.push(("fixture meshes", guarded(fixture_meshes)));
    SelfTestReport {
        seed,
        properties: props
            .into_iter()
            .map(|(name, r)| PropertyReport {
                name,
                passed: r.is_ok(),
                detail: match r {
                    Ok(s) | Err(s) => s,
                },
            })
            .collect(),
    }
}

fn guarded_array<const N: usize>(f: impl FnOnce() -> [Check; N]) -> [Check; N] {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(_) => std::array::from_fn(|_| Err("panicked".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_deterministic_and_green() {
        let a = run_selftest(7);
        assert!(a.properties.len() >= 10);
        assert!(a.all_passed(), "{}", a.render());
        assert_eq!(a, run_selftest(7));
    }
}
