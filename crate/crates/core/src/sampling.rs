//! Seeded generators of random links and records, shared by the self-test
//! and the property tests.

use std::f64::consts::TAU;

use nalgebra::{Rotation3, Unit};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{KSplittingRecord, KnotInfo, Manifold};
use crate::geom::{Point3, PolyCurve3, Vec3};

/// Knots with known tunnel numbers used for random records.
pub const KNOT_TABLE: [(&str, u32); 6] =
    [("unknot", 0), ("trefoil", 1), ("figure-eight", 1), ("5_2", 1), ("8_16", 2), ("9_35", 2)];

/// A two-component PL link: a jittered unit circle and a curve winding
/// around it, or lifted or moved away so that the two are unlinked, both
/// placed by a random rigid motion.
#[derive(Debug, Clone)]
pub struct RandomLink {
    pub a: PolyCurve3,
    pub b: PolyCurve3,
    /// Linking number by construction.
    pub expected: i64,
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_link(rng: &mut ChaCha8Rng) -> RandomLink {
    let na = rng.gen_range(12..40);
    let winding: i64 = rng.gen_range(-3..=3);
    let apart = rng.gen_bool(0.25);
    let nb = rng.gen_range(24..60) * (winding.unsigned_abs() as usize).max(1);
    let rho = rng.gen_range(0.25..0.45);
    let jitter = 0.03;
    let phase = rng.gen_range(0.0..TAU);
    let a: Vec<Point3> = (0..na)
        .map(|k| {
            let t = TAU * k as f64 / na as f64 + phase;
            let r = 1.0 + rng.gen_range(-jitter..jitter);
            Point3::new(r * t.cos(), r * t.sin(), rng.gen_range(-jitter..jitter))
        })
        .collect();
    let q = if winding == 0 { 1 } else { winding } as f64;
    let offset = if apart { Vec3::new(0.0, 0.0, rng.gen_range(3.0..6.0)) } else { Vec3::zeros() };
    let lift = if winding == 0 { 2.5 } else { 0.0 };
    let b: Vec<Point3> = (0..nb)
        .map(|k| {
            let t = TAU * k as f64 / nb as f64;
            let (c, s) = ((q * t).cos(), (q * t).sin());
            let r = 1.0 + rho * c;
            Point3::new(r * t.cos(), r * t.sin(), rho * s + lift) + offset
        })
        .collect();
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(random_unit(rng)), rng.gen_range(0.0..TAU));
    let shift = random_unit(rng) * rng.gen_range(0.0..2.0);
    let place = |pts: Vec<Point3>| PolyCurve3::new_unchecked(pts.into_iter().map(|p| rot * p + shift).collect(), true);
    let (mut a, mut b) = (place(a), place(b));
    // Turning from the outward radial direction towards +z around a core
    // running counter-clockwise is a left-handed meridian.
    let mut expected = if apart { 0 } else { -winding };
    if rng.gen_bool(0.5) {
        a = a.reversed();
        expected = -expected;
    }
    if rng.gen_bool(0.5) {
        b = b.reversed();
        expected = -expected;
    }
    RandomLink { a, b, expected }
}

pub fn random_knot(rng: &mut ChaCha8Rng) -> KnotInfo {
    let (name, t) = KNOT_TABLE[rng.gen_range(0..KNOT_TABLE.len())];
    KnotInfo { name: name.into(), tunnel_number: Some(t) }
}

/// A non-separating record in `S³` of genus between `t(K)` and `t(K) + 5`.
pub fn random_record(rng: &mut ChaCha8Rng) -> KSplittingRecord {
    let knot = random_knot(rng);
    record_for(rng, knot)
}

pub fn record_for(rng: &mut ChaCha8Rng, knot: KnotInfo) -> KSplittingRecord {
    let t = knot.tunnel_number.unwrap_or(0);
    let genus = rng.gen_range(t.max(1)..=t + 5);
    let slope = rng.gen_range(-12..=12);
    KSplittingRecord::new(Manifold::S3, genus, slope, knot, false).expect("valid random record")
}
