//! Moves that change a single record: stabilization, meridian twists,
//! connected sums, and slope realization.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

use super::record::{GeometricRef, KSplittingRecord, KnotInfo, Manifold, Provenance};
use crate::error::{Error, Result};
use crate::geom::stabilize::seeded_rng;
use crate::geom::{
    curve_on_tube, dehn_twist_curve, k_stabilize_random, make_tube_surface, CurveOnSurface, SpatialGraph,
    StabilizationSite, TubeOptions,
};

/// Sign of the slope change per positive meridian twist.
pub const TWIST_SIGN: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    V,
    W,
}

/// A compressing disk on one side of the surface, summarised by how it
/// meets the knot and the partner disk on the other side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiskWitness {
    pub side: Side,
    pub knot_intersections: u32,
    pub boundary_intersections_with_partner: u32,
    pub separating: bool,
}

pub fn k_stabilize(r: &KSplittingRecord) -> Result<KSplittingRecord> {
    Ok(k_stabilize_with_site(r)?.0)
}

/// One K-stabilization. With a geometric backing, a handle is added at a
/// seeded random admissible site and the slope is recomputed.
pub fn k_stabilize_with_site(r: &KSplittingRecord) -> Result<(KSplittingRecord, Option<StabilizationSite>)> {
    let out = r.with(r.genus() + 1, r.slope(), Provenance::Plain);
    let Some(geo) = r.geometry() else {
        return Ok((out, None));
    };
    let mut rng = seeded_rng(geo.seed ^ (r.genus() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let (_, curve, site) = k_stabilize_random(geo.curve.host(), &geo.curve, &mut rng)?;
    let out = out.set_geometry(Some(GeometricRef { curve, ..geo.clone() }));
    out.verify_geometry()?;
    Ok((out, Some(site)))
}

/// Whether `d1` and `d2` certify that `r` is K-stabilized: `d1` misses the
/// knot and the boundaries meet once. `d2` may meet the knot freely.
pub fn is_k_stabilized(r: &KSplittingRecord, d1: &DiskWitness, d2: &DiskWitness) -> Result<bool> {
    if d1.side == d2.side {
        return Err(Error::input("stabilizing disks must lie on opposite sides"));
    }
    if d1.boundary_intersections_with_partner != d2.boundary_intersections_with_partner {
        return Err(Error::input("the two witnesses disagree on how often their boundaries meet"));
    }
    Ok(r.genus() >= 1 && d1.knot_intersections == 0 && d1.boundary_intersections_with_partner == 1)
}

/// `k` twists along a meridian disk meeting the knot once: the slope moves
/// by `k * TWIST_SIGN`.
pub fn dehn_twist(r: &KSplittingRecord, k: i64) -> Result<KSplittingRecord> {
    if k == 0 {
        return Ok(r.clone());
    }
    if r.separating() {
        return Err(Error::input("a separating knot meets no meridian disk exactly once"));
    }
    let out = r.with(r.genus(), r.slope() + k * TWIST_SIGN, Provenance::Plain);
    let Some(geo) = r.geometry() else {
        return Ok(out);
    };
    let curve = dehn_twist_curve(&geo.curve, k, None)?;
    let out = out.set_geometry(Some(GeometricRef { curve, ..geo.clone() }));
    out.verify_geometry()?;
    Ok(out)
}

/// Connected sum of splittings of `S³`. Genus and slope add; summing with an
/// unknot keeps the other knot, otherwise the labels are joined with `#`.
pub fn connect_sum(r1: &KSplittingRecord, r2: &KSplittingRecord) -> Result<KSplittingRecord> {
    if *r1.manifold() != Manifold::S3 || *r2.manifold() != Manifold::S3 {
        return Err(Error::Unsupported("connected sums are only modelled in S3".into()));
    }
    let knot = if r2.knot().is_unknot() {
        r1.knot().clone()
    } else if r1.knot().is_unknot() {
        r2.knot().clone()
    } else {
        KnotInfo::new(format!("{}#{}", r1.knot().name, r2.knot().name), None)?
    };
    let out = r1
        .with(r1.genus() + r2.genus(), r1.slope() + r2.slope(), Provenance::Plain)
        .set_knot(knot)
        .set_separating(r1.separating() && r2.separating())
        .set_geometry(None);
    out.validate()?;
    Ok(out)
}

/// Symbolic slope realization on a genus `t(K) + 1` surface whose starting
/// slope is taken to be 0.
pub fn realize_slope(knot: &KnotInfo, target: i64) -> Result<(KSplittingRecord, u64)> {
    let t = knot.tunnel_number.ok_or_else(|| Error::input(format!("tunnel number of {} is unknown", knot.name)))?;
    let r = KSplittingRecord::new(Manifold::S3, t + 1, target, knot.clone(), false)?;
    Ok((r, target.unsigned_abs()))
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub record: KSplittingRecord,
    pub base_slope: i64,
    pub twist_count: u64,
}

impl Realization {
    pub fn curve(&self) -> &CurveOnSurface {
        &self.record.geometry().expect("geometric realization").curve
    }
}

/// A `θ = const` longitude of chart 0 avoiding every junction hole.
pub fn base_longitude(surface: &Arc<crate::geom::TubeSurface>) -> Result<CurveOnSurface> {
    let chart = surface.chart(0)?;
    let n = chart.n_circ();
    let free = |j: usize| chart.holes().iter().all(|&(_, hj)| hj != j % n);
    // Pushoffs reach into the neighbouring rows, so prefer a row flanked by
    // free rows.
    let rows = || (0..n).map(|j| (j + n / 4) % n);
    let free_row = rows()
        .find(|&j| free(j + n - 1) && free(j) && free(j + 1))
        .or_else(|| rows().find(|&j| free(j)))
        .ok_or_else(|| Error::input("every ring of the knot's tube meets a tunnel"))?;
    let theta = TAU * (free_row as f64 + 0.5) / n as f64;
    let m = 2 * chart.n_cells_s();
    let coords: Vec<(f64, f64)> = (0..m).map(|k| (k as f64 / m as f64, theta)).collect();
    curve_on_tube(surface, 0, &coords)
}

/// The boundary of a neighbourhood of a knot and its tunnel arcs, with the
/// knot drawn as a longitude of its tube. Twisting it realizes any slope.
#[derive(Debug, Clone)]
pub struct SlopeRealizer {
    base: KSplittingRecord,
}

impl SlopeRealizer {
    pub fn new(
        knot: &KnotInfo,
        graph: &SpatialGraph,
        opts: &TubeOptions,
        epsilon: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        let t = knot.tunnel_number.ok_or_else(|| Error::input(format!("tunnel number of {} is unknown", knot.name)))?;
        if graph.circles().len() != 1 {
            return Err(Error::input("the graph must consist of the knot and its tunnel arcs"));
        }
        if graph.arcs().len() != t as usize {
            return Err(Error::input(format!(
                "{} has tunnel number {t} but the graph has {} tunnel arcs",
                knot.name,
                graph.arcs().len()
            )));
        }
        let surface = Arc::new(make_tube_surface(graph, opts)?);
        let curve = base_longitude(&surface)?;
        let base = KSplittingRecord::from_geometry(knot.clone(), GeometricRef::new(curve, epsilon, seed))?;
        Ok(SlopeRealizer { base })
    }

    pub fn base(&self) -> &KSplittingRecord {
        &self.base
    }

    pub fn realize(&self, target: i64) -> Result<Realization> {
        let base_slope = self.base.slope();
        let record = dehn_twist(&self.base, (target - base_slope) * TWIST_SIGN)?;
        Ok(Realization { record, base_slope, twist_count: (target - base_slope).unsigned_abs() })
    }
}

pub fn realize_slope_geometric(
    knot: &KnotInfo,
    graph: &SpatialGraph,
    opts: &TubeOptions,
    target: i64,
    epsilon: Option<f64>,
    seed: u64,
) -> Result<Realization> {
    SlopeRealizer::new(knot, graph, opts, epsilon, seed)?.realize(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rec(g: u32, m: i64) -> KSplittingRecord {
        KSplittingRecord::new(Manifold::S3, g, m, KnotInfo::new("trefoil", Some(1)).unwrap(), false).unwrap()
    }

    fn disk(side: Side, knot: u32, partner: u32) -> DiskWitness {
        DiskWitness { side, knot_intersections: knot, boundary_intersections_with_partner: partner, separating: false }
    }

    #[test]
    fn stabilization_keeps_the_slope() {
        let r = k_stabilize(&rec(1, 6)).unwrap();
        assert_eq!((r.genus(), r.slope()), (2, 6));
        let u = KSplittingRecord::new(Manifold::S3, 0, 0, KnotInfo::unknot(), true).unwrap();
        let u1 = k_stabilize(&u).unwrap();
        assert_eq!((u1.genus(), u1.slope(), u1.separating()), (1, 0, true));
        let mut r = rec(2, -4);
        for _ in 0..7 {
            r = k_stabilize(&r).unwrap();
        }
        assert_eq!((r.genus(), r.slope()), (9, -4));
    }

    #[test]
    fn stabilization_witnesses() {
        let r = rec(2, 6);
        assert!(is_k_stabilized(&r, &disk(Side::V, 0, 1), &disk(Side::W, 3, 1)).unwrap());
        assert!(!is_k_stabilized(&r, &disk(Side::V, 1, 1), &disk(Side::W, 0, 1)).unwrap());
        assert!(!is_k_stabilized(&r, &disk(Side::V, 0, 2), &disk(Side::W, 0, 2)).unwrap());
        assert!(is_k_stabilized(&r, &disk(Side::V, 0, 1), &disk(Side::V, 0, 1)).is_err());
    }

    #[test]
    fn twists_shift_the_slope() {
        let r = rec(2, 3);
        assert_eq!(dehn_twist(&r, 0).unwrap(), r);
        assert_eq!(dehn_twist(&r, 1).unwrap().slope(), 4);
        assert_eq!(dehn_twist(&r, -5).unwrap().slope(), -2);
        let sep = KSplittingRecord::new(Manifold::S3, 2, 0, KnotInfo::unknot(), true).unwrap();
        assert!(dehn_twist(&sep, 1).is_err());
    }

    #[test]
    fn connected_sums_add() {
        let u = |g, m| KSplittingRecord::new(Manifold::S3, g, m, KnotInfo::unknot(), false).unwrap();
        let s = connect_sum(&rec(2, -3), &u(1, 7)).unwrap();
        assert_eq!((s.genus(), s.slope(), s.knot().name.as_str()), (3, 4, "trefoil"));
        let s = connect_sum(&rec(1, 2), &u(1, 0)).unwrap();
        assert_eq!((s.genus(), s.slope()), (2, 2));
        let s = connect_sum(&rec(1, 2), &rec(1, 1)).unwrap();
        assert_eq!(s.knot().name, "trefoil#trefoil");
        let other = KSplittingRecord::new(Manifold::Other("T3".into()), 3, 0, KnotInfo::unknot(), false).unwrap();
        assert!(matches!(connect_sum(&other, &u(1, 0)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn symbolic_realization() {
        let (r, n) = realize_slope(&KnotInfo::new("figure-eight", Some(1)).unwrap(), -3).unwrap();
        assert_eq!((r.genus(), r.slope(), n), (2, -3, 3));
        assert_eq!(realize_slope(&KnotInfo::unknot(), 0).unwrap().1, 0);
        assert!(realize_slope(&KnotInfo::new("k", None).unwrap(), 1).is_err());
    }

    #[test]
    fn geometric_twist_on_the_unknot_tube() {
        let g = fixtures::unknot().unwrap();
        let real = realize_slope_geometric(&KnotInfo::unknot(), &g, &fixtures::unknot_options(), 5, None, 0).unwrap();
        assert_eq!(real.base_slope, 0);
        assert_eq!((real.record.genus(), real.record.slope(), real.twist_count), (1, 5, 5));
        assert_eq!(real.curve().classes(), Some((1, 5)));
    }
}
