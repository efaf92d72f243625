//! Two K-stabilizations that make a splitting weakly reducible, the
//! four-piece decomposition they produce, and its three-piece coarsening.

use serde::{Deserialize, Serialize};

use super::components::{BoundaryLabel, ComponentKind, ComponentSplitting, GeneralizedSplitting};
use super::moves::{DiskWitness, Side};
use super::record::{KSplittingRecord, Provenance};
use crate::error::{Error, Result};

pub const COLLAR_TORUS: &str = "T1";
pub const PRODUCT_TORUS: &str = "T2";
pub const CORE_SURFACE: &str = "Sigma";

/// Disjoint compressing disk families on the two sides, both missing the
/// knot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakReductionWitness {
    pub delta_v: Vec<DiskWitness>,
    pub delta_w: Vec<DiskWitness>,
}

impl WeakReductionWitness {
    pub fn validate(&self) -> Result<()> {
        if self.delta_v.is_empty() || self.delta_w.is_empty() {
            return Err(Error::input("both disk families must be nonempty"));
        }
        if self.delta_v.iter().any(|d| d.side != Side::V) || self.delta_w.iter().any(|d| d.side != Side::W) {
            return Err(Error::input("a disk is listed on the wrong side"));
        }
        let all = || self.delta_v.iter().chain(&self.delta_w);
        if all().any(|d| d.knot_intersections != 0) {
            return Err(Error::input("weak reduction disks must miss the knot"));
        }
        if all().any(|d| d.boundary_intersections_with_partner != 0) {
            return Err(Error::input("disks on opposite sides must be disjoint"));
        }
        Ok(())
    }
}

/// The separating disk `D₁` cutting the collar of the knot off `Ṽ`.
pub fn collar_disk() -> DiskWitness {
    DiskWitness { side: Side::V, knot_intersections: 0, boundary_intersections_with_partner: 0, separating: true }
}

/// The meridian disk `D₂` of the second handle, disjoint from `D₁` and `K`.
pub fn handle_disk() -> DiskWitness {
    DiskWitness { side: Side::W, knot_intersections: 0, boundary_intersections_with_partner: 0, separating: false }
}

pub fn weak_reduction_witness() -> WeakReductionWitness {
    WeakReductionWitness { delta_v: vec![collar_disk()], delta_w: vec![handle_disk()] }
}

/// K-stabilizes so that one side becomes a collar of the knot plus the old
/// handlebody, joined along a disk missing the knot. The knot becomes a
/// longitude of the collar torus and so no longer separates the surface.
pub fn peel_collar(r: &KSplittingRecord) -> (KSplittingRecord, DiskWitness) {
    let out = r
        .with(r.genus() + 1, r.slope(), Provenance::Peeled { base_genus: r.genus() })
        .set_separating(false)
        .set_geometry(None);
    (out, collar_disk())
}

pub fn second_stabilize(r: &KSplittingRecord, d1: &DiskWitness) -> Result<(KSplittingRecord, DiskWitness)> {
    let Provenance::Peeled { base_genus } = r.provenance() else {
        return Err(Error::Protocol("second_stabilize expects the output of peel_collar".into()));
    };
    if *d1 != collar_disk() {
        return Err(Error::Protocol("the first witness is not the collar disk".into()));
    }
    let out = r.with(r.genus() + 1, r.slope(), Provenance::WeaklyReducible { base_genus });
    Ok((out, handle_disk()))
}

/// Compresses a doubly stabilized genus `g + 2` splitting along the two
/// disks into four pieces: the collar, `T² × I`, a compression body from
/// `Σ_g` to a torus, and a genus `g` handlebody.
pub fn weak_reduce(r: &KSplittingRecord, w: &WeakReductionWitness) -> Result<GeneralizedSplitting> {
    let Provenance::WeaklyReducible { base_genus: g } = r.provenance() else {
        return Err(Error::Protocol("weak_reduce expects the output of second_stabilize".into()));
    };
    w.validate()?;
    let m = r.slope();
    let components = vec![
        ComponentSplitting {
            id: "C1".into(),
            kind: ComponentKind::SolidTorus,
            plus_genus: 1,
            minus_boundaries: vec![BoundaryLabel::new(COLLAR_TORUS, 1, true)],
            carries_knot: true,
            knot_annulus: true,
            slope: Some(m),
        },
        ComponentSplitting {
            id: "C2".into(),
            kind: ComponentKind::ProductT2xI,
            plus_genus: 2,
            minus_boundaries: vec![
                BoundaryLabel::new(COLLAR_TORUS, 1, true),
                BoundaryLabel::new(PRODUCT_TORUS, 1, false),
            ],
            carries_knot: true,
            knot_annulus: true,
            slope: Some(m),
        },
        ComponentSplitting {
            id: "C3".into(),
            kind: ComponentKind::CompressionBodyC3,
            plus_genus: g + 1,
            minus_boundaries: vec![
                BoundaryLabel::new(PRODUCT_TORUS, 1, false),
                BoundaryLabel::new(CORE_SURFACE, g, false),
            ],
            carries_knot: false,
            knot_annulus: false,
            slope: None,
        },
        ComponentSplitting {
            id: "C4".into(),
            kind: ComponentKind::HandlebodyGenusG,
            plus_genus: g,
            minus_boundaries: vec![BoundaryLabel::new(CORE_SURFACE, g, false)],
            carries_knot: false,
            knot_annulus: false,
            slope: None,
        },
    ];
    GeneralizedSplitting::new(r.manifold().clone(), r.knot().clone(), r.separating(), r.provenance(), components)
}

/// Both stabilizations followed by the weak reduction.
pub fn census(r: &KSplittingRecord) -> Result<GeneralizedSplitting> {
    let (r1, d1) = peel_collar(r);
    let (r2, _) = second_stabilize(&r1, &d1)?;
    weak_reduce(&r2, &weak_reduction_witness())
}

/// The census with the compression body and handlebody amalgamated: the
/// collar, `T² × I`, and the knot complement.
pub fn decompose_three_splitting(r: &KSplittingRecord) -> Result<GeneralizedSplitting> {
    census(r)?.amalgamate_along(&[CORE_SURFACE.to_string()])
}

pub fn decompose_three(r: &KSplittingRecord) -> Result<(ComponentSplitting, ComponentSplitting, ComponentSplitting)> {
    let gs = decompose_three_splitting(r)?;
    let get = |f: &dyn Fn(&ComponentSplitting) -> bool| {
        gs.components()
            .iter()
            .find(|c| f(c))
            .cloned()
            .ok_or_else(|| Error::Protocol("three-piece decomposition is missing a piece".into()))
    };
    Ok((
        get(&|c| c.kind == ComponentKind::SolidTorus)?,
        get(&|c| c.kind == ComponentKind::ProductT2xI)?,
        get(&|c| !c.carries_knot)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::components::amalgamate_all;
    use crate::calculus::record::{KnotInfo, Manifold};

    fn rec(g: u32, m: i64) -> KSplittingRecord {
        KSplittingRecord::new(Manifold::S3, g, m, KnotInfo::new("trefoil", Some(1)).unwrap(), false).unwrap()
    }

    #[test]
    fn two_stabilizations_keep_the_slope() {
        let (r1, d1) = peel_collar(&rec(1, 6));
        assert_eq!((r1.genus(), r1.slope()), (2, 6));
        assert!(d1.separating && d1.knot_intersections == 0 && d1.side == Side::V);
        let (r2, d2) = second_stabilize(&r1, &d1).unwrap();
        assert_eq!((r2.genus(), r2.slope()), (3, 6));
        assert!(matches!(r2.provenance(), Provenance::WeaklyReducible { base_genus: 1 }));
        WeakReductionWitness { delta_v: vec![d1], delta_w: vec![d2] }.validate().unwrap();
        let u = KSplittingRecord::new(Manifold::S3, 0, 0, KnotInfo::unknot(), true).unwrap();
        assert_eq!(peel_collar(&u).0.genus(), 1);
    }

    #[test]
    fn protocol_is_enforced() {
        assert!(matches!(second_stabilize(&rec(2, 1), &collar_disk()), Err(Error::Protocol(_))));
        assert!(matches!(weak_reduce(&rec(3, 1), &weak_reduction_witness()), Err(Error::Protocol(_))));
        let (r1, _) = peel_collar(&rec(1, 0));
        assert!(second_stabilize(&r1, &handle_disk()).is_err());
        let mut w = weak_reduction_witness();
        w.delta_w[0].knot_intersections = 1;
        let (r2, _) = second_stabilize(&r1, &collar_disk()).unwrap();
        assert!(weak_reduce(&r2, &w).is_err());
    }

    #[test]
    fn census_at_genus_one() {
        let gs = census(&rec(1, 6)).unwrap();
        let kinds: Vec<ComponentKind> = gs.components().iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            [
                ComponentKind::SolidTorus,
                ComponentKind::ProductT2xI,
                ComponentKind::CompressionBodyC3,
                ComponentKind::HandlebodyGenusG
            ]
        );
        let plus: Vec<u32> = gs.components().iter().map(|c| c.plus_genus).collect();
        assert_eq!(plus, [1, 2, 2, 1]);
        let knots: Vec<bool> = gs.components().iter().map(|c| c.carries_knot).collect();
        assert_eq!(knots, [true, true, false, false]);
        let kg: Vec<&str> = gs.knot_gluings().iter().map(|g| g.label.as_str()).collect();
        assert_eq!(kg, [COLLAR_TORUS]);
        let r = amalgamate_all(&gs, &gs.gluing_labels()).unwrap();
        assert_eq!((r.genus(), r.slope()), (3, 6));
    }

    #[test]
    fn three_pieces() {
        for g in 0..4 {
            let (collar, product, complement) = decompose_three(&rec(g.max(1), -2)).unwrap();
            assert_eq!(collar.slope, Some(-2));
            assert!(product.carries_knot);
            assert_eq!(complement.plus_genus, g.max(1) + 1);
            assert_eq!(complement.minus_boundaries, vec![BoundaryLabel::new(PRODUCT_TORUS, 1, false)]);
        }
        let gs = decompose_three_splitting(&rec(2, 5)).unwrap();
        let r = amalgamate_all(&gs, &gs.gluing_labels()).unwrap();
        assert_eq!((r.genus(), r.slope()), (4, 5));
    }
}
