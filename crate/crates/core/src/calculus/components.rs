//! Generalized splittings: pieces of a 3-manifold, each with its own
//! splitting, glued along closed surfaces. Amalgamation reassembles them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::record::{KSplittingRecord, KnotInfo, Manifold, Provenance};
use crate::error::{Error, Result};

/// A closed boundary surface of a piece, named so that its two sides can be
/// matched up.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryLabel {
    pub name: String,
    pub genus: u32,
    /// A copy of the knot lies on this surface.
    pub carries_knot: bool,
}

impl BoundaryLabel {
    pub fn new(name: &str, genus: u32, carries_knot: bool) -> Self {
        BoundaryLabel { name: name.into(), genus, carries_knot }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    SolidTorus,
    ProductT2xI,
    CompressionBodyC3,
    HandlebodyGenusG,
    /// Anything else, in particular the result of an amalgamation.
    General,
}

/// A piece with its Heegaard splitting: `plus_genus` is the genus of the
/// splitting surface, `minus_boundaries` the boundary surfaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSplitting {
    pub id: String,
    pub kind: ComponentKind,
    pub plus_genus: u32,
    pub minus_boundaries: Vec<BoundaryLabel>,
    pub carries_knot: bool,
    /// The knot cobounds an annulus with its copy on the splitting surface.
    pub knot_annulus: bool,
    pub slope: Option<i64>,
}

impl ComponentSplitting {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::input(format!("component {}: {msg}", self.id)));
        let names: BTreeSet<&str> = self.minus_boundaries.iter().map(|l| l.name.as_str()).collect();
        if names.len() != self.minus_boundaries.len() {
            return bad("boundary names repeat".into());
        }
        if self.carries_knot != self.slope.is_some() {
            return bad("a slope is recorded exactly when the knot is carried".into());
        }
        if self.carries_knot && !self.knot_annulus {
            return bad("a carried knot needs its annulus certificate".into());
        }
        if self.minus_boundaries.iter().any(|l| l.carries_knot) && !self.carries_knot {
            return bad("a boundary carries the knot but the component does not".into());
        }
        let genera: Vec<u32> = self.minus_boundaries.iter().map(|l| l.genus).collect();
        let ok = match self.kind {
            ComponentKind::SolidTorus => {
                self.plus_genus == 1
                    && genera == [1]
                    && self.minus_boundaries.iter().filter(|l| l.carries_knot).count() <= 1
            }
            ComponentKind::ProductT2xI => self.plus_genus == 2 && genera == [1, 1],
            ComponentKind::CompressionBodyC3 => genera.len() == 2 && genera[0] == 1 && self.plus_genus == genera[1] + 1,
            ComponentKind::HandlebodyGenusG => genera == [self.plus_genus],
            ComponentKind::General => true,
        };
        if !ok {
            return bad(format!(
                "{:?} cannot have splitting genus {} and boundary genera {genera:?}",
                self.kind, self.plus_genus
            ));
        }
        Ok(())
    }

    fn minus(&self, name: &str) -> Option<&BoundaryLabel> {
        self.minus_boundaries.iter().find(|l| l.name == name)
    }
}

/// Amalgamates two pieces along a shared boundary of genus `h`; the
/// splitting genus of the result is `a + b - h`.
pub fn amalgamate_pair(a: &ComponentSplitting, b: &ComponentSplitting, along: &str) -> Result<ComponentSplitting> {
    let (la, lb) = match (a.minus(along), b.minus(along)) {
        (Some(la), Some(lb)) => (la, lb),
        _ => return Err(Error::Gluing(format!("boundary {along} is not shared by {} and {}", a.id, b.id))),
    };
    if la.genus != lb.genus {
        return Err(Error::Gluing(format!(
            "boundary {along} has genus {} in {} but {} in {}",
            la.genus, a.id, lb.genus, b.id
        )));
    }
    if la.carries_knot != lb.carries_knot {
        return Err(Error::Gluing(format!("the knot copy on {along} is seen from one side only")));
    }
    if la.carries_knot && !(a.knot_annulus && b.knot_annulus) {
        return Err(Error::AnnulusViolation { label: along.into() });
    }
    let slope = match (a.slope, b.slope) {
        (Some(x), Some(y)) if x != y => {
            return Err(Error::Gluing(format!("slopes {x} and {y} meet along {along}")));
        }
        (x, y) => x.or(y),
    };
    let plus_genus = (a.plus_genus + b.plus_genus)
        .checked_sub(la.genus)
        .ok_or_else(|| Error::Gluing(format!("boundary {along} is larger than both splitting surfaces")))?;
    let mut minus_boundaries: Vec<BoundaryLabel> =
        a.minus_boundaries.iter().chain(&b.minus_boundaries).filter(|l| l.name != along).cloned().collect();
    minus_boundaries.sort();
    let mut ids: Vec<&str> = a.id.split('+').chain(b.id.split('+')).collect();
    ids.sort_unstable();
    let carries_knot = a.carries_knot || b.carries_knot;
    Ok(ComponentSplitting {
        id: ids.join("+"),
        kind: ComponentKind::General,
        plus_genus,
        minus_boundaries,
        carries_knot,
        knot_annulus: carries_knot && [a, b].iter().filter(|c| c.carries_knot).all(|c| c.knot_annulus),
        slope,
    })
}

/// One surface along which two pieces are glued.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub label: String,
    pub genus: u32,
    pub components: [String; 2],
    /// Both sides carry the knot copy.
    pub knot: bool,
}

#[derive(Deserialize)]
struct SplittingData {
    manifold: Manifold,
    knot: KnotInfo,
    separating: bool,
    provenance: Provenance,
    components: Vec<ComponentSplitting>,
    #[serde(default)]
    gluings: Option<Vec<Gluing>>,
}

/// A closed manifold cut into pieces along surfaces, each piece split.
/// Gluings are derived from the boundary names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SplittingData")]
pub struct GeneralizedSplitting {
    manifold: Manifold,
    knot: KnotInfo,
    separating: bool,
    provenance: Provenance,
    components: Vec<ComponentSplitting>,
    gluings: Vec<Gluing>,
}

impl TryFrom<SplittingData> for GeneralizedSplitting {
    type Error = Error;

    fn try_from(d: SplittingData) -> Result<Self> {
        let gs = GeneralizedSplitting::new(d.manifold, d.knot, d.separating, d.provenance, d.components)?;
        if let Some(given) = d.gluings {
            if given != gs.gluings {
                return Err(Error::Gluing("listed gluings do not match the boundary names".into()));
            }
        }
        Ok(gs)
    }
}

impl GeneralizedSplitting {
    pub fn new(
        manifold: Manifold,
        knot: KnotInfo,
        separating: bool,
        provenance: Provenance,
        components: Vec<ComponentSplitting>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::input("a generalized splitting needs at least one component"));
        }
        let mut ids = BTreeSet::new();
        for c in &components {
            c.validate()?;
            if !ids.insert(c.id.as_str()) {
                return Err(Error::input(format!("component id {} repeats", c.id)));
            }
        }
        let mut sides: BTreeMap<&str, Vec<(usize, &BoundaryLabel)>> = BTreeMap::new();
        for (i, c) in components.iter().enumerate() {
            for l in &c.minus_boundaries {
                sides.entry(l.name.as_str()).or_default().push((i, l));
            }
        }
        let mut parent: Vec<usize> = (0..components.len()).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut gluings = Vec::with_capacity(sides.len());
        for (name, ends) in sides {
            let &[(i, a), (j, b)] = ends.as_slice() else {
                return Err(if ends.len() == 1 {
                    Error::IncompleteGluing(format!("boundary {name} of {} is exposed", components[ends[0].0].id))
                } else {
                    Error::Gluing(format!("boundary {name} appears {} times", ends.len()))
                });
            };
            if i == j {
                return Err(Error::Gluing(format!("{} would be glued to itself along {name}", components[i].id)));
            }
            if a.genus != b.genus {
                return Err(Error::Gluing(format!("boundary {name} has genera {} and {}", a.genus, b.genus)));
            }
            if a.carries_knot != b.carries_knot {
                return Err(Error::Gluing(format!("the knot copy on {name} is seen from one side only")));
            }
            if a.carries_knot && !(components[i].knot_annulus && components[j].knot_annulus) {
                return Err(Error::AnnulusViolation { label: name.into() });
            }
            let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
            parent[ri] = rj;
            gluings.push(Gluing {
                label: name.into(),
                genus: a.genus,
                components: [components[i].id.clone(), components[j].id.clone()],
                knot: a.carries_knot,
            });
        }
        let r0 = root(&mut parent, 0);
        if (1..components.len()).any(|i| root(&mut parent, i) != r0) {
            return Err(Error::Gluing("the gluing graph is disconnected".into()));
        }
        if components.iter().filter(|c| c.carries_knot).count() == 0 {
            return Err(Error::input("no component carries the knot"));
        }
        knot.validate()?;
        Ok(GeneralizedSplitting { manifold, knot, separating, provenance, components, gluings })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn knot(&self) -> &KnotInfo {
        &self.knot
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn components(&self) -> &[ComponentSplitting] {
        &self.components
    }

    pub fn component(&self, kind: ComponentKind) -> Option<&ComponentSplitting> {
        self.components.iter().find(|c| c.kind == kind)
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn gluing_labels(&self) -> Vec<String> {
        self.gluings.iter().map(|g| g.label.clone()).collect()
    }

    pub fn knot_gluings(&self) -> Vec<&Gluing> {
        self.gluings.iter().filter(|g| g.knot).collect()
    }

    fn rebuilt(&self, components: Vec<ComponentSplitting>, provenance: Provenance) -> Result<Self> {
        GeneralizedSplitting::new(self.manifold.clone(), self.knot.clone(), self.separating, provenance, components)
    }

    /// Amalgamates along the named gluings, in order, leaving the rest.
    pub fn amalgamate_along(&self, labels: &[String]) -> Result<Self> {
        let mut pieces = self.components.clone();
        let mut seen = BTreeSet::new();
        for label in labels {
            if !seen.insert(label) || !self.gluings.iter().any(|g| &g.label == label) {
                return Err(Error::Gluing(format!("{label} is not an unconsumed gluing")));
            }
            let holders: Vec<usize> =
                (0..pieces.len()).filter(|&i| pieces[i].minus_boundaries.iter().any(|l| &l.name == label)).collect();
            let &[i, j] = holders.as_slice() else {
                return Err(Error::Gluing(format!("{label} no longer separates two pieces")));
            };
            let merged = amalgamate_pair(&pieces[i], &pieces[j], label)?;
            pieces[i] = merged;
            pieces.remove(j);
        }
        self.rebuilt(pieces, self.provenance)
    }

    /// `n` Reidemeister–Singer stabilizations of the one piece that does not
    /// carry the knot. Forgets how the splitting was produced.
    pub fn rs_stabilize(&self, n: u32) -> Result<Self> {
        let free: Vec<usize> = (0..self.components.len()).filter(|&i| !self.components[i].carries_knot).collect();
        let &[i] = free.as_slice() else {
            return Err(Error::Protocol(format!(
                "stabilizing the complement needs exactly one knot-free piece, found {}",
                free.len()
            )));
        };
        let mut pieces = self.components.clone();
        pieces[i].plus_genus += n;
        if n > 0 {
            pieces[i].kind = ComponentKind::General;
        }
        self.rebuilt(pieces, Provenance::Plain)
    }

    /// The record of a fully amalgamated splitting.
    pub fn into_record(&self) -> Result<KSplittingRecord> {
        let [c] = self.components.as_slice() else {
            return Err(Error::IncompleteGluing(format!("{} pieces remain after amalgamation", self.components.len())));
        };
        let slope = c.slope.ok_or_else(|| Error::Protocol("the amalgamated piece lost the knot".into()))?;
        let r = KSplittingRecord::new(self.manifold.clone(), c.plus_genus, slope, self.knot.clone(), self.separating)?;
        let r = r.with(r.genus(), r.slope(), self.provenance);
        r.validate()?;
        Ok(r)
    }
}

/// Amalgamates every gluing in `order` and returns the single resulting
/// record. `order` must list each gluing exactly once.
pub fn amalgamate_all(gs: &GeneralizedSplitting, order: &[String]) -> Result<KSplittingRecord> {
    let want: BTreeSet<&String> = gs.gluings.iter().map(|g| &g.label).collect();
    let got: BTreeSet<&String> = order.iter().collect();
    if got.len() != order.len() || !got.is_subset(&want) {
        return Err(Error::Gluing(format!("order {order:?} repeats or names unknown gluings")));
    }
    if got.len() != want.len() {
        let missing: Vec<&&String> = want.difference(&got).collect();
        return Err(Error::IncompleteGluing(format!("gluings {missing:?} are never consumed")));
    }
    gs.amalgamate_along(order)?.into_record()
}
