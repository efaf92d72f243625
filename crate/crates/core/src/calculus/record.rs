//! K-splitting records: a Heegaard surface of a closed 3-manifold together
//! with the knot lying on it, reduced to the data the calculus tracks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{is_separating, CurveOnSurface};
use crate::linking::slope::default_epsilon;
use crate::linking::surface_slope_with;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Manifold {
    S3,
    Other(String),
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::S3 => f.write_str("S3"),
            Manifold::Other(name) => f.write_str(name),
        }
    }
}

pub const UNKNOT: &str = "unknot";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnotInfo {
    pub name: String,
    /// Minimal number of tunnel arcs, when known.
    pub tunnel_number: Option<u32>,
}

impl KnotInfo {
    pub fn new(name: impl Into<String>, tunnel_number: Option<u32>) -> Result<Self> {
        let k = KnotInfo { name: name.into(), tunnel_number };
        k.validate()?;
        Ok(k)
    }

    pub fn unknot() -> Self {
        KnotInfo { name: UNKNOT.into(), tunnel_number: Some(0) }
    }

    pub fn is_unknot(&self) -> bool {
        self.name == UNKNOT
    }

    /// `t(K) <= h(K) <= t(K) + 1`.
    pub fn h_genus_bounds(&self) -> Option<(u32, u32)> {
        self.tunnel_number.map(|t| (t, t + 1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::input("knot name must not be empty"));
        }
        match (self.is_unknot(), self.tunnel_number) {
            (true, Some(t)) if t != 0 => Err(Error::input("the unknot has tunnel number 0")),
            (false, Some(0)) => {
                Err(Error::input(format!("tunnel number 0 characterizes the unknot, not {}", self.name)))
            }
            _ => Ok(()),
        }
    }
}

/// How a record was produced, as far as the weak-reduction protocol cares.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    #[default]
    Plain,
    /// Output of `peel_collar` on a genus `base_genus` record.
    Peeled { base_genus: u32 },
    /// Output of `second_stabilize`; carries the two disjoint disks.
    WeaklyReducible { base_genus: u32 },
}

/// A concrete surface and knot backing a record.
#[derive(Debug, Clone)]
pub struct GeometricRef {
    pub curve: CurveOnSurface,
    pub epsilon: f64,
    /// Seed for projection directions and stabilization sites.
    pub seed: u64,
}

impl GeometricRef {
    pub fn new(curve: CurveOnSurface, epsilon: Option<f64>, seed: u64) -> Self {
        let epsilon = epsilon.unwrap_or_else(|| default_epsilon(&curve));
        GeometricRef { curve, epsilon, seed }
    }

    pub fn genus(&self) -> i64 {
        self.curve.host().genus()
    }

    pub fn slope(&self) -> Result<i64> {
        Ok(surface_slope_with(&self.curve, self.epsilon, self.seed)?.slope)
    }
}

#[derive(Deserialize)]
struct RecordData {
    manifold: Manifold,
    genus: u32,
    slope: i64,
    knot: KnotInfo,
    separating: bool,
    #[serde(default)]
    provenance: Provenance,
}

/// A K-splitting pair up to the data compared by the calculus. Equality
/// looks at manifold, genus, slope, knot and provenance; the geometric
/// backing and the separation flag are not compared.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RecordData")]
pub struct KSplittingRecord {
    manifold: Manifold,
    genus: u32,
    slope: i64,
    knot: KnotInfo,
    separating: bool,
    provenance: Provenance,
    #[serde(skip)]
    geometry: Option<GeometricRef>,
}

impl TryFrom<RecordData> for KSplittingRecord {
    type Error = Error;

    fn try_from(d: RecordData) -> Result<Self> {
        let r = KSplittingRecord {
            manifold: d.manifold,
            genus: d.genus,
            slope: d.slope,
            knot: d.knot,
            separating: d.separating,
            provenance: d.provenance,
            geometry: None,
        };
        r.validate()?;
        Ok(r)
    }
}

impl PartialEq for KSplittingRecord {
    fn eq(&self, other: &Self) -> bool {
        self.manifold == other.manifold
            && self.genus == other.genus
            && self.slope == other.slope
            && self.knot == other.knot
            && self.provenance == other.provenance
    }
}

impl Eq for KSplittingRecord {}

impl KSplittingRecord {
    pub fn new(manifold: Manifold, genus: u32, slope: i64, knot: KnotInfo, separating: bool) -> Result<Self> {
        RecordData { manifold, genus, slope, knot, separating, provenance: Provenance::Plain }.try_into()
    }

    /// Record of a knot drawn as a chart curve on a tube surface in `S³`;
    /// genus, slope and separation are all computed.
    pub fn from_geometry(knot: KnotInfo, geometry: GeometricRef) -> Result<Self> {
        let genus = u32::try_from(geometry.genus()).map_err(|_| Error::input("surface genus is negative"))?;
        let slope = geometry.slope()?;
        let separating = is_separating(&geometry.curve)?;
        let mut r = KSplittingRecord::new(Manifold::S3, genus, slope, knot, separating)?;
        r.geometry = Some(geometry);
        Ok(r)
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn slope(&self) -> i64 {
        self.slope
    }

    pub fn knot(&self) -> &KnotInfo {
        &self.knot
    }

    pub fn separating(&self) -> bool {
        self.separating
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn geometry(&self) -> Option<&GeometricRef> {
        self.geometry.as_ref()
    }

    pub fn without_geometry(&self) -> Self {
        KSplittingRecord { geometry: None, ..self.clone() }
    }

    pub(crate) fn with(&self, genus: u32, slope: i64, provenance: Provenance) -> Self {
        KSplittingRecord { genus, slope, provenance, ..self.clone() }
    }

    pub(crate) fn set_separating(mut self, separating: bool) -> Self {
        self.separating = separating;
        self
    }

    pub(crate) fn set_knot(mut self, knot: KnotInfo) -> Self {
        self.knot = knot;
        self
    }

    pub(crate) fn set_geometry(mut self, geometry: Option<GeometricRef>) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.knot.validate()?;
        if self.manifold == Manifold::S3 {
            if self.separating && self.slope != 0 {
                return Err(Error::input(format!(
                    "a separating knot in a Heegaard surface of S3 has slope 0, not {}",
                    self.slope
                )));
            }
            if let Some(t) = self.knot.tunnel_number {
                if self.genus < t {
                    return Err(Error::input(format!(
                        "genus {} is below the tunnel number {t} of {}",
                        self.genus, self.knot.name
                    )));
                }
            }
        }
        let expected = match self.provenance {
            Provenance::Plain => None,
            Provenance::Peeled { base_genus } => Some(base_genus + 1),
            Provenance::WeaklyReducible { base_genus } => Some(base_genus + 2),
        };
        if let Some(g) = expected {
            if g != self.genus {
                return Err(Error::input(format!(
                    "provenance {:?} requires genus {g}, found {}",
                    self.provenance, self.genus
                )));
            }
        }
        Ok(())
    }

    /// Recomputes genus and slope from the geometric backing, if any.
    pub fn verify_geometry(&self) -> Result<()> {
        let Some(geo) = &self.geometry else {
            return Ok(());
        };
        let genus = geo.genus();
        if genus != self.genus as i64 {
            return Err(Error::GeometricMismatch { expected: self.genus as i64, found: genus });
        }
        let slope = geo.slope()?;
        if slope != self.slope {
            return Err(Error::GeometricMismatch { expected: self.slope, found: slope });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trefoil() -> KnotInfo {
        KnotInfo::new("trefoil", Some(1)).unwrap()
    }

    #[test]
    fn separating_knots_in_s3_have_slope_zero() {
        assert!(KSplittingRecord::new(Manifold::S3, 2, 3, trefoil(), true).is_err());
        assert!(KSplittingRecord::new(Manifold::S3, 2, 0, trefoil(), true).is_ok());
        let other = Manifold::Other("L(5,1)".into());
        assert!(KSplittingRecord::new(other, 2, 3, trefoil(), true).is_ok());
    }

    #[test]
    fn knot_labels() {
        assert_eq!(trefoil().h_genus_bounds(), Some((1, 2)));
        assert!(KnotInfo::new("unknot", Some(1)).is_err());
        assert!(KnotInfo::new("5_2", Some(0)).is_err());
        assert!(KnotInfo::new(" ", None).is_err());
        assert!(KSplittingRecord::new(Manifold::S3, 0, 0, trefoil(), false).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_identical() {
        let r = KSplittingRecord::new(Manifold::S3, 3, -7, trefoil(), false).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: KSplittingRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let bad = text.replace("\"separating\":false", "\"separating\":true");
        assert!(serde_json::from_str::<KSplittingRecord>(&bad).is_err());
    }
}
