//! JSON loaders for curves, graphs, chart curves, records and traces.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::calculus::KnotInfo;
use crate::error::{Error, Result};
use crate::geom::{ChartCurveSpec, SpatialGraph, TubeOptions};

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("{what}: {e}")))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

/// Optional tube parameters stored next to a graph under `"tube"`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeSettings {
    pub radius: Option<f64>,
    pub n_circ: Option<usize>,
    pub rings_per_unit: Option<f64>,
}

impl TubeSettings {
    pub fn options(&self) -> TubeOptions {
        let d = TubeOptions::default();
        TubeOptions {
            radius: self.radius,
            n_circ: self.n_circ.unwrap_or(d.n_circ),
            n_long_per_unit: self.rings_per_unit,
        }
    }
}

/// A graph file: `{"circles": [...], "arcs": [...], "tube": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    #[serde(flatten)]
    pub graph: SpatialGraph,
    #[serde(default)]
    pub tube: TubeSettings,
}

impl SurfaceFile {
    pub fn new(graph: SpatialGraph, opts: &TubeOptions) -> Self {
        SurfaceFile {
            graph,
            tube: TubeSettings { radius: opts.radius, n_circ: Some(opts.n_circ), rings_per_unit: opts.n_long_per_unit },
        }
    }
}

/// A chart curve, optionally naming the knot it represents:
/// `{"chart": 0, "coords": [[s, theta], ...], "knot": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotCurveFile {
    #[serde(flatten)]
    pub curve: ChartCurveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knot: Option<KnotInfo>,
}

impl KnotCurveFile {
    /// The named knot, or an anonymous one of unknown tunnel number.
    pub fn knot_info(&self) -> KnotInfo {
        self.knot.clone().unwrap_or(KnotInfo { name: "K".into(), tunnel_number: None })
    }
}

pub fn load_surface(path: &Path) -> Result<SurfaceFile> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::KSplittingRecord;
    use crate::fixtures;
    use crate::geom::{ChartCurveSpec, PolyCurve3};

    #[test]
    fn surface_files_round_trip() {
        let f = SurfaceFile::new(fixtures::standard_torus().unwrap(), &fixtures::standard_torus_options());
        let back: SurfaceFile = parse_json(&to_json(&f), "torus").unwrap();
        assert_eq!(back, f);
        assert_eq!(back.tube.options(), fixtures::standard_torus_options());
    }

    #[test]
    fn parse_errors_are_input_errors() {
        let e = parse_json::<PolyCurve3>("{\"closed\": tru", "curve.json").unwrap_err();
        assert!(matches!(&e, Error::Input(m) if m.starts_with("curve.json: ")), "{e}");
        let open_loop = r#"{"closed": true, "vertices": [[0,0,0],[1,0,0]]}"#;
        assert!(matches!(parse_json::<PolyCurve3>(open_loop, "c"), Err(Error::Input(_))));
        let spec: ChartCurveSpec = parse_json(r#"{"chart": 0, "coords": [[0.0, 1.0]]}"#, "c").unwrap();
        assert_eq!(spec.chart, 0);
        let named: KnotCurveFile =
            parse_json(r#"{"chart": 1, "coords": [], "knot": {"name": "trefoil", "tunnel_number": 1}}"#, "c").unwrap();
        assert_eq!((named.curve.chart, named.knot_info().tunnel_number), (1, Some(1)));
        let bad =
            r#"{"manifold":"S3","genus":1,"slope":2,"knot":{"name":"unknot","tunnel_number":0},"separating":true}"#;
        assert!(matches!(parse_json::<KSplittingRecord>(bad, "r"), Err(Error::Input(_))));
    }
}
