//! The JSON files under `fixtures/` mirror the in-code fixtures. Run with
//! `KSPLIT_BLESS=1` to rewrite them.

use std::f64::consts::TAU;
use std::path::PathBuf;

use ksplit::calculus::{common_stabilization, KSplittingRecord, KnotInfo, Manifold};
use ksplit::fixtures;
use ksplit::geom::{ChartCurveSpec, SpatialGraph, TubeOptions};
use ksplit::io::{to_json, KnotCurveFile, SurfaceFile};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn surface(g: ksplit::Result<SpatialGraph>, o: TubeOptions) -> String {
    to_json(&SurfaceFile::new(g.unwrap(), &o))
}

fn curve(chart: usize, coords: Vec<[f64; 2]>, knot: Option<KnotInfo>) -> String {
    to_json(&KnotCurveFile { curve: ChartCurveSpec { chart, coords }, knot })
}

fn torus_line(p: i64, q: i64, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            [p as f64 * t, TAU * q as f64 * t + 0.1]
        })
        .collect()
}

fn record(genus: u32, slope: i64) -> KSplittingRecord {
    KSplittingRecord::new(Manifold::S3, genus, slope, KnotInfo::new("trefoil", Some(1)).unwrap(), false).unwrap()
}

fn expected() -> Vec<(&'static str, String)> {
    let trefoil = KnotInfo::new("trefoil", Some(1)).unwrap();
    let belt = (0..24).map(|k| [0.5, TAU * k as f64 / 24.0]).collect();
    let (_, trace, _) = common_stabilization(&record(1, 6), &record(3, 6), 1).unwrap();
    vec![
        ("torus.json", surface(fixtures::standard_torus(), fixtures::standard_torus_options())),
        ("torus_2_3.json", curve(0, torus_line(2, 3, 200), Some(trefoil.clone()))),
        ("torus_1_1.json", curve(0, torus_line(1, 1, 200), Some(KnotInfo::unknot()))),
        ("dumbbell.json", surface(fixtures::dumbbell(), fixtures::dumbbell_options())),
        ("dumbbell_belt.json", curve(fixtures::DUMBBELL_BELT_CHART, belt, Some(KnotInfo::unknot()))),
        ("unknot.json", surface(fixtures::unknot(), fixtures::unknot_options())),
        ("unknot_longitude.json", curve(0, torus_line(1, 0, 96), Some(KnotInfo::unknot()))),
        ("unknot_tunnel.json", surface(fixtures::unknot_with_tunnel(), fixtures::unknot_with_tunnel_options())),
        ("figure_eight.json", surface(fixtures::figure_eight(), fixtures::figure_eight_options())),
        ("knot_unknot.json", to_json(&KnotInfo::unknot())),
        ("knot_trefoil.json", to_json(&trefoil)),
        ("knot_figure_eight.json", to_json(&KnotInfo::new("figure-eight", Some(1)).unwrap())),
        ("record_trefoil_g1_m6.json", to_json(&record(1, 6))),
        ("record_trefoil_g3_m6.json", to_json(&record(3, 6))),
        ("record_trefoil_g1_m7.json", to_json(&record(1, 7))),
        ("trace_trefoil.json", to_json(&trace)),
    ]
}

#[test]
fn fixture_files_match_the_library() {
    let bless = std::env::var_os("KSPLIT_BLESS").is_some();
    let dir = root();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (name, text) in expected() {
        let path = dir.join(name);
        let text = text + "\n";
        if bless {
            std::fs::write(&path, &text).unwrap();
        } else {
            let found = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(found == text, "{name} is stale; rerun with KSPLIT_BLESS=1");
        }
    }
}
