use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ksplit_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn record(genus: u32, slope: i64) -> *mut KsRecord {
    let json = format!(
        r#"{{"manifold":"S3","genus":{genus},"slope":{slope},"knot":{{"name":"trefoil","tunnel_number":1}},"separating":false}}"#
    );
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ks_record_from_json(cstr(&json).as_ptr(), &mut out) }, KsStatus::Ok);
    out
}

fn last_error() -> String {
    let p = ks_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn fixture(name: &str) -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    cstr(&std::fs::read_to_string(path).unwrap())
}

#[test]
fn record_moves_through_handles() {
    unsafe {
        let a = record(1, 6);
        let (mut s, mut t, mut sum) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(ks_k_stabilize(a, &mut s), KsStatus::Ok);
        assert_eq!(ks_dehn_twist(s, -2, &mut t), KsStatus::Ok);
        assert_eq!(ks_connect_sum(a, t, &mut sum), KsStatus::Ok);
        let (mut g, mut m) = (0u32, 0i64);
        assert_eq!(ks_record_genus(t, &mut g), KsStatus::Ok);
        assert_eq!(ks_record_slope(t, &mut m), KsStatus::Ok);
        assert_eq!((g, m), (2, 4));
        ks_record_genus(sum, &mut g);
        ks_record_slope(sum, &mut m);
        assert_eq!((g, m), (3, 10));
        let mut json = ptr::null_mut();
        assert_eq!(ks_record_to_json(t, &mut json), KsStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(text.contains("\"slope\": 4"), "{text}");
        ks_string_free(json);
        for r in [a, s, t, sum] {
            ks_record_free(r);
        }
    }
}

#[test]
fn common_stabilization_and_its_errors() {
    unsafe {
        let (a, b, c) = (record(1, 6), record(3, 6), record(1, 7));
        let (mut r, mut traces) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(ks_common_stabilization(a, b, 2, &mut r, &mut traces), KsStatus::Ok);
        let mut g = 0;
        ks_record_genus(r, &mut g);
        assert_eq!(g, 7);
        let text = CStr::from_ptr(traces).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(v["trace_a"]["output"], v["trace_b"]["output"]);
        ks_string_free(traces);
        ks_record_free(r);

        let mut r = ptr::null_mut();
        assert_eq!(ks_common_stabilization(a, c, 0, &mut r, ptr::null_mut()), KsStatus::SlopeMismatch);
        assert!(r.is_null());
        assert!(last_error().contains("slope mismatch"));
        assert_eq!(ks_common_stabilization(a, ptr::null(), 0, &mut r, ptr::null_mut()), KsStatus::NullPointer);
        for x in [a, b, c] {
            ks_record_free(x);
        }
    }
}

#[test]
fn bad_input_is_reported() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(ks_record_from_json(cstr("{\"genus\": ").as_ptr(), &mut r), KsStatus::InputError);
        assert!(last_error().starts_with("invalid input"));
        let sep =
            r#"{"manifold":"S3","genus":1,"slope":3,"knot":{"name":"unknot","tunnel_number":0},"separating":true}"#;
        assert_eq!(ks_record_from_json(cstr(sep).as_ptr(), &mut r), KsStatus::InputError);
        assert_eq!(ks_record_from_json(ptr::null(), &mut r), KsStatus::NullPointer);
        assert!(r.is_null());
        let mut g = 0;
        assert_eq!(ks_record_genus(ptr::null(), &mut g), KsStatus::NullPointer);
        ks_record_free(ptr::null_mut());
        ks_string_free(ptr::null_mut());
    }
}

#[test]
fn surface_slope_of_the_torus_trefoil() {
    let mut m = 0;
    let status =
        unsafe { ks_surface_slope(fixture("torus.json").as_ptr(), fixture("torus_2_3.json").as_ptr(), 0.0, 0, &mut m) };
    assert_eq!(status, KsStatus::Ok, "{}", last_error());
    assert_eq!(m, 6);
    let status = unsafe {
        ks_surface_slope(fixture("dumbbell.json").as_ptr(), fixture("dumbbell_belt.json").as_ptr(), 0.04, 1, &mut m)
    };
    assert_eq!((status, m), (KsStatus::Ok, 0));
}

fn circle(centre: [f64; 3], axes: [[f64; 3]; 2], n: usize) -> Vec<f64> {
    (0..n)
        .flat_map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            (0..3).map(move |i| centre[i] + axes[0][i] * t.cos() + axes[1][i] * t.sin())
        })
        .collect()
}

#[test]
fn linking_numbers_from_packed_points() {
    let ring = circle([0.0; 3], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 64);
    // Passes down through the disk bounded by the counter-clockwise ring.
    let hook = circle([1.0, 0.0, 0.0], [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], 64);
    let far = circle([5.0, 0.0, 0.0], [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], 64);
    let mut lk = 0;
    unsafe {
        assert_eq!(ks_linking_number(ring.as_ptr(), 64, hook.as_ptr(), 64, 0, &mut lk), KsStatus::Ok);
        assert_eq!(lk, -1);
        assert_eq!(ks_linking_number(ring.as_ptr(), 64, far.as_ptr(), 64, 0, &mut lk), KsStatus::Ok);
        assert_eq!(lk, 0);
        // Coincident curves leave no generic projection: a numerical failure.
        assert_eq!(ks_linking_number(ring.as_ptr(), 64, ring.as_ptr(), 64, 0, &mut lk), KsStatus::NumericalError);
        assert_eq!(ks_linking_number(ring.as_ptr(), 2, hook.as_ptr(), 64, 0, &mut lk), KsStatus::InputError);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/ksplit.h")).unwrap();
    for name in [
        "typedef struct KsRecord KsRecord;",
        "KS_STATUS_SLOPE_MISMATCH = 3",
        "ks_last_error(void)",
        "ks_record_from_json(",
        "ks_common_stabilization(",
        "ks_surface_slope(",
        "ks_linking_number(",
        "ks_string_free(",
        "ks_record_free(",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

/// Compiles `tests/c/smoke.c` against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = target.join("libksplit_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let exe = tempfile::tempdir().unwrap();
    let bin = exe.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror"])
        .arg("-I")
        .arg(dir.join("include"))
        .arg(dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "lk -1");
}
