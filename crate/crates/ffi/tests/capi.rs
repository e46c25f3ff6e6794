use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use meridian_lab_ffi::*;

const ANCHOR: &str = r#"{
  "schema": 1,
  "kind": "hyperbolic",
  "profile": { "type": "constant_f", "a": 1.0, "g_slope": 1.0, "b": 0.0 },
  "base": { "kappa": 2.0, "v_domain": [0.0, 2.0] },
  "u_domain": [0.0, 1.0],
  "grid": { "nu": 8, "nv": 8, "margin": 0.05 }
}"#;

fn build(json: &str) -> (MlStatus, *mut MlSurface) {
    let text = CString::new(json).unwrap();
    let mut s = ptr::null_mut();
    let status = unsafe { ml_surface_from_json(text.as_ptr(), &mut s) };
    (status, s)
}

fn last_error() -> String {
    let p = ml_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn anchor_round_trip() {
    let (status, s) = build(ANCHOR);
    assert_eq!(status, MlStatus::Ok);
    unsafe {
        let mut g = [0.0; 6];
        let mut lap = [0.0; 6];
        let mut fd = [0.0; 6];
        assert_eq!(ml_surface_gauss_map(s, 0.5, 1.0, g.as_mut_ptr()), MlStatus::Ok);
        assert_eq!(ml_surface_laplacian_closed(s, 0.5, 1.0, lap.as_mut_ptr()), MlStatus::Ok);
        assert_eq!(ml_surface_laplacian_fd(s, 0.5, 1.0, 1e-3, fd.as_mut_ptr()), MlStatus::Ok);
        for k in 0..6 {
            assert!((lap[k] + 3.0 * g[k]).abs() <= 1e-9);
            assert!((fd[k] - lap[k]).abs() <= 1e-4);
        }
        let mut z = [0.0; 4];
        assert_eq!(ml_surface_immersion(s, 0.5, 1.0, z.as_mut_ptr()), MlStatus::Ok);
        assert!((z[0] - 0.5).abs() <= 1e-12);
        let mut frame = [0.0; 16];
        assert_eq!(ml_surface_frame(s, 0.5, 1.0, frame.as_mut_ptr()), MlStatus::Ok);
        let mut dom = [0.0; 4];
        assert_eq!(ml_surface_domain(s, dom.as_mut_ptr()), MlStatus::Ok);
        assert_eq!(dom, [0.0, 1.0, 0.0, 2.0]);

        let mut out = ptr::null_mut();
        assert_eq!(ml_surface_classify_json(s, ptr::null(), &mut out), MlStatus::Ok);
        let verdict: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        assert_eq!(verdict["matched_theorem_case"], "Thm 5.2(ii)");
        ml_string_free(out);

        let mut cfg = ptr::null_mut();
        assert_eq!(ml_surface_config_json(s, &mut cfg), MlStatus::Ok);
        assert!(CStr::from_ptr(cfg).to_str().unwrap().contains("constant_f"));
        ml_string_free(cfg);
        ml_surface_free(s);
    }
}

#[test]
fn errors_map_to_codes() {
    let (status, s) = build(r#"{ "schema": 2 }"#);
    assert_eq!(status, MlStatus::Config);
    assert!(s.is_null());
    assert!(last_error().contains("config error"));

    let (status, s) = build(ANCHOR);
    assert_eq!(status, MlStatus::Ok);
    unsafe {
        let mut out = [0.0; 6];
        assert_eq!(ml_surface_laplacian_fd(s, 0.0005, 1.0, 1e-3, out.as_mut_ptr()), MlStatus::Domain);
        assert!(last_error().contains("boundary"));
        assert_eq!(ml_surface_gauss_map(s, 0.5, 1.0, ptr::null_mut()), MlStatus::NullPointer);
        assert_eq!(ml_surface_gauss_map(ptr::null(), 0.5, 1.0, out.as_mut_ptr()), MlStatus::NullPointer);
        let bad = CString::new(r#"{ "harmonic": -1 }"#).unwrap();
        let mut json = ptr::null_mut();
        assert_eq!(ml_surface_classify_json(s, bad.as_ptr(), &mut json), MlStatus::Config);
        assert!(json.is_null());
        ml_surface_free(s);
        ml_surface_free(ptr::null_mut());
        ml_string_free(ptr::null_mut());
        let mut handle = ptr::null_mut();
        assert_eq!(ml_surface_from_json(ptr::null(), &mut handle), MlStatus::NullPointer);
    }
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(ml_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cxx() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/meridian_lab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["ml_surface_from_json", "ml_surface_free", "ml_surface_classify_json", "ml_string_free", "ml_last_error_message", "ML_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang]).arg(&header).output() else {
            eprintln!("{compiler} not available, skipping");
            continue;
        };
        assert!(out.status.success(), "{compiler}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

/// Links a C program against the static library when both are available.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libmeridian_lab_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let exe = dir.join("smoke");
    let Ok(out) = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
    else {
        eprintln!("cc not available, skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("\"Thm 4.1\""));
    let _ = std::fs::remove_dir_all(dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("meridian-lab-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
