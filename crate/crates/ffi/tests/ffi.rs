use std::ffi::{c_void, CStr};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use sortsum_ffi::*;

fn last_error() -> String {
    let p = ss_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn array_view(xs: &[f64]) -> *mut SsView {
    let mut view = ptr::null_mut();
    let status = unsafe { ss_view_from_array(xs.as_ptr(), xs.len() as u64, &mut view) };
    assert_eq!(status, SsStatus::Ok);
    view
}

unsafe extern "C" fn linear(i: u64, scale: *mut c_void) -> f64 {
    i as f64 * *(scale as *const f64)
}

#[test]
fn region_and_sum_over_an_array() {
    let xs: Vec<f64> = (1..=100).map(f64::from).collect();
    let view = array_view(&xs);
    unsafe {
        assert_eq!(ss_view_len(view), 100);
        let mut region = SsRegion { lo: 0, hi: 0, is_empty: true };
        assert_eq!(ss_approximate_region(view, 90.0, 0.5, 100, &mut region), SsStatus::Ok);
        assert!(!region.is_empty && region.hi == 100 && region.lo <= 90);
        let mut passed = false;
        assert_eq!(ss_verify_region(view, 90.0, 0.5, &region, 100, &mut passed), SsStatus::Ok);
        assert!(passed);

        ss_view_reset_queries(view);
        let mut sum = SsSumResult { estimate: 0.0, cycles: 0, queries: 0, delta: 0.0 };
        assert_eq!(ss_approximate_sum(view, 0.1, 100, &mut sum), SsStatus::Ok);
        assert!(sum.estimate >= 5050.0 / 1.1 && sum.estimate <= 5050.0 * 1.1);
        assert_eq!(sum.queries, ss_view_queries(view));
        assert!(sum.cycles >= 1);

        let mut exact = 0.0;
        assert_eq!(ss_exact_sum(view, 100, &mut exact), SsStatus::Ok);
        assert_eq!(exact, 5050.0);
        ss_view_free(view);
    }
}

#[test]
fn callback_view_matches_array_view() {
    let mut scale = 2.5f64;
    let mut gen = ptr::null_mut();
    unsafe {
        let status = ss_view_from_fn(1000, Some(linear), &mut scale as *mut f64 as *mut c_void, &mut gen);
        assert_eq!(status, SsStatus::Ok);
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64 * 2.5).collect();
        let arr = array_view(&xs);
        let mut a = SsSumResult { estimate: 0.0, cycles: 0, queries: 0, delta: 0.0 };
        let mut b = a;
        assert_eq!(ss_approximate_sum(gen, 0.05, 1000, &mut a), SsStatus::Ok);
        assert_eq!(ss_approximate_sum(arr, 0.05, 1000, &mut b), SsStatus::Ok);
        assert_eq!(a, b);
        ss_view_free(gen);
        ss_view_free(arr);
    }
}

#[test]
fn empty_region_below_the_threshold() {
    let view = array_view(&[1.0, 2.0, 3.0]);
    unsafe {
        let mut region = SsRegion { lo: 7, hi: 7, is_empty: false };
        assert_eq!(ss_approximate_region(view, 10.0, 0.1, 3, &mut region), SsStatus::Ok);
        assert_eq!(region, SsRegion { lo: 0, hi: 0, is_empty: true });
        ss_view_free(view);
    }
}

#[test]
fn unsorted_array_is_rejected() {
    let xs = [1.0, 3.0, 2.0];
    let mut view = ptr::null_mut();
    let status = unsafe { ss_view_from_array(xs.as_ptr(), 3, &mut view) };
    assert_eq!(status, SsStatus::InputContract);
    assert!(view.is_null());
    assert!(last_error().contains("position"), "{}", last_error());
}

#[test]
fn parameter_errors_map_to_codes() {
    let view = array_view(&[1.0, 2.0, 3.0]);
    unsafe {
        let mut sum = SsSumResult { estimate: 0.0, cycles: 0, queries: 0, delta: 0.0 };
        assert_eq!(ss_approximate_sum(view, 1.5, 3, &mut sum), SsStatus::InvalidParameter);
        assert!(!last_error().is_empty());
        let mut exact = 0.0;
        assert_eq!(ss_exact_sum(view, 4, &mut exact), SsStatus::OutOfRange);
        ss_view_free(view);
    }
}

#[test]
fn negative_input_breaks_the_sum_contract() {
    let view = array_view(&[-6.0, 2.0, 4.0]);
    unsafe {
        let mut sum = SsSumResult { estimate: 0.0, cycles: 0, queries: 0, delta: 0.0 };
        assert_eq!(ss_approximate_sum(view, 0.1, 3, &mut sum), SsStatus::InputContract);
        ss_view_free(view);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(ss_view_from_array(ptr::null(), 3, &mut out), SsStatus::NullPointer);
        assert_eq!(last_error(), "values is null");
        assert_eq!(ss_view_from_fn(3, None, ptr::null_mut(), &mut out), SsStatus::NullPointer);
        let mut region = SsRegion { lo: 0, hi: 0, is_empty: true };
        assert_eq!(ss_approximate_region(ptr::null_mut(), 1.0, 0.1, 3, &mut region), SsStatus::NullPointer);
        let view = array_view(&[1.0]);
        assert_eq!(ss_exact_sum(view, 1, ptr::null_mut()), SsStatus::NullPointer);
        assert_eq!(ss_view_len(ptr::null()), 0);
        ss_view_free(ptr::null_mut());
        ss_view_free(view);
    }
}

#[test]
fn zero_length_array_is_allowed() {
    let mut view = ptr::null_mut();
    unsafe {
        assert_eq!(ss_view_from_array(ptr::null(), 0, &mut view), SsStatus::Ok);
        assert_eq!(ss_view_len(view), 0);
        ss_view_free(view);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ss_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/sortsum.h")).unwrap();
    for name in [
        "ss_view_from_array",
        "ss_view_from_fn",
        "ss_view_free",
        "ss_approximate_region",
        "ss_approximate_sum",
        "ss_exact_sum",
        "ss_verify_region",
        "ss_last_error_message",
        "SS_STATUS_INPUT_CONTRACT = 4",
        "typedef struct SsView SsView;",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Directory holding the cdylib built alongside this test binary.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let lib = lib_dir();
    if Command::new("cc").arg("--version").output().is_err() || !lib.join("libsortsum_ffi.so").exists() {
        eprintln!("skipping: no C compiler or no shared library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg("-L")
        .arg(&lib)
        .arg("-lsortsum_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).env("LD_LIBRARY_PATH", &lib).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout} {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("region 90 100"), "{stdout}");
    assert!(stdout.contains("unsorted 4"), "{stdout}");
}
