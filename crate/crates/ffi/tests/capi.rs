use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hypercong_ffi::*;

fn buf_str(buf: &[c_char]) -> String {
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

fn last_error() -> String {
    let p = hc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn truncated_sum_and_unit_root() {
    let mut buf = [0 as c_char; 64];
    let mut needed = 0usize;
    let st = unsafe { hc_truncated_sum(4, 3, 1, 1, 3, buf.as_mut_ptr(), buf.len(), &mut needed) };
    assert_eq!(st, HcStatus::Ok);
    assert_eq!(buf_str(&buf), "-4");
    assert_eq!(needed, 3);
    let st = unsafe { hc_unit_root_limit(4, 3, 1, 3, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) };
    assert_eq!(st, HcStatus::Ok);
    assert_eq!(buf_str(&buf), "-4");
}

#[test]
fn small_buffer_reports_needed_size() {
    let mut buf = [0 as c_char; 2];
    let mut needed = 0usize;
    let st = unsafe { hc_truncated_sum(3, 101, 1, 1, 2, buf.as_mut_ptr(), buf.len(), &mut needed) };
    assert_eq!(st, HcStatus::BufferTooSmall);
    assert!(needed > 2);
    assert!(last_error().contains("bytes needed"));
}

#[test]
fn errors_map_to_status_codes() {
    let mut buf = [0 as c_char; 64];
    let st = unsafe { hc_truncated_sum(3, 9, 1, 1, 2, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) };
    assert_eq!(st, HcStatus::InvalidArgument);
    // F_7(1) for d = 3 vanishes mod 7
    let st = unsafe { hc_unit_root_limit(3, 7, 1, 2, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) };
    assert_eq!(st, HcStatus::NotAUnit);
    let st = unsafe { hc_field_order(ptr::null(), ptr::null_mut()) };
    assert_eq!(st, HcStatus::NullPointer);
}

#[test]
fn field_handle_lifecycle() {
    let mut f: *mut HcField = ptr::null_mut();
    assert_eq!(unsafe { hc_field_new(3, 2, &mut f) }, HcStatus::Ok);
    let mut q = 0u64;
    assert_eq!(unsafe { hc_field_order(f, &mut q) }, HcStatus::Ok);
    assert_eq!(q, 9);
    let mut g = 0u64;
    assert_eq!(unsafe { hc_field_generator(f, &mut g) }, HcStatus::Ok);
    let mut l = 99u64;
    assert_eq!(unsafe { hc_field_dlog(f, g, &mut l) }, HcStatus::Ok);
    assert_eq!(l, 1);
    assert_eq!(unsafe { hc_field_dlog(f, 0, &mut l) }, HcStatus::ZeroArgument);
    let (mut hc, mut hg) = (0i64, 0i64);
    assert_eq!(unsafe { hc_h_value(f, 3, 2, HcMethod::Count, &mut hc) }, HcStatus::Ok);
    assert_eq!(unsafe { hc_h_value(f, 3, 2, HcMethod::Gauss, &mut hg) }, HcStatus::Ok);
    assert_eq!(hc, hg);
    unsafe { hc_field_free(f) };
    unsafe { hc_field_free(ptr::null_mut()) };
}

#[test]
fn zeta_handle() {
    let mut z: *mut HcZeta = ptr::null_mut();
    assert_eq!(unsafe { hc_zeta_compute(3, 4, 1, &mut z) }, HcStatus::Ok);
    let mut deg = 0usize;
    assert_eq!(unsafe { hc_zeta_degree(z, &mut deg) }, HcStatus::Ok);
    assert_eq!(deg, 2);
    let mut buf = [0 as c_char; 64];
    let coeffs: Vec<String> = (0..=deg)
        .map(|i| {
            assert_eq!(
                unsafe { hc_zeta_coefficient(z, i, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) },
                HcStatus::Ok
            );
            buf_str(&buf)
        })
        .collect();
    assert_eq!(coeffs, ["1", "4", "27"]);
    assert_eq!(unsafe { hc_zeta_slopes(z, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) }, HcStatus::Ok);
    assert_eq!(buf_str(&buf), "0,3");
    assert_eq!(unsafe { hc_zeta_unit_root(z, 3, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) }, HcStatus::Ok);
    assert_eq!(buf_str(&buf), "-4");
    assert_eq!(
        unsafe { hc_zeta_coefficient(z, 9, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) },
        HcStatus::InvalidArgument
    );
    unsafe { hc_zeta_free(z) };
}

#[test]
fn eta_and_cm() {
    let q = CString::new("2^4 4^4").unwrap();
    let mut out = [0i64; 5];
    assert_eq!(unsafe { hc_eta_coefficients(q.as_ptr(), 5, out.as_mut_ptr()) }, HcStatus::Ok);
    assert_eq!(out, [1, 0, -4, 0, -2]);
    let bad = CString::new("2^").unwrap();
    assert_eq!(unsafe { hc_eta_coefficients(bad.as_ptr(), 5, out.as_mut_ptr()) }, HcStatus::InvalidArgument);
    let mut c = 0i64;
    assert_eq!(unsafe { hc_cm_coefficient(HcCmForm::D3Plus, 5, &mut c) }, HcStatus::Ok);
    assert_eq!(c, -6);
}

#[test]
fn verify_writes_report() {
    let dir = std::env::temp_dir().join(format!("hc-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = CString::new(dir.join("r.json").to_str().unwrap()).unwrap();
    let claims = CString::new("mortenson_d2").unwrap();
    let mut code = -1;
    let st = unsafe { hc_verify(claims.as_ptr(), 13, 1, path.as_ptr(), HcFormat::Json, &mut code) };
    assert_eq!(st, HcStatus::Ok);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.join("r.json")).unwrap();
    assert!(text.contains("\"mortenson_d2\""));
    std::fs::remove_dir_all(&dir).unwrap();
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let lib = target_dir().join("libhypercong_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = target_dir().join(format!("hc-smoke-{}", std::process::id()));
    let status = Command::new(&cc)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "smoke program failed: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
