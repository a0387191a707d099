use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use rainbow_games_ffi::*;

fn last_error() -> String {
    let p = rg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn rainbow(s: u32, t: u32) -> *mut RgAlgebra {
    let mut alg = ptr::null_mut();
    assert_eq!(unsafe { rg_rainbow_new(s, t, &mut alg) }, RgStatus::Ok);
    assert!(!alg.is_null());
    alg
}

#[test]
fn rainbow_handle_lifecycle() {
    let alg = rainbow(2, 2);
    unsafe {
        assert_eq!(rg_algebra_atom_count(alg), 10);
        let mut ok = false;
        assert_eq!(rg_algebra_check_axioms(alg, &mut ok), RgStatus::Ok);
        assert!(ok);
        let mut rep = false;
        assert_eq!(rg_algebra_predicted_representable(alg, &mut rep), RgStatus::Ok);
        assert!(rep);
        rg_algebra_free(alg);
        rg_algebra_free(ptr::null_mut());
        assert_eq!(rg_algebra_atom_count(ptr::null()), 0);
    }
}

#[test]
fn operations() {
    let alg = rainbow(2, 2);
    unsafe {
        // g0 ; g0 = {1', b, y}.
        let mut out = 0;
        assert_eq!(rg_algebra_compose(alg, 1 << 4, 1 << 4, &mut out), RgStatus::Ok);
        assert_eq!(out, 0b1011);
        // Red atoms r0_1 (bit 7) and r1_0 (bit 8) are converses.
        assert_eq!(rg_algebra_converse(alg, 1 << 7, &mut out), RgStatus::Ok);
        assert_eq!(out, 1 << 8);
        assert_eq!(rg_algebra_converse(alg, 1 << 20, &mut out), RgStatus::InvalidArgument);
        assert!(last_error().contains("outside"));
        assert_eq!(rg_algebra_compose(alg, 1, 1, ptr::null_mut()), RgStatus::NullPointer);
        rg_algebra_free(alg);
    }
}

#[test]
fn eval_and_errors() {
    let (b22, b32) = (rainbow(2, 2), rainbow(3, 2));
    let phi = CString::new("E x . x < 0").unwrap();
    let bad = CString::new("E x . x <=").unwrap();
    unsafe {
        let mut v = true;
        assert_eq!(rg_algebra_eval(b22, phi.as_ptr(), &mut v), RgStatus::Ok);
        assert!(!v);
        assert_eq!(rg_algebra_eval(b22, bad.as_ptr(), &mut v), RgStatus::ParseError);
        assert!(last_error().contains("offset"));
        assert_eq!(rg_algebra_eval(b22, ptr::null(), &mut v), RgStatus::NullPointer);
        let mut rep = true;
        assert_eq!(rg_algebra_predicted_representable(b32, &mut rep), RgStatus::Ok);
        assert!(!rep);
        rg_algebra_free(b22);
        rg_algebra_free(b32);
    }
    let mut alg = ptr::null_mut();
    assert_eq!(unsafe { rg_rainbow_new(0, 2, &mut alg) }, RgStatus::InvalidArgument);
    assert!(alg.is_null());
}

#[test]
fn ras_loading() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b22.ras");
    std::fs::write(&path, rainbow_games::ras::write_ras(&rainbow_games::build_rainbow(rainbow_games::RainbowParams::new(2, 2).unwrap()).unwrap()))
        .unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut alg = ptr::null_mut();
    unsafe {
        assert_eq!(rg_algebra_load_ras(cpath.as_ptr(), &mut alg), RgStatus::Ok);
        assert_eq!(rg_algebra_atom_count(alg), 10);
        rg_algebra_free(alg);
        let missing = CString::new(dir.path().join("nope.ras").to_str().unwrap()).unwrap();
        assert_eq!(rg_algebra_load_ras(missing.as_ptr(), &mut alg), RgStatus::IoError);
        let text = CString::new("[atoms]\na\n").unwrap();
        assert_eq!(rg_algebra_parse_ras(text.as_ptr(), &mut alg), RgStatus::InvalidStructure);
        let text = CString::new("[atoms]\n1' a\n[forbidden]\na a\n").unwrap();
        assert_eq!(rg_algebra_parse_ras(text.as_ptr(), &mut alg), RgStatus::ParseError);
        assert!(last_error().starts_with("line 4"));
    }
}

#[test]
fn seurat_solver() {
    let mut exists = false;
    unsafe {
        assert_eq!(rg_seurat_solve(4, 4, 1, &mut exists), RgStatus::Ok);
        assert!(exists);
        assert_eq!(rg_seurat_solve(2, 3, 1, &mut exists), RgStatus::Ok);
        assert!(!exists);
        assert_eq!(rg_seurat_solve(2, 3, 64, &mut exists), RgStatus::InvalidArgument);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rainbow_games.h");
    assert!(header.exists());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint probe(void) {{ rg_algebra *a = 0; rg_status s = rg_rainbow_new(2, 2, &a); \
             rg_algebra_free(a); return s == RG_STATUS_OK; }}\n",
            header.display()
        ),
    )
    .unwrap();
    match Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&src).status() {
        Ok(status) => assert!(status.success()),
        Err(_) => eprintln!("no C compiler found; header not compiled"),
    }
}
