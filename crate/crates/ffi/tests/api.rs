use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use shimura_vol_ffi::*;

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    shv_string_free(s);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(shv_last_error()).to_str().unwrap().to_string() }
}

fn parse(spec: &str) -> *mut ShvSpace {
    let s = CString::new(spec).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { shv_space_parse(s.as_ptr(), &mut out) }, ShvStatus::Ok);
    out
}

#[test]
fn class_numbers() {
    let (mut h, mut w) = (0u64, 0u32);
    unsafe {
        assert_eq!(shv_field_class_number(23, &mut h, &mut w), ShvStatus::Ok);
        assert_eq!((h, w), (3, 2));
        assert_eq!(shv_field_class_number(3, &mut h, &mut w), ShvStatus::Ok);
        assert_eq!((h, w), (1, 6));
        assert_eq!(shv_field_class_number(8, &mut h, &mut w), ShvStatus::InputError);
        assert_eq!(
            shv_field_class_number(7, ptr::null_mut(), &mut w),
            ShvStatus::NullPointer
        );
    }
    assert!(last_error().contains("null"));
}

#[test]
fn volumes_and_coefficients() {
    let ctx = shv_context_new(40);
    assert!(!ctx.is_null());
    let space = parse("D=7;n=3;inv=7:-1");
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(shv_volume_hodge(space, &mut s), ShvStatus::Ok);
        assert_eq!(take(s), "2/21");

        let (mut b, mut db) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(shv_coeff_b(ctx, space, 29, &mut b, &mut db), ShvStatus::Ok);
        assert_eq!(take(b), "-5894");
        assert!(take(db).parse::<f64>().unwrap() < 0.0);

        let mut j = ptr::null_mut();
        assert_eq!(shv_volume_json(ctx, space, &mut j), ShvStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(j)).unwrap();
        assert_eq!(v["volC_hodge_MW"], "2/21");

        shv_space_free(space);
        shv_context_free(ctx);
    }
}

#[test]
fn space_from_arrays() {
    let primes = [3u64, 5];
    let invs = [1i32, -1];
    let mut space = ptr::null_mut();
    unsafe {
        assert_eq!(
            shv_space_new(15, 4, primes.as_ptr(), invs.as_ptr(), 2, &mut space),
            ShvStatus::Ok
        );
        shv_space_free(space);
        let bad = [1i32, 1];
        assert_eq!(
            shv_space_new(15, 4, primes.as_ptr(), bad.as_ptr(), 2, &mut space),
            ShvStatus::InputError
        );
    }
    assert!(last_error().contains("multiply"));
}

#[test]
fn weight_routes() {
    let ctx = shv_context_new(60);
    let space = parse("D=7;n=3;inv=7:-1");
    unsafe {
        let mut k = ptr::null_mut();
        let (p, c) = ([29u64, 43], [2i64, -1]);
        assert_eq!(
            shv_borcherds_weight(ctx, space, p.as_ptr(), c.as_ptr(), 1, &mut k),
            ShvStatus::Ok
        );
        assert_eq!(take(k), "11788");
        assert_eq!(
            shv_borcherds_weight(ptr::null(), space, p.as_ptr(), c.as_ptr(), 2, &mut k),
            ShvStatus::Ok
        );
        let two = take(k);
        assert_eq!(
            shv_borcherds_weight(ctx, space, p.as_ptr(), c.as_ptr(), 2, &mut k),
            ShvStatus::Ok
        );
        assert_eq!(take(k), two);
        let bad = [31u64];
        assert_eq!(
            shv_borcherds_weight(ctx, space, bad.as_ptr(), c.as_ptr(), 1, &mut k),
            ShvStatus::InputError
        );
        shv_space_free(space);
        shv_context_free(ctx);
    }
    assert!(shv_context_new(10).is_null());
}

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = include_dir().join("shimura_vol.h");
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let st = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .unwrap_or_else(|e| panic!("{cc}: {e}"));
        assert!(st.success(), "{lang}");
    }
}

#[test]
fn c_program_links_against_staticlib() {
    // test binaries live in target/<profile>/deps; the staticlib one level up
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libshimura_vol_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("shv_demo");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/demo.c");
    let st = Command::new("cc")
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let run = Command::new(&out).output().unwrap();
    let text = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{text}");
    assert!(text.contains("weight 5894"));
}
