use knotvol_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn knot(family: KvFamily, p: i64, r: i64) -> KvKnot {
    KvKnot { family, p, r }
}

fn last_error() -> String {
    unsafe {
        let p = kv_last_error_message();
        assert!(!p.is_null());
        let s = CStr::from_ptr(p).to_string_lossy().into_owned();
        kv_string_free(p);
        s
    }
}

#[test]
fn jones_round_trip_matches_library() {
    unsafe {
        let mut ctx = ptr::null_mut();
        assert_eq!(kv_context_new(5, &mut ctx), KvStatus::Ok);
        let mut v = ptr::null_mut();
        assert_eq!(kv_jones(ctx, knot(KvFamily::Whitehead, 2, 0), 0, &mut v), KvStatus::Ok);
        let mut z = KvComplex::default();
        assert_eq!(kv_jones_value(v, &mut z), KvStatus::Ok);
        let lib = knotvol::jones::jones_whitehead(&knotvol::qnum::RootOfUnityCtx::new(5).unwrap(), 2).unwrap().to_complex();
        assert_eq!((z.re, z.im), (lib.re, lib.im));
        assert_eq!(kv_jones_precision_bits(v), 53);
        kv_jones_free(v);
        kv_context_free(ctx);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut ctx = ptr::null_mut();
        assert_eq!(kv_context_new(4, &mut ctx), KvStatus::Domain);
        assert!(ctx.is_null());
        assert!(last_error().contains("odd"));
        assert_eq!(kv_context_new(5, ptr::null_mut()), KvStatus::NullPointer);
        let mut out = ptr::null_mut();
        assert_eq!(kv_jones(ptr::null(), knot(KvFamily::Borromean, 0, 0), 0, &mut out), KvStatus::NullPointer);
        let mut s = KvSaddle::default();
        assert_eq!(kv_saddle(knot(KvFamily::Borromean, 0, 0), &mut s), KvStatus::Usage);
        kv_context_free(ptr::null_mut());
        kv_string_free(ptr::null_mut());
    }
}

#[test]
fn saddle_and_volume() {
    unsafe {
        let mut s = KvSaddle::default();
        assert_eq!(kv_saddle(knot(KvFamily::Whitehead, 2, 0), &mut s), KvStatus::Ok);
        assert!((s.alpha0.re - 0.856035).abs() < 1e-5 && (s.alpha0.im + 0.168907).abs() < 1e-5);
        let mut v = KvComplexVolume::default();
        assert_eq!(kv_complex_volume(knot(KvFamily::DoubleTwist, 6, 2), &mut v), KvStatus::Ok);
        assert!(v.vol > 0.0 && v.vol < 7.3277);
    }
}

#[test]
fn representation_handle() {
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(kv_rep_new(knot(KvFamily::DoubleTwist, 6, 2), &mut rep), KvStatus::Ok);
        let label = CString::new("p3").unwrap();
        let (mut z, mut inf) = (KvComplex::default(), true);
        assert_eq!(kv_rep_fixed_point(rep, label.as_ptr(), &mut z, &mut inf), KvStatus::Ok);
        assert!(!inf && (z.re - 0.5464).abs() < 1e-4 && (z.im - 0.3152).abs() < 1e-4);
        let bad = CString::new("nope").unwrap();
        assert_eq!(kv_rep_fixed_point(rep, bad.as_ptr(), &mut z, &mut inf), KvStatus::Domain);
        let js = kv_rep_to_json(rep);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(js).to_str().unwrap()).unwrap();
        assert!(doc["fixed_points"]["p3"]["coords"].is_array());
        kv_string_free(js);
        kv_rep_free(rep);
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/knotvol.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["kv_context_new", "kv_jones", "kv_jones_free", "kv_rep_to_json", "kv_string_free", "KV_STATUS_OK"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).status() else {
        return; // no C compiler available
    };
    assert!(status.success());
}
