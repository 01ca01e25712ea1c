use std::ffi::CStr;
use std::ptr;

use hyperlab_ffi::*;

fn last_error() -> String {
    let p = hl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn model(
    ambient: HlAmbient,
    n: u32,
    c: f64,
    family: HlFamily,
    radius: f64,
    k: i32,
) -> *mut HlModel {
    let mut m = ptr::null_mut();
    let st = unsafe { hl_model_new(ambient, n, c, family, radius, k, false, 7, &mut m) };
    assert_eq!(st, HlStatus::Ok, "{}", last_error());
    assert!(!m.is_null());
    m
}

#[test]
fn type_a_model_round_trip() {
    let m = model(HlAmbient::ProjectiveSpace, 3, 4.0, HlFamily::A2, 0.7, 1);
    unsafe {
        let mut dim = 0usize;
        assert_eq!(hl_model_dim(m, &mut dim), HlStatus::Ok);
        assert_eq!(dim, 5);
        let mut alpha = 0.0;
        assert_eq!(hl_model_alpha(m, &mut alpha), HlStatus::Ok);
        assert!((alpha - 2.0 / (1.4f64).tan()).abs() < 1e-9);

        let mut shape = vec![0.0; dim * dim];
        assert_eq!(
            hl_model_shape(m, shape.as_mut_ptr(), shape.len()),
            HlStatus::Ok
        );
        let trace: f64 = (0..dim).map(|i| shape[i * dim + i]).sum();
        let expected = alpha + 2.0 * (1.0 / 0.7f64.tan()) - 2.0 * 0.7f64.tan();
        assert!((trace - expected).abs() < 1e-9, "{trace} vs {expected}");
        assert_eq!(
            hl_model_shape(m, shape.as_mut_ptr(), 3),
            HlStatus::BufferTooSmall
        );

        for check in [
            HlCheck::PhiLCommute,
            HlCheck::LACommute,
            HlCheck::NablaXiL,
            HlCheck::Hopf,
        ] {
            let (mut r, mut pass) = (f64::NAN, false);
            assert_eq!(
                hl_model_check(m, check, HlSubspace::KerEta, 1e-9, &mut r, &mut pass),
                HlStatus::Ok
            );
            assert!(pass && r <= 1e-9, "{check:?}: {r}");
        }

        let mut json = ptr::null_mut();
        let mut all_pass = false;
        assert_eq!(
            hl_model_verify_json(m, 1e-9, &mut json, &mut all_pass),
            HlStatus::Ok
        );
        assert!(all_pass);
        let text = CStr::from_ptr(json).to_str().unwrap();
        assert!(text.contains("\"schema\": \"hyperlab/1\""));
        assert!(!text.contains("timestamp"));
        hl_string_free(json);
        hl_model_free(m);
    }
}

#[test]
fn type_b_breaks_phi_l_commute() {
    let m = model(HlAmbient::ProjectiveSpace, 3, 4.0, HlFamily::B, 0.3, -1);
    unsafe {
        let (mut r, mut pass) = (0.0, true);
        assert_eq!(
            hl_model_check(
                m,
                HlCheck::PhiLCommute,
                HlSubspace::KerEta,
                1e-9,
                &mut r,
                &mut pass
            ),
            HlStatus::Ok
        );
        assert!(!pass && r > 1e-3);
        // no type A connection on a type B model
        assert_ne!(
            hl_model_check(
                m,
                HlCheck::NablaXiL,
                HlSubspace::KerEta,
                1e-9,
                ptr::null_mut(),
                ptr::null_mut()
            ),
            HlStatus::Ok
        );
        hl_model_free(m);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut m = ptr::null_mut();
        let st = hl_model_new(
            HlAmbient::ProjectiveSpace,
            3,
            4.0,
            HlFamily::A0,
            f64::NAN,
            -1,
            false,
            0,
            &mut m,
        );
        assert_eq!(st, HlStatus::InvalidSpec);
        assert!(m.is_null());
        assert!(last_error().contains("A0"));

        let st = hl_model_new(
            HlAmbient::HyperbolicSpace,
            3,
            -4.0,
            HlFamily::A0,
            f64::NAN,
            -1,
            false,
            0,
            ptr::null_mut(),
        );
        assert_eq!(st, HlStatus::NullPointer);

        let mut dim = 0usize;
        assert_eq!(hl_model_dim(ptr::null(), &mut dim), HlStatus::NullPointer);

        let mut v = 0.0;
        assert_eq!(
            hl_riccati(1.0, 4.0, 0.0, f64::NAN, 0.0, &mut v),
            HlStatus::FocalPoint
        );
        assert!(last_error().contains("focal"));

        let mut cert = HlCertificate::default();
        assert_eq!(
            hl_certificate(0.0, 1.0, 1.0, f64::NAN, &mut cert),
            HlStatus::Domain
        );

        let m = model(
            HlAmbient::HyperbolicSpace,
            2,
            -4.0,
            HlFamily::A0,
            f64::NAN,
            -1,
        );
        assert_eq!(
            hl_model_check(
                m,
                HlCheck::Hopf,
                HlSubspace::All,
                -1.0,
                ptr::null_mut(),
                ptr::null_mut()
            ),
            HlStatus::InvalidArgument
        );
        hl_model_free(m);
        hl_model_free(ptr::null_mut());
        hl_string_free(ptr::null_mut());
    }
    // a successful call clears the message
    let mut v = 0.0;
    assert_eq!(unsafe { hl_pointwise(4.0, 0.5, &mut v) }, HlStatus::Ok);
    assert!(hl_last_error().is_null());
}

#[test]
fn scalar_entry_points() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(
            hl_riccati(1.0, 0.5, 0.0, f64::NAN, 0.0, &mut v),
            HlStatus::Ok
        );
        assert!((v - 1.0 / 0.5f64.tan()).abs() < 1e-6);
        assert_eq!(hl_riccati(-1.0, 1.0, 0.0, 0.0, 1e-4, &mut v), HlStatus::Ok);
        assert!((v - 1.0f64.tanh()).abs() < 1e-9);

        assert_eq!(hl_pointwise(-10.0, 1.5, &mut v), HlStatus::Ok);
        assert!((v - 2.25).abs() < 1e-12);

        let mut cert = HlCertificate::default();
        assert_eq!(
            hl_certificate(4.0, 1.0, 1.0, f64::NAN, &mut cert),
            HlStatus::Ok
        );
        assert_eq!(cert.discriminant, 45312.0);
        assert_eq!(cert.factor, -2.0);
        assert!(cert.factor_branch_rejected && cert.witnessed && !cert.factor_vanishes);
    }
    let version = unsafe { CStr::from_ptr(hl_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
