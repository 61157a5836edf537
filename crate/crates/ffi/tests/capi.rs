use std::ffi::CStr;
use std::ptr;

use ld3_ffi::*;

fn detector(window: usize, labels: usize) -> *mut Ld3Detector {
    let mut params = ld3_params_default();
    params.window = window;
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { ld3_detector_new(params, labels, &mut d) },
        Ld3Status::Ok
    );
    assert!(!d.is_null());
    d
}

fn update(d: *mut Ld3Detector, bits: &[u8]) -> (Ld3Status, Ld3Update) {
    let mut out = Ld3Update {
        drift: false,
        has_correlation: false,
        correlation: 0.0,
    };
    let s = unsafe { ld3_detector_update(d, bits.as_ptr(), bits.len(), &mut out) };
    (s, out)
}

#[test]
fn detector_reproduces_worked_example() {
    let d = detector(3, 3);
    let preds: [[u8; 3]; 6] = [
        [0, 0, 1],
        [1, 1, 1],
        [0, 1, 1],
        [1, 0, 1],
        [1, 1, 0],
        [1, 0, 1],
    ];
    for (i, p) in preds.iter().enumerate() {
        let (s, u) = update(d, p);
        assert_eq!(s, Ld3Status::Ok);
        assert!(!u.drift);
        assert_eq!(u.has_correlation, i == 5);
        if i < 5 {
            assert!(u.correlation.is_nan());
        } else {
            assert!((u.correlation + 1.0 / 6.0).abs() < 1e-12);
        }
    }
    assert_eq!(unsafe { ld3_detector_reset(d) }, Ld3Status::Ok);
    assert!(!update(d, &[1, 0, 1]).1.has_correlation);
    unsafe { ld3_detector_free(d) };
}

#[test]
fn bad_arguments_are_reported() {
    let mut d = ptr::null_mut();
    let mut params = ld3_params_default();
    assert_eq!(
        unsafe { ld3_detector_new(params, 1, &mut d) },
        Ld3Status::InvalidArgument
    );
    assert!(d.is_null());
    params.fusion = 9;
    assert_eq!(
        unsafe { ld3_detector_new(params, 4, &mut d) },
        Ld3Status::InvalidArgument
    );
    assert_eq!(
        unsafe { ld3_detector_new(ld3_params_default(), 4, ptr::null_mut()) },
        Ld3Status::NullPointer
    );

    let d = detector(5, 3);
    assert_eq!(update(d, &[1, 0]).0, Ld3Status::InvalidArgument);
    assert_eq!(update(d, &[1, 2, 0]).0, Ld3Status::InvalidArgument);
    let mut out = Ld3Update {
        drift: false,
        has_correlation: false,
        correlation: 0.0,
    };
    assert_eq!(
        unsafe { ld3_detector_update(d, ptr::null(), 3, &mut out) },
        Ld3Status::NullPointer
    );
    assert_eq!(
        unsafe { ld3_detector_update(ptr::null_mut(), [1u8, 0, 0].as_ptr(), 3, &mut out) },
        Ld3Status::NullPointer
    );
    assert_eq!(
        unsafe { ld3_detector_reset(ptr::null_mut()) },
        Ld3Status::NullPointer
    );
    unsafe {
        ld3_detector_free(d);
        ld3_detector_free(ptr::null_mut());
    }
}

#[test]
fn status_messages() {
    for (code, text) in [
        (0, "ok"),
        (1, "null pointer argument"),
        (2, "invalid argument"),
        (3, "internal panic"),
        (-4, "unknown status"),
    ] {
        let msg = unsafe { CStr::from_ptr(ld3_status_message(code)) };
        assert_eq!(msg.to_str().unwrap(), text);
    }
    assert_eq!(Ld3Status::InvalidArgument as i32, 2);
}

#[test]
fn chain_matches_the_rust_model() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { ld3_chain_new(2, 3, &mut c) }, Ld3Status::Ok);
    let mut rust = ld3::ClassifierChain::new(2, 3);
    let mut out = [9u8; 3];
    assert_eq!(
        unsafe { ld3_chain_predict(c, [0.5, 0.5].as_ptr(), 2, out.as_mut_ptr(), 3) },
        Ld3Status::Ok
    );
    assert_eq!(out, [0, 0, 0]);
    for i in 0..60 {
        let x = [(i % 3) as f64 * 2.0, (i % 5) as f64];
        let y = [u8::from(i % 3 == 0), u8::from(i % 3 == 1), 1];
        assert_eq!(
            unsafe { ld3_chain_partial_fit(c, x.as_ptr(), 2, y.as_ptr(), 3) },
            Ld3Status::Ok
        );
        rust.partial_fit(&x, &ld3::LabelVector::new(y.to_vec()).unwrap())
            .unwrap();
    }
    for x in [[0.0, 1.0], [2.0, 3.0], [4.0, 0.0]] {
        assert_eq!(
            unsafe { ld3_chain_predict(c, x.as_ptr(), 2, out.as_mut_ptr(), 3) },
            Ld3Status::Ok
        );
        assert_eq!(&out[..], rust.predict(&x).unwrap().bits());
    }
    assert_eq!(
        unsafe { ld3_chain_predict(c, [0.0].as_ptr(), 1, out.as_mut_ptr(), 3) },
        Ld3Status::InvalidArgument
    );
    assert_eq!(
        unsafe { ld3_chain_predict(c, [0.0, 0.0].as_ptr(), 2, out.as_mut_ptr(), 2) },
        Ld3Status::InvalidArgument
    );
    assert_eq!(
        unsafe { ld3_chain_partial_fit(c, [0.0, 0.0].as_ptr(), 2, [1u8, 3, 0].as_ptr(), 3) },
        Ld3Status::InvalidArgument
    );
    assert_eq!(unsafe { ld3_chain_reset(c) }, Ld3Status::Ok);
    assert_eq!(
        unsafe { ld3_chain_predict(c, [2.0, 3.0].as_ptr(), 2, out.as_mut_ptr(), 3) },
        Ld3Status::Ok
    );
    assert_eq!(out, [0, 0, 0]);
    unsafe { ld3_chain_free(c) };
}

#[test]
fn error_rate_detectors_match_the_rust_ones() {
    let mut ddm = ptr::null_mut();
    let mut eddm = ptr::null_mut();
    assert_eq!(unsafe { ld3_ddm_new(&mut ddm) }, Ld3Status::Ok);
    assert_eq!(unsafe { ld3_eddm_new(&mut eddm) }, Ld3Status::Ok);
    let (mut r_ddm, mut r_eddm) = (ld3::Ddm::new(), ld3::Eddm::new());
    let mut phase = Ld3Phase::Stable;
    let mut drifts = 0;
    for i in 0..4_000u32 {
        let correct = if i < 2_000 { i % 10 != 0 } else { i % 10 < 3 };
        let signal = ld3::ErrorSignal { correct };
        assert_eq!(
            unsafe { ld3_ddm_update(ddm, correct, &mut phase) },
            Ld3Status::Ok
        );
        assert_eq!(phase as i32, r_ddm.update(signal) as i32);
        drifts += usize::from(phase == Ld3Phase::Drift);
        assert_eq!(
            unsafe { ld3_eddm_update(eddm, correct, &mut phase) },
            Ld3Status::Ok
        );
        assert_eq!(phase as i32, r_eddm.update(signal) as i32);
    }
    assert!(drifts > 0);
    assert_eq!(
        unsafe { ld3_ddm_update(ddm, true, ptr::null_mut()) },
        Ld3Status::NullPointer
    );
    assert_eq!(
        unsafe { ld3_eddm_update(ptr::null_mut(), true, &mut phase) },
        Ld3Status::NullPointer
    );
    unsafe {
        ld3_ddm_free(ddm);
        ld3_eddm_free(eddm);
    }
}

#[test]
fn ws_coefficient_through_the_abi() {
    let mut c = 0.0;
    let new = [0usize, 2, 1];
    let old = [1usize, 2, 0];
    assert_eq!(
        unsafe { ld3_ws_coefficient(new.as_ptr(), old.as_ptr(), 3, &mut c) },
        Ld3Status::Ok
    );
    assert!((c + 0.1667).abs() < 1e-4);
    assert_eq!(
        unsafe { ld3_ws_coefficient(new.as_ptr(), new.as_ptr(), 3, &mut c) },
        Ld3Status::Ok
    );
    assert_eq!(c, 1.0);
    let bad = [0usize, 0, 1];
    assert_eq!(
        unsafe { ld3_ws_coefficient(new.as_ptr(), bad.as_ptr(), 3, &mut c) },
        Ld3Status::InvalidArgument
    );
    assert_eq!(
        unsafe { ld3_ws_coefficient(ptr::null(), old.as_ptr(), 3, &mut c) },
        Ld3Status::NullPointer
    );
}
