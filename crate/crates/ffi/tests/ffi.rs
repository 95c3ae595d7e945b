use std::ffi::{CStr, CString};
use std::ptr;

use matroid_bandit_ffi::*;

fn parse(text: &str) -> *mut MbMatroid {
    let c = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { mb_matroid_parse(c.as_ptr(), &mut m) }, MbStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(mb_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn matroid_roundtrip_and_greedy() {
    let m = parse("partition 4 \"0,0,1,1\"");
    unsafe {
        assert_eq!(mb_matroid_ground_size(m), 4);
        assert_eq!(mb_matroid_rank(m), 2);
        let w = [0.1, 0.7, 0.9, 0.2];
        let mut out = [0usize; 4];
        let mut n = 0;
        assert_eq!(mb_greedy(m, w.as_ptr(), 4, out.as_mut_ptr(), 4, &mut n), MbStatus::Ok);
        assert_eq!(&out[..n], &[1, 2]);
        // too small a buffer reports the needed length
        assert_eq!(mb_greedy(m, w.as_ptr(), 4, out.as_mut_ptr(), 1, &mut n), MbStatus::BufferTooSmall);
        assert_eq!(n, 2);
        mb_matroid_free(m);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let bad = CString::new("uniform 3 9").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { mb_matroid_parse(bad.as_ptr(), &mut m) }, MbStatus::InvalidInput);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { mb_matroid_parse(ptr::null(), &mut m) }, MbStatus::NullPointer);
    assert!(last_error().contains("null"));
    assert_eq!(unsafe { mb_matroid_ground_size(ptr::null()) }, 0);
    unsafe { mb_matroid_free(ptr::null_mut()) };
}

#[test]
fn index_find_and_update() {
    let m = parse("uniform 4 2");
    let bounds = MbBounds {
        alpha_lb: 0.1,
        alpha_ub: 0.9,
        beta_lb: 0.05,
        beta_ub: 1.0,
    };
    let alpha = [0.8, 0.2, 0.5, 0.3];
    let beta = [0.1, 0.9, 0.2, 0.1];
    let mut idx = ptr::null_mut();
    unsafe {
        assert_eq!(mb_index_new(m, bounds, alpha.as_ptr(), beta.as_ptr(), 4, 0.1, &mut idx), MbStatus::Ok);
        assert!(mb_index_hitting_set_size(idx) > 0);
        let mut out = [0usize; 2];
        let mut n = 0;
        assert_eq!(mb_index_find_base(idx, 1.0, 0.0, out.as_mut_ptr(), 2, &mut n), MbStatus::Ok);
        assert_eq!(&out[..n], &[0, 2]);
        assert_eq!(mb_index_update_feature(idx, 3, 0.9, 0.1), MbStatus::Ok);
        assert_eq!(mb_index_find_base(idx, 1.0, 0.0, out.as_mut_ptr(), 2, &mut n), MbStatus::Ok);
        assert_eq!(&out[..n], &[0, 3]);
        assert_eq!(mb_index_update_feature(idx, 9, 0.5, 0.5), MbStatus::InvalidInput);
        mb_index_free(idx);
        mb_matroid_free(m);
    }
}

#[test]
fn experiment_is_reproducible() {
    let m = parse("uniform 4 2");
    let means = [0.8, 0.6, 0.4, 0.2];
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    let mut trace = vec![0.0; 500];
    unsafe {
        assert_eq!(
            mb_run_experiment(m, MbAlgo::Cucb, 500, 0.1, 0.9, means.as_ptr(), 4, 5, &mut r1, trace.as_mut_ptr()),
            MbStatus::Ok
        );
        assert_eq!(
            mb_run_experiment(m, MbAlgo::Cucb, 500, 0.1, 0.9, means.as_ptr(), 4, 5, &mut r2, ptr::null_mut()),
            MbStatus::Ok
        );
        assert_eq!(
            mb_run_experiment(m, MbAlgo::Cucb, 500, 0.1, 0.9, means.as_ptr(), 3, 5, &mut r2, ptr::null_mut()),
            MbStatus::InvalidInput
        );
        mb_matroid_free(m);
    }
    assert_eq!(r1, r2);
    assert_eq!(trace[499], r1);
}
