//! C ABI for matroid-bandit.
//!
//! Handles are opaque pointers created by `mb_*_new` / `mb_matroid_parse` and
//! released with the matching `*_free`. Every fallible call returns an
//! [`MbStatus`]; the message of the last failure on the calling thread is
//! available from [`mb_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::f64::consts::FRAC_PI_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use matroid_bandit::approx_index::{ApproxIndex, Bounds, Coverage, Feature, IndexOptions, Query};
use matroid_bandit::bandit::{run_experiment, Algo, RewardRange, RunConfig};
use matroid_bandit::matroid::{greedy_max_weight_basis, MatroidSpec};
use matroid_bandit::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbStatus {
    Ok = 0,
    InvalidInput = 1,
    Contract = 2,
    Refused = 3,
    Degenerate = 4,
    Internal = 5,
    Io = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbAlgo {
    Cucb = 0,
    FasterCucb = 1,
    LazyHeap = 2,
}

/// Feature bounds `[alpha_lb, alpha_ub] x [beta_lb, beta_ub]`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MbBounds {
    pub alpha_lb: f64,
    pub alpha_ub: f64,
    pub beta_lb: f64,
    pub beta_ub: f64,
}

/// Opaque matroid handle.
pub struct MbMatroid {
    spec: Arc<MatroidSpec>,
}

/// Opaque approximate-index handle.
pub struct MbIndex {
    index: ApproxIndex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MbStatus {
    match e {
        Error::Input(_) => MbStatus::InvalidInput,
        Error::Contract(_) => MbStatus::Contract,
        Error::Refused(_) => MbStatus::Refused,
        Error::Degenerate(_) => MbStatus::Degenerate,
        Error::Internal(_) => MbStatus::Internal,
        Error::Io(_) => MbStatus::Io,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Small { need: usize, cap: usize },
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MbStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("{name} is null"));
            MbStatus::NullPointer
        }
        Ok(Err(Fail::Small { need, cap })) => {
            set_error(format!("output buffer holds {cap} entries, {need} needed"));
            MbStatus::BufferTooSmall
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("panic: {msg}"));
            MbStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_members(members: &[usize], out: *mut usize, cap: usize, out_len: *mut usize) -> Result<(), Fail> {
    if out_len.is_null() {
        return Err(Fail::Null("out_len"));
    }
    *out_len = members.len();
    if members.len() > cap {
        return Err(Fail::Small { need: members.len(), cap });
    }
    if !members.is_empty() {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        ptr::copy_nonoverlapping(members.as_ptr(), out, members.len());
    }
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a matroid from its text form, e.g. `uniform 8 3`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_matroid_parse(text: *const c_char, out: *mut *mut MbMatroid) -> MbStatus {
    guard(|| {
        if text.is_null() {
            return Err(Fail::Null("text"));
        }
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Error::Input("text is not UTF-8".into()))?;
        let spec: MatroidSpec = s.parse()?;
        *out = Box::into_raw(Box::new(MbMatroid { spec: Arc::new(spec) }));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`mb_matroid_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mb_matroid_free(m: *mut MbMatroid) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Ground-set size, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mb_matroid_ground_size(m: *const MbMatroid) -> usize {
    m.as_ref().map_or(0, |m| m.spec.ground_size())
}

/// Rank, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mb_matroid_rank(m: *const MbMatroid) -> usize {
    m.as_ref().map_or(0, |m| m.spec.rank())
}

/// Maximum-weight basis. `out` receives the members in ascending order;
/// `out_len` is set even when the buffer is too small.
///
/// # Safety
/// `weights` must hold `len` values and `out` `cap` slots.
#[no_mangle]
pub unsafe extern "C" fn mb_greedy(
    m: *const MbMatroid,
    weights: *const f64,
    len: usize,
    out: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> MbStatus {
    guard(|| {
        let m = m.as_ref().ok_or(Fail::Null("matroid"))?;
        let w = slice(weights, len, "weights")?;
        let b = greedy_max_weight_basis(&m.spec, w)?;
        write_members(b.members(), out, cap, out_len)
    })
}

/// Builds an approximate index over arm features `(alpha[k], beta[k])`,
/// answering queries with nonnegative coordinates.
///
/// # Safety
/// `alpha` and `beta` must hold `len` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mb_index_new(
    m: *const MbMatroid,
    bounds: MbBounds,
    alpha: *const f64,
    beta: *const f64,
    len: usize,
    epsilon: f64,
    out: *mut *mut MbIndex,
) -> MbStatus {
    guard(|| {
        let m = m.as_ref().ok_or(Fail::Null("matroid"))?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let a = slice(alpha, len, "alpha")?;
        let b = slice(beta, len, "beta")?;
        let features = a.iter().zip(b).map(|(&x, &y)| Feature::new(x, y)).collect();
        let bounds = Bounds::new(bounds.alpha_lb, bounds.alpha_ub, bounds.beta_lb, bounds.beta_ub)?;
        let mut opts = IndexOptions::new(epsilon);
        opts.coverage = Coverage::cone(0.0, FRAC_PI_2)?;
        let index = ApproxIndex::initialize(m.spec.clone(), bounds, features, opts)?;
        *out = Box::into_raw(Box::new(MbIndex { index }));
        Ok(())
    })
}

/// Approximate maximum-weight base for the query `(q1, q2)`.
///
/// # Safety
/// `idx` must be live; `out` must hold `cap` slots.
#[no_mangle]
pub unsafe extern "C" fn mb_index_find_base(
    idx: *mut MbIndex,
    q1: f64,
    q2: f64,
    out: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> MbStatus {
    guard(|| {
        let idx = idx.as_mut().ok_or(Fail::Null("index"))?;
        let members = idx.index.find_base_members(Query::new(q1, q2))?;
        write_members(&members, out, cap, out_len)
    })
}

/// Replaces arm `arm`'s feature.
///
/// # Safety
/// `idx` must be live.
#[no_mangle]
pub unsafe extern "C" fn mb_index_update_feature(idx: *mut MbIndex, arm: usize, alpha: f64, beta: f64) -> MbStatus {
    guard(|| {
        let idx = idx.as_mut().ok_or(Fail::Null("index"))?;
        idx.index.update_feature(arm, Feature::new(alpha, beta))?;
        Ok(())
    })
}

/// Number of hitting-set cells, or 0 for a null handle.
///
/// # Safety
/// `idx` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn mb_index_hitting_set_size(idx: *const MbIndex) -> usize {
    idx.as_ref().map_or(0, |i| i.index.hitting_set().len())
}

/// # Safety
/// `idx` must come from [`mb_index_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mb_index_free(idx: *mut MbIndex) {
    if !idx.is_null() {
        drop(Box::from_raw(idx));
    }
}

/// Simulates two-point arms with the given means on `[a, b]` for `horizon`
/// rounds. Writes the final pseudo-regret to `out_final_regret`; if
/// `out_cum_regret` is non-null it must hold `horizon` values and receives
/// the cumulative regret per round.
///
/// # Safety
/// `means` must hold `len` values; output pointers as described.
#[no_mangle]
pub unsafe extern "C" fn mb_run_experiment(
    m: *const MbMatroid,
    algo: MbAlgo,
    horizon: u64,
    a: f64,
    b: f64,
    means: *const f64,
    len: usize,
    seed: u64,
    out_final_regret: *mut f64,
    out_cum_regret: *mut f64,
) -> MbStatus {
    guard(|| {
        let m = m.as_ref().ok_or(Fail::Null("matroid"))?;
        if out_final_regret.is_null() {
            return Err(Fail::Null("out_final_regret"));
        }
        let mu = slice(means, len, "means")?;
        let algo = match algo {
            MbAlgo::Cucb => Algo::Cucb,
            MbAlgo::FasterCucb => Algo::FasterCucb,
            MbAlgo::LazyHeap => Algo::LazyHeap,
        };
        let range = RewardRange::new(a, b)?;
        let cfg = RunConfig::two_point((*m.spec).clone(), algo, horizon, range, mu, seed)?;
        let trace = run_experiment(&cfg)?;
        *out_final_regret = trace.final_regret();
        if !out_cum_regret.is_null() {
            ptr::copy_nonoverlapping(trace.cumulative_regret.as_ptr(), out_cum_regret, trace.cumulative_regret.len());
        }
        Ok(())
    })
}
