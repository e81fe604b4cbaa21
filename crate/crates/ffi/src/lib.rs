//! C ABI over `seqelim`.
//!
//! Every fallible function returns a [`SeqelimStatus`] and writes results
//! through out-pointers. On failure, [`seqelim_last_error`] describes the
//! most recent error on the calling thread. Environments are opaque
//! handles created by `seqelim_env_*` constructors and released with
//! [`seqelim_env_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use seqelim::complexity::{advise_p, c_p, h1, h2, h_p, FkCondition};
use seqelim::harness::{
    count_errors, default_budget, exact_misid_probability, make_setup, Algorithm, SetupId, SetupKind,
};
use seqelim::{BanditEnv, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqelimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetTooSmall = 3,
    EnumerationLimit = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque bandit instance.
pub struct SeqelimEnv {
    inner: BanditEnv,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeqelimInterval {
    pub lo: f64,
    pub hi: f64,
    pub hi_closed: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeqelimAdvice {
    /// 0: few competitive arms, 1: intermediate, 2: many.
    pub condition: i32,
    pub recommended: SeqelimInterval,
    pub interpolated: SeqelimInterval,
    pub suggested: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure {
    status: SeqelimStatus,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::BudgetTooSmall { .. } | Error::BudgetOverrun { .. } => SeqelimStatus::BudgetTooSmall,
            Error::EnumerationLimit { .. } => SeqelimStatus::EnumerationLimit,
            _ => SeqelimStatus::InvalidArgument,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure {
        status: SeqelimStatus::NullPointer,
        message: format!("{what} is null"),
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F>(f: F) -> SeqelimStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SeqelimStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(_) => {
            set_last_error("internal panic");
            SeqelimStatus::Panic
        }
    }
}

unsafe fn env_ref<'a>(env: *const SeqelimEnv) -> Result<&'a BanditEnv, Failure> {
    // SAFETY: caller passes a live handle from a constructor, or null.
    unsafe { env.as_ref() }.map(|e| &e.inner).ok_or_else(|| null("env"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null and, by contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, by contract, NUL-terminated.
    unsafe { CStr::from_ptr(s) }.to_str().map_err(|_| Failure {
        status: SeqelimStatus::InvalidUtf8,
        message: format!("{what} is not UTF-8"),
    })
}

unsafe fn alg_arg(s: *const c_char) -> Result<Algorithm, Failure> {
    Ok(unsafe { str_arg(s, "algorithm") }?.parse::<Algorithm>()?)
}

fn boxed(env: BanditEnv) -> *mut SeqelimEnv {
    Box::into_raw(Box::new(SeqelimEnv { inner: env }))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn seqelim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Bernoulli instance with `len` means in `[0, 1]` and a unique best arm.
///
/// # Safety
/// `means` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_env_new(
    means: *const f64,
    len: usize,
    out: *mut *mut SeqelimEnv,
) -> SeqelimStatus {
    guard(|| {
        if means.is_null() {
            return Err(null("means"));
        }
        // SAFETY: caller guarantees `len` readable doubles.
        let means = unsafe { std::slice::from_raw_parts(means, len) }.to_vec();
        let env = BanditEnv::bernoulli(means)?;
        unsafe { write_out(out, boxed(env)) }
    })
}

/// Benchmark setup by name (`"1"`..`"6"`, `"setup4"`, `"geo7"`) and arm count.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_env_from_setup(
    name: *const c_char,
    num_arms: usize,
    out: *mut *mut SeqelimEnv,
) -> SeqelimStatus {
    guard(|| {
        let kind: SetupKind = unsafe { str_arg(name, "name") }?.parse()?;
        let env = make_setup(SetupId::new(kind, num_arms)?)?;
        unsafe { write_out(out, boxed(env)) }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `env` must come from a constructor here and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn seqelim_env_free(env: *mut SeqelimEnv) {
    if !env.is_null() {
        // SAFETY: created by `Box::into_raw` in `boxed`.
        drop(unsafe { Box::from_raw(env) });
    }
}

/// # Safety
/// `env` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_env_num_arms(env: *const SeqelimEnv, out: *mut usize) -> SeqelimStatus {
    guard(|| unsafe { write_out(out, env_ref(env)?.num_arms()) })
}

/// # Safety
/// `env` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_env_best_arm(env: *const SeqelimEnv, out: *mut usize) -> SeqelimStatus {
    guard(|| unsafe { write_out(out, env_ref(env)?.best_arm()) })
}

/// `H1 = sum 1/Delta_i^2`.
///
/// # Safety
/// `env` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_h1(env: *const SeqelimEnv, out: *mut f64) -> SeqelimStatus {
    guard(|| unsafe { write_out(out, h1(&env_ref(env)?.gaps())?) })
}

/// `H2 = max_i i / Delta_(i)^2`.
///
/// # Safety
/// `env` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_h2(env: *const SeqelimEnv, out: *mut f64) -> SeqelimStatus {
    guard(|| unsafe { write_out(out, h2(&env_ref(env)?.gaps())?) })
}

/// `H(p) = max_i i^p / Delta_(i)^2`.
///
/// # Safety
/// `env` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_h_p(env: *const SeqelimEnv, p: f64, out: *mut f64) -> SeqelimStatus {
    guard(|| unsafe { write_out(out, h_p(&env_ref(env)?.gaps(), p)?) })
}

/// `C_p = 2^-p + sum_{r=2}^{K} r^-p`. NaN for `K < 2` or `p <= 0`.
#[no_mangle]
pub extern "C" fn seqelim_c_p(num_arms: usize, p: f64) -> f64 {
    if num_arms < 2 || !(p > 0.0 && p.is_finite()) {
        return f64::NAN;
    }
    c_p(num_arms, p)
}

/// `ceil(H1)`, the budget used by the benchmarks.
///
/// # Safety
/// `env` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_default_budget(env: *const SeqelimEnv, out: *mut u64) -> SeqelimStatus {
    guard(|| unsafe { write_out(out, default_budget(env_ref(env)?)?) })
}

/// One run of `alg` (e.g. `"nseqel:p=1.7"`, `"seqhalv"`, `"ucbe:c=2"`);
/// writes the recommended arm.
///
/// # Safety
/// `env` must be a live handle, `alg` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_run(
    env: *const SeqelimEnv,
    alg: *const c_char,
    budget: u64,
    seed: u64,
    out: *mut usize,
) -> SeqelimStatus {
    guard(|| {
        let env = unsafe { env_ref(env) }?;
        let alg = unsafe { alg_arg(alg) }?;
        let rec = alg.run(env, budget, seed)?;
        unsafe { write_out(out, rec.recommended) }
    })
}

/// Misidentification frequency over `runs` seeded runs.
///
/// # Safety
/// `env` must be a live handle, `alg` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_misid_frequency(
    env: *const SeqelimEnv,
    alg: *const c_char,
    budget: u64,
    runs: u64,
    seed: u64,
    out: *mut f64,
) -> SeqelimStatus {
    guard(|| {
        let env = unsafe { env_ref(env) }?;
        let alg = unsafe { alg_arg(alg) }?;
        if runs == 0 {
            return Err(Error::OutOfRange("runs = 0".into()).into());
        }
        let errors = count_errors(env, &alg, budget, runs, seed)?;
        unsafe { write_out(out, errors as f64 / runs as f64) }
    })
}

/// Exact misidentification probability (small instances only).
///
/// # Safety
/// `env` must be a live handle, `alg` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_exact_misid(
    env: *const SeqelimEnv,
    alg: *const c_char,
    budget: u64,
    out: *mut f64,
) -> SeqelimStatus {
    guard(|| {
        let env = unsafe { env_ref(env) }?;
        let alg = unsafe { alg_arg(alg) }?;
        let r = exact_misid_probability(env, &alg, budget)?;
        unsafe { write_out(out, r.probability) }
    })
}

/// Range of `p` for `num_arms` arms with `competitive` competitive ones.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqelim_advise_p(
    num_arms: usize,
    competitive: f64,
    out: *mut SeqelimAdvice,
) -> SeqelimStatus {
    guard(|| {
        let a = advise_p(num_arms, competitive)?;
        let conv = |i: seqelim::complexity::Interval| SeqelimInterval {
            lo: i.lo,
            hi: i.hi,
            hi_closed: i.hi_closed,
        };
        let advice = SeqelimAdvice {
            condition: match a.condition {
                FkCondition::Few => 0,
                FkCondition::Intermediate => 1,
                FkCondition::Many => 2,
            },
            recommended: conv(a.recommended),
            interpolated: conv(a.interpolated),
            suggested: a.suggest(),
        };
        unsafe { write_out(out, advice) }
    })
}
