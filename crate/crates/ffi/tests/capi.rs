use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use seqelim_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(seqelim_last_error()) }.to_string_lossy().into_owned()
}

fn env_from(means: &[f64]) -> *mut SeqelimEnv {
    let mut env = ptr::null_mut();
    let status = unsafe { seqelim_env_new(means.as_ptr(), means.len(), &mut env) };
    assert_eq!(status, SeqelimStatus::Ok, "{}", last_error());
    env
}

#[test]
fn env_lifecycle_and_measures() {
    let env = env_from(&[0.7, 0.6, 0.6, 0.6]);
    let (mut k, mut best, mut h1, mut h2, mut hp, mut t) = (0usize, 9usize, 0.0, 0.0, 0.0, 0u64);
    unsafe {
        assert_eq!(seqelim_env_num_arms(env, &mut k), SeqelimStatus::Ok);
        assert_eq!(seqelim_env_best_arm(env, &mut best), SeqelimStatus::Ok);
        assert_eq!(seqelim_h1(env, &mut h1), SeqelimStatus::Ok);
        assert_eq!(seqelim_h2(env, &mut h2), SeqelimStatus::Ok);
        assert_eq!(seqelim_h_p(env, 1.0, &mut hp), SeqelimStatus::Ok);
        assert_eq!(seqelim_default_budget(env, &mut t), SeqelimStatus::Ok);
        seqelim_env_free(env);
    }
    assert_eq!((k, best, t), (4, 0, 300));
    assert!((h1 - 300.0).abs() < 1e-9);
    assert!((h2 - 400.0).abs() < 1e-9);
    assert_eq!(hp, h2);
    assert!(last_error().is_empty());
}

#[test]
fn c_p_matches_direct_sum() {
    let direct = 0.5 + 0.5 + 1.0 / 3.0 + 0.25;
    assert!((seqelim_c_p(4, 1.0) - direct).abs() < 1e-15);
    assert!(seqelim_c_p(1, 1.0).is_nan());
    assert!(seqelim_c_p(4, 0.0).is_nan());
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut env = ptr::null_mut();
    let tied = [0.5, 0.5];
    let status = unsafe { seqelim_env_new(tied.as_ptr(), 2, &mut env) };
    assert_eq!(status, SeqelimStatus::InvalidArgument);
    assert!(env.is_null());
    assert!(!last_error().is_empty());

    let status = unsafe { seqelim_env_new(ptr::null(), 2, &mut env) };
    assert_eq!(status, SeqelimStatus::NullPointer);

    let name = CString::new("setup1").unwrap();
    let status = unsafe { seqelim_env_from_setup(name.as_ptr(), 50, &mut env) };
    assert_eq!(status, SeqelimStatus::InvalidArgument);

    let env = env_from(&[0.7, 0.6, 0.5, 0.4, 0.3]);
    let alg = CString::new("seqhalv").unwrap();
    let mut arm = 0;
    let status = unsafe { seqelim_run(env, alg.as_ptr(), 5, 0, &mut arm) };
    assert_eq!(status, SeqelimStatus::BudgetTooSmall);
    let status = unsafe { seqelim_run(env, alg.as_ptr(), 100, 0, ptr::null_mut()) };
    assert_eq!(status, SeqelimStatus::NullPointer);
    let bad = [0xffu8, 0];
    let status = unsafe { seqelim_run(env, bad.as_ptr().cast(), 100, 0, &mut arm) };
    assert_eq!(status, SeqelimStatus::InvalidUtf8);
    let mut x = 0.0;
    let status = unsafe { seqelim_exact_misid(env, CString::new("succrej").unwrap().as_ptr(), 4000, &mut x) };
    assert_eq!(status, SeqelimStatus::EnumerationLimit);
    let status = unsafe { seqelim_h1(ptr::null(), &mut x) };
    assert_eq!(status, SeqelimStatus::NullPointer);
    unsafe { seqelim_env_free(env) };
    unsafe { seqelim_env_free(ptr::null_mut()) };
}

#[test]
fn runs_agree_with_library() {
    let means = [0.6, 0.5, 0.55];
    let env = env_from(&means);
    let alg = CString::new("nseqel:p=1.5").unwrap();
    let core_env = seqelim::BanditEnv::bernoulli(means.to_vec()).unwrap();
    let core_alg: seqelim::harness::Algorithm = "nseqel:p=1.5".parse().unwrap();
    for seed in 0..20 {
        let mut arm = 99;
        unsafe { seqelim_run(env, alg.as_ptr(), 30, seed, &mut arm) };
        assert_eq!(arm, core_alg.run(&core_env, 30, seed).unwrap().recommended);
    }

    let mut f = -1.0;
    let mut exact = -1.0;
    unsafe {
        assert_eq!(seqelim_misid_frequency(env, alg.as_ptr(), 30, 20_000, 3, &mut f), SeqelimStatus::Ok);
        assert_eq!(seqelim_exact_misid(env, alg.as_ptr(), 30, &mut exact), SeqelimStatus::Ok);
        seqelim_env_free(env);
    }
    let sd = (exact * (1.0 - exact) / 20_000.0).sqrt();
    assert!((f - exact).abs() < 4.0 * sd, "{f} vs {exact}");
}

#[test]
fn advice_struct() {
    let mut a = SeqelimAdvice {
        condition: -1,
        recommended: SeqelimInterval { lo: 0.0, hi: 0.0, hi_closed: false },
        interpolated: SeqelimInterval { lo: 0.0, hi: 0.0, hi_closed: false },
        suggested: 0.0,
    };
    assert_eq!(unsafe { seqelim_advise_p(120, 120f64.powf(0.3), &mut a) }, SeqelimStatus::Ok);
    assert_eq!(a.condition, 0);
    assert_eq!((a.recommended.lo, a.recommended.hi, a.recommended.hi_closed), (1.0, 2.0, true));
    assert!((a.interpolated.lo - 0.533).abs() < 1e-3);
    assert_eq!(unsafe { seqelim_advise_p(40, 80.0, &mut a) }, SeqelimStatus::InvalidArgument);
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Test binaries live in target/<profile>/deps; the static library is one
    // level up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libseqelim_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out_dir = tempfile_dir();
    let bin = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("run cc");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok 0.2923 1.7077"));
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("seqelim-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
