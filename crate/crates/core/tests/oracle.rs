use seqelim::harness::{count_errors, exact_misid_probability, Algorithm};
use seqelim::BanditEnv;

/// Binomial pmf by repeated convolution with one Bernoulli.
fn pmf_by_convolution(n: usize, mu: f64) -> Vec<f64> {
    let mut pmf = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; pmf.len() + 1];
        for (j, &w) in pmf.iter().enumerate() {
            next[j] += w * (1.0 - mu);
            next[j + 1] += w * mu;
        }
        pmf = next;
    }
    pmf
}

/// P(S_1 > S_0) with `n` samples each: arm 1 wins only strictly.
fn strict_loss(n: usize, mu0: f64, mu1: f64) -> f64 {
    let a = pmf_by_convolution(n, mu0);
    let b = pmf_by_convolution(n, mu1);
    let mut p = 0.0;
    for (s0, &w0) in a.iter().enumerate() {
        for &w1 in &b[s0 + 1..] {
            p += w0 * w1;
        }
    }
    p
}

#[test]
fn two_arm_elimination_matches_convolution() {
    let env = BanditEnv::bernoulli(vec![0.7, 0.6]).unwrap();
    for t in [2u64, 3, 10, 20, 21, 40] {
        let n = (t as usize - 2).div_ceil(2);
        let expect = if n == 0 { 0.0 } else { strict_loss(n, 0.7, 0.6) };
        for alg in [Algorithm::SuccRej, Algorithm::NSeqEl { p: 0.6 }, Algorithm::NSeqEl { p: 2.0 }] {
            let got = exact_misid_probability(&env, &alg, t).unwrap().probability;
            assert!((got - expect).abs() < 1e-12, "{alg} T={t}: {got} vs {expect}");
        }
        let got = exact_misid_probability(&env, &Algorithm::SeqHalv, t).unwrap().probability;
        let expect = strict_loss(t as usize / 2, 0.7, 0.6);
        assert!((got - expect).abs() < 1e-12, "seqhalv T={t}");
    }
}

#[test]
fn three_arm_oracle_agrees_with_monte_carlo() {
    let env = BanditEnv::bernoulli(vec![0.6, 0.5, 0.45]).unwrap();
    let runs = 40_000;
    for alg in [
        Algorithm::NSeqEl { p: 1.5 },
        Algorithm::SeqHalv,
        Algorithm::UcbE { c: 2.0 },
        Algorithm::Block { blocks: "1,2".into(), p: 1.0 },
    ] {
        let exact = exact_misid_probability(&env, &alg, 16).unwrap().probability;
        let freq = count_errors(&env, &alg, 16, runs, 2024).unwrap() as f64 / runs as f64;
        let sigma = (exact * (1.0 - exact) / runs as f64).sqrt();
        assert!((freq - exact).abs() < 4.0 * sigma, "{alg}: {freq} vs {exact}");
    }
}
