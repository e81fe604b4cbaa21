//! Complexity measures and misidentification bounds.
//!
//! Gap-based measures sort the gaps internally, so an index `i` below always
//! refers to the `i`-th best arm (1-based, best arm is `i = 1`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env::GapVector;
use crate::error::{Error, Result};
use crate::schedule::EliminationSchedule;

mod advisor;

pub use advisor::{
    advise_p, classify_regime, FkCondition, Interval, PAdvice, Regime, RegimeSpec, DEFAULT_EPSILON,
};

/// `H1 = sum_{i >= 2} 1 / Delta_i^2`.
pub fn h1(gaps: &GapVector) -> Result<f64> {
    let sorted = gaps.sorted_checked()?;
    Ok(sorted[1..].iter().map(|d| 1.0 / (d * d)).sum())
}

/// `H(p) = max_{i >= 2} i^p / Delta_i^2`.
pub fn h_p(gaps: &GapVector, p: f64) -> Result<f64> {
    let sorted = gaps.sorted_checked()?;
    Ok(h_p_sorted(&sorted, sorted.len(), p))
}

/// `H(p)` restricted to the `top` best arms.
fn h_p_sorted(sorted: &[f64], top: usize, p: f64) -> f64 {
    sorted[1..top]
        .iter()
        .enumerate()
        .map(|(j, d)| ((j + 2) as f64).powf(p) / (d * d))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `H2 = H(1)`.
pub fn h2(gaps: &GapVector) -> Result<f64> {
    h_p(gaps, 1.0)
}

/// `C_p = 2^{-p} + sum_{r=2}^{K} r^{-p}`.
pub fn c_p(num_arms: usize, p: f64) -> f64 {
    2f64.powf(-p) + (2..=num_arms).map(|r| (r as f64).powf(-p)).sum::<f64>()
}

/// `0.5 + sum_{i=2}^{K} 1/i`, which equals `C_1`.
pub fn logbar(num_arms: usize) -> f64 {
    0.5 + (2..=num_arms).map(|i| 1.0 / i as f64).sum::<f64>()
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter { name: "p", value: p })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub num_arms: usize,
    pub h1: f64,
    pub h2: f64,
    /// Keyed by `p` formatted with `{}`.
    pub h_p: BTreeMap<String, f64>,
    pub c_p: BTreeMap<String, f64>,
    pub logbar: f64,
}

pub fn complexity_report(gaps: &GapVector, ps: &[f64]) -> Result<ComplexityReport> {
    let k = gaps.len();
    let mut hp = BTreeMap::new();
    let mut cp = BTreeMap::new();
    for &p in ps {
        check_p(p)?;
        hp.insert(format!("{p}"), h_p(gaps, p)?);
        cp.insert(format!("{p}"), c_p(k, p));
    }
    Ok(ComplexityReport {
        num_arms: k,
        h1: h1(gaps)?,
        h2: h2(gaps)?,
        h_p: hp,
        c_p: cp,
        logbar: logbar(k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum BoundAlgorithm {
    SuccRej,
    SeqHalv,
    NSeqEl { p: f64 },
}

impl std::str::FromStr for BoundAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "succrej" | "succ-rej" => Ok(Self::SuccRej),
            "seqhalv" | "seq-halv" => Ok(Self::SeqHalv),
            "nseqel" | "n-seq-el" => {
                let arg = arg.trim_start_matches("p=");
                let p = arg
                    .parse::<f64>()
                    .map_err(|_| Error::Unknown(format!("nseqel needs p, got {s:?}")))?;
                Ok(Self::NSeqEl { p })
            }
            _ => Err(Error::Unknown(s.to_string())),
        }
    }
}

/// A bound of the form `beta * exp(-T / alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub algorithm: BoundAlgorithm,
    pub alpha: f64,
    pub beta: f64,
}

impl BoundSpec {
    pub fn eval(&self, budget: f64) -> f64 {
        self.beta * (-budget / self.alpha).exp()
    }
}

/// The `(alpha, beta)` pair of the summary table for each algorithm.
pub fn table1_bound(algorithm: BoundAlgorithm, gaps: &GapVector) -> Result<BoundSpec> {
    let k = gaps.len() as f64;
    let (alpha, beta) = match algorithm {
        BoundAlgorithm::SuccRej => {
            let alpha = h2(gaps)? * logbar(gaps.len());
            (alpha, 0.5 * k * (k - 1.0) * (k / alpha).exp())
        }
        BoundAlgorithm::SeqHalv => (8.0 * h2(gaps)? * k.log2(), 3.0 * k.log2()),
        BoundAlgorithm::NSeqEl { p } => {
            check_p(p)?;
            let alpha = h_p(gaps, p)? * c_p(gaps.len(), p);
            (alpha, (k - 1.0) * (k / alpha).exp())
        }
    };
    Ok(BoundSpec {
        algorithm,
        alpha,
        beta,
    })
}

/// `(K-1) exp(-2 (T-K) / (C_p H(p)))`, the N-Seq-El guarantee.
pub fn proposition1_bound(gaps: &GapVector, p: f64, budget: u64) -> Result<f64> {
    check_p(p)?;
    let k = gaps.len();
    let slack = budget as f64 - k as f64;
    Ok((k as f64 - 1.0) * (-2.0 * slack / (c_p(k, p) * h_p(gaps, p)?)).exp())
}

/// `prefactor * exp(-(T - K) * rate)` for a general elimination schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Bound {
    /// `R * max_r b_r`.
    pub prefactor: f64,
    /// `min_r 2 Delta_{g_{r+1}+1}^2 / z_r`, divided by `C`.
    pub rate: f64,
    pub num_arms: usize,
}

impl Theorem1Bound {
    pub fn eval(&self, budget: u64) -> f64 {
        let slack = budget as f64 - self.num_arms as f64;
        self.prefactor * (-slack * self.rate).exp()
    }
}

/// Misidentification bound for the general elimination engine on `sched`.
pub fn theorem1_bound(sched: &EliminationSchedule, gaps: &GapVector) -> Result<Theorem1Bound> {
    if gaps.len() != sched.num_arms() {
        return Err(Error::ArmCountMismatch {
            expected: sched.num_arms(),
            actual: gaps.len(),
        });
    }
    let sorted = gaps.sorted_checked()?;
    let rounds = sched.rounds();
    let b = sched.eliminations();
    let z = sched.weights();
    let mut min_term = f64::INFINITY;
    for r in 0..rounds {
        // Survivors after round r; the weakest arm that could knock the best
        // one out is the (g_{r+1} + 1)-th best.
        let survivors = sched.alive()[r] - b[r];
        let d = sorted[survivors];
        min_term = min_term.min(2.0 * d * d / z[r]);
    }
    let max_b = *b.iter().max().expect("nonempty") as f64;
    Ok(Theorem1Bound {
        prefactor: rounds as f64 * max_b,
        rate: min_term / sched.normalizer(),
        num_arms: sched.num_arms(),
    })
}

/// `H(M, p)`: `H(p)` over the best `top` arms only. Needs `top >= 2`.
pub fn h_top(gaps: &GapVector, top: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    let sorted = gaps.sorted_checked()?;
    if top < 2 || top > sorted.len() {
        return Err(Error::OutOfRange(format!("top-arm count {top}")));
    }
    Ok(h_p_sorted(&sorted, top, p))
}
