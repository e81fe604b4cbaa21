//! Exact misidentification probabilities for small Bernoulli instances.
//!
//! Every algorithm here only looks at per-arm reward sums, so the run is a
//! Markov chain over (round, alive set, sums). The chain is expanded with
//! binomial weights and memoized; nothing is sampled.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algorithms::{halving_allocation, halving_rounds, select_best, select_lowest, ucb_e_choose};
use crate::complexity::h1;
use crate::env::BanditEnv;
use crate::error::{Error, Result};
use crate::schedule::nseqel_schedule;
use crate::sideobs::{block_schedule_power, worst_block, BlockPartition};

use super::experiment::Algorithm;

/// Cap on memoized states plus enumerated branches.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactOracleResult {
    pub probability: f64,
    /// States and branches visited.
    pub enumeration_size: u64,
}

/// `P(recommendation != best arm)` for `alg` on `env` with budget `T`.
pub fn exact_misid_probability(
    env: &BanditEnv,
    alg: &Algorithm,
    budget: u64,
) -> Result<ExactOracleResult> {
    exact_misid_probability_with_limit(env, alg, budget, ENUMERATION_LIMIT)
}

pub fn exact_misid_probability_with_limit(
    env: &BanditEnv,
    alg: &Algorithm,
    budget: u64,
    limit: u64,
) -> Result<ExactOracleResult> {
    let k = env.num_arms();
    let mut counter = Counter { used: 0, limit };
    let probability = match alg {
        Algorithm::NSeqEl { p } => elimination(env, nseqel_plan(k, budget, *p)?, &mut counter)?,
        Algorithm::SuccRej => elimination(env, nseqel_plan(k, budget, 1.0)?, &mut counter)?,
        Algorithm::SeqHalv => elimination(env, halving_plan(k, budget)?, &mut counter)?,
        Algorithm::UcbE { c } => {
            if budget < k as u64 {
                return Err(Error::BudgetTooSmall {
                    budget,
                    required: k as u64,
                });
            }
            let a = c * budget as f64 / h1(&env.gaps())?;
            let mut dp = UcbDp {
                means: env.means(),
                best: env.best_arm(),
                budget,
                a,
                memo: HashMap::new(),
                counter: &mut counter,
            };
            dp.value(vec![0; k], vec![0; k])?
        }
        Algorithm::Block { blocks, p } => {
            let part = BlockPartition::parse(blocks)?;
            if part.num_arms() != k {
                return Err(Error::ArmCountMismatch {
                    expected: part.num_arms(),
                    actual: k,
                });
            }
            let sched = block_schedule_power(part.num_blocks(), budget, *p)?;
            let mut dp = BlockDp {
                means: env.means(),
                best: env.best_arm(),
                blocks: part.blocks(),
                targets: sched.targets(),
                memo: HashMap::new(),
                counter: &mut counter,
            };
            let alive: Vec<usize> = (0..part.num_blocks()).collect();
            dp.value(0, alive, vec![0; k])?
        }
    };
    Ok(ExactOracleResult {
        probability,
        enumeration_size: counter.used,
    })
}

struct Counter {
    used: u64,
    limit: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::EnumerationLimit {
                needed: self.used,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

/// `P(Bin(n, mu) = j)` for `j = 0..=n`.
fn binomial_pmf(n: u64, mu: f64) -> Vec<f64> {
    let mut coef = 1.0;
    (0..=n)
        .map(|j| {
            let v = coef * mu.powi(j as i32) * (1.0 - mu).powi((n - j) as i32);
            coef = coef * (n - j) as f64 / (j + 1) as f64;
            v
        })
        .collect()
}

/// Calls `visit(outcome, weight)` for every joint outcome of independent
/// per-arm binomials. Zero-weight outcomes are skipped.
fn for_each_outcome<F>(pmfs: &[&[f64]], counter: &mut Counter, mut visit: F) -> Result<()>
where
    F: FnMut(&[u64], f64, &mut Counter) -> Result<()>,
{
    let mut idx = vec![0u64; pmfs.len()];
    loop {
        counter.tick()?;
        let w: f64 = idx.iter().zip(pmfs).map(|(&j, pmf)| pmf[j as usize]).product();
        if w > 0.0 {
            visit(&idx, w, counter)?;
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(());
            }
            idx[pos] += 1;
            if (idx[pos] as usize) < pmfs[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Clone, Copy)]
struct RoundPlan {
    /// Fresh pulls per alive arm.
    inc: u64,
    eliminate: usize,
    /// Forget earlier samples before this round.
    reset: bool,
}

fn nseqel_plan(k: usize, budget: u64, p: f64) -> Result<Vec<RoundPlan>> {
    let sched = nseqel_schedule(k, budget, p)?;
    Ok((0..sched.rounds())
        .map(|r| RoundPlan {
            inc: sched.increment(r),
            eliminate: sched.eliminations()[r],
            reset: false,
        })
        .collect())
}

fn halving_plan(k: usize, budget: u64) -> Result<Vec<RoundPlan>> {
    if k < 2 {
        return Err(Error::TooFewArms(k));
    }
    if halving_allocation(budget, k, k) == 0 {
        return Err(Error::BudgetTooSmall {
            budget,
            required: (k * halving_rounds(k)) as u64,
        });
    }
    let mut alive = k;
    Ok((0..halving_rounds(k))
        .map(|_| {
            let plan = RoundPlan {
                inc: halving_allocation(budget, k, alive),
                eliminate: alive / 2,
                reset: true,
            };
            alive -= alive / 2;
            plan
        })
        .collect())
}

fn elimination(env: &BanditEnv, plan: Vec<RoundPlan>, counter: &mut Counter) -> Result<f64> {
    let k = env.num_arms();
    let mut dp = ElimDp {
        means: env.means(),
        best: env.best_arm(),
        plan,
        memo: HashMap::new(),
        pmfs: HashMap::new(),
        counter,
    };
    dp.value(0, (0..k).collect(), vec![0; k], vec![0; k])
}

type ElimKey = (usize, Vec<usize>, Vec<u64>);

struct ElimDp<'a> {
    means: &'a [f64],
    best: usize,
    plan: Vec<RoundPlan>,
    memo: HashMap<ElimKey, f64>,
    pmfs: HashMap<(usize, u64), Vec<f64>>,
    counter: &'a mut Counter,
}

impl ElimDp<'_> {
    /// `sums` and `counts` are indexed by arm; only alive entries matter.
    fn value(&mut self, r: usize, alive: Vec<usize>, sums: Vec<u64>, counts: Vec<u64>) -> Result<f64> {
        if r == self.plan.len() {
            return Ok(f64::from(u8::from(alive[0] != self.best)));
        }
        let key_sums: Vec<u64> = alive.iter().map(|&a| sums[a]).collect();
        let key = (r, alive.clone(), key_sums);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.counter.tick()?;

        let RoundPlan { inc, eliminate, reset } = self.plan[r];
        for &a in &alive {
            let mu = self.means[a];
            self.pmfs.entry((a, inc)).or_insert_with(|| binomial_pmf(inc, mu));
        }
        let pmfs: Vec<Vec<f64>> = alive.iter().map(|&a| self.pmfs[&(a, inc)].clone()).collect();
        let refs: Vec<&[f64]> = pmfs.iter().map(Vec::as_slice).collect();

        let mut next = Vec::new();
        for_each_outcome(&refs, self.counter, |outcome, w, _| {
            let mut s = sums.clone();
            let mut c = counts.clone();
            for (&a, &o) in alive.iter().zip(outcome) {
                if reset {
                    s[a] = 0;
                    c[a] = 0;
                }
                s[a] += o;
                c[a] += inc;
            }
            let out = select_lowest(&alive, eliminate, |a| {
                (c[a] > 0).then(|| s[a] as f64 / c[a] as f64)
            });
            let rest: Vec<usize> = alive.iter().copied().filter(|a| out.binary_search(a).is_err()).collect();
            next.push((w, rest, s, c));
            Ok(())
        })?;

        let mut v = 0.0;
        for (w, rest, s, c) in next {
            v += w * self.value(r + 1, rest, s, c)?;
        }
        self.memo.insert(key, v);
        Ok(v)
    }
}

type BlockKey = (usize, Vec<usize>, Vec<u64>);

struct BlockDp<'a> {
    means: &'a [f64],
    best: usize,
    blocks: &'a [Vec<usize>],
    targets: &'a [u64],
    memo: HashMap<BlockKey, f64>,
    counter: &'a mut Counter,
}

impl BlockDp<'_> {
    fn value(&mut self, r: usize, alive: Vec<usize>, sums: Vec<u64>) -> Result<f64> {
        let arms: Vec<usize> = alive.iter().flat_map(|&b| self.blocks[b].iter().copied()).collect();
        let key = (r, alive.clone(), arms.iter().map(|&a| sums[a]).collect());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.counter.tick()?;

        let count = self.targets[r];
        let inc = count - if r == 0 { 0 } else { self.targets[r - 1] };
        let pmfs: Vec<Vec<f64>> = arms.iter().map(|&a| binomial_pmf(inc, self.means[a])).collect();
        let refs: Vec<&[f64]> = pmfs.iter().map(Vec::as_slice).collect();
        let last = r + 1 == self.targets.len();
        let (blocks, best) = (self.blocks, self.best);
        let mean = |s: &[u64], a: usize| (count > 0).then(|| s[a] as f64 / count as f64);

        let mut v = 0.0;
        let mut next = Vec::new();
        for_each_outcome(&refs, self.counter, |outcome, w, _| {
            let mut s = sums.clone();
            for (&a, &o) in arms.iter().zip(outcome) {
                s[a] += o;
            }
            if last {
                let rec = select_best(&blocks[alive[0]], |a| mean(&s, a));
                v += w * f64::from(u8::from(rec != best));
            } else {
                let worst = worst_block(blocks, &alive, |a| mean(&s, a));
                let rest: Vec<usize> = alive.iter().copied().filter(|&b| b != worst).collect();
                next.push((w, rest, s));
            }
            Ok(())
        })?;
        for (w, rest, s) in next {
            v += w * self.value(r + 1, rest, s)?;
        }
        self.memo.insert(key, v);
        Ok(v)
    }
}

struct UcbDp<'a> {
    means: &'a [f64],
    best: usize,
    budget: u64,
    a: f64,
    memo: HashMap<(Vec<u64>, Vec<u64>), f64>,
    counter: &'a mut Counter,
}

impl UcbDp<'_> {
    fn value(&mut self, counts: Vec<u64>, sums: Vec<u64>) -> Result<f64> {
        let k = counts.len();
        let step: u64 = counts.iter().sum();
        let mean = |a: usize| (counts[a] > 0).then(|| sums[a] as f64 / counts[a] as f64);
        if step == self.budget {
            let all: Vec<usize> = (0..k).collect();
            return Ok(f64::from(u8::from(select_best(&all, mean) != self.best)));
        }
        let key = (counts.clone(), sums.clone());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.counter.tick()?;

        let arm = if step < k as u64 {
            step as usize
        } else {
            let fsums: Vec<f64> = sums.iter().map(|&s| s as f64).collect();
            ucb_e_choose(&counts, &fsums, self.a)
        };
        let mu = self.means[arm];
        let mut v = 0.0;
        for (reward, w) in [(0, 1.0 - mu), (1, mu)] {
            if w > 0.0 {
                self.counter.tick()?;
                let mut c = counts.clone();
                let mut s = sums.clone();
                c[arm] += 1;
                s[arm] += reward;
                v += w * self.value(c, s)?;
            }
        }
        self.memo.insert(key, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn env(means: &[f64]) -> BanditEnv {
        BanditEnv::bernoulli(means.to_vec()).unwrap()
    }

    #[test]
    fn pmf_sums_to_one() {
        for (n, mu) in [(0, 0.3), (1, 0.5), (7, 0.25), (40, 0.7), (5, 0.0), (5, 1.0)] {
            let pmf = binomial_pmf(n, mu);
            assert_eq!(pmf.len(), n as usize + 1);
            assert_relative_eq!(pmf.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
        assert_relative_eq!(binomial_pmf(4, 0.5)[2], 6.0 / 16.0);
    }

    #[test]
    fn deterministic_means_give_zero() {
        let e = env(&[1.0, 0.0, 0.0]);
        for alg in Algorithm::standard_lineup() {
            let r = exact_misid_probability(&e, &alg, 12).unwrap();
            assert_eq!(r.probability, 0.0, "{alg}");
        }
    }

    #[test]
    fn two_arm_single_pull_each() {
        // One sample each (T = 4 for Succ-Rej, T = 2 for Seq-Halv). Ties go
        // to arm 0, so an error needs arm 0 to give 0 and arm 1 to give 1.
        let e = env(&[0.7, 0.6]);
        let r = exact_misid_probability(&e, &Algorithm::SuccRej, 4).unwrap();
        assert_relative_eq!(r.probability, 0.3 * 0.6, epsilon = 1e-15);
        let r = exact_misid_probability(&e, &Algorithm::SeqHalv, 2).unwrap();
        assert_relative_eq!(r.probability, 0.3 * 0.6, epsilon = 1e-15);
    }

    #[test]
    fn ucb_with_budget_k_is_one_pull_each() {
        let e = env(&[0.5, 0.8, 0.3]);
        let r = exact_misid_probability(&e, &Algorithm::UcbE { c: 1.0 }, 3).unwrap();
        // Arm 1 is recommended iff it draws 1 and arm 0 draws 0.
        assert_relative_eq!(r.probability, 1.0 - 0.8 * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn limit_is_enforced() {
        let e = env(&[0.7, 0.6, 0.5, 0.4]);
        let err = exact_misid_probability_with_limit(&e, &Algorithm::SuccRej, 60, 100).unwrap_err();
        assert!(matches!(err, Error::EnumerationLimit { limit: 100, .. }));
    }

    #[test]
    fn block_singletons_match_nseqel() {
        let e = env(&[0.7, 0.55, 0.4]);
        for p in [1.0, 1.5] {
            let a = exact_misid_probability(&e, &Algorithm::Block { blocks: "1x3".into(), p }, 15).unwrap();
            let b = exact_misid_probability(&e, &Algorithm::NSeqEl { p }, 15).unwrap();
            assert_relative_eq!(a.probability, b.probability, epsilon = 1e-12);
        }
    }

    #[test]
    fn block_arm_mismatch() {
        let e = env(&[0.7, 0.55, 0.4]);
        assert!(exact_misid_probability(&e, &Algorithm::Block { blocks: "2x2".into(), p: 1.0 }, 15).is_err());
    }
}
