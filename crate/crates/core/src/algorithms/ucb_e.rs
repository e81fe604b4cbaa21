use crate::env::{AccumulatorMode, ArmSampleAccumulator, RewardSource};
use crate::error::{Error, Result};

use super::{select_best, AlgorithmId, RoundRecord, RunRecord};

/// Arm UCB-E pulls next: `argmax_i mean_i + sqrt(a / n_i)`, smallest index on
/// ties. Every arm must have at least one sample.
pub fn ucb_e_choose(counts: &[u64], sums: &[f64], a: f64) -> usize {
    let mut best = 0;
    let mut best_index = f64::NEG_INFINITY;
    for (arm, (&n, &s)) in counts.iter().zip(sums).enumerate() {
        let n = n as f64;
        let index = s / n + (a / n).sqrt();
        if index > best_index {
            best = arm;
            best_index = index;
        }
    }
    best
}

/// UCB-E with exploration parameter `a`, spending exactly `T` pulls.
///
/// Recommends the largest empirical mean at the horizon.
pub fn run_ucb_e<S: RewardSource>(source: &mut S, budget: u64, a: f64) -> Result<RunRecord> {
    if !(a > 0.0 && !a.is_nan()) {
        return Err(Error::NonPositiveParameter { name: "a", value: a });
    }
    let k = source.num_arms();
    if budget < k as u64 {
        return Err(Error::BudgetTooSmall {
            budget,
            required: k as u64,
        });
    }
    let mut acc = ArmSampleAccumulator::new(k, AccumulatorMode::Cumulative);
    let mut sums = vec![0.0; k];
    for arm in 0..k {
        let r = source.pull(arm);
        acc.record(arm, r);
        sums[arm] += r;
    }
    for _ in k as u64..budget {
        let arm = ucb_e_choose(acc.counts(), &sums, a);
        let r = source.pull(arm);
        acc.record(arm, r);
        sums[arm] += r;
    }
    let all: Vec<usize> = (0..k).collect();
    let recommended = select_best(&all, |i| acc.mean(i));
    Ok(RunRecord {
        algorithm: AlgorithmId::UcbE { a },
        recommended,
        // Adaptive sampling has no uniform per-round increment; see
        // `samples_per_arm` for the allocation.
        rounds: vec![RoundRecord {
            alive: all.clone(),
            increment: 0,
            eliminated: all.into_iter().filter(|&i| i != recommended).collect(),
        }],
        total_pulls: budget,
        samples_per_arm: acc.counts().to_vec(),
        budget,
        seed: source.seed(),
    })
}
