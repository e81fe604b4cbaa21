use crate::env::{AccumulatorMode, ArmSampleAccumulator, RewardSource};
use crate::error::{Error, Result};

use super::{select_lowest, AlgorithmId, RoundRecord, RunRecord};

/// `ceil(log2 K)` for `K >= 2`.
pub fn halving_rounds(num_arms: usize) -> usize {
    debug_assert!(num_arms >= 2);
    (usize::BITS - (num_arms - 1).leading_zeros()) as usize
}

/// Fresh pulls per surviving arm in a round with `alive` arms:
/// `floor(T / (alive * ceil(log2 K)))`.
pub fn halving_allocation(budget: u64, num_arms: usize, alive: usize) -> u64 {
    budget / (alive as u64 * halving_rounds(num_arms) as u64)
}

/// Sequential Halving.
///
/// Each round samples the survivors uniformly with statistics reset, then
/// keeps the `ceil(|S|/2)` best per-round averages.
pub fn run_seq_halve<S: RewardSource>(source: &mut S, budget: u64) -> Result<RunRecord> {
    let k = source.num_arms();
    if k < 2 {
        return Err(Error::TooFewArms(k));
    }
    let rounds_total = halving_rounds(k);
    if halving_allocation(budget, k, k) == 0 {
        return Err(Error::BudgetTooSmall {
            budget,
            required: (k * rounds_total) as u64,
        });
    }

    let mut acc = ArmSampleAccumulator::new(k, AccumulatorMode::PerRoundReset);
    let mut samples = vec![0u64; k];
    let mut alive: Vec<usize> = (0..k).collect();
    let mut rounds = Vec::with_capacity(rounds_total);
    let mut total = 0;

    for _ in 0..rounds_total {
        acc.start_round();
        let inc = halving_allocation(budget, k, alive.len());
        for &arm in &alive {
            for _ in 0..inc {
                acc.record(arm, source.pull(arm));
            }
            samples[arm] += inc;
        }
        total += inc * alive.len() as u64;
        let out = select_lowest(&alive, alive.len() / 2, |a| acc.mean(a));
        let before = alive.clone();
        alive.retain(|a| out.binary_search(a).is_err());
        rounds.push(RoundRecord {
            alive: before,
            increment: inc,
            eliminated: out,
        });
    }
    debug_assert_eq!(alive.len(), 1);

    Ok(RunRecord {
        algorithm: AlgorithmId::SeqHalv,
        recommended: alive[0],
        rounds,
        total_pulls: total,
        samples_per_arm: samples,
        budget,
        seed: source.seed(),
    })
}
