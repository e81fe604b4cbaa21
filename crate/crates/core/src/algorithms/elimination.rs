use crate::env::{AccumulatorMode, ArmSampleAccumulator, RewardSource};
use crate::error::{Error, Result};
use crate::schedule::{nseqel_schedule, EliminationSchedule};

use super::{select_lowest, AlgorithmId, RoundRecord, RunRecord};

/// Runs the general elimination engine on `sched`.
///
/// Averages are cumulative over all rounds so far. Round `r` tops every
/// alive arm up to `n_r` pulls and discards the `b_r` lowest averages.
pub fn run_general_elimination<S: RewardSource>(
    source: &mut S,
    sched: &EliminationSchedule,
) -> Result<RunRecord> {
    let record = eliminate(source, sched)?;
    Ok(RunRecord {
        algorithm: AlgorithmId::General {
            rounds: sched.rounds(),
        },
        ..record
    })
}

fn eliminate<S: RewardSource>(source: &mut S, sched: &EliminationSchedule) -> Result<RunRecord> {
    let k = sched.num_arms();
    if source.num_arms() != k {
        return Err(Error::ArmCountMismatch {
            expected: k,
            actual: source.num_arms(),
        });
    }
    let mut acc = ArmSampleAccumulator::new(k, AccumulatorMode::Cumulative);
    let mut alive: Vec<usize> = (0..k).collect();
    let mut rounds = Vec::with_capacity(sched.rounds());
    let mut total = 0;

    for (r, &b) in sched.eliminations().iter().enumerate() {
        let inc = sched.increment(r);
        for &arm in &alive {
            for _ in 0..inc {
                acc.record(arm, source.pull(arm));
            }
        }
        total += inc * alive.len() as u64;
        let out = select_lowest(&alive, b, |a| acc.mean(a));
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
        algorithm: AlgorithmId::General {
            rounds: sched.rounds(),
        },
        recommended: alive[0],
        rounds,
        total_pulls: total,
        samples_per_arm: acc.counts().to_vec(),
        budget: sched.budget(),
        seed: source.seed(),
    })
}

/// Nonlinear Sequential Elimination with exponent `p`.
pub fn run_nseqel<S: RewardSource>(source: &mut S, budget: u64, p: f64) -> Result<RunRecord> {
    let sched = nseqel_schedule(source.num_arms(), budget, p)?;
    let record = eliminate(source, &sched)?;
    Ok(RunRecord {
        algorithm: AlgorithmId::NSeqEl { p },
        ..record
    })
}

/// Successive Rejects. This is exactly [`run_nseqel`] with `p = 1`, and the
/// record says so.
pub fn run_succ_rej<S: RewardSource>(source: &mut S, budget: u64) -> Result<RunRecord> {
    run_nseqel(source, budget, 1.0)
}
