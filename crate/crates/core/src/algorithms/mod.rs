//! Best-arm identification algorithms.
//!
//! Every runner consumes rewards through [`RewardSource`] and returns a
//! [`RunRecord`]. Conventions shared by all of them:
//!
//! * arms are sampled arm-major, ascending index, within a round;
//! * ties are broken towards the smallest arm index (the smaller index
//!   survives an elimination and wins an argmax);
//! * an arm with no samples has mean `-inf`.
//!
//! [`RewardSource`]: crate::env::RewardSource

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

mod elimination;
mod halving;
mod ucb_e;

pub use elimination::{run_general_elimination, run_nseqel, run_succ_rej};
pub use halving::{halving_allocation, halving_rounds, run_seq_halve};
pub use ucb_e::{run_ucb_e, ucb_e_choose};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmId {
    /// General elimination driven by an explicit schedule.
    General { rounds: usize },
    /// N-Seq-El; Succ-Rej is the `p = 1` instance.
    NSeqEl { p: f64 },
    SeqHalv,
    UcbE { a: f64 },
    BlockElim { blocks: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// Arms alive at the start of the round, ascending.
    pub alive: Vec<usize>,
    /// Pulls given to each alive arm (or block) during the round.
    pub increment: u64,
    /// Arms discarded at the end of the round, ascending.
    pub eliminated: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: AlgorithmId,
    pub recommended: usize,
    pub rounds: Vec<RoundRecord>,
    /// Budget units spent (arm pulls, or block pulls for block elimination).
    pub total_pulls: u64,
    /// Rewards observed per arm. Equals pulls except under side observations.
    pub samples_per_arm: Vec<u64>,
    pub budget: u64,
    pub seed: Option<u64>,
}

impl RunRecord {
    /// Rewards revealed over the whole run.
    pub fn observations(&self) -> u64 {
        self.samples_per_arm.iter().sum()
    }

    /// Checks that eliminated sets are disjoint and together with the
    /// recommendation cover every arm exactly once.
    pub fn is_partition_of_arms(&self) -> bool {
        let k = self.samples_per_arm.len();
        let mut seen = vec![false; k];
        let all = self
            .rounds
            .iter()
            .flat_map(|r| r.eliminated.iter())
            .chain(std::iter::once(&self.recommended));
        for &arm in all {
            if arm >= k || std::mem::replace(&mut seen[arm], true) {
                return false;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[inline]
fn score_cmp(a: Option<f64>, b: Option<f64>) -> Ordering {
    a.unwrap_or(f64::NEG_INFINITY)
        .total_cmp(&b.unwrap_or(f64::NEG_INFINITY))
}

/// Picks the `count` arms of `alive` with the lowest scores.
///
/// Among equal scores the larger index goes first, so the smaller index
/// survives. `None` scores count as `-inf`. Result is ascending.
pub fn select_lowest<F>(alive: &[usize], count: usize, score: F) -> Vec<usize>
where
    F: Fn(usize) -> Option<f64>,
{
    let mut ranked: Vec<(usize, Option<f64>)> = alive.iter().map(|&a| (a, score(a))).collect();
    ranked.sort_by(|x, y| score_cmp(x.1, y.1).then(y.0.cmp(&x.0)));
    let mut out: Vec<usize> = ranked.into_iter().take(count).map(|(a, _)| a).collect();
    out.sort_unstable();
    out
}

/// Index in `candidates` with the highest score, smallest arm on ties.
pub fn select_best<F>(candidates: &[usize], score: F) -> usize
where
    F: Fn(usize) -> Option<f64>,
{
    let mut best = candidates[0];
    let mut best_score = score(best);
    for &a in &candidates[1..] {
        let s = score(a);
        if score_cmp(s, best_score) == Ordering::Greater
            || (score_cmp(s, best_score) == Ordering::Equal && a < best)
        {
            best = a;
            best_score = s;
        }
    }
    best
}
