//! Side observations through star-shaped blocks.
//!
//! Arms are partitioned into blocks, each with a center connected to every
//! other member. Pulling the center reveals one reward for every arm in its
//! block, so a block pull costs one unit of budget but yields `|V_m|`
//! samples. Sequential Block Elimination discards one block per round (the
//! one whose best empirical arm is worst) and finally recommends the best
//! empirical arm of the last block.

use serde::{Deserialize, Serialize};

use crate::algorithms::{select_best, AlgorithmId, RoundRecord, RunRecord};
use crate::complexity::h_top;
use crate::env::{AccumulatorMode, ArmSampleAccumulator, GapVector, RewardSource};
use crate::error::{Error, Result};
use crate::schedule::ceil_snapped;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    blocks: Vec<Vec<usize>>,
    centers: Vec<usize>,
}

impl BlockPartition {
    /// Blocks must be nonempty and cover `0..K` exactly once. Members are
    /// stored ascending; each `centers[m]` must belong to block `m`.
    pub fn new(blocks: Vec<Vec<usize>>, centers: Vec<usize>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidPartition(m));
        if blocks.is_empty() {
            return bad("no blocks".into());
        }
        if centers.len() != blocks.len() {
            return bad("one center per block required".into());
        }
        let k: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; k];
        let mut blocks = blocks;
        for (m, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return bad(format!("block {m} is empty"));
            }
            block.sort_unstable();
            for &arm in block.iter() {
                if arm >= k || std::mem::replace(&mut seen[arm], true) {
                    return bad(format!("arm {arm} is out of range or repeated"));
                }
            }
            if block.binary_search(&centers[m]).is_err() {
                return bad(format!("center {} not in block {m}", centers[m]));
            }
        }
        Ok(Self { blocks, centers })
    }

    /// Contiguous blocks of the given sizes; the first arm of each block is
    /// its center.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let mut next = 0;
        let mut blocks = Vec::with_capacity(sizes.len());
        for &s in sizes {
            blocks.push((next..next + s).collect::<Vec<_>>());
            next += s;
        }
        let centers = blocks.iter().map(|b| b.first().copied().unwrap_or(0)).collect();
        Self::new(blocks, centers)
    }

    /// `num_blocks` contiguous blocks of `block_size` arms each.
    pub fn uniform(block_size: usize, num_blocks: usize) -> Result<Self> {
        Self::from_sizes(&vec![block_size; num_blocks])
    }

    /// Parses `"SIZExCOUNT"` (e.g. `10x4`: four blocks of ten), or a comma
    /// list of sizes such as `3,2,2`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPartition(format!("cannot parse {s:?}"));
        if let Some((size, count)) = s.split_once('x') {
            let size = size.trim().parse().map_err(|_| bad())?;
            let count = count.trim().parse().map_err(|_| bad())?;
            return Self::uniform(size, count);
        }
        let sizes = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sizes(&sizes)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_arms(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// `V`, the largest block size.
    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn is_singletons(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }
}

/// Block-level budget plan: `C = sum_r 1/z_r`, `n_r = ceil((T-M)/(C z_r))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSchedule {
    z: Vec<f64>,
    normalizer: f64,
    targets: Vec<u64>,
    budget: u64,
}

impl BlockSchedule {
    /// Builds a schedule for `z.len()` blocks. `z` must be positive and
    /// nonincreasing and `T >= M`.
    pub fn new(z: Vec<f64>, budget: u64) -> Result<Self> {
        let m = z.len();
        if m == 0 {
            return Err(Error::InvalidSchedule("no blocks".into()));
        }
        if z.iter().any(|z| !(z.is_finite() && *z > 0.0)) {
            return Err(Error::InvalidSchedule("weights must be positive".into()));
        }
        if z.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidSchedule("weights must be nonincreasing".into()));
        }
        if budget < m as u64 {
            return Err(Error::BudgetTooSmall {
                budget,
                required: m as u64,
            });
        }
        let normalizer: f64 = z.iter().map(|z| 1.0 / z).sum();
        let slack = (budget - m as u64) as f64;
        let targets: Vec<u64> = z.iter().map(|z| ceil_snapped(slack / (normalizer * z))).collect();
        let sched = Self {
            z,
            normalizer,
            targets,
            budget,
        };
        let spent = sched.block_pulls();
        if spent > budget {
            return Err(Error::BudgetOverrun { spent, budget });
        }
        Ok(sched)
    }

    pub fn num_blocks(&self) -> usize {
        self.z.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.z
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn targets(&self) -> &[u64] {
        &self.targets
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    fn increment(&self, r: usize) -> u64 {
        self.targets[r] - if r == 0 { 0 } else { self.targets[r - 1] }
    }

    /// Block pulls spent by a full run: `sum_r n_r` (the block dropped in
    /// round `r` got `n_r` pulls; the survivor got `n_M`).
    pub fn block_pulls(&self) -> u64 {
        self.targets.iter().sum()
    }
}

/// The power schedule `z_r = (M + 1 - r)^p` for `r < M`, with `z_M = 2^p`.
pub fn block_schedule_power(num_blocks: usize, budget: u64, p: f64) -> Result<BlockSchedule> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::NonPositiveParameter { name: "p", value: p });
    }
    if num_blocks == 0 {
        return Err(Error::InvalidSchedule("no blocks".into()));
    }
    let weight = |i: usize| (i as f64).powf(p);
    let mut z: Vec<f64> = (1..num_blocks).map(|r| weight(num_blocks + 1 - r)).collect();
    // Repeat the bits of the previous weight: a literal `2^p` may be lowered
    // to exp2 and land one ulp away.
    z.push(z.last().copied().unwrap_or_else(|| weight(2)));
    BlockSchedule::new(z, budget)
}

/// Alive block with the lowest best-member mean. Among equal scores the
/// block whose smallest member is largest goes; unsampled arms are ignored.
pub(crate) fn worst_block<F>(blocks: &[Vec<usize>], alive: &[usize], mean: F) -> usize
where
    F: Fn(usize) -> Option<f64>,
{
    let best_in = |b: usize| {
        blocks[b]
            .iter()
            .filter_map(|&a| mean(a))
            .fold(None, |best: Option<f64>, x| Some(best.map_or(x, |y: f64| y.max(x))))
    };
    let mut worst = alive[0];
    let mut worst_y = best_in(worst);
    for &b in &alive[1..] {
        let y = best_in(b);
        let lower = match (y, worst_y) {
            (None, Some(_)) => true,
            (Some(y), Some(w)) => y < w,
            _ => false,
        };
        let tie = y == worst_y && blocks[b][0] > blocks[worst][0];
        if lower || tie {
            worst = b;
            worst_y = y;
        }
    }
    worst
}

/// Sequential Block Elimination.
///
/// `total_pulls` counts block pulls; `samples_per_arm` counts revealed
/// rewards. The last round record lists the non-recommended members of the
/// final block as eliminated, so eliminated sets plus the recommendation
/// cover every arm.
pub fn run_block_elimination<S: RewardSource>(
    source: &mut S,
    partition: &BlockPartition,
    sched: &BlockSchedule,
) -> Result<RunRecord> {
    let k = partition.num_arms();
    if source.num_arms() != k {
        return Err(Error::ArmCountMismatch {
            expected: k,
            actual: source.num_arms(),
        });
    }
    let m = partition.num_blocks();
    if sched.num_blocks() != m {
        return Err(Error::InvalidPartition(format!(
            "schedule has {} rounds for {m} blocks",
            sched.num_blocks()
        )));
    }

    let blocks = partition.blocks();
    let mut acc = ArmSampleAccumulator::new(k, AccumulatorMode::Cumulative);
    let mut alive: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m);
    let mut total = 0;
    let members = |alive: &[usize]| {
        let mut arms: Vec<usize> = alive.iter().flat_map(|&b| blocks[b].iter().copied()).collect();
        arms.sort_unstable();
        arms
    };

    for r in 0..m {
        let inc = sched.increment(r);
        for &b in &alive {
            for _ in 0..inc {
                for &arm in &blocks[b] {
                    acc.record(arm, source.pull(arm));
                }
            }
        }
        total += inc * alive.len() as u64;
        if r + 1 == m {
            break;
        }
        let worst = worst_block(blocks, &alive, |a| acc.mean(a));
        rounds.push(RoundRecord {
            alive: members(&alive),
            increment: inc,
            eliminated: blocks[worst].clone(),
        });
        alive.retain(|&b| b != worst);
    }

    let last = alive[0];
    let recommended = select_best(&blocks[last], |a| acc.mean(a));
    rounds.push(RoundRecord {
        alive: blocks[last].clone(),
        increment: sched.increment(m - 1),
        eliminated: blocks[last].iter().copied().filter(|&a| a != recommended).collect(),
    });

    Ok(RunRecord {
        algorithm: AlgorithmId::BlockElim { blocks: m },
        recommended,
        rounds,
        total_pulls: total,
        samples_per_arm: acc.counts().to_vec(),
        budget: sched.budget(),
        seed: source.seed(),
    })
}

/// Both forms of the block-elimination guarantee at the schedule's budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Bound {
    /// `V M exp(-(T-M)/C * 2 min_r Delta_{M+1-r}^2 / z_r)` with
    /// `Delta_1 := Delta_2`.
    pub general: f64,
    /// `V M exp(-2 (T-M) / (C H(M,p)))`, for power schedules with `M >= 2`.
    pub power: Option<f64>,
}

/// Evaluates the block-elimination bound. Pass `p` when `sched` came from
/// [`block_schedule_power`].
pub fn theorem2_bound(
    partition: &BlockPartition,
    sched: &BlockSchedule,
    gaps: &GapVector,
    p: Option<f64>,
) -> Result<Theorem2Bound> {
    if gaps.len() != partition.num_arms() {
        return Err(Error::ArmCountMismatch {
            expected: partition.num_arms(),
            actual: gaps.len(),
        });
    }
    let m = partition.num_blocks();
    if sched.num_blocks() != m {
        return Err(Error::InvalidPartition("schedule/partition size mismatch".into()));
    }
    let sorted = gaps.sorted_checked()?;
    let prefactor = (partition.max_block_size() * m) as f64;
    let slack = sched.budget() as f64 - m as f64;
    let c = sched.normalizer();
    let delta = |i: usize| if i == 1 { sorted[1] } else { sorted[i - 1] };
    let min_term = (1..=m)
        .map(|r| {
            let d = delta(m + 1 - r);
            d * d / sched.weights()[r - 1]
        })
        .fold(f64::INFINITY, f64::min);
    let general = prefactor * (-slack / c * 2.0 * min_term).exp();
    let power = match p {
        Some(p) if m >= 2 => {
            let h = h_top(gaps, m, p)?;
            Some(prefactor * (-2.0 * slack / (c * h)).exp())
        }
        _ => None,
    };
    Ok(Theorem2Bound { general, power })
}
