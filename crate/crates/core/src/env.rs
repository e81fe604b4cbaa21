//! Bandit environments, gaps and seeded reward streams.
//!
//! Arms are identified by their index in the mean vector. Nothing here sorts
//! arms: the best arm is tracked explicitly and algorithms never see the
//! means.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reward family of an environment. Rewards always live in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    #[default]
    Bernoulli,
}

/// A stochastic bandit with a fixed mean vector and a unique best arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditEnv {
    means: Vec<f64>,
    kind: RewardKind,
    best: usize,
}

impl BanditEnv {
    /// Validates `means` and builds the environment. Arms keep their order.
    pub fn new(means: Vec<f64>, kind: RewardKind) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::TooFewArms(means.len()));
        }
        for (arm, &mean) in means.iter().enumerate() {
            if !(0.0..=1.0).contains(&mean) {
                return Err(Error::MeanOutOfRange { arm, mean });
            }
        }
        let top = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut winners = means.iter().enumerate().filter(|(_, &m)| m == top);
        let best = winners.next().map(|(i, _)| i).expect("nonempty");
        if winners.next().is_some() {
            return Err(Error::NoUniqueBest);
        }
        Ok(Self { means, kind, best })
    }

    pub fn bernoulli(means: Vec<f64>) -> Result<Self> {
        Self::new(means, RewardKind::Bernoulli)
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.means[arm]
    }

    pub fn kind(&self) -> RewardKind {
        self.kind
    }

    pub fn best_arm(&self) -> usize {
        self.best
    }

    pub fn gaps(&self) -> GapVector {
        GapVector::from_means(&self.means)
    }

    /// Draws one reward for `arm`, advancing `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<f64> {
        let mean = *self.means.get(arm).ok_or(Error::ArmOutOfRange {
            arm,
            num_arms: self.num_arms(),
        })?;
        Ok(self.draw(mean, rng))
    }

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match self.kind {
            RewardKind::Bernoulli => {
                if rng.gen::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Environment whose arm `j` is this environment's arm `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.num_arms())?;
        Self::new(perm.iter().map(|&i| self.means[i]).collect(), self.kind)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::ArmCountMismatch {
            expected: n,
            actual: perm.len(),
        });
    }
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::OutOfRange(format!("permutation entry {i}")));
        }
    }
    Ok(())
}

/// Gaps `max(means) - means[i]`, plus the order that sorts them ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapVector {
    gaps: Vec<f64>,
    /// `order[rank]` is the arm holding the `rank`-th smallest gap; rank 0 is
    /// the best arm.
    order: Vec<usize>,
}

impl GapVector {
    pub fn from_means(means: &[f64]) -> Self {
        let top = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gaps: Vec<f64> = means.iter().map(|&m| top - m).collect();
        let mut order: Vec<usize> = (0..gaps.len()).collect();
        order.sort_by(|&a, &b| gaps[a].total_cmp(&gaps[b]).then(a.cmp(&b)));
        Self { gaps, order }
    }

    /// Builds from explicit gap values. Used by bound calculators that work
    /// on gap profiles rather than environments.
    pub fn from_gaps(gaps: Vec<f64>) -> Result<Self> {
        if gaps.len() < 2 {
            return Err(Error::TooFewArms(gaps.len()));
        }
        if gaps.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidGaps("gaps must be finite and nonnegative".into()));
        }
        let mut order: Vec<usize> = (0..gaps.len()).collect();
        order.sort_by(|&a, &b| gaps[a].total_cmp(&gaps[b]).then(a.cmp(&b)));
        Ok(Self { gaps, order })
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn gap(&self, arm: usize) -> f64 {
        self.gaps[arm]
    }

    pub fn sorted_index_map(&self) -> &[usize] {
        &self.order
    }

    /// Gaps in ascending order, best arm first.
    pub fn sorted(&self) -> Vec<f64> {
        self.order.iter().map(|&i| self.gaps[i]).collect()
    }

    /// Sorted gaps with the "unique zero" check applied.
    pub(crate) fn sorted_checked(&self) -> Result<Vec<f64>> {
        let sorted = self.sorted();
        if sorted[0] != 0.0 {
            return Err(Error::InvalidGaps("no zero gap for the best arm".into()));
        }
        if sorted[1] <= 0.0 {
            return Err(Error::InvalidGaps(
                "a suboptimal arm has zero gap (tied best arm)".into(),
            ));
        }
        Ok(sorted)
    }
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Counter-based seed split: the seed of item `index` under `root`.
///
/// Depends only on `(root, index)`, so Monte-Carlo run `j` gets the same
/// streams no matter which thread executes it or in what order.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    splitmix64(root ^ splitmix64(index))
}

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8 keyed by `seed` with the ChaCha stream selector set to
/// `stream_id`, so distinct ids give non-overlapping keystreams.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AccumulatorMode {
    Cumulative,
    PerRoundReset,
}

/// Per-arm pull counts and reward sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSampleAccumulator {
    counts: Vec<u64>,
    sums: Vec<f64>,
    mode: AccumulatorMode,
}

impl ArmSampleAccumulator {
    pub fn new(num_arms: usize, mode: AccumulatorMode) -> Self {
        Self {
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms],
            mode,
        }
    }

    #[inline]
    pub fn record(&mut self, arm: usize, reward: f64) {
        self.counts[arm] += 1;
        self.sums[arm] += reward;
    }

    /// Called at the start of each round; clears statistics in reset mode.
    pub fn start_round(&mut self) {
        if self.mode == AccumulatorMode::PerRoundReset {
            self.counts.iter_mut().for_each(|c| *c = 0);
            self.sums.iter_mut().for_each(|s| *s = 0.0);
        }
    }

    pub fn mean(&self, arm: usize) -> Option<f64> {
        (self.counts[arm] > 0).then(|| self.sums[arm] / self.counts[arm] as f64)
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn sum(&self, arm: usize) -> f64 {
        self.sums[arm]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn mode(&self) -> AccumulatorMode {
        self.mode
    }
}

/// Anything that can hand out rewards arm by arm.
///
/// Algorithms only interact with the world through this trait, which lets
/// the same code run on live streams, recorded rewards, or the enumerations
/// used by the exact oracle.
pub trait RewardSource {
    fn num_arms(&self) -> usize;

    fn pull(&mut self, arm: usize) -> f64;

    /// Seed the rewards derive from, when there is one.
    fn seed(&self) -> Option<u64> {
        None
    }
}

/// One independent stream per arm: arm `i` draws from `RngStream(seed, i)`.
///
/// Because every arm owns its stream, the k-th reward of an arm is the same
/// whatever order arms are pulled in; this couples algorithms that share a
/// seed.
#[derive(Debug, Clone)]
pub struct ArmStreams<'a> {
    env: &'a BanditEnv,
    streams: Vec<RngStream>,
    seed: u64,
}

impl<'a> ArmStreams<'a> {
    pub fn new(env: &'a BanditEnv, seed: u64) -> Self {
        let streams = (0..env.num_arms() as u64)
            .map(|arm| RngStream::new(seed, arm))
            .collect();
        Self { env, streams, seed }
    }
}

impl RewardSource for ArmStreams<'_> {
    fn num_arms(&self) -> usize {
        self.env.num_arms()
    }

    #[inline]
    fn pull(&mut self, arm: usize) -> f64 {
        let mean = self.env.means[arm];
        self.env.draw(mean, &mut self.streams[arm])
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }
}

/// Replays pre-recorded per-arm reward sequences.
///
/// Panics if an arm is pulled more often than it has recorded rewards.
#[derive(Debug, Clone)]
pub struct ReplaySource {
    rewards: Vec<Vec<f64>>,
    cursor: Vec<usize>,
}

impl ReplaySource {
    pub fn new(rewards: Vec<Vec<f64>>) -> Self {
        let cursor = vec![0; rewards.len()];
        Self { rewards, cursor }
    }
}

impl RewardSource for ReplaySource {
    fn num_arms(&self) -> usize {
        self.rewards.len()
    }

    fn pull(&mut self, arm: usize) -> f64 {
        let k = self.cursor[arm];
        self.cursor[arm] += 1;
        *self.rewards[arm]
            .get(k)
            .unwrap_or_else(|| panic!("replay for arm {arm} exhausted after {k} pulls"))
    }
}

/// Wraps a source and keeps every reward it hands out, per arm.
#[derive(Debug, Clone)]
pub struct Recording<S> {
    inner: S,
    log: Vec<Vec<f64>>,
}

impl<S: RewardSource> Recording<S> {
    pub fn new(inner: S) -> Self {
        let log = vec![Vec::new(); inner.num_arms()];
        Self { inner, log }
    }

    pub fn into_log(self) -> Vec<Vec<f64>> {
        self.log
    }
}

impl<S: RewardSource> RewardSource for Recording<S> {
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    fn pull(&mut self, arm: usize) -> f64 {
        let r = self.inner.pull(arm);
        self.log[arm].push(r);
        r
    }

    fn seed(&self) -> Option<u64> {
        self.inner.seed()
    }
}
