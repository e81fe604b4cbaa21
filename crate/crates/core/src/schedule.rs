//! Budget arithmetic for the general sequential-elimination framework.
//!
//! A schedule is a sequence of `(z_r, b_r)` pairs: round `r` discards `b_r`
//! arms, and every surviving arm has been pulled `n_r = ceil((T-K)/(C z_r))`
//! times in total by the end of the round, where
//! `C = 1/z_R + sum_r b_r / z_r` makes the spend fit in `T`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of the general elimination framework.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    /// Positive, nonincreasing allocation weights, one per round.
    pub z: Vec<f64>,
    /// Number of arms discarded in each round; sums to `num_arms - 1`.
    pub b: Vec<usize>,
    /// Total pull budget `T`.
    pub budget: u64,
    pub num_arms: usize,
}

impl ScheduleSpec {
    pub fn rounds(&self) -> usize {
        self.z.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSchedule(msg));
        if self.num_arms < 2 {
            return Err(Error::TooFewArms(self.num_arms));
        }
        if self.z.is_empty() {
            return bad("no rounds".into());
        }
        if self.z.len() != self.b.len() {
            return bad(format!(
                "{} weights but {} elimination counts",
                self.z.len(),
                self.b.len()
            ));
        }
        if let Some(z) = self.z.iter().find(|z| !(z.is_finite() && **z > 0.0)) {
            return bad(format!("weight {z} is not positive"));
        }
        if self.z.windows(2).any(|w| w[1] > w[0]) {
            return bad("weights must be nonincreasing".into());
        }
        if self.b.contains(&0) {
            return bad("every round must eliminate at least one arm".into());
        }
        let eliminated: usize = self.b.iter().sum();
        if eliminated != self.num_arms - 1 {
            return bad(format!(
                "rounds eliminate {eliminated} arms, need {}",
                self.num_arms - 1
            ));
        }
        if self.budget < self.num_arms as u64 {
            return Err(Error::BudgetTooSmall {
                budget: self.budget,
                required: self.num_arms as u64,
            });
        }
        Ok(())
    }
}

/// A validated schedule with its normaliser and per-round targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationSchedule {
    spec: ScheduleSpec,
    normalizer: f64,
    targets: Vec<u64>,
    alive: Vec<usize>,
}

/// `ceil(x)`, except values within floating-point noise of an integer snap
/// to that integer. Keeps e.g. `8 / (4/3 * 2)` at 3 rather than 4.
pub(crate) fn ceil_snapped(x: f64) -> u64 {
    let nearest = x.round();
    let v = if (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    v.max(0.0) as u64
}

impl EliminationSchedule {
    pub fn spec(&self) -> &ScheduleSpec {
        &self.spec
    }

    pub fn num_arms(&self) -> usize {
        self.spec.num_arms
    }

    pub fn budget(&self) -> u64 {
        self.spec.budget
    }

    pub fn rounds(&self) -> usize {
        self.spec.rounds()
    }

    /// The constant `C`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Cumulative per-arm pull targets `n_1..n_R`.
    pub fn targets(&self) -> &[u64] {
        &self.targets
    }

    /// Arms alive at the start of each round, `g_1..g_R` (`g_1 = K`).
    pub fn alive(&self) -> &[usize] {
        &self.alive
    }

    /// Per-arm pulls in round `r` (0-based): `n_r - n_{r-1}`.
    pub fn increment(&self, r: usize) -> u64 {
        let prev = if r == 0 { 0 } else { self.targets[r - 1] };
        self.targets[r] - prev
    }

    pub fn eliminations(&self) -> &[usize] {
        &self.spec.b
    }

    pub fn weights(&self) -> &[f64] {
        &self.spec.z
    }
}

/// Computes `C`, `n_r` and `g_r` and checks the spend against the budget.
pub fn build_schedule(spec: ScheduleSpec) -> Result<EliminationSchedule> {
    spec.validate()?;
    let r_last = spec.rounds() - 1;
    let normalizer = 1.0 / spec.z[r_last]
        + spec
            .z
            .iter()
            .zip(&spec.b)
            .map(|(z, &b)| b as f64 / z)
            .sum::<f64>();
    let slack = (spec.budget - spec.num_arms as u64) as f64;
    let targets: Vec<u64> = spec
        .z
        .iter()
        .map(|z| ceil_snapped(slack / (normalizer * z)))
        .collect();
    let mut alive = Vec::with_capacity(spec.rounds());
    let mut g = spec.num_arms;
    for &b in &spec.b {
        alive.push(g);
        g -= b;
    }
    debug_assert_eq!(g, 1);
    let sched = EliminationSchedule {
        spec,
        normalizer,
        targets,
        alive,
    };
    verify_budget(&sched)?;
    Ok(sched)
}

/// The N-Seq-El schedule: `K - 1` rounds, one elimination each,
/// `z_r = (K - r + 1)^p`.
pub fn nseqel_schedule(num_arms: usize, budget: u64, p: f64) -> Result<EliminationSchedule> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::NonPositiveParameter { name: "p", value: p });
    }
    if num_arms < 2 {
        return Err(Error::TooFewArms(num_arms));
    }
    let z = (1..num_arms)
        .map(|r| ((num_arms - r + 1) as f64).powf(p))
        .collect();
    build_schedule(ScheduleSpec {
        z,
        b: vec![1; num_arms - 1],
        budget,
        num_arms,
    })
}

/// Successive Rejects: N-Seq-El with `p = 1`.
pub fn succ_rej_schedule(num_arms: usize, budget: u64) -> Result<EliminationSchedule> {
    nseqel_schedule(num_arms, budget, 1.0)
}

/// Total pulls the schedule spends, `sum_r b_r n_r + n_R`.
///
/// Also evaluates the telescoped form `g_1 n_1 + sum_r g_r (n_r - n_{r-1})`;
/// the two must agree exactly.
pub fn verify_budget(sched: &EliminationSchedule) -> Result<u64> {
    let n = &sched.targets;
    let direct: u64 = sched
        .spec
        .b
        .iter()
        .zip(n)
        .map(|(&b, &n)| b as u64 * n)
        .sum::<u64>()
        + n[n.len() - 1];
    let telescoped: u64 = (0..n.len())
        .map(|r| sched.alive[r] as u64 * sched.increment(r))
        .sum();
    assert_eq!(direct, telescoped, "budget forms disagree");
    if direct > sched.spec.budget {
        return Err(Error::BudgetOverrun {
            spent: direct,
            budget: sched.spec.budget,
        });
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::c_p;

    fn spec(z: Vec<f64>, b: Vec<usize>, budget: u64, num_arms: usize) -> ScheduleSpec {
        ScheduleSpec {
            z,
            b,
            budget,
            num_arms,
        }
    }

    #[test]
    fn hand_computed_three_arm_schedule() {
        let s = build_schedule(spec(vec![3.0, 2.0], vec![1, 1], 11, 3)).unwrap();
        assert!((s.normalizer() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.targets(), &[2, 3]);
        assert_eq!(s.alive(), &[3, 2]);
        assert_eq!(verify_budget(&s).unwrap(), 8);
    }

    #[test]
    fn rejects_wrong_elimination_total() {
        let err = build_schedule(spec(vec![3.0], vec![1], 11, 3)).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(_)));
    }

    #[test]
    fn rejects_small_budget_and_bad_weights() {
        assert!(matches!(
            build_schedule(spec(vec![3.0, 2.0], vec![1, 1], 2, 3)),
            Err(Error::BudgetTooSmall { .. })
        ));
        assert!(build_schedule(spec(vec![2.0, 3.0], vec![1, 1], 11, 3)).is_err());
        assert!(build_schedule(spec(vec![2.0, 0.0], vec![1, 1], 11, 3)).is_err());
        assert!(build_schedule(spec(vec![2.0, -1.0], vec![1, 1], 11, 3)).is_err());
        assert!(build_schedule(spec(vec![2.0, 2.0], vec![1, 1], 11, 3)).is_ok());
    }

    #[test]
    fn zero_slack_gives_zero_targets() {
        let s = nseqel_schedule(5, 5, 1.3).unwrap();
        assert!(s.targets().iter().all(|&n| n == 0));
        assert_eq!(verify_budget(&s).unwrap(), 0);
    }

    #[test]
    fn nseqel_examples() {
        let s = nseqel_schedule(3, 11, 1.0).unwrap();
        assert!((s.normalizer() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.targets(), &[2, 3]);

        for p in [0.3, 1.0, 1.7, 2.5] {
            for t in [2u64, 3, 10, 101, 1000] {
                let s = nseqel_schedule(2, t, p).unwrap();
                assert_eq!(s.rounds(), 1);
                assert!((s.normalizer() - 2.0 * 2f64.powf(-p)).abs() < 1e-15);
                assert_eq!(s.targets()[0], (t - 2).div_ceil(2), "p={p} T={t}");
            }
        }

        assert!(matches!(
            nseqel_schedule(4, 10, 0.0),
            Err(Error::NonPositiveParameter { .. })
        ));
        assert!(nseqel_schedule(4, 10, -1.0).is_err());
    }

    #[test]
    fn p_one_is_successive_rejects() {
        let k = 9;
        let z: Vec<f64> = (1..k).map(|r| (k - r + 1) as f64).collect();
        let manual = build_schedule(spec(z, vec![1; k - 1], 500, k)).unwrap();
        assert_eq!(manual, nseqel_schedule(k, 500, 1.0).unwrap());
        assert_eq!(manual, succ_rej_schedule(k, 500).unwrap());
    }

    #[test]
    fn normalizer_matches_closed_form() {
        for k in [2, 3, 10, 57, 400] {
            for p in [0.5, 0.75, 1.0, 1.35, 1.7, 2.0] {
                let s = nseqel_schedule(k, 10 * k as u64, p).unwrap();
                let rel = (s.normalizer() - c_p(k, p)).abs() / c_p(k, p);
                assert!(rel < 1e-12);
            }
        }
    }

    #[test]
    fn targets_nondecreasing() {
        let s = build_schedule(spec(vec![9.0, 4.0, 4.0, 1.5], vec![3, 2, 2, 1], 700, 9)).unwrap();
        assert!(s.targets().windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(s.alive(), &[9, 6, 4, 2]);
    }

    #[test]
    fn snapped_ceiling() {
        assert_eq!(ceil_snapped(3.0000000000000004), 3);
        assert_eq!(ceil_snapped(2.9999999999999996), 3);
        assert_eq!(ceil_snapped(2.01), 3);
        assert_eq!(ceil_snapped(0.0), 0);
    }
}
