use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqelim::algorithms::{
    run_general_elimination, run_nseqel, run_seq_halve, run_succ_rej, run_ucb_e, halving_rounds,
};
use seqelim::complexity::{h2, h_p};
use seqelim::env::{ArmStreams, ReplaySource};
use seqelim::schedule::{build_schedule, verify_budget};
use seqelim::sideobs::{block_schedule_power, run_block_elimination};
use seqelim::{BanditEnv, BlockPartition, GapVector, ScheduleSpec};

/// Splits `total` into `parts` positive integers.
fn composition(total: usize, parts: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, total - 1, parts - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(total);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let d = c - prev;
            prev = c;
            d
        })
        .collect()
}

fn random_spec(seed: u64) -> ScheduleSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=60);
    let rounds = rng.gen_range(1..k);
    let b = composition(k - 1, rounds, &mut rng);
    let mut z: Vec<f64> = (0..rounds).map(|_| rng.gen_range(0.05..50.0)).collect();
    z.sort_by(|a, b| b.total_cmp(a));
    let budget = rng.gen_range(k as u64..=k as u64 * 200);
    ScheduleSpec { z, b, budget, num_arms: k }
}

fn random_env(rng: &mut ChaCha8Rng, k: usize) -> BanditEnv {
    let mut means: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..0.9)).collect();
    let best = rng.gen_range(0..k);
    means[best] = 0.95;
    BanditEnv::bernoulli(means).unwrap()
}

/// Distinct continuous rewards, so no ties ever occur.
fn continuous_rewards(rng: &mut ChaCha8Rng, k: usize, len: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|arm| (0..len).map(|_| rng.gen::<f64>() + arm as f64 * 1e-3).collect())
        .collect()
}

proptest! {
    #[test]
    fn general_schedule_respects_budget(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let budget = spec.budget;
        let k = spec.num_arms;
        let sched = build_schedule(spec).unwrap();
        let spent = verify_budget(&sched).unwrap();
        prop_assert!(spent <= budget);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let env = random_env(&mut rng, k);
        let rec = run_general_elimination(&mut ArmStreams::new(&env, seed), &sched).unwrap();
        prop_assert_eq!(rec.total_pulls, spent);
        prop_assert!(rec.is_partition_of_arms());
        prop_assert_eq!(rec.samples_per_arm.iter().sum::<u64>(), rec.total_pulls);
    }

    #[test]
    fn nseqel_respects_budget(k in 2usize..80, slack in 0u64..5000, p in 0.1f64..3.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = random_env(&mut rng, k);
        let t = k as u64 + slack;
        let rec = run_nseqel(&mut ArmStreams::new(&env, seed), t, p).unwrap();
        prop_assert!(rec.total_pulls <= t);
        prop_assert_eq!(rec.rounds.len(), k - 1);
    }

    #[test]
    fn seq_halv_respects_budget(k in 2usize..200, extra in 0u64..20_000, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = random_env(&mut rng, k);
        let t = (k * halving_rounds(k)) as u64 + extra;
        let rec = run_seq_halve(&mut ArmStreams::new(&env, seed), t).unwrap();
        prop_assert!(rec.total_pulls <= t);
        prop_assert!(rec.is_partition_of_arms());
    }

    #[test]
    fn ucb_e_spends_exactly_budget(k in 2usize..30, extra in 0u64..2000, a in 0.01f64..100.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = random_env(&mut rng, k);
        let t = k as u64 + extra;
        let rec = run_ucb_e(&mut ArmStreams::new(&env, seed), t, a).unwrap();
        prop_assert_eq!(rec.total_pulls, t);
        prop_assert_eq!(rec.samples_per_arm.iter().sum::<u64>(), t);
        prop_assert!(rec.samples_per_arm.iter().all(|&n| n >= 1));
    }

    #[test]
    fn block_elimination_respects_budget(
        sizes in prop::collection::vec(1usize..6, 1..12),
        slack in 0u64..3000,
        p in 0.2f64..2.5,
        seed in any::<u64>(),
    ) {
        let part = BlockPartition::from_sizes(&sizes).unwrap();
        let m = part.num_blocks();
        let k = part.num_arms();
        prop_assume!(k >= 2);
        let t = m as u64 + slack;
        let sched = block_schedule_power(m, t, p).unwrap();
        prop_assert!(sched.block_pulls() <= t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = random_env(&mut rng, k);
        let rec = run_block_elimination(&mut ArmStreams::new(&env, seed), &part, &sched).unwrap();
        prop_assert_eq!(rec.total_pulls, sched.block_pulls());
        prop_assert!(rec.is_partition_of_arms());
    }

    #[test]
    fn h_of_one_is_h2(gaps in prop::collection::vec(1e-3f64..1.0, 1..200)) {
        let mut all = vec![0.0];
        all.extend(gaps);
        let g = GapVector::from_gaps(all).unwrap();
        let a = h_p(&g, 1.0).unwrap();
        let b = h2(&g).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn succ_rej_is_nseqel_at_one(k in 2usize..50, slack in 0u64..3000, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let env = random_env(&mut rng, k);
        let t = k as u64 + slack;
        let a = run_nseqel(&mut ArmStreams::new(&env, seed), t, 1.0).unwrap();
        let b = run_succ_rej(&mut ArmStreams::new(&env, seed), t).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn relabeling_arms_relabels_the_answer(k in 2usize..20, slack in 0u64..400, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = k as u64 + slack + (k * halving_rounds(k)) as u64;
        let rewards = continuous_rewards(&mut rng, k, t as usize);
        let mut perm: Vec<usize> = (0..k).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        // Arm `perm[i]` of the relabeled problem is arm `i` of the original.
        let mut relabeled = vec![Vec::new(); k];
        for (i, &j) in perm.iter().enumerate() {
            relabeled[j] = rewards[i].clone();
        }

        let a = run_nseqel(&mut ReplaySource::new(rewards.clone()), t, 1.4).unwrap();
        let b = run_nseqel(&mut ReplaySource::new(relabeled.clone()), t, 1.4).unwrap();
        prop_assert_eq!(perm[a.recommended], b.recommended);

        let a = run_seq_halve(&mut ReplaySource::new(rewards.clone()), t).unwrap();
        let b = run_seq_halve(&mut ReplaySource::new(relabeled.clone()), t).unwrap();
        prop_assert_eq!(perm[a.recommended], b.recommended);

        let a = run_ucb_e(&mut ReplaySource::new(rewards), t, 3.0).unwrap();
        let b = run_ucb_e(&mut ReplaySource::new(relabeled), t, 3.0).unwrap();
        prop_assert_eq!(perm[a.recommended], b.recommended);
    }
}
