mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use streamseq::ius::{ius_update_with_stats, UpdateInput};
use streamseq::miner::mine;
use streamseq::occurrence::occur_partitioned;

use common::{random_params, random_queue};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Frequent section equals a full mine; every border entry is recounted
    /// and checked against the band.
    #[test]
    fn update_matches_full_mine(seed in any::<u64>(), cut_frac in 0.05f64..0.95, capped in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_queue(&mut rng, 6, 120);
        let p = random_params(&mut rng, capped.then_some(3));
        let cut = ((q.len() as f64 * cut_frac) as usize).clamp(1, q.len() - 1);
        let ob = [q.window(0, cut).unwrap()];
        let db = [q.window(cut, q.len() - cut).unwrap()];
        let old = mine(&ob, &p).unwrap();
        let delta = mine(&db, &p).unwrap();
        let (updated, stats) = ius_update_with_stats(&UpdateInput {
            old: &old, delta: &delta, old_blocks: &ob, delta_blocks: &db, params: p,
        }).unwrap();
        let blocks = [ob[0], db[0]];
        let full = mine(&blocks, &p).unwrap();
        prop_assert_eq!(&updated.frequent, &full.frequent);
        prop_assert!(updated.validate().is_ok());
        for (s, &c) in &updated.border {
            prop_assert_eq!(occur_partitioned(s, &blocks, &p.count), c);
        }
        prop_assert_eq!(
            stats.cost.total(),
            stats.cost.window_evaluations + stats.cost.lookups
        );
    }

    /// Chaining two updates equals one update over the same blocks.
    #[test]
    fn chained_updates_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_queue(&mut rng, 6, 120);
        prop_assume!(q.len() >= 3);
        let p = random_params(&mut rng, None);
        let a = q.len() / 3;
        let b = 2 * q.len() / 3;
        let w0 = q.window(0, a).unwrap();
        let w1 = q.window(a, b - a).unwrap();
        let w2 = q.window(b, q.len() - b).unwrap();
        let step = |old_blocks: &[_], next| {
            let old = mine(old_blocks, &p).unwrap();
            let delta = mine(&[next], &p).unwrap();
            ius_update_with_stats(&UpdateInput {
                old: &old, delta: &delta, old_blocks, delta_blocks: &[next], params: p,
            }).unwrap().0
        };
        let two = step(&[w0, w1], w2);
        prop_assert_eq!(&two.frequent, &mine(&[w0, w1, w2], &p).unwrap().frequent);
        prop_assert_eq!(two.window_size as usize, q.len());
        prop_assert_eq!(two.blocks.len(), 3);
    }
}
