mod common;

use auction_core::mech::{expected_revenue, verify_truthful};
use auction_core::multi::{best_pair, brute_force_n};
use auction_core::rational::q;
use auction_core::solve2::solve_discrete2;
use common::random_prior;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn best_pair_is_two_thirds_approximate(seed in any::<u64>(), n in 2usize..4, sparsity in 0.0f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = random_prior(&mut rng, &[n, n, n], sparsity);
        let (opt, opt_mech) = brute_force_n(&prior).unwrap();
        let bp = best_pair(&prior).unwrap();
        prop_assert!(verify_truthful(&opt_mech).is_pass());
        prop_assert!(verify_truthful(&bp.mechanism).is_pass());
        prop_assert_eq!(expected_revenue(&bp.mechanism, &prior).unwrap(), bp.revenue.clone());
        prop_assert!(bp.revenue <= opt);
        prop_assert!(bp.revenue.clone() * q(3, 2) >= opt, "{} vs {}", bp.revenue, opt);
        prop_assert_eq!(bp.table.len(), 3);
        prop_assert!(bp.table.iter().all(|(_, r)| *r <= bp.revenue));
    }

    #[test]
    fn two_bidder_brute_force_matches_solver(seed in any::<u64>(), n1 in 1usize..6, n2 in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = random_prior(&mut rng, &[n1, n2], 0.3);
        let (opt, _) = brute_force_n(&prior).unwrap();
        prop_assert_eq!(opt, solve_discrete2(&prior).unwrap().revenue);
    }
}

#[test]
fn single_bidder_and_size_guard() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let one = random_prior(&mut rng, &[4], 0.0);
    assert!(best_pair(&one).is_err());
    // a single bidder's optimum is the best posted price
    let (opt, _) = brute_force_n(&one).unwrap();
    let levels = one.grid().levels(0);
    let best = (0..4)
        .map(|k| levels[k].clone() * one.masses()[k..].iter().cloned().sum::<auction_core::rational::Q>())
        .max()
        .unwrap();
    assert_eq!(opt, best);
    let big = random_prior(&mut rng, &[5, 5, 5], 0.0);
    assert!(brute_force_n(&big).is_err());
}
