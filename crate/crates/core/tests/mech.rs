mod common;

use auction_core::io::{mechanism_from_json, mechanism_to_json, prior_from_json, prior_to_json};
use auction_core::mech::{
    expected_revenue, improper_boundaries, make_proper, revenue_via_mpc, thresholds_and_payments, verify_truthful,
    verify_truthful_exhaustive, AllocationMatrix, Mechanism, Truthfulness, ViolationKind,
};
use auction_core::multi::brute_force_n;
use auction_core::priors::mpc_discrete;
use auction_core::rational::{q, qi, Q};
use common::{random_pair, random_prior};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair_mechanism(rng: &mut ChaCha8Rng, n1: usize, n2: usize) -> (auction_core::priors::JointPrior, Mechanism) {
    let prior = random_prior(rng, &[n1, n2], 0.3);
    let pair = random_pair(rng, n1, n2);
    let mech = thresholds_and_payments(&pair.to_matrix(), prior.grid()).unwrap();
    (prior, mech)
}

fn same_verdict(mech: &Mechanism) -> bool {
    verify_truthful(mech).is_pass() == verify_truthful_exhaustive(mech).is_pass()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn threshold_mechanisms_are_truthful(seed in any::<u64>(), n1 in 1usize..6, n2 in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, mech) = pair_mechanism(&mut rng, n1, n2);
        prop_assert!(verify_truthful(&mech).is_pass());
        prop_assert!(verify_truthful_exhaustive(&mech).is_pass());
    }

    #[test]
    fn verifiers_agree_on_tampered_payments(seed in any::<u64>(), n1 in 1usize..5, n2 in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, mut mech) = pair_mechanism(&mut rng, n1, n2);
        let bidder = rng.gen_range(0..2);
        let flat = rng.gen_range(0..n1 * n2);
        let delta = q(rng.gen_range(-6..=6), rng.gen_range(1..4));
        mech.payments[bidder][flat] += delta;
        prop_assert!(same_verdict(&mech));
    }

    #[test]
    fn verifiers_agree_on_arbitrary_tables(seed in any::<u64>(), n1 in 1usize..4, n2 in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, mut mech) = pair_mechanism(&mut rng, n1, n2);
        let winners: Vec<u8> = (0..n1 * n2).map(|_| rng.gen_range(0..3)).collect();
        mech.allocation = AllocationMatrix::new(&[n1, n2], winners).unwrap();
        for row in mech.payments.iter_mut() {
            for p in row.iter_mut() {
                *p = if rng.gen_bool(0.5) { Q::from_integer(0.into()) } else { qi(rng.gen_range(-1..8)) };
            }
        }
        prop_assert!(same_verdict(&mech));
    }

    #[test]
    fn proper_pairs_satisfy_revenue_identity(seed in any::<u64>(), n1 in 1usize..6, n2 in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = random_prior(&mut rng, &[n1, n2], 0.3);
        let f = mpc_discrete(&prior, 0).unwrap();
        let g = mpc_discrete(&prior, 1).unwrap();
        let raw = random_pair(&mut rng, n1, n2);
        let proper = make_proper(&raw, &prior).unwrap();
        prop_assert!(proper.is_valid());
        prop_assert!(improper_boundaries(&proper, &f, &g).is_empty());
        let rev = |p: &auction_core::mech::AllocationPair| {
            let m = thresholds_and_payments(&p.to_matrix(), prior.grid()).unwrap();
            expected_revenue(&m, &prior).unwrap()
        };
        prop_assert_eq!(revenue_via_mpc(&proper, &f, &g).unwrap(), rev(&proper));
        prop_assert!(rev(&proper) >= rev(&raw));
        prop_assert_eq!(make_proper(&proper, &prior).unwrap(), proper);
    }
}

#[test]
fn three_bidder_optimum_is_truthful_and_tamper_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let prior = random_prior(&mut rng, &[2, 2, 2], 0.2);
        let (_, mut mech) = brute_force_n(&prior).unwrap();
        assert!(verify_truthful(&mech).is_pass());
        assert!(verify_truthful_exhaustive(&mech).is_pass());
        // charging a winner more than their value breaks IR
        if let Some(f) = (0..8).find(|&f| mech.allocation.winner(f) != 0) {
            let b = mech.allocation.winner(f) as usize - 1;
            mech.payments[b][f] += qi(100);
            match verify_truthful(&mech) {
                Truthfulness::Violated(v) => assert_eq!(v.kind, ViolationKind::IndividualRationality),
                Truthfulness::Pass => panic!("overcharge not detected"),
            }
            assert!(!verify_truthful_exhaustive(&mech).is_pass());
        }
    }
}

#[test]
fn negative_payment_is_a_transfer_violation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (_, mut mech) = pair_mechanism(&mut rng, 1, 1);
    mech.payments[1][0] = q(-1, 2);
    match verify_truthful(&mech) {
        Truthfulness::Violated(v) => assert_eq!(v.kind, ViolationKind::NoPositiveTransfers),
        Truthfulness::Pass => panic!("negative payment accepted"),
    }
}

#[test]
fn json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for shape in [vec![3, 4], vec![2, 2, 3]] {
        let prior = random_prior(&mut rng, &shape, 0.4);
        let back = prior_from_json(&prior_to_json(&prior)).unwrap();
        assert_eq!(back.masses(), prior.masses());
        assert_eq!(back.grid(), prior.grid());
        let (_, mech) = brute_force_n(&prior).unwrap();
        assert_eq!(mechanism_from_json(&mechanism_to_json(&mech)).unwrap(), mech);
    }
}
