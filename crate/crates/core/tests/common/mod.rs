#![allow(dead_code)]

use auction_core::mech::AllocationPair;
use auction_core::priors::{JointPrior, ValueGrid};
use auction_core::rational::{q, qi, Q};
use proptest::prelude::*;
use rand::Rng;

/// Strictly increasing integer levels from positive increments.
pub fn levels(steps: &[u8]) -> Vec<Q> {
    let mut x = 0i64;
    steps
        .iter()
        .map(|&s| {
            x += s as i64;
            qi(x)
        })
        .collect()
}

/// Prior with integer weights, normalized; an all-zero draw puts mass on
/// the first point.
pub fn build_prior(steps: &[Vec<u8>], weights: &[u8]) -> JointPrior {
    let grid = ValueGrid::new(steps.iter().map(|s| levels(s)).collect()).unwrap();
    let mut w: Vec<i64> = weights.iter().map(|&x| x as i64).collect();
    if w.iter().all(|&x| x == 0) {
        w[0] = 1;
    }
    let total: i64 = w.iter().sum();
    JointPrior::new(grid, w.into_iter().map(|x| q(x, total)).collect()).unwrap()
}

/// Random prior over the given shape; `sparsity` is the chance a point is empty.
pub fn prior_strategy(shape: Vec<usize>, sparsity: f64) -> impl Strategy<Value = JointPrior> {
    let len: usize = shape.iter().product();
    let steps = shape.iter().map(|&n| prop::collection::vec(1u8..4, n)).collect::<Vec<_>>();
    let weights = prop::collection::vec((0u8..10, 0.0f64..1.0), len)
        .prop_map(move |v| v.into_iter().map(|(w, r)| if r < sparsity { 0 } else { w }).collect::<Vec<u8>>());
    (steps, weights).prop_map(|(s, w)| build_prior(&s, &w))
}

/// Two-bidder prior over a random shape up to `max` per side.
pub fn prior2_strategy(max: usize) -> impl Strategy<Value = JointPrior> {
    (1..=max, 1..=max, 0.0f64..0.7).prop_flat_map(|(a, b, s)| prior_strategy(vec![a, b], s))
}

pub fn random_prior(rng: &mut impl Rng, shape: &[usize], sparsity: f64) -> JointPrior {
    let steps: Vec<Vec<u8>> = shape.iter().map(|&n| (0..n).map(|_| rng.gen_range(1..4)).collect()).collect();
    let len: usize = shape.iter().product();
    let weights: Vec<u8> = (0..len)
        .map(|_| if rng.gen_bool(sparsity) { 0 } else { rng.gen_range(1..10) })
        .collect();
    build_prior(&steps, &weights)
}

/// Uniformly random valid allocation pair: random `alpha`, then each
/// `beta(i)` anywhere above the last row bidder 1 wins in column `i`.
pub fn random_pair(rng: &mut impl Rng, n1: usize, n2: usize) -> AllocationPair {
    let alpha: Vec<usize> = (0..n2).map(|_| rng.gen_range(0..=n1)).collect();
    let beta = (0..n1)
        .map(|i| {
            let lb = (0..n2).rev().find(|&j| alpha[j] <= i).map_or(0, |j| j + 1);
            rng.gen_range(lb..=n2)
        })
        .collect();
    AllocationPair::new(n1, n2, alpha, beta).unwrap()
}
