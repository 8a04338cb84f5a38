//! Exact two-bidder solver and an exhaustive reference search.

use num_traits::Zero;

use crate::error::{AuctionError, Result};
use crate::mech::{expected_revenue, monotone_closure, thresholds_and_payments, AllocationPair, Mechanism};
use crate::mwis::{build_conflict_instance, solve_mwis_lex_with, EdgeEncoding, EdgeRule, IndependentSetSolution};
use crate::priors::{mpc_discrete, JointPrior};
use crate::rational::Q;

/// Largest number of alpha vectors [`brute_force2`] will enumerate.
pub const BRUTE_FORCE2_LIMIT: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Discrete2Solution {
    pub pair: AllocationPair,
    pub mechanism: Mechanism,
    pub revenue: Q,
    pub independent_set: IndependentSetSolution,
}

fn require_two(prior: &JointPrior) -> Result<(usize, usize)> {
    if prior.bidders() != 2 {
        return Err(AuctionError::WrongBidderCount {
            expected: 2,
            found: prior.bidders(),
        });
    }
    Ok((prior.shape()[0], prior.shape()[1]))
}

pub fn solve_discrete2(prior: &JointPrior) -> Result<Discrete2Solution> {
    solve_discrete2_with(prior, EdgeEncoding::Direct)
}

/// Marginal profits, weak-edge conflict graph, lexicographic MWIS, closure
/// and threshold payments.
pub fn solve_discrete2_with(prior: &JointPrior, encoding: EdgeEncoding) -> Result<Discrete2Solution> {
    let shape = require_two(prior)?;
    let f = mpc_discrete(prior, 0)?;
    let g = mpc_discrete(prior, 1)?;
    let inst = build_conflict_instance(&f, &g, EdgeRule::Weak)?;
    let sol = solve_mwis_lex_with(&inst, encoding);
    let pair = monotone_closure(&sol.a, &sol.b, shape, EdgeRule::Weak)?;
    let mechanism = thresholds_and_payments(&pair.to_matrix(), prior.grid())?;
    let revenue = expected_revenue(&mechanism, prior)?;
    debug_assert_eq!(revenue, &sol.objective / prior.total_mass());
    Ok(Discrete2Solution {
        pair,
        mechanism,
        revenue,
        independent_set: sol,
    })
}

/// Best revenue over every valid allocation pair.
///
/// Enumerates all `alpha`; given `alpha`, each column's `beta(i)` is limited
/// only from below, so it is chosen independently as the best posted price
/// above the last row bidder 1 wins in that column.
pub fn brute_force2(prior: &JointPrior) -> Result<(Q, Mechanism)> {
    let (n1, n2) = require_two(prior)?;
    let count = (n1 as u128 + 1).checked_pow(n2 as u32).unwrap_or(u128::MAX);
    if count > BRUTE_FORCE2_LIMIT {
        return Err(AuctionError::SizeGuard(format!(
            "{count} alpha vectors exceed the limit of {BRUTE_FORCE2_LIMIT}"
        )));
    }
    let r1 = prior.suffix_revenues(0)?;
    let r2 = prior.suffix_revenues(1)?;
    let rev1 = |i: usize, j: usize| if i == n1 { Q::zero() } else { r1[i * n2 + j].clone() };
    // best_beta[i][lb] = best (revenue, index) over beta in lb..=n2
    let best_beta: Vec<Vec<(Q, usize)>> = (0..n1)
        .map(|i| {
            let mut table = vec![(Q::zero(), n2); n2 + 1];
            for lb in (0..n2).rev() {
                let here = r2[i * n2 + lb].clone();
                table[lb] = if here > table[lb + 1].0 { (here, lb) } else { table[lb + 1].clone() };
            }
            table
        })
        .collect();

    let mut alpha = vec![0usize; n2];
    let mut best: Option<(Q, Vec<usize>, Vec<usize>)> = None;
    loop {
        let mut total: Q = (0..n2).map(|j| rev1(alpha[j], j)).sum();
        let mut beta = Vec::with_capacity(n1);
        for (i, table) in best_beta.iter().enumerate() {
            let lb = (0..n2).rev().find(|&j| alpha[j] <= i).map_or(0, |j| j + 1);
            let (r, b) = &table[lb];
            total += r;
            beta.push(*b);
        }
        if best.as_ref().map_or(true, |(r, _, _)| total > *r) {
            best = Some((total, alpha.clone(), beta));
        }
        // odometer over alpha in {0..=n1}^n2
        let mut k = 0;
        while k < n2 {
            alpha[k] += 1;
            if alpha[k] <= n1 {
                break;
            }
            alpha[k] = 0;
            k += 1;
        }
        if k == n2 {
            break;
        }
    }
    let (_, alpha, beta) = best.expect("at least one alpha");
    let pair = AllocationPair::new(n1, n2, alpha, beta)?;
    let mech = thresholds_and_payments(&pair.to_matrix(), prior.grid())?;
    let revenue = expected_revenue(&mech, prior)?;
    Ok((revenue, mech))
}
