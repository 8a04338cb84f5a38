//! Optimal auctions for more than two bidders by exhaustive search, and the
//! best two-bidder sub-auction.

use num_traits::{Signed, Zero};

use crate::error::{AuctionError, Result};
use crate::mech::{expected_revenue, thresholds_and_payments, AllocationMatrix, Mechanism};
use crate::priors::{mpc_discrete, JointPrior};
use crate::rational::Q;
use crate::solve2::solve_discrete2;

/// Largest number of grid points [`brute_force_n`] accepts.
pub const BRUTE_FORCE_N_POINTS: usize = 64;

struct Line {
    bidder: usize,
    /// Flat offsets along the bidder's axis, lowest value first.
    points: Vec<usize>,
    /// Candidate thresholds, best revenue first: `(start, revenue)`, where
    /// `start == points.len()` means the bidder never wins on this line.
    options: Vec<(usize, Q)>,
}

struct Search<'a> {
    lines: &'a [Line],
    /// Marginal profit of each bidder at each point.
    mpc: Vec<Vec<Q>>,
    /// `line_of[bidder][flat]`: index of the line through `flat`.
    line_of: Vec<Vec<usize>>,
    occupied: Vec<bool>,
    decided: Vec<bool>,
    choice: Vec<usize>,
    best: Option<(Q, Vec<usize>)>,
}

impl Search<'_> {
    fn bound(&self, from: usize) -> Q {
        // each remaining line alone, ignoring the others
        let per_line: Q = self.lines[from..]
            .iter()
            .map(|line| {
                let free_from = line
                    .points
                    .iter()
                    .rposition(|&f| self.occupied[f])
                    .map_or(0, |k| k + 1);
                line.options
                    .iter()
                    .filter(|(s, _)| *s >= free_from)
                    .map(|(_, r)| r.clone())
                    .max()
                    .unwrap_or_else(Q::zero)
            })
            .sum();
        // each free point to its most profitable undecided bidder
        let per_point: Q = (0..self.occupied.len())
            .filter(|&f| !self.occupied[f])
            .map(|f| {
                (0..self.mpc.len())
                    .filter(|&b| !self.decided[self.line_of[b][f]])
                    .map(|b| self.mpc[b][f].clone())
                    .max()
                    .unwrap_or_else(Q::zero)
            })
            .sum();
        per_line.min(per_point)
    }

    fn run(&mut self, k: usize, value: Q) {
        if k == self.lines.len() {
            if self.best.as_ref().map_or(true, |(b, _)| value > *b) {
                self.best = Some((value, self.choice.clone()));
            }
            return;
        }
        if let Some((b, _)) = &self.best {
            if &value + self.bound(k) <= *b {
                return;
            }
        }
        let line = &self.lines[k];
        self.decided[k] = true;
        for (start, r) in &line.options {
            if line.points[*start..].iter().any(|&f| self.occupied[f]) {
                continue;
            }
            for &f in &line.points[*start..] {
                self.occupied[f] = true;
            }
            self.choice[k] = *start;
            self.run(k + 1, &value + r);
            for &f in &line.points[*start..] {
                self.occupied[f] = false;
            }
        }
        self.decided[k] = false;
    }
}

/// Exact optimum over all monotone deterministic allocations with threshold
/// payments.
///
/// Only boundaries with positive marginal profit are tried on each line;
/// moving any other boundary up to the next such point loses nothing. With
/// those boundaries a line's revenue is the marginal profit it covers, which
/// gives the per-point bound used for pruning.
pub fn brute_force_n(prior: &JointPrior) -> Result<(Q, Mechanism)> {
    let layout = prior.layout();
    if layout.len() > BRUTE_FORCE_N_POINTS {
        return Err(AuctionError::SizeGuard(format!(
            "{} grid points exceed the limit of {BRUTE_FORCE_N_POINTS}",
            layout.len()
        )));
    }
    let n = prior.bidders();
    let mut lines = Vec::new();
    let mut line_of = vec![vec![0usize; layout.len()]; n];
    let mut mpc = Vec::with_capacity(n);
    for bidder in 0..n {
        let f = mpc_discrete(prior, bidder)?;
        let revenues = prior.suffix_revenues(bidder)?;
        for start in layout.line_starts(bidder) {
            let points: Vec<usize> = layout.line(bidder, start).collect();
            let mut options: Vec<(usize, Q)> = points
                .iter()
                .enumerate()
                .filter(|(_, &p)| f.at(p).is_positive())
                .map(|(k, &p)| (k, revenues[p].clone()))
                .collect();
            options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            options.push((points.len(), Q::zero()));
            for &p in &points {
                line_of[bidder][p] = lines.len();
            }
            lines.push(Line { bidder, points, options });
        }
        mpc.push(f.values().to_vec());
    }
    let mut search = Search {
        lines: &lines,
        mpc,
        line_of,
        occupied: vec![false; layout.len()],
        decided: vec![false; lines.len()],
        choice: vec![0; lines.len()],
        best: None,
    };
    search.run(0, Q::zero());
    let (_, choice) = search.best.expect("the empty allocation is feasible");
    let mut winners = vec![0u8; layout.len()];
    for (line, &start) in lines.iter().zip(&choice) {
        for &f in &line.points[start..] {
            winners[f] = line.bidder as u8 + 1;
        }
    }
    let alloc = AllocationMatrix::new(prior.shape(), winners)?;
    let mech = thresholds_and_payments(&alloc, prior.grid())?;
    let revenue = expected_revenue(&mech, prior)?;
    Ok((revenue, mech))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestPair {
    pub pair: (usize, usize),
    /// Revenue of every pair in lexicographic order.
    pub table: Vec<((usize, usize), Q)>,
    pub mechanism: Mechanism,
    pub revenue: Q,
}

/// Runs the exact two-bidder auction on every pair of bidders and keeps the
/// most profitable one; the other bidders are excluded up front.
pub fn best_pair(prior: &JointPrior) -> Result<BestPair> {
    let n = prior.bidders();
    if n < 2 {
        return Err(AuctionError::WrongBidderCount { expected: 2, found: n });
    }
    let mut table = Vec::new();
    let mut best: Option<((usize, usize), Q, AllocationMatrix)> = None;
    for a in 0..n {
        for b in a + 1..n {
            let marginal = prior.marginalize((a, b))?;
            let sol = solve_discrete2(&marginal)?;
            table.push(((a, b), sol.revenue.clone()));
            if best.as_ref().map_or(true, |(_, r, _)| sol.revenue > *r) {
                best = Some(((a, b), sol.revenue, sol.mechanism.allocation));
            }
        }
    }
    let ((a, b), revenue, small) = best.expect("at least one pair");
    let layout = prior.layout();
    let n2 = prior.shape()[b];
    let winners = (0..layout.len())
        .map(|f| {
            let p = layout.unflatten(f);
            match small.winner(p[a] * n2 + p[b]) {
                1 => a as u8 + 1,
                2 => b as u8 + 1,
                _ => 0,
            }
        })
        .collect();
    let alloc = AllocationMatrix::new(prior.shape(), winners)?;
    let mechanism = thresholds_and_payments(&alloc, prior.grid())?;
    debug_assert_eq!(expected_revenue(&mechanism, prior)?, revenue);
    Ok(BestPair {
        pair: (a, b),
        table,
        mechanism,
        revenue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mech::verify_truthful;
    use crate::priors::ValueGrid;
    use crate::rational::{q, qi};
    use crate::solve2::brute_force2;

    #[test]
    fn single_bidder_posted_price() {
        let grid = ValueGrid::new(vec![vec![qi(1), qi(2), qi(3)]]).unwrap();
        let p = JointPrior::new(grid, vec![q(1, 2), q(1, 4), q(1, 4)]).unwrap();
        // prices 1, 2, 3 earn 1, 1, 3/4
        assert_eq!(brute_force_n(&p).unwrap().0, qi(1));
    }

    #[test]
    fn two_bidders_match_brute_force2() {
        let p = JointPrior::new(ValueGrid::integer(2, 3), (1..=9).map(|k| q(k, 45)).collect()).unwrap();
        assert_eq!(brute_force_n(&p).unwrap().0, brute_force2(&p).unwrap().0);
    }

    #[test]
    fn point_mass_takes_max_value() {
        let grid = ValueGrid::new(vec![vec![qi(1), qi(4)], vec![qi(2), qi(3)], vec![qi(1), qi(5)]]).unwrap();
        let mut m = vec![qi(0); 8];
        m[0b101] = qi(1);
        let p = JointPrior::new(grid, m).unwrap();
        let (rev, mech) = brute_force_n(&p).unwrap();
        assert_eq!(rev, qi(5));
        assert!(verify_truthful(&mech).is_pass());
    }

    #[test]
    fn best_pair_on_uniform_cube() {
        let p = JointPrior::new(ValueGrid::integer(3, 2), vec![q(1, 8); 8]).unwrap();
        let bp = best_pair(&p).unwrap();
        assert_eq!(bp.pair, (0, 1));
        assert_eq!(bp.table.len(), 3);
        assert!(verify_truthful(&bp.mechanism).is_pass());
        let (opt, _) = brute_force_n(&p).unwrap();
        assert!(bp.revenue >= opt * q(2, 3));
    }
}
