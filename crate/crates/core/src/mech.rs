//! Allocations, threshold payments and truthfulness checks.

use num_traits::{Signed, Zero};

use crate::error::{AuctionError, Result};
use crate::mwis::EdgeRule;
use crate::priors::{JointPrior, Layout, MarginalProfitGrid, ValueGrid};
use crate::rational::Q;

/// Which reading of the non-crossing property to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonCrossing {
    /// `j >= beta(i)` implies `i < alpha(j)`: the regions are disjoint.
    Strict,
    /// `j >= beta(i)` implies `i <= alpha(j)`: boundaries may touch.
    Weak,
}

/// Boundary curves of a two-bidder allocation on an `n1 x n2` grid.
///
/// `alpha[j]` is the lowest index of bidder 1 that wins when bidder 2 reports
/// index `j`; `n1` means bidder 1 never wins on that row. `beta` is the mirror
/// image for bidder 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationPair {
    n1: usize,
    n2: usize,
    alpha: Vec<usize>,
    beta: Vec<usize>,
}

impl AllocationPair {
    /// Builds a pair and checks that the induced regions are disjoint.
    pub fn new(n1: usize, n2: usize, alpha: Vec<usize>, beta: Vec<usize>) -> Result<Self> {
        let pair = Self::unchecked(n1, n2, alpha, beta)?;
        if let Some((i, j)) = pair.crossing(NonCrossing::Strict) {
            return Err(AuctionError::InvalidParameter(format!(
                "allocation pair crosses at ({i}, {j})"
            )));
        }
        Ok(pair)
    }

    /// Builds a pair without checking the non-crossing property.
    pub fn unchecked(n1: usize, n2: usize, alpha: Vec<usize>, beta: Vec<usize>) -> Result<Self> {
        if alpha.len() != n2 || beta.len() != n1 {
            return Err(AuctionError::ShapeMismatch {
                expected: vec![n2, n1],
                found: vec![alpha.len(), beta.len()],
            });
        }
        if alpha.iter().any(|&a| a > n1) || beta.iter().any(|&b| b > n2) {
            return Err(AuctionError::InvalidParameter("threshold index out of range".into()));
        }
        Ok(Self { n1, n2, alpha, beta })
    }

    pub fn empty(n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            alpha: vec![n1; n2],
            beta: vec![n2; n1],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn beta(&self) -> &[usize] {
        &self.beta
    }

    pub fn in_a(&self, i: usize, j: usize) -> bool {
        i >= self.alpha[j]
    }

    pub fn in_b(&self, i: usize, j: usize) -> bool {
        j >= self.beta[i]
    }

    /// First grid point violating the chosen non-crossing form.
    pub fn crossing(&self, form: NonCrossing) -> Option<(usize, usize)> {
        for i in 0..self.n1 {
            for j in self.beta[i]..self.n2 {
                let ok = match form {
                    NonCrossing::Strict => i < self.alpha[j],
                    NonCrossing::Weak => i <= self.alpha[j],
                };
                if !ok {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_valid(&self) -> bool {
        self.crossing(NonCrossing::Strict).is_none()
    }

    pub fn to_matrix(&self) -> AllocationMatrix {
        let mut winners = vec![0u8; self.n1 * self.n2];
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                winners[i * self.n2 + j] = if self.in_a(i, j) {
                    1
                } else if self.in_b(i, j) {
                    2
                } else {
                    0
                };
            }
        }
        AllocationMatrix {
            layout: Layout::new(&[self.n1, self.n2]),
            bidders: 2,
            winners,
        }
    }

    /// Sum of `f` over region A and `g` over region B, in raw mass units.
    pub fn region_weight(&self, f: &MarginalProfitGrid, g: &MarginalProfitGrid) -> Q {
        let mut total = Q::zero();
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                if self.in_a(i, j) {
                    total += f.get(&[i, j]);
                } else if self.in_b(i, j) {
                    total += g.get(&[i, j]);
                }
            }
        }
        total
    }
}

/// Winner at every grid point: `0` keeps the item, `k` gives it to bidder `k - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationMatrix {
    layout: Layout,
    bidders: usize,
    winners: Vec<u8>,
}

impl AllocationMatrix {
    pub fn new(shape: &[usize], winners: Vec<u8>) -> Result<Self> {
        let layout = Layout::new(shape);
        if winners.len() != layout.len() {
            return Err(AuctionError::ShapeMismatch {
                expected: shape.to_vec(),
                found: vec![winners.len()],
            });
        }
        if winners.iter().any(|&w| w as usize > shape.len()) {
            return Err(AuctionError::InvalidParameter("winner index out of range".into()));
        }
        Ok(Self {
            layout,
            bidders: shape.len(),
            winners,
        })
    }

    pub fn nobody(shape: &[usize]) -> Self {
        let layout = Layout::new(shape);
        let winners = vec![0; layout.len()];
        Self {
            layout,
            bidders: shape.len(),
            winners,
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn shape(&self) -> &[usize] {
        self.layout.shape()
    }

    pub fn bidders(&self) -> usize {
        self.bidders
    }

    pub fn winners(&self) -> &[u8] {
        &self.winners
    }

    pub fn winner(&self, flat: usize) -> u8 {
        self.winners[flat]
    }

    pub fn set(&mut self, flat: usize, winner: u8) {
        self.winners[flat] = winner;
    }

    pub fn wins(&self, bidder: usize, flat: usize) -> bool {
        self.winners[flat] as usize == bidder + 1
    }

    /// Raising a winner's own value must keep them winning.
    pub fn check_monotone(&self) -> Result<()> {
        for bidder in 0..self.bidders {
            for start in self.layout.line_starts(bidder) {
                let mut won_at: Option<usize> = None;
                for f in self.layout.line(bidder, start) {
                    let w = self.wins(bidder, f);
                    match (won_at, w) {
                        (None, true) => won_at = Some(f),
                        (Some(prev), false) => {
                            return Err(AuctionError::NonMonotone {
                                bidder,
                                winning: self.layout.unflatten(prev),
                                losing: self.layout.unflatten(f),
                            })
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }
}

/// Allocation plus threshold and payment tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    pub grid: ValueGrid,
    pub allocation: AllocationMatrix,
    /// Per bidder, one entry per line along that bidder's axis (in
    /// `Layout::line_starts` order): the lowest winning value, or `None`.
    pub thresholds: Vec<Vec<Option<Q>>>,
    /// Per bidder, the payment at every grid point (flat row-major order).
    pub payments: Vec<Vec<Q>>,
}

impl Mechanism {
    pub fn bidders(&self) -> usize {
        self.grid.bidders()
    }

    pub fn payment(&self, bidder: usize, flat: usize) -> &Q {
        &self.payments[bidder][flat]
    }
}

/// Threshold payments for a monotone allocation: the winner pays the lowest
/// value at which they would still win, everybody else pays nothing.
pub fn thresholds_and_payments(alloc: &AllocationMatrix, grid: &ValueGrid) -> Result<Mechanism> {
    if alloc.shape() != grid.shape().as_slice() {
        return Err(AuctionError::ShapeMismatch {
            expected: grid.shape(),
            found: alloc.shape().to_vec(),
        });
    }
    alloc.check_monotone()?;
    let layout = alloc.layout();
    let n = grid.bidders();
    let mut thresholds = Vec::with_capacity(n);
    let mut payments = vec![vec![Q::zero(); layout.len()]; n];
    for bidder in 0..n {
        let starts = layout.line_starts(bidder);
        let mut per_line = Vec::with_capacity(starts.len());
        for start in starts {
            let line: Vec<usize> = layout.line(bidder, start).collect();
            let first = line.iter().position(|&f| alloc.wins(bidder, f));
            let t = first.map(|k| grid.value(bidder, k).clone());
            if let (Some(k), Some(t)) = (first, &t) {
                for &f in &line[k..] {
                    payments[bidder][f] = t.clone();
                }
            }
            per_line.push(t);
        }
        thresholds.push(per_line);
    }
    Ok(Mechanism {
        grid: grid.clone(),
        allocation: alloc.clone(),
        thresholds,
        payments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Misreporting strictly increases utility.
    IncentiveCompatibility,
    /// Truthful utility is negative.
    IndividualRationality,
    /// A payment is negative.
    NoPositiveTransfers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub bidder: usize,
    pub point: Vec<usize>,
    /// The profitable misreport (own index only), for IC violations.
    pub deviation: Option<usize>,
    pub truthful_utility: Q,
    pub deviation_utility: Option<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Truthfulness {
    Pass,
    Violated(Violation),
}

impl Truthfulness {
    pub fn is_pass(&self) -> bool {
        matches!(self, Truthfulness::Pass)
    }
}

fn utility(mech: &Mechanism, bidder: usize, value: &Q, flat: usize) -> Q {
    let paid = mech.payment(bidder, flat);
    if mech.allocation.wins(bidder, flat) {
        value - paid
    } else {
        -paid.clone()
    }
}

/// Checks NPT, IR and ex-post IC at every grid point for every bidder.
///
/// Scans bidders in order and points in row-major order, returning the first
/// violation. For each line the best misreport is found from the cheapest
/// winning and cheapest losing report on that line, which covers every
/// deviation on the grid; ties go to the lowest deviation index.
pub fn verify_truthful(mech: &Mechanism) -> Truthfulness {
    let layout = mech.allocation.layout();
    for bidder in 0..mech.bidders() {
        let mut first: Option<(usize, Violation)> = None;
        for start in layout.line_starts(bidder) {
            let line: Vec<usize> = layout.line(bidder, start).collect();
            let mut cheapest_win: Option<(usize, &Q)> = None;
            let mut cheapest_loss: Option<(usize, &Q)> = None;
            for (k, &f) in line.iter().enumerate() {
                let p = mech.payment(bidder, f);
                let slot = if mech.allocation.wins(bidder, f) {
                    &mut cheapest_win
                } else {
                    &mut cheapest_loss
                };
                if slot.map_or(true, |(_, best)| p < best) {
                    *slot = Some((k, p));
                }
            }
            for (k, &f) in line.iter().enumerate() {
                if first.as_ref().is_some_and(|(pos, _)| *pos < f) {
                    break;
                }
                let v = mech.grid.value(bidder, k);
                let truthful = utility(mech, bidder, v, f);
                let point = layout.unflatten(f);
                let violation = if mech.payment(bidder, f).is_negative() {
                    Some(Violation {
                        kind: ViolationKind::NoPositiveTransfers,
                        bidder,
                        point,
                        deviation: None,
                        truthful_utility: truthful,
                        deviation_utility: None,
                    })
                } else if truthful.is_negative() {
                    Some(Violation {
                        kind: ViolationKind::IndividualRationality,
                        bidder,
                        point,
                        deviation: None,
                        truthful_utility: truthful,
                        deviation_utility: None,
                    })
                } else {
                    let win = cheapest_win.map(|(d, p)| (d, v - p));
                    let loss = cheapest_loss.map(|(d, p)| (d, -p.clone()));
                    let best = match (win, loss) {
                        (Some(a), Some(b)) => Some(if a.1 > b.1 || (a.1 == b.1 && a.0 < b.0) { a } else { b }),
                        (a, b) => a.or(b),
                    };
                    best.filter(|(_, u)| *u > truthful).map(|(d, u)| Violation {
                        kind: ViolationKind::IncentiveCompatibility,
                        bidder,
                        point,
                        deviation: Some(d),
                        truthful_utility: truthful,
                        deviation_utility: Some(u),
                    })
                };
                if let Some(v) = violation {
                    if first.as_ref().map_or(true, |(pos, _)| f < *pos) {
                        first = Some((f, v));
                    }
                    break;
                }
            }
        }
        if let Some((_, v)) = first {
            return Truthfulness::Violated(v);
        }
    }
    Truthfulness::Pass
}

/// Literal scan over every bidder, point and misreport. Quadratic in the
/// line length; meant for small grids and for cross-checking
/// [`verify_truthful`].
pub fn verify_truthful_exhaustive(mech: &Mechanism) -> Truthfulness {
    let layout = mech.allocation.layout();
    for bidder in 0..mech.bidders() {
        for f in 0..layout.len() {
            let point = layout.unflatten(f);
            let k = point[bidder];
            let v = mech.grid.value(bidder, k);
            let truthful = utility(mech, bidder, v, f);
            if mech.payment(bidder, f).is_negative() {
                return Truthfulness::Violated(Violation {
                    kind: ViolationKind::NoPositiveTransfers,
                    bidder,
                    point,
                    deviation: None,
                    truthful_utility: truthful,
                    deviation_utility: None,
                });
            }
            if truthful.is_negative() {
                return Truthfulness::Violated(Violation {
                    kind: ViolationKind::IndividualRationality,
                    bidder,
                    point,
                    deviation: None,
                    truthful_utility: truthful,
                    deviation_utility: None,
                });
            }
            let mut best: Option<(usize, Q)> = None;
            for (d, g) in layout.line(bidder, f).enumerate() {
                let u = utility(mech, bidder, v, g);
                if u > truthful && best.as_ref().map_or(true, |(_, b)| u > *b) {
                    best = Some((d, u));
                }
            }
            if let Some((d, u)) = best {
                return Truthfulness::Violated(Violation {
                    kind: ViolationKind::IncentiveCompatibility,
                    bidder,
                    point,
                    deviation: Some(d),
                    truthful_utility: truthful,
                    deviation_utility: Some(u),
                });
            }
        }
    }
    Truthfulness::Pass
}

/// Expected payment `sum_v phi(v) sum_i p_i(v)`, normalized by the prior's
/// total mass.
pub fn expected_revenue(mech: &Mechanism, prior: &JointPrior) -> Result<Q> {
    if mech.allocation.shape() != prior.shape() {
        return Err(AuctionError::ShapeMismatch {
            expected: prior.shape().to_vec(),
            found: mech.allocation.shape().to_vec(),
        });
    }
    let mut total = Q::zero();
    for (f, m) in prior.masses().iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        for bidder in 0..mech.bidders() {
            let p = mech.payment(bidder, f);
            if !p.is_zero() {
                total += m * p;
            }
        }
    }
    Ok(total / prior.total_mass())
}

/// Boundary rows and columns whose marginal profit contribution is zero.
pub fn improper_boundaries(
    pair: &AllocationPair,
    f: &MarginalProfitGrid,
    g: &MarginalProfitGrid,
) -> Vec<String> {
    let (n1, n2) = pair.shape();
    let mut out = Vec::new();
    for (j, &a) in pair.alpha().iter().enumerate() {
        if a < n1 && f.get(&[a, j]).is_zero() {
            out.push(format!("alpha({j}) = {a} has zero contribution"));
        }
    }
    for (i, &b) in pair.beta().iter().enumerate() {
        if b < n2 && g.get(&[i, b]).is_zero() {
            out.push(format!("beta({i}) = {b} has zero contribution"));
        }
    }
    out
}

/// Revenue as the sum of marginal profit contributions over the two regions.
/// Equals [`expected_revenue`] only for proper pairs, so improper ones are
/// rejected.
pub fn revenue_via_mpc(pair: &AllocationPair, f: &MarginalProfitGrid, g: &MarginalProfitGrid) -> Result<Q> {
    let (n1, n2) = pair.shape();
    if f.shape() != [n1, n2] || g.shape() != [n1, n2] {
        return Err(AuctionError::ShapeMismatch {
            expected: vec![n1, n2],
            found: f.shape().to_vec(),
        });
    }
    let bad = improper_boundaries(pair, f, g);
    if !bad.is_empty() {
        return Err(AuctionError::NotProper(bad.join("; ")));
    }
    Ok(pair.region_weight(f, g) / f.total_mass())
}

/// Largest index in `from..=len` maximizing `rev`, where `len` stands for
/// "never allocate" with revenue zero. Returns `from` itself when it already
/// is that index.
fn largest_argmax<T: PartialOrd + Zero>(from: usize, len: usize, rev: impl Fn(usize) -> T) -> usize {
    let mut best_idx = from;
    let mut best = if from == len { T::zero() } else { rev(from) };
    for k in from + 1..=len {
        let r = if k == len { T::zero() } else { rev(k) };
        if r >= best {
            best = r;
            best_idx = k;
        }
    }
    best_idx
}

/// Moves every boundary point to the largest suffix argmax of its row or
/// column revenue. Thresholds only move up, so validity is preserved and
/// revenue does not decrease.
///
/// `alpha_rev(j, i)` is bidder 1's posted-price revenue at index `i` on row
/// `j`; `beta_rev(i, j)` is bidder 2's on column `i`.
pub fn make_proper_with<T: PartialOrd + Zero>(
    pair: &AllocationPair,
    alpha_rev: impl Fn(usize, usize) -> T,
    beta_rev: impl Fn(usize, usize) -> T,
) -> AllocationPair {
    let (n1, n2) = pair.shape();
    let alpha = pair
        .alpha()
        .iter()
        .enumerate()
        .map(|(j, &a)| largest_argmax(a, n1, |i| alpha_rev(j, i)))
        .collect();
    let beta = pair
        .beta()
        .iter()
        .enumerate()
        .map(|(i, &b)| largest_argmax(b, n2, |j| beta_rev(i, j)))
        .collect();
    AllocationPair {
        n1,
        n2,
        alpha,
        beta,
    }
}

pub fn make_proper(pair: &AllocationPair, prior: &JointPrior) -> Result<AllocationPair> {
    let (n1, n2) = pair.shape();
    if prior.shape() != [n1, n2] {
        return Err(AuctionError::ShapeMismatch {
            expected: prior.shape().to_vec(),
            found: vec![n1, n2],
        });
    }
    let r1 = prior.suffix_revenues(0)?;
    let r2 = prior.suffix_revenues(1)?;
    Ok(make_proper_with(
        pair,
        |j, i| r1[i * n2 + j].clone(),
        |i, j| r2[i * n2 + j].clone(),
    ))
}

/// Lowest selected index per row of A and per column of B; `n` when empty.
pub(crate) fn closure_thresholds(
    a: &[(usize, usize)],
    b: &[(usize, usize)],
    n1: usize,
    n2: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut alpha = vec![n1; n2];
    let mut beta = vec![n2; n1];
    for &(i, j) in a {
        alpha[j] = alpha[j].min(i);
    }
    for &(i, j) in b {
        beta[i] = beta[i].min(j);
    }
    (alpha, beta)
}

/// Closes A rightward and B upward. Fails if the input already contains a
/// conflicting pair under `rule`, or if the closed regions overlap.
pub fn monotone_closure(
    a: &[(usize, usize)],
    b: &[(usize, usize)],
    shape: (usize, usize),
    rule: EdgeRule,
) -> Result<AllocationPair> {
    let (n1, n2) = shape;
    if a.iter().chain(b).any(|&(i, j)| i >= n1 || j >= n2) {
        return Err(AuctionError::IndexOutOfRange {
            index: vec![],
            shape: vec![n1, n2],
        });
    }
    // Dominance on both sets reduces to the extreme points per row/column.
    let (alpha, beta) = closure_thresholds(a, b, n1, n2);
    for (j, &ai) in alpha.iter().enumerate() {
        if ai == n1 {
            continue;
        }
        for (i, &bj) in beta.iter().enumerate() {
            if bj < n2 && rule.conflicts((ai, j), (i, bj)) {
                return Err(AuctionError::ConflictingSelection { u: (ai, j), w: (i, bj) });
            }
        }
    }
    AllocationPair::new(n1, n2, alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::mpc_discrete;
    use crate::rational::{q, qi};

    fn uniform22() -> JointPrior {
        JointPrior::new(ValueGrid::integer(2, 2), vec![q(1, 4); 4]).unwrap()
    }

    fn optimal_uniform_pair() -> AllocationPair {
        // A = {(2,1),(2,2)}, B = {(1,2)} in 1-based terms
        AllocationPair::new(2, 2, vec![1, 1], vec![1, 2]).unwrap()
    }

    #[test]
    fn thresholds_uniform_example() {
        let pair = optimal_uniform_pair();
        let mech = thresholds_and_payments(&pair.to_matrix(), &ValueGrid::integer(2, 2)).unwrap();
        assert_eq!(mech.thresholds[0], vec![Some(qi(2)), Some(qi(2))]);
        assert_eq!(mech.payment(0, 2), &qi(2));
        assert_eq!(mech.payment(0, 3), &qi(2));
        assert_eq!(mech.payment(1, 1), &qi(2));
        assert_eq!(mech.payment(1, 0), &qi(0));
        assert!(verify_truthful(&mech).is_pass());
        assert_eq!(expected_revenue(&mech, &uniform22()).unwrap(), q(3, 2));
    }

    #[test]
    fn full_column_win_pays_lowest_value() {
        let pair = AllocationPair::new(2, 2, vec![0, 0], vec![2, 2]).unwrap();
        let mech = thresholds_and_payments(&pair.to_matrix(), &ValueGrid::integer(2, 2)).unwrap();
        assert_eq!(mech.thresholds[0], vec![Some(qi(1)), Some(qi(1))]);
        assert_eq!(mech.thresholds[1], vec![None, None]);
    }

    #[test]
    fn non_monotone_rejected() {
        let alloc = AllocationMatrix::new(&[2, 2], vec![1, 0, 0, 0]).unwrap();
        let err = thresholds_and_payments(&alloc, &ValueGrid::integer(2, 2)).unwrap_err();
        assert!(matches!(err, AuctionError::NonMonotone { bidder: 0, .. }));
    }

    #[test]
    fn first_price_payments_break_ic() {
        // bidder 1 wins everywhere on a 3-level grid, pays own value
        let grid = ValueGrid::integer(2, 3);
        let alloc = AllocationPair::new(3, 3, vec![0, 0, 0], vec![3, 3, 3]).unwrap().to_matrix();
        let mut mech = thresholds_and_payments(&alloc, &grid).unwrap();
        for f in 0..9 {
            let i = f / 3;
            mech.payments[0][f] = grid.value(0, i).clone();
        }
        match verify_truthful(&mech) {
            Truthfulness::Violated(v) => {
                assert_eq!(v.kind, ViolationKind::IncentiveCompatibility);
                assert_eq!(v.point, vec![1, 0]);
                assert_eq!(v.deviation, Some(0));
            }
            Truthfulness::Pass => panic!("first-price payments passed"),
        }
        assert_eq!(verify_truthful(&mech), verify_truthful_exhaustive(&mech));
    }

    #[test]
    fn inflated_threshold_breaks_ir() {
        let pair = optimal_uniform_pair();
        let mut mech = thresholds_and_payments(&pair.to_matrix(), &ValueGrid::integer(2, 2)).unwrap();
        for p in mech.payments[1].iter_mut() {
            if !p.is_zero() {
                *p += qi(1);
            }
        }
        match verify_truthful(&mech) {
            Truthfulness::Violated(v) => {
                assert_eq!(v.kind, ViolationKind::IndividualRationality);
                assert_eq!(v.bidder, 1);
                assert_eq!(v.point, vec![0, 1]);
            }
            Truthfulness::Pass => panic!("IR violation missed"),
        }
    }

    #[test]
    fn revenue_identity_uniform() {
        let p = uniform22();
        let f = mpc_discrete(&p, 0).unwrap();
        let g = mpc_discrete(&p, 1).unwrap();
        assert_eq!(revenue_via_mpc(&optimal_uniform_pair(), &f, &g).unwrap(), q(3, 2));
        assert_eq!(revenue_via_mpc(&AllocationPair::empty(2, 2), &f, &g).unwrap(), qi(0));
        let improper = AllocationPair::new(2, 2, vec![0, 2], vec![2, 2]).unwrap();
        assert!(matches!(revenue_via_mpc(&improper, &f, &g), Err(AuctionError::NotProper(_))));
    }

    #[test]
    fn make_proper_examples() {
        let p = uniform22();
        let pair = optimal_uniform_pair();
        assert_eq!(make_proper(&pair, &p).unwrap(), pair);
        let low = AllocationPair::new(2, 2, vec![0, 0], vec![2, 2]).unwrap();
        let fixed = make_proper(&low, &p).unwrap();
        assert_eq!(fixed.alpha(), &[1, 1]);
    }

    #[test]
    fn closure_examples() {
        let pair = monotone_closure(&[(1, 0)], &[], (3, 3), EdgeRule::Weak).unwrap();
        assert!(pair.in_a(1, 0) && pair.in_a(2, 0) && !pair.in_a(0, 0));
        assert_eq!(monotone_closure(&[], &[], (2, 2), EdgeRule::Weak).unwrap(), AllocationPair::empty(2, 2));
        let err = monotone_closure(&[(0, 1)], &[(1, 0)], (2, 2), EdgeRule::Weak).unwrap_err();
        assert!(matches!(err, AuctionError::ConflictingSelection { .. }));
    }

    #[test]
    fn non_crossing_forms() {
        let touching = AllocationPair::unchecked(2, 2, vec![1, 1], vec![1, 1]).unwrap();
        assert_eq!(touching.crossing(NonCrossing::Strict), Some((1, 1)));
        assert_eq!(touching.crossing(NonCrossing::Weak), None);
    }
}
