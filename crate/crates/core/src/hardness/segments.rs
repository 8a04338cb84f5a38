//! Three-bidder allocations as sets of axis-parallel segments.
//!
//! A proper monotone allocation gives each bidder, on each line along their
//! axis, either nothing or a suffix starting at a point of positive marginal
//! profit. Such a suffix is a segment; its weight is the suffix sum of
//! marginal profit, which equals the revenue collected on it. An allocation
//! is a set of pairwise disjoint segments.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{AuctionError, Result};
use crate::mech::{thresholds_and_payments, AllocationMatrix, Mechanism};
use crate::priors::{mpc_discrete, JointPrior};
use super::search::Mwis;
use crate::rational::{common_denominator, Q};

/// Largest segment count [`solve_3segments_exact`] accepts.
pub const SEGMENT_LIMIT: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    /// Bidder whose axis the segment runs along.
    pub axis: usize,
    /// 1-based lowest point.
    pub apex: [usize; 3],
    #[serde(with = "crate::rational::serde_q")]
    pub weight: Q,
}

impl Segment {
    /// Whether the two segments share a grid point. Both run to the top of
    /// the grid, so on a common line they always overlap.
    pub fn intersects(&self, other: &Segment) -> bool {
        let (a, b) = (self.axis, other.axis);
        let (p, q) = (&self.apex, &other.apex);
        if a == b {
            return (0..3).filter(|&k| k != a).all(|k| p[k] == q[k]);
        }
        let c = 3 - a - b;
        p[c] == q[c] && q[a] >= p[a] && p[b] >= q[b]
    }
}

fn require_three(prior: &JointPrior) -> Result<()> {
    if prior.bidders() != 3 {
        return Err(AuctionError::WrongBidderCount {
            expected: 3,
            found: prior.bidders(),
        });
    }
    Ok(())
}

/// Every segment with positive weight: one per point of positive marginal
/// profit and per bidder, ordered by axis and then row-major apex.
pub fn extract_segments(prior: &JointPrior) -> Result<Vec<Segment>> {
    require_three(prior)?;
    let layout = prior.layout();
    let mut out = Vec::new();
    for axis in 0..3 {
        let f = mpc_discrete(prior, axis)?;
        let mut weight = vec![Q::zero(); layout.len()];
        for start in layout.line_starts(axis) {
            let points: Vec<usize> = layout.line(axis, start).collect();
            let mut acc = Q::zero();
            for &p in points.iter().rev() {
                acc += f.at(p);
                weight[p] = acc.clone();
            }
        }
        for (flat, w) in weight.into_iter().enumerate() {
            if f.at(flat).is_positive() {
                let idx = layout.unflatten(flat);
                out.push(Segment {
                    axis,
                    apex: [idx[0] + 1, idx[1] + 1, idx[2] + 1],
                    weight: w,
                });
            }
        }
    }
    Ok(out)
}

/// Adjacency lists of the intersection graph.
pub fn intersection_graph(segments: &[Segment]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); segments.len()];
    for a in 0..segments.len() {
        for b in a + 1..segments.len() {
            if segments[a].intersects(&segments[b]) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    adj
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentSelection {
    /// Indices into the segment list, ascending.
    pub selected: Vec<usize>,
    #[serde(with = "crate::rational::serde_q")]
    pub weight: Q,
}

/// Maximum-weight set of pairwise disjoint segments.
///
/// Weights are scaled to integers by their common denominator; the
/// intersection graph is then solved exactly by branch and bound with
/// simplicial and dominance reductions, component splitting and a clique
/// cover bound.
pub fn solve_3segments_exact(segments: &[Segment]) -> Result<SegmentSelection> {
    if segments.len() > SEGMENT_LIMIT {
        return Err(AuctionError::SizeGuard(format!(
            "{} segments exceed the limit of {SEGMENT_LIMIT}",
            segments.len()
        )));
    }
    let denom = common_denominator(segments.iter().map(|s| &s.weight));
    let scaled: Option<Vec<i128>> = segments
        .iter()
        .map(|s| (s.weight.numer() * (&denom / s.weight.denom())).to_i128())
        .collect();
    let scaled = scaled
        .filter(|w| w.iter().try_fold(0i128, |acc, &x| acc.checked_add(x)).is_some())
        .ok_or_else(|| AuctionError::SizeGuard("segment weights overflow 128-bit scaling".into()))?;
    let adj = intersection_graph(segments);
    let (_, selected) = Mwis::new(&scaled, &adj).solve_all();
    let weight = selected.iter().map(|&k| segments[k].weight.clone()).sum();
    Ok(SegmentSelection { selected, weight })
}

/// Allocation covering each chosen segment, with threshold payments.
pub fn segments_to_mechanism(prior: &JointPrior, segments: &[Segment]) -> Result<Mechanism> {
    require_three(prior)?;
    let layout = prior.layout();
    let shape = layout.shape();
    let mut owner: Vec<Option<usize>> = vec![None; layout.len()];
    let mut winners = vec![0u8; layout.len()];
    for (a, s) in segments.iter().enumerate() {
        let mut p: Vec<usize> = s.apex.iter().map(|k| k - 1).collect();
        layout.flat(&p)?;
        while p[s.axis] < shape[s.axis] {
            let flat = layout.flat_unchecked(&p);
            if let Some(b) = owner[flat] {
                return Err(AuctionError::OverlappingSegments { first: b, second: a });
            }
            owner[flat] = Some(a);
            winners[flat] = s.axis as u8 + 1;
            p[s.axis] += 1;
        }
    }
    let alloc = AllocationMatrix::new(shape, winners)?;
    thresholds_and_payments(&alloc, prior.grid())
}

/// Winning suffixes of a monotone allocation, one per line a bidder wins on.
pub fn mechanism_segments(prior: &JointPrior, alloc: &AllocationMatrix) -> Result<Vec<Segment>> {
    require_three(prior)?;
    let layout = prior.layout();
    let mut out = Vec::new();
    for axis in 0..3 {
        let revenues = prior.suffix_revenues(axis)?;
        for start in layout.line_starts(axis) {
            if let Some(first) = layout.line(axis, start).find(|&f| alloc.wins(axis, f)) {
                let idx = layout.unflatten(first);
                out.push(Segment {
                    axis,
                    apex: [idx[0] + 1, idx[1] + 1, idx[2] + 1],
                    weight: revenues[first].clone(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mech::{expected_revenue, verify_truthful};
    use crate::multi::brute_force_n;
    use crate::priors::ValueGrid;
    use crate::rational::{q, qi};

    fn seg(axis: usize, apex: [usize; 3]) -> Segment {
        Segment {
            axis,
            apex,
            weight: qi(1),
        }
    }

    #[test]
    fn intersection_rules() {
        // x-segment from (1,2,3) and y-segment from (2,1,3) meet at (2,2,3)
        assert!(seg(0, [1, 2, 3]).intersects(&seg(1, [2, 1, 3])));
        assert!(!seg(0, [1, 2, 3]).intersects(&seg(1, [2, 1, 4])));
        assert!(!seg(0, [3, 2, 3]).intersects(&seg(1, [2, 1, 3])));
        assert!(!seg(0, [1, 2, 3]).intersects(&seg(1, [2, 3, 3])));
        assert!(seg(2, [1, 1, 1]).intersects(&seg(2, [1, 1, 4])));
        assert!(!seg(2, [1, 1, 1]).intersects(&seg(2, [1, 2, 1])));
    }

    #[test]
    fn intersection_matches_cell_overlap() {
        let n = 3;
        let cells = |s: &Segment| {
            let mut v = Vec::new();
            let mut p = s.apex;
            while p[s.axis] <= n {
                v.push(p);
                p[s.axis] += 1;
            }
            v
        };
        let mut all = Vec::new();
        for axis in 0..3 {
            for x in 1..=n {
                for y in 1..=n {
                    for z in 1..=n {
                        all.push(seg(axis, [x, y, z]));
                    }
                }
            }
        }
        for a in &all {
            for b in &all {
                let shared = cells(a).iter().any(|p| cells(b).contains(p));
                assert_eq!(a.intersects(b), shared, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn exact_matches_brute_force() {
        let grid = ValueGrid::integer(3, 3);
        let masses: Vec<Q> = (0..27).map(|k| q((k * 7 % 11) as i64, 1)).collect();
        let p = JointPrior::new(grid, masses).unwrap();
        let segs = extract_segments(&p).unwrap();
        let sel = solve_3segments_exact(&segs).unwrap();
        let chosen: Vec<Segment> = sel.selected.iter().map(|&k| segs[k].clone()).collect();
        let mech = segments_to_mechanism(&p, &chosen).unwrap();
        assert!(verify_truthful(&mech).is_pass());
        let rev = expected_revenue(&mech, &p).unwrap();
        assert_eq!(rev, &sel.weight / p.total_mass());
        assert_eq!(rev, brute_force_n(&p).unwrap().0);
        let back = mechanism_segments(&p, &mech.allocation).unwrap();
        let mut sorted = chosen.clone();
        sorted.sort_by_key(|s| (s.axis, s.apex));
        let mut back_sorted = back;
        back_sorted.sort_by_key(|s| (s.axis, s.apex));
        assert_eq!(sorted, back_sorted);
    }

    #[test]
    fn point_mass_and_zero_prior() {
        let grid = ValueGrid::new(vec![vec![qi(1), qi(2)], vec![qi(3), qi(4)], vec![qi(5), qi(6)]]).unwrap();
        let mut m = vec![qi(0); 8];
        m[0b011] = qi(1);
        let p = JointPrior::new(grid.clone(), m).unwrap();
        let segs = extract_segments(&p).unwrap();
        let got: Vec<(usize, [usize; 3], Q)> = segs.into_iter().map(|s| (s.axis, s.apex, s.weight)).collect();
        assert_eq!(got, vec![(0, [1, 2, 2], qi(1)), (1, [1, 2, 2], qi(4)), (2, [1, 2, 2], qi(6))]);
        // an all-zero prior has no segments and is refused up front
        assert!(JointPrior::new(grid, vec![qi(0); 8]).is_err());
    }

    #[test]
    fn heavier_of_two_crossing() {
        let a = Segment { axis: 0, apex: [1, 1, 1], weight: qi(3) };
        let b = Segment { axis: 1, apex: [1, 1, 1], weight: qi(5) };
        let sel = solve_3segments_exact(&[a, b]).unwrap();
        assert_eq!((sel.selected, sel.weight), (vec![1], qi(5)));
    }

    #[test]
    fn overlapping_selection_rejected() {
        let p = JointPrior::new(ValueGrid::integer(3, 2), vec![qi(1); 8]).unwrap();
        assert!(matches!(
            segments_to_mechanism(&p, &[seg(0, [1, 1, 1]), seg(1, [1, 1, 1])]),
            Err(AuctionError::OverlappingSegments { .. })
        ));
    }
}
