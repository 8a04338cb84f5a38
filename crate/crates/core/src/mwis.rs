//! Conflict graphs between the two bidders' marginal profit grids, the
//! lexicographic maximum weight independent set, and its covering dual.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{AuctionError, Result};
use crate::flow::{Capacity, FlowNetwork};
use crate::priors::MarginalProfitGrid;
use crate::rational::{common_denominator, Q};

pub type Point = (usize, usize);

/// When `u(i,j)` (bidder 1) and `w(i',j')` (bidder 2) conflict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeRule {
    /// `i <= i'` and `j >= j'`.
    Weak,
    /// `i < i'` and `j > j'`.
    Strict,
}

impl EdgeRule {
    pub fn conflicts(self, u: Point, w: Point) -> bool {
        match self {
            EdgeRule::Weak => u.0 <= w.0 && u.1 >= w.1,
            EdgeRule::Strict => u.0 < w.0 && u.1 > w.1,
        }
    }
}

/// How conflict arcs are laid out in the flow network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeEncoding {
    /// One arc per conflicting pair of positive-weight nodes.
    #[default]
    Direct,
    /// Arcs into an auxiliary grid whose paths reach exactly the dominated
    /// points; linear in the grid size.
    Dominance,
}

/// Node weights of both sides on an `n1 x n2` grid; edges are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictInstance {
    n1: usize,
    n2: usize,
    u: Vec<Q>,
    w: Vec<Q>,
    rule: EdgeRule,
}

impl ConflictInstance {
    pub fn new(shape: Point, u: Vec<Q>, w: Vec<Q>, rule: EdgeRule) -> Result<Self> {
        let (n1, n2) = shape;
        if u.len() != n1 * n2 || w.len() != n1 * n2 {
            return Err(AuctionError::ShapeMismatch {
                expected: vec![n1, n2],
                found: vec![u.len(), w.len()],
            });
        }
        if u.iter().chain(&w).any(|x| x.is_negative()) {
            return Err(AuctionError::InvalidParameter("negative node weight".into()));
        }
        Ok(Self { n1, n2, u, w, rule })
    }

    pub fn shape(&self) -> Point {
        (self.n1, self.n2)
    }

    pub fn rule(&self) -> EdgeRule {
        self.rule
    }

    fn idx(&self, p: Point) -> usize {
        p.0 * self.n2 + p.1
    }

    fn point(&self, idx: usize) -> Point {
        (idx / self.n2, idx % self.n2)
    }

    pub fn u_weight(&self, p: Point) -> &Q {
        &self.u[self.idx(p)]
    }

    pub fn w_weight(&self, p: Point) -> &Q {
        &self.w[self.idx(p)]
    }

    pub fn u_weights(&self) -> &[Q] {
        &self.u
    }

    pub fn w_weights(&self) -> &[Q] {
        &self.w
    }

    pub fn total_weight(&self) -> Q {
        self.u.iter().chain(&self.w).sum()
    }

    /// Some `w` in conflict with `u(p)`, if any exists.
    pub fn u_has_neighbor(&self, p: Point) -> bool {
        match self.rule {
            EdgeRule::Weak => true,
            EdgeRule::Strict => p.0 + 1 < self.n1 && p.1 > 0,
        }
    }

    pub fn w_has_neighbor(&self, p: Point) -> bool {
        match self.rule {
            EdgeRule::Weak => true,
            EdgeRule::Strict => p.0 > 0 && p.1 + 1 < self.n2,
        }
    }

    /// All `w` points in conflict with `u(p)`.
    pub fn u_neighbors(&self, p: Point) -> Vec<Point> {
        let (lo_i, hi_j) = match self.rule {
            EdgeRule::Weak => (p.0, p.1 + 1),
            EdgeRule::Strict => (p.0 + 1, p.1),
        };
        (lo_i..self.n1).flat_map(|i| (0..hi_j).map(move |j| (i, j))).collect()
    }

    /// All `u` points in conflict with `w(p)`.
    pub fn w_neighbors(&self, p: Point) -> Vec<Point> {
        let (hi_i, lo_j) = match self.rule {
            EdgeRule::Weak => (p.0 + 1, p.1),
            EdgeRule::Strict => (p.0, p.1 + 1),
        };
        (0..hi_i).flat_map(|i| (lo_j..self.n2).map(move |j| (i, j))).collect()
    }

    /// First conflicting `(a, b)` pair between two selections, found with a
    /// suffix minimum over columns instead of a pairwise scan.
    pub fn find_conflict(&self, a: &[Point], b: &[Point]) -> Option<(Point, Point)> {
        let mut col_min: Vec<Option<Point>> = vec![None; self.n1];
        for &p in b {
            if col_min[p.0].map_or(true, |q| p.1 < q.1) {
                col_min[p.0] = Some(p);
            }
        }
        let mut suffix: Vec<Option<Point>> = vec![None; self.n1 + 1];
        for i in (0..self.n1).rev() {
            suffix[i] = match (col_min[i], suffix[i + 1]) {
                (Some(x), Some(y)) => Some(if x.1 <= y.1 { x } else { y }),
                (x, y) => x.or(y),
            };
        }
        for &p in a {
            let from = match self.rule {
                EdgeRule::Weak => p.0,
                EdgeRule::Strict => p.0 + 1,
            };
            if let Some(q) = suffix.get(from).copied().flatten() {
                if self.rule.conflicts(p, q) {
                    return Some((p, q));
                }
            }
        }
        None
    }
}

pub fn build_conflict_instance(f: &MarginalProfitGrid, g: &MarginalProfitGrid, rule: EdgeRule) -> Result<ConflictInstance> {
    if f.shape().len() != 2 || f.shape() != g.shape() {
        return Err(AuctionError::ShapeMismatch {
            expected: f.shape().to_vec(),
            found: g.shape().to_vec(),
        });
    }
    ConflictInstance::new((f.shape()[0], f.shape()[1]), f.values().to_vec(), g.values().to_vec(), rule)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependentSetSolution {
    /// Selected bidder-1 points (region A before closure).
    pub a: Vec<Point>,
    /// Selected bidder-2 points (region B before closure).
    pub b: Vec<Point>,
    #[serde(with = "crate::rational::serde_q")]
    pub objective: Q,
    /// Weight of the complementary vertex cover, i.e. the unscaled min cut.
    #[serde(with = "crate::rational::serde_q")]
    pub cut_value: Q,
}

impl IndependentSetSolution {
    pub fn cardinality(&self) -> usize {
        self.a.len() + self.b.len()
    }
}

/// Node numbering shared by both encodings.
struct Numbering {
    cells: usize,
}

impl Numbering {
    const SOURCE: usize = 0;
    const SINK: usize = 1;

    fn u(&self, idx: usize) -> usize {
        2 + idx
    }

    fn w(&self, idx: usize) -> usize {
        2 + self.cells + idx
    }

    fn aux(&self, idx: usize) -> usize {
        2 + 2 * self.cells + idx
    }
}

/// Builds the project-selection network: source to `u`, `w` to sink,
/// infinite conflict arcs in between.
fn build_network<T: Capacity>(
    inst: &ConflictInstance,
    encoding: EdgeEncoding,
    cap_u: &[T],
    cap_w: &[T],
    inf: &T,
) -> FlowNetwork<T> {
    let cells = inst.n1 * inst.n2;
    let num = Numbering { cells };
    let aux = matches!(encoding, EdgeEncoding::Dominance) as usize * cells;
    let mut net = FlowNetwork::new(2 + 2 * cells + aux);
    for k in 0..cells {
        if cap_u[k] > T::zero() {
            net.add_arc(Numbering::SOURCE, num.u(k), cap_u[k].clone());
        }
    }
    for k in 0..cells {
        if cap_w[k] > T::zero() {
            net.add_arc(num.w(k), Numbering::SINK, cap_w[k].clone());
        }
    }
    match encoding {
        EdgeEncoding::Direct => {
            for ku in 0..cells {
                if cap_u[ku].is_zero() {
                    continue;
                }
                for p in inst.u_neighbors(inst.point(ku)) {
                    let kw = inst.idx(p);
                    if !cap_w[kw].is_zero() {
                        net.add_arc(num.u(ku), num.w(kw), inf.clone());
                    }
                }
            }
        }
        EdgeEncoding::Dominance => {
            let (n1, n2) = (inst.n1, inst.n2);
            for i in 0..n1 {
                for j in 0..n2 {
                    let k = i * n2 + j;
                    if i + 1 < n1 {
                        net.add_arc(num.aux(k), num.aux(k + n2), inf.clone());
                    }
                    if j > 0 {
                        net.add_arc(num.aux(k), num.aux(k - 1), inf.clone());
                    }
                    if !cap_w[k].is_zero() {
                        net.add_arc(num.aux(k), num.w(k), inf.clone());
                    }
                    if !cap_u[k].is_zero() && inst.u_has_neighbor((i, j)) {
                        let entry = match inst.rule {
                            EdgeRule::Weak => k,
                            EdgeRule::Strict => k + n2 - 1,
                        };
                        net.add_arc(num.u(k), num.aux(entry), inf.clone());
                    }
                }
            }
        }
    }
    net
}

/// Solves a max flow over the given integer capacities, in `i128` when the
/// totals fit and in `BigInt` otherwise. Returns the flow value, source
/// reachability in the final residual network, and the path decomposition
/// when requested.
struct FlowOutcome {
    value: BigInt,
    reachable: Vec<bool>,
    paths: Vec<(Vec<usize>, BigInt)>,
}

fn run_flow(inst: &ConflictInstance, encoding: EdgeEncoding, cap_u: &[BigInt], cap_w: &[BigInt], decompose: bool) -> FlowOutcome {
    let sum: BigInt = cap_u.iter().chain(cap_w).sum();
    let inf = sum + BigInt::one();
    let limit = BigInt::one() << 120;
    if inf < limit {
        let cu: Vec<i128> = cap_u.iter().map(|c| c.to_i128().expect("fits")).collect();
        let cw: Vec<i128> = cap_w.iter().map(|c| c.to_i128().expect("fits")).collect();
        let inf = inf.to_i128().expect("fits");
        let mut net = build_network(inst, encoding, &cu, &cw, &inf);
        let value = net.max_flow(Numbering::SOURCE, Numbering::SINK);
        let paths = if decompose {
            net.decompose(Numbering::SOURCE, Numbering::SINK)
                .into_iter()
                .map(|(p, a)| (p, BigInt::from(a)))
                .collect()
        } else {
            Vec::new()
        };
        FlowOutcome {
            value: BigInt::from(value),
            reachable: net.reachable(Numbering::SOURCE),
            paths,
        }
    } else {
        let mut net = build_network(inst, encoding, cap_u, cap_w, &inf);
        let value = net.max_flow(Numbering::SOURCE, Numbering::SINK);
        let paths = if decompose {
            net.decompose(Numbering::SOURCE, Numbering::SINK)
        } else {
            Vec::new()
        };
        FlowOutcome {
            value,
            reachable: net.reachable(Numbering::SOURCE),
            paths,
        }
    }
}

fn scaled(weights: &[Q], factor: &BigInt) -> Vec<BigInt> {
    weights
        .iter()
        .map(|x| {
            let y = x * Q::from_integer(factor.clone());
            debug_assert!(y.is_integer());
            y.to_integer()
        })
        .collect()
}

pub fn solve_mwis_lex(inst: &ConflictInstance) -> IndependentSetSolution {
    solve_mwis_lex_with(inst, EdgeEncoding::Direct)
}

/// Maximum weight independent set, breaking ties toward fewer nodes.
///
/// Weights are scaled to `K * w - 1` with `K = (nodes + 1) * L` and `L` the
/// common denominator, so one min cut both maximizes weight and, among
/// maximizers, minimizes the number of selected positive-weight nodes.
/// Zero-weight nodes are never selected.
pub fn solve_mwis_lex_with(inst: &ConflictInstance, encoding: EdgeEncoding) -> IndependentSetSolution {
    let cells = inst.n1 * inst.n2;
    let l = common_denominator(inst.u.iter().chain(&inst.w));
    let k = BigInt::from(2 * cells + 1) * &l;
    let lex = |ws: &[Q]| -> Vec<BigInt> {
        scaled(ws, &k)
            .into_iter()
            .map(|c| if c.is_zero() { c } else { c - BigInt::one() })
            .collect()
    };
    let cap_u = lex(&inst.u);
    let cap_w = lex(&inst.w);
    let out = run_flow(inst, encoding, &cap_u, &cap_w, false);
    let num = Numbering { cells };
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut objective = Q::zero();
    for idx in 0..cells {
        if inst.u[idx].is_positive() && out.reachable[num.u(idx)] {
            a.push(inst.point(idx));
            objective += &inst.u[idx];
        }
    }
    for idx in 0..cells {
        if inst.w[idx].is_positive() && !out.reachable[num.w(idx)] {
            b.push(inst.point(idx));
            objective += &inst.w[idx];
        }
    }
    let cut_value = inst.total_weight() - &objective;
    let positive = inst.u.iter().chain(&inst.w).filter(|x| x.is_positive()).count();
    let cover_count = positive - a.len() - b.len();
    debug_assert_eq!(
        out.value,
        (&cut_value * Q::from_integer(k.clone())).to_integer() - BigInt::from(cover_count)
    );
    IndependentSetSolution {
        a,
        b,
        objective,
        cut_value,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanEdge {
    pub u: Point,
    pub w: Point,
    #[serde(with = "crate::rational::serde_q")]
    pub amount: Q,
}

/// Nonnegative amounts on conflict edges covering every node's weight.
/// Nodes without any incident edge cannot be covered and are listed
/// separately; their constraints are vacuous and they always belong to the
/// independent set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransshipmentPlan {
    pub edges: Vec<PlanEdge>,
    pub isolated_u: Vec<Point>,
    pub isolated_w: Vec<Point>,
    /// Value of the underlying maximum weighted matching, `total - MWIS`.
    #[serde(with = "crate::rational::serde_q")]
    pub matching_value: Q,
}

impl TransshipmentPlan {
    pub fn cost(&self) -> Q {
        self.edges.iter().map(|e| &e.amount).sum()
    }

    pub fn isolated_weight(&self, inst: &ConflictInstance) -> Q {
        let a: Q = self.isolated_u.iter().map(|&p| inst.u_weight(p)).sum();
        let b: Q = self.isolated_w.iter().map(|&p| inst.w_weight(p)).sum();
        a + b
    }

    /// Plan cost plus the weight of the uncoverable nodes.
    pub fn dual_value(&self, inst: &ConflictInstance) -> Q {
        self.cost() + self.isolated_weight(inst)
    }

    /// First violated constraint, or `None` if the plan is feasible.
    pub fn infeasibility(&self, inst: &ConflictInstance) -> Option<String> {
        let (n1, n2) = inst.shape();
        let mut cover_u = vec![Q::zero(); n1 * n2];
        let mut cover_w = vec![Q::zero(); n1 * n2];
        for e in &self.edges {
            if e.u.0 >= n1 || e.u.1 >= n2 || e.w.0 >= n1 || e.w.1 >= n2 {
                return Some(format!("edge {:?}-{:?} outside the grid", e.u, e.w));
            }
            if !inst.rule.conflicts(e.u, e.w) {
                return Some(format!("{:?}-{:?} is not a conflict edge", e.u, e.w));
            }
            if e.amount.is_negative() {
                return Some(format!("negative amount on {:?}-{:?}", e.u, e.w));
            }
            cover_u[inst.idx(e.u)] += &e.amount;
            cover_w[inst.idx(e.w)] += &e.amount;
        }
        for &p in &self.isolated_u {
            if inst.u_has_neighbor(p) {
                return Some(format!("u{p:?} is listed as isolated but has neighbours"));
            }
        }
        for &p in &self.isolated_w {
            if inst.w_has_neighbor(p) {
                return Some(format!("w{p:?} is listed as isolated but has neighbours"));
            }
        }
        for idx in 0..n1 * n2 {
            let p = inst.point(idx);
            if inst.u_has_neighbor(p) && cover_u[idx] < inst.u[idx] {
                return Some(format!("u{p:?} covered {} < {}", cover_u[idx], inst.u[idx]));
            }
            if inst.w_has_neighbor(p) && cover_w[idx] < inst.w[idx] {
                return Some(format!("w{p:?} covered {} < {}", cover_w[idx], inst.w[idx]));
            }
            if !inst.u_has_neighbor(p) && inst.u[idx].is_positive() && !self.isolated_u.contains(&p) {
                return Some(format!("u{p:?} cannot be covered"));
            }
            if !inst.w_has_neighbor(p) && inst.w[idx].is_positive() && !self.isolated_w.contains(&p) {
                return Some(format!("w{p:?} cannot be covered"));
            }
        }
        None
    }
}

/// Builds an optimal covering plan from an unscaled maximum flow.
///
/// The max flow is a weighted matching of value `total - MWIS` that saturates
/// every cover node. Each selected node's remaining deficit is then put on an
/// edge to one of its neighbours, all of which are cover nodes, giving a plan
/// whose cost equals the independent set weight minus the isolated nodes.
pub fn extract_transshipment(inst: &ConflictInstance, sol: &IndependentSetSolution) -> Result<TransshipmentPlan> {
    extract_transshipment_with(inst, sol, EdgeEncoding::Direct)
}

pub fn extract_transshipment_with(
    inst: &ConflictInstance,
    sol: &IndependentSetSolution,
    encoding: EdgeEncoding,
) -> Result<TransshipmentPlan> {
    let cells = inst.n1 * inst.n2;
    let num = Numbering { cells };
    let l = common_denominator(inst.u.iter().chain(&inst.w));
    let cap_u = scaled(&inst.u, &l);
    let cap_w = scaled(&inst.w, &l);
    let out = run_flow(inst, encoding, &cap_u, &cap_w, true);
    let lq = Q::from_integer(l);

    let mut amounts: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
    for (nodes, amount) in out.paths {
        let ku = nodes[1] - num.u(0);
        let kw = nodes[nodes.len() - 2] - num.w(0);
        *amounts.entry((ku, kw)).or_insert_with(BigInt::zero) += amount;
    }
    let mut flow_u = vec![BigInt::zero(); cells];
    let mut flow_w = vec![BigInt::zero(); cells];
    let mut partner_u: Vec<Option<usize>> = vec![None; cells];
    let mut partner_w: Vec<Option<usize>> = vec![None; cells];
    for (&(ku, kw), a) in &amounts {
        flow_u[ku] += a;
        flow_w[kw] += a;
        partner_u[ku].get_or_insert(kw);
        partner_w[kw].get_or_insert(ku);
    }

    let mut isolated_u = Vec::new();
    let mut isolated_w = Vec::new();
    let pick = |candidates: Vec<Point>, weights: &[Q]| -> Option<usize> {
        let first = candidates.first().map(|&p| inst.idx(p))?;
        Some(
            candidates
                .into_iter()
                .map(|p| inst.idx(p))
                .find(|&k| weights[k].is_positive())
                .unwrap_or(first),
        )
    };
    for &p in &sol.a {
        let ku = inst.idx(p);
        let deficit = &cap_u[ku] - &flow_u[ku];
        if !deficit.is_positive() {
            continue;
        }
        let target = partner_u[ku].or_else(|| pick(inst.u_neighbors(p), &inst.w));
        match target {
            Some(kw) => *amounts.entry((ku, kw)).or_insert_with(BigInt::zero) += deficit,
            None => isolated_u.push(p),
        }
    }
    for &p in &sol.b {
        let kw = inst.idx(p);
        let deficit = &cap_w[kw] - &flow_w[kw];
        if !deficit.is_positive() {
            continue;
        }
        let target = partner_w[kw].or_else(|| pick(inst.w_neighbors(p), &inst.u));
        match target {
            Some(ku) => *amounts.entry((ku, kw)).or_insert_with(BigInt::zero) += deficit,
            None => isolated_w.push(p),
        }
    }
    // a positive node outside the independent set always has a neighbour
    for idx in 0..cells {
        let p = inst.point(idx);
        if inst.u[idx].is_positive() && !inst.u_has_neighbor(p) && !isolated_u.contains(&p) {
            return Err(AuctionError::InfeasiblePlan(format!("isolated u{p:?} not selected")));
        }
        if inst.w[idx].is_positive() && !inst.w_has_neighbor(p) && !isolated_w.contains(&p) {
            return Err(AuctionError::InfeasiblePlan(format!("isolated w{p:?} not selected")));
        }
    }
    let edges = amounts
        .into_iter()
        .filter(|(_, a)| a.is_positive())
        .map(|((ku, kw), a)| PlanEdge {
            u: inst.point(ku),
            w: inst.point(kw),
            amount: Q::from_integer(a) / &lq,
        })
        .collect();
    Ok(TransshipmentPlan {
        edges,
        isolated_u,
        isolated_w,
        matching_value: Q::from_integer(out.value) / &lq,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    #[serde(with = "crate::rational::serde_q")]
    pub primal: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub dual: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub gap: Q,
    pub primal_issue: Option<String>,
    pub dual_issue: Option<String>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.gap.is_zero() && self.primal_issue.is_none() && self.dual_issue.is_none()
    }
}

/// Checks both certificates and compares their values exactly.
pub fn check_duality(inst: &ConflictInstance, sol: &IndependentSetSolution, plan: &TransshipmentPlan) -> DualityReport {
    let primal_sum: Q = sol.a.iter().map(|&p| inst.u_weight(p)).sum::<Q>() + sol.b.iter().map(|&p| inst.w_weight(p)).sum::<Q>();
    let primal_issue = if let Some((u, w)) = inst.find_conflict(&sol.a, &sol.b) {
        Some(format!("selected u{u:?} and w{w:?} conflict"))
    } else if primal_sum != sol.objective {
        Some(format!("objective {} differs from selected weight {}", sol.objective, primal_sum))
    } else {
        None
    };
    let dual = plan.dual_value(inst);
    DualityReport {
        primal: primal_sum.clone(),
        gap: &dual - &primal_sum,
        dual,
        primal_issue,
        dual_issue: plan.infeasibility(inst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::{mpc_discrete, JointPrior, ValueGrid};
    use crate::rational::{q, qi};

    fn uniform_instance(rule: EdgeRule) -> ConflictInstance {
        let p = JointPrior::new(ValueGrid::integer(2, 2), vec![q(1, 4); 4]).unwrap();
        let f = mpc_discrete(&p, 0).unwrap();
        let g = mpc_discrete(&p, 1).unwrap();
        build_conflict_instance(&f, &g, rule).unwrap()
    }

    #[test]
    fn edge_examples() {
        let inst = uniform_instance(EdgeRule::Weak);
        assert_eq!(inst.u_neighbors((1, 1)), vec![(1, 0), (1, 1)]);
        let strict = uniform_instance(EdgeRule::Strict);
        assert!(strict.u_neighbors((1, 1)).is_empty());
        let one = ConflictInstance::new((1, 1), vec![qi(1)], vec![qi(1)], EdgeRule::Weak).unwrap();
        assert_eq!(one.u_neighbors((0, 0)), vec![(0, 0)]);
    }

    #[test]
    fn uniform_objective() {
        for enc in [EdgeEncoding::Direct, EdgeEncoding::Dominance] {
            let inst = uniform_instance(EdgeRule::Weak);
            let sol = solve_mwis_lex_with(&inst, enc);
            assert_eq!(sol.objective, q(3, 2));
            assert_eq!(sol.cardinality(), 3);
            let plan = extract_transshipment_with(&inst, &sol, enc).unwrap();
            assert_eq!(plan.matching_value, q(1, 2));
            let report = check_duality(&inst, &sol, &plan);
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn zero_weights_select_nothing() {
        let inst = ConflictInstance::new((2, 2), vec![qi(0); 4], vec![qi(0); 4], EdgeRule::Weak).unwrap();
        let sol = solve_mwis_lex(&inst);
        assert_eq!(sol.cardinality(), 0);
        assert_eq!(sol.objective, qi(0));
        let plan = extract_transshipment(&inst, &sol).unwrap();
        assert!(check_duality(&inst, &sol, &plan).passed());
    }

    #[test]
    fn single_edge_plan() {
        let inst = ConflictInstance::new((1, 1), vec![qi(1)], vec![qi(1)], EdgeRule::Weak).unwrap();
        let sol = solve_mwis_lex(&inst);
        assert_eq!(sol.objective, qi(1));
        let plan = extract_transshipment(&inst, &sol).unwrap();
        assert_eq!(plan.edges.len(), 1);
        assert_eq!(plan.cost(), qi(1));
    }

    #[test]
    fn edgeless_instance_selects_everything() {
        let inst = ConflictInstance::new((1, 2), vec![qi(1), qi(2)], vec![qi(3), qi(1)], EdgeRule::Strict).unwrap();
        let sol = solve_mwis_lex(&inst);
        assert_eq!(sol.objective, qi(7));
        let plan = extract_transshipment(&inst, &sol).unwrap();
        assert_eq!(plan.cost(), qi(0));
        assert!(check_duality(&inst, &sol, &plan).passed());
    }

    #[test]
    fn suboptimal_plan_shows_gap() {
        let inst = uniform_instance(EdgeRule::Weak);
        let sol = solve_mwis_lex(&inst);
        let mut plan = extract_transshipment(&inst, &sol).unwrap();
        plan.edges[0].amount += qi(1);
        let report = check_duality(&inst, &sol, &plan);
        assert_eq!(report.gap, qi(1));
        assert!(!report.passed());
    }
}
