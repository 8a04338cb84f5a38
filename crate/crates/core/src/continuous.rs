//! Additive-error approximation for two bidders with a continuous density.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::density::{cell_tables, check_oracle, CellTables, DensityOracle};
use crate::error::{AuctionError, Result};
use crate::mech::{make_proper_with, thresholds_and_payments, AllocationPair, Mechanism};
use crate::mwis::{
    extract_transshipment_with, solve_mwis_lex_with, ConflictInstance, EdgeEncoding, EdgeRule, IndependentSetSolution,
    Point, TransshipmentPlan,
};
use crate::priors::ValueGrid;
use crate::rational::{dyadic, q, to_f64, Q};

/// Largest grid side the continuous solver accepts.
pub const MAX_RESOLUTION: usize = 2000;

/// Cell masses are rounded to multiples of `2^-MASS_BITS` before the exact
/// solver runs.
pub const MASS_BITS: u32 = 40;

/// The error ledger: how the grid side `n` and the per-cell sampling `sub`
/// follow from the target error and the density's constants.
///
/// With `lambda_r = max(phi_max, lambda)` bounding the L1 slope of the
/// posted-price revenue `x * int_x^1 phi`, the discretization loss is at most
/// `(phi_max + 8 lambda_r) / n`:
/// - `phi_max / n` for the one-cell strip along the boundary where the
///   strict and weak conflict graphs differ and where overlapping cells are
///   handed to one bidder;
/// - `2 lambda_r / n` per bidder for snapping the price to a cell edge;
/// - `2 lambda_r / n` per bidder for choosing one price per row of cells
///   instead of one per value of the other bidder.
///
/// Sampling adds at most `(2 lambda_r + lambda / 2) / (n * sub)`: the suffix
/// maximum read on sample points, and the trapezoid error of the tails.
/// `n` spends 90% of the target and `sub` the remaining 10%.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub epsilon: f64,
    pub lambda: f64,
    pub phi_max: f64,
    pub lambda_r: f64,
    pub n: usize,
    pub sub: usize,
    pub discretization: f64,
    pub quadrature: f64,
    pub total: f64,
}

impl ErrorBudget {
    /// `(lambda, phi_max, lambda_r, discretization coefficient, sampling coefficient)`.
    fn coefficients(oracle: &dyn DensityOracle) -> (f64, f64, f64, f64, f64) {
        let lambda = oracle.lipschitz();
        let phi_max = oracle.max_density().min(1.0 + 2.0 * lambda);
        let lambda_r = phi_max.max(lambda);
        (lambda, phi_max, lambda_r, phi_max + 8.0 * lambda_r, 2.0 * lambda_r + lambda / 2.0)
    }

    pub fn for_oracle(oracle: &dyn DensityOracle, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.25) {
            return Err(AuctionError::InvalidParameter(format!("epsilon must be in (0, 1/4], got {epsilon}")));
        }
        let (_, _, _, disc, _) = Self::coefficients(oracle);
        let n = (disc / (0.9 * epsilon)).ceil();
        if !n.is_finite() || n > MAX_RESOLUTION as f64 {
            return Err(AuctionError::SizeGuard(format!(
                "epsilon {epsilon} needs a {n}-cell grid side, above {MAX_RESOLUTION}"
            )));
        }
        Self::with_resolution(oracle, epsilon, n as usize, None)
    }

    /// Budget for a caller-chosen grid; `sub` defaults to the smallest value
    /// that keeps the sampling error within a tenth of `epsilon`.
    pub fn with_resolution(oracle: &dyn DensityOracle, epsilon: f64, n: usize, sub: Option<usize>) -> Result<Self> {
        if n < 2 || n > MAX_RESOLUTION {
            return Err(AuctionError::SizeGuard(format!("grid side {n} outside 2..={MAX_RESOLUTION}")));
        }
        let (lambda, phi_max, lambda_r, disc, quad) = Self::coefficients(oracle);
        let sub = sub.unwrap_or_else(|| ((quad / (0.1 * epsilon * n as f64)).ceil() as usize).max(1));
        if n * sub > 16 * MAX_RESOLUTION {
            return Err(AuctionError::SizeGuard(format!("{n} x {sub} samples per axis is too many")));
        }
        let discretization = disc / n as f64;
        let quadrature = quad / (n * sub) as f64;
        Ok(Self {
            epsilon,
            lambda,
            phi_max,
            lambda_r,
            n,
            sub,
            discretization,
            quadrature,
            total: discretization + quadrature,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapRule {
    /// Cells claimed by both closures go to bidder 1.
    BidderOne,
    /// Cells claimed by both closures go to bidder 2.
    BidderTwo,
}

#[derive(Debug, Clone, Default)]
pub struct ContinuousOptions {
    /// Overrides the grid side chosen by the error ledger.
    pub resolution: Option<usize>,
    /// Overrides the samples per cell.
    pub sub: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ContinuousSolution {
    pub budget: ErrorBudget,
    /// Thresholds in cell units: bidder 1 wins on row `j` from value
    /// `alpha[j] / n`, bidder 2 on column `i` from `beta[i] / n`.
    pub pair: AllocationPair,
    /// Expected revenue of the emitted mechanism under the sampled density.
    pub revenue: f64,
    pub overlap_rule: OverlapRule,
    pub overlap_cells: usize,
    pub instance: ConflictInstance,
    pub independent_set: IndependentSetSolution,
    pub tables: [CellTables; 2],
}

impl ContinuousSolution {
    pub fn n(&self) -> usize {
        self.budget.n
    }

    /// Value of the selected cells under the rounded masses, i.e. the
    /// optimum of the strict-edge independent set problem.
    pub fn primal(&self) -> f64 {
        to_f64(&self.independent_set.objective)
    }

    /// The mechanism on the grid of cell left edges `k / n`.
    pub fn grid_mechanism(&self) -> Result<Mechanism> {
        let n = self.n();
        let levels: Vec<Q> = (0..n).map(|k| q(k as i64, n as i64)).collect();
        let grid = ValueGrid::new(vec![levels.clone(), levels])?;
        thresholds_and_payments(&self.pair.to_matrix(), &grid)
    }

    /// Revenue of an arbitrary pair under the sampled density.
    pub fn revenue_of(&self, pair: &AllocationPair) -> f64 {
        pair_revenue(&self.tables, pair)
    }

    pub fn transshipment(&self) -> Result<TransshipmentPlan> {
        extract_transshipment_with(&self.instance, &self.independent_set, EdgeEncoding::Dominance)
    }
}

fn pair_revenue(tables: &[CellTables; 2], pair: &AllocationPair) -> f64 {
    let a: f64 = pair.alpha().iter().enumerate().map(|(j, &i)| tables[0].revenue(i, j)).sum();
    let b: f64 = pair.beta().iter().enumerate().map(|(i, &j)| tables[1].revenue(j, i)).sum();
    a + b
}

/// Conflict instance on the `n x n` cell grid with strict edges and masses
/// rounded to dyadic rationals.
pub fn strict_instance(tables: &[CellTables; 2]) -> Result<ConflictInstance> {
    let n = tables[0].n;
    let mut u = Vec::with_capacity(n * n);
    let mut w = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            u.push(dyadic(tables[0].mass(i, j), MASS_BITS));
            w.push(dyadic(tables[1].mass(j, i), MASS_BITS));
        }
    }
    ConflictInstance::new((n, n), u, w, EdgeRule::Strict)
}

/// Lowest selected cell per row of A and column of B, then overlap removal.
fn resolve(sol: &IndependentSetSolution, n: usize, rule: OverlapRule) -> (Vec<usize>, Vec<usize>, usize) {
    let mut alpha = vec![n; n];
    let mut beta = vec![n; n];
    for &(i, j) in &sol.a {
        alpha[j] = alpha[j].min(i);
    }
    for &(i, j) in &sol.b {
        beta[i] = beta[i].min(j);
    }
    let mut overlap = 0;
    for i in 0..n {
        for j in beta[i]..n {
            if i >= alpha[j] {
                overlap += 1;
            }
        }
    }
    match rule {
        OverlapRule::BidderOne => {
            for i in 0..n {
                if let Some(j) = (0..n).rev().find(|&j| alpha[j] <= i) {
                    beta[i] = beta[i].max(j + 1);
                }
            }
        }
        OverlapRule::BidderTwo => {
            for j in 0..n {
                if let Some(i) = (0..n).rev().find(|&i| beta[i] <= j) {
                    alpha[j] = alpha[j].max(i + 1);
                }
            }
        }
    }
    (alpha, beta, overlap)
}

pub fn solve_continuous(oracle: &dyn DensityOracle, epsilon: f64) -> Result<ContinuousSolution> {
    solve_continuous_with(oracle, epsilon, &ContinuousOptions::default())
}

/// Cell masses, strict-edge independent set, closure to threshold curves,
/// overlap removal and boundary repair.
///
/// Closing the selected sets can make A and B overlap along the staircase,
/// which no monotone allocation allows. Both ways of handing the overlap to
/// one bidder are tried and the more profitable one is kept.
pub fn solve_continuous_with(
    oracle: &dyn DensityOracle,
    epsilon: f64,
    opts: &ContinuousOptions,
) -> Result<ContinuousSolution> {
    check_oracle(oracle)?;
    let budget = match opts.resolution {
        Some(n) => ErrorBudget::with_resolution(oracle, epsilon, n, opts.sub)?,
        None if opts.sub.is_some() => {
            let base = ErrorBudget::for_oracle(oracle, epsilon)?;
            ErrorBudget::with_resolution(oracle, epsilon, base.n, opts.sub)?
        }
        None => ErrorBudget::for_oracle(oracle, epsilon)?,
    };
    let n = budget.n;
    let tables = [cell_tables(oracle, 0, n, budget.sub)?, cell_tables(oracle, 1, n, budget.sub)?];
    let instance = strict_instance(&tables)?;
    let sol = solve_mwis_lex_with(&instance, EdgeEncoding::Dominance);

    let mut best: Option<(f64, AllocationPair, OverlapRule, usize)> = None;
    for rule in [OverlapRule::BidderOne, OverlapRule::BidderTwo] {
        let (alpha, beta, overlap) = resolve(&sol, n, rule);
        let pair = AllocationPair::new(n, n, alpha, beta)?;
        let pair = make_proper_with(&pair, |j, i| tables[0].revenue(i, j), |i, j| tables[1].revenue(j, i));
        let rev = pair_revenue(&tables, &pair);
        if best.as_ref().map_or(true, |(r, ..)| rev > *r) {
            best = Some((rev, pair, rule, overlap));
        }
    }
    let (revenue, pair, overlap_rule, overlap_cells) = best.expect("two candidates");
    Ok(ContinuousSolution {
        budget,
        pair,
        revenue,
        overlap_rule,
        overlap_cells,
        instance,
        independent_set: sol,
        tables,
    })
}

/// How one cell pair's plan amount is spread over the two cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spread {
    /// `gamma = f(x1,y1) g(x2,y2) * scale` with `scale = y / (w_u w_v)`.
    Product {
        #[serde(with = "crate::rational::serde_q")]
        scale: Q,
    },
    /// `w_v = 0`: `gamma = f(x1,y1) * scale / area` with `scale = y / w_u`.
    UniformOnW {
        #[serde(with = "crate::rational::serde_q")]
        scale: Q,
    },
    /// `w_u = 0`: `gamma = g(x2,y2) * scale / area` with `scale = y / w_v`.
    UniformOnU {
        #[serde(with = "crate::rational::serde_q")]
        scale: Q,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaPiece {
    pub u: Point,
    pub w: Point,
    pub spread: Spread,
}

/// Piecewise-product transport density over pairs of cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaWitness {
    /// Cell side.
    pub cell: f64,
    pub pieces: Vec<GammaPiece>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    #[serde(with = "crate::rational::serde_q")]
    pub gamma_cost: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub plan_cost: Q,
    /// First violated covering constraint as `(side, cell, covered, needed)`.
    pub violation: Option<(char, Point, String, String)>,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none() && self.gamma_cost == self.plan_cost
    }
}

/// Spreads each plan amount over its two cells in proportion to the
/// marginal profit masses.
pub fn transport_witness_continuous(inst: &ConflictInstance, plan: &TransshipmentPlan) -> Result<GammaWitness> {
    let (n, _) = inst.shape();
    let mut pieces = Vec::with_capacity(plan.edges.len());
    for e in &plan.edges {
        let (wu, wv) = (inst.u_weight(e.u), inst.w_weight(e.w));
        let spread = match (wu.is_zero(), wv.is_zero()) {
            (false, false) => Spread::Product {
                scale: &e.amount / (wu * wv),
            },
            (false, true) => Spread::UniformOnW { scale: &e.amount / wu },
            (true, false) => Spread::UniformOnU { scale: &e.amount / wv },
            (true, true) => {
                if e.amount.is_positive() {
                    return Err(AuctionError::InfeasiblePlan(format!(
                        "amount on {:?}-{:?} between two zero-mass cells",
                        e.u, e.w
                    )));
                }
                continue;
            }
        };
        pieces.push(GammaPiece { u: e.u, w: e.w, spread });
    }
    Ok(GammaWitness {
        cell: 1.0 / n as f64,
        pieces,
    })
}

/// Integrates the witness back onto cells and checks covering and cost.
pub fn verify_witness(inst: &ConflictInstance, witness: &GammaWitness, plan: &TransshipmentPlan) -> WitnessReport {
    let (n1, n2) = inst.shape();
    let idx = |p: Point| p.0 * n2 + p.1;
    let mut cover_u = vec![Q::zero(); n1 * n2];
    let mut cover_w = vec![Q::zero(); n1 * n2];
    let mut cost = Q::zero();
    for piece in &witness.pieces {
        let (wu, wv) = (inst.u_weight(piece.u), inst.w_weight(piece.w));
        let mass = match &piece.spread {
            Spread::Product { scale } => scale * wu * wv,
            Spread::UniformOnW { scale } => scale * wu,
            Spread::UniformOnU { scale } => scale * wv,
        };
        cover_u[idx(piece.u)] += &mass;
        cover_w[idx(piece.w)] += &mass;
        cost += mass;
    }
    let mut violation = None;
    'scan: for i in 0..n1 {
        for j in 0..n2 {
            let k = i * n2 + j;
            if inst.u_has_neighbor((i, j)) && cover_u[k] < *inst.u_weight((i, j)) {
                violation = Some(('u', (i, j), cover_u[k].to_string(), inst.u_weight((i, j)).to_string()));
                break 'scan;
            }
            if inst.w_has_neighbor((i, j)) && cover_w[k] < *inst.w_weight((i, j)) {
                violation = Some(('w', (i, j), cover_w[k].to_string(), inst.w_weight((i, j)).to_string()));
                break 'scan;
            }
        }
    }
    WitnessReport {
        gamma_cost: cost,
        plan_cost: plan.cost(),
        violation,
    }
}

/// Optimality sandwich for a continuous solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub revenue: f64,
    /// Strict-graph optimum on the rounded cell masses.
    pub primal: f64,
    /// Covering plan cost plus uncoverable weight.
    pub dual: f64,
    pub gap: f64,
    pub epsilon_budget: f64,
    /// Rounding and sampling slack allowed on `revenue <= dual`.
    pub tolerance: f64,
    pub duality_exact: bool,
    pub witness_ok: bool,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.duality_exact
            && self.witness_ok
            && self.revenue <= self.dual + self.tolerance
            && self.dual - self.revenue <= self.epsilon_budget
    }
}

pub fn certify(sol: &ContinuousSolution) -> Result<Certificate> {
    let plan = sol.transshipment()?;
    let dual_q = plan.dual_value(&sol.instance);
    let witness = transport_witness_continuous(&sol.instance, &plan)?;
    let report = verify_witness(&sol.instance, &witness, &plan);
    let dual = to_f64(&dual_q);
    let cells = (sol.n() * sol.n()) as f64;
    Ok(Certificate {
        revenue: sol.revenue,
        primal: sol.primal(),
        dual,
        gap: dual - sol.revenue,
        epsilon_budget: sol.budget.total,
        tolerance: sol.budget.quadrature + 2.0 * cells * 2f64.powi(-(MASS_BITS as i32)),
        duality_exact: dual_q == sol.independent_set.objective && plan.infeasibility(&sol.instance).is_none(),
        witness_ok: report.passed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Uniform;
    use crate::mech::verify_truthful;

    #[test]
    fn budget_for_uniform() {
        let b = ErrorBudget::for_oracle(&Uniform, 0.02).unwrap();
        assert_eq!((b.n, b.sub), (500, 2));
        assert!(b.total <= 0.02 + 1e-12);
        assert!(ErrorBudget::for_oracle(&Uniform, 0.001).is_err());
        assert!(ErrorBudget::for_oracle(&Uniform, 0.5).is_err());
    }

    #[test]
    fn coarse_uniform_is_close_to_reserve_auction() {
        let opts = ContinuousOptions {
            resolution: Some(40),
            sub: Some(4),
        };
        let sol = solve_continuous_with(&Uniform, 0.25, &opts).unwrap();
        assert!((sol.revenue - 5.0 / 12.0).abs() < 0.05, "{}", sol.revenue);
        assert!(verify_truthful(&sol.grid_mechanism().unwrap()).is_pass());
        let again = make_proper_with(&sol.pair, |j, i| sol.tables[0].revenue(i, j), |i, j| sol.tables[1].revenue(j, i));
        assert_eq!(again, sol.pair);
        let cert = certify(&sol).unwrap();
        assert!(cert.passed(), "{cert:?}");
    }

    #[test]
    fn under_covering_plan_reports_cell() {
        let opts = ContinuousOptions {
            resolution: Some(8),
            sub: Some(2),
        };
        let sol = solve_continuous_with(&Uniform, 0.25, &opts).unwrap();
        let mut plan = sol.transshipment().unwrap();
        let witness = transport_witness_continuous(&sol.instance, &plan).unwrap();
        assert!(verify_witness(&sol.instance, &witness, &plan).passed());
        plan.edges.retain(|e| e.amount.is_zero());
        let witness = transport_witness_continuous(&sol.instance, &plan).unwrap();
        let report = verify_witness(&sol.instance, &witness, &plan);
        assert!(report.violation.is_some());
    }
}
