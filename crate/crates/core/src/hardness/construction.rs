//! Three-bidder prior built from a categorized formula.
//!
//! Coordinates are 1-based throughout: grid index `k` has value `h(k)`.
//! With `base = n_hat + 2` and side `S = n_hat + 2m + 4`, clause `l` puts
//! its literal points on the planes `x = i + 1`, `y = j + 1`, `z = k + 1`,
//! its clause points next to the origin, and scaffolding points near the
//! top faces suppress every unwanted segment.

use num_traits::{One, Zero};
use serde::Serialize;

use super::formula::{CatFormula, Category};
use crate::error::{AuctionError, Result};
use crate::priors::{JointPrior, ValueGrid};
use crate::rational::Q;

/// Mass constants `c1..c5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantsProfile {
    /// `c1 = 1/(n^2 m)`, `c2 = c3 = 1`, `c4 = 3/n^2`, `c5 = 2/(5 n m)`.
    Published,
    /// `c1 = c2 = c3 = 1`, `c4 = 3m`, `c5 = n`: literal segments outweigh
    /// clause segments.
    Repaired,
}

impl ConstantsProfile {
    /// `[c1, c2, c3, c4, c5]`; `m` and `n_hat` are clamped to at least 1.
    pub fn constants(self, m: usize, n_hat: usize) -> [Q; 5] {
        let m = Q::from_integer((m.max(1) as i64).into());
        let n = Q::from_integer((n_hat.max(1) as i64).into());
        let one = Q::one();
        match self {
            ConstantsProfile::Published => [
                one.clone() / (&n * &n * &m),
                one.clone(),
                one.clone(),
                Q::from_integer(3.into()) / (&n * &n),
                Q::from_integer(2.into()) / (Q::from_integer(5.into()) * &n * &m),
            ],
            ConstantsProfile::Repaired => [one.clone(), one.clone(), one, Q::from_integer(3.into()) * m, n],
        }
    }
}

impl std::str::FromStr for ConstantsProfile {
    type Err = AuctionError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "published" => Ok(Self::Published),
            "repaired" => Ok(Self::Repaired),
            _ => Err(AuctionError::InvalidParameter(format!("unknown constants profile {s:?}"))),
        }
    }
}

/// Value levels `h(1..=S)`.
pub fn value_levels(m: usize, n_hat: usize) -> Vec<Q> {
    let s = n_hat + 2 * m + 4;
    let denom = (n_hat + 2 * m + 1) as i64;
    let mut h: Vec<Q> = (1..=s - 2)
        .map(|i| Q::one() + Q::new(((i - 1) as i64).into(), denom.into()))
        .collect();
    h.push(Q::from_integer(4.into()));
    h.push(Q::from_integer(5.into()));
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiteralRole {
    Positive,
    Negative,
    DummyPositive,
    DummyNegative,
}

impl LiteralRole {
    /// Positive-type segments are the positive literals and their dummies.
    pub fn positive_type(self) -> bool {
        matches!(self, LiteralRole::Positive | LiteralRole::DummyPositive)
    }

    pub fn is_dummy(self) -> bool {
        matches!(self, LiteralRole::DummyPositive | LiteralRole::DummyNegative)
    }
}

/// Axis of positive-type segments for a category; negative-type segments
/// use the remaining axis off the category's own.
fn type_axes(cat: Category) -> (usize, usize) {
    match cat {
        Category::X => (1, 2),
        Category::Y => (2, 0),
        Category::Z => (0, 1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiteralPoint {
    /// 1-based clause index.
    pub clause: usize,
    pub category: Category,
    pub var: usize,
    pub role: LiteralRole,
    pub apex: [usize; 3],
    pub axis: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClausePoint {
    pub clause: usize,
    pub category: Category,
    pub apex: [usize; 3],
    pub axis: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaffoldKind {
    C3,
    C4,
    C5,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaffoldPoint {
    pub kind: ScaffoldKind,
    pub apex: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    #[serde(with = "crate::rational::serde_q")]
    pub lhs: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub rhs: Q,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionInstance {
    pub formula: CatFormula,
    pub profile: ConstantsProfile,
    pub constants: [Q; 5],
    pub h: Vec<Q>,
    /// Unnormalized masses; profits are reported in the same units.
    pub prior: JointPrior,
    pub literals: Vec<LiteralPoint>,
    pub clauses: Vec<ClausePoint>,
    pub scaffolding: Vec<ScaffoldPoint>,
    /// Profit of the best segment at every scaffolding point.
    pub scaffold_profit: Q,
    pub inequalities: Vec<InequalityCheck>,
}

impl ReductionInstance {
    pub fn side(&self) -> usize {
        self.h.len()
    }

    /// `h(k)` for a 1-based index.
    pub fn h(&self, k: usize) -> &Q {
        &self.h[k - 1]
    }

    fn base(&self) -> usize {
        self.formula.n_hat() + 2
    }

    pub fn literal_weight(&self) -> Q {
        self.h(self.base()) * &self.constants[0]
    }

    pub fn clause_weight(&self) -> Q {
        self.h(1) * &self.constants[1]
    }

    /// Optimal profit when every clause is satisfiable.
    pub fn cost1(&self) -> Q {
        self.cost2(&Q::one())
    }

    /// Claimed profit bound when at most a `rho` fraction of the clauses can
    /// be satisfied simultaneously.
    pub fn cost2(&self, rho: &Q) -> Q {
        let m = Q::from_integer((self.formula.m() as i64).into());
        let nbar = Q::from_integer((self.formula.occurrences() as i64).into());
        rho * m * self.clause_weight() + nbar * self.literal_weight() + &self.scaffold_profit
    }

    pub fn inequalities_hold(&self) -> bool {
        self.inequalities.iter().all(|c| c.holds)
    }
}

fn check(name: String, lhs: Q, rhs: Q) -> InequalityCheck {
    let holds = lhs < rhs;
    InequalityCheck { name, lhs, rhs, holds }
}

/// Builds the three-bidder instance for a categorized formula.
///
/// Clauses missing a category get neither a clause point nor its two `c3`
/// points for that category; the scaffolding profit is summed over the
/// points actually placed.
pub fn catsat_to_instance(formula: &CatFormula, profile: ConstantsProfile) -> Result<ReductionInstance> {
    let m = formula.m();
    let n_hat = formula.n_hat();
    if n_hat == 0 && m > 0 && formula.occurrences() > 0 {
        return Err(AuctionError::ReductionConstraint("literals without variables".into()));
    }
    let base = n_hat + 2;
    let s = n_hat + 2 * m + 4;
    let h = value_levels(m, n_hat);
    let constants = profile.constants(m, n_hat);
    let [c1, c2, c3, c4, c5] = constants.clone();

    let mut literals = Vec::new();
    let mut clauses = Vec::new();
    let mut scaffolding = Vec::new();

    for (idx, clause) in formula.clauses.iter().enumerate() {
        let l = idx + 1;
        for cat in Category::ALL {
            let Some(lit) = clause[cat.index()] else { continue };
            let c = cat.index();
            let (pos_axis, neg_axis) = type_axes(cat);
            let plane = lit.var + 1;
            // a segment along `axis` starts at `base` on that axis, its
            // position across the plane encodes the clause
            let point = |axis: usize, offset: usize| {
                let mut p = [0usize; 3];
                p[c] = plane;
                p[axis] = base;
                let other = 3 - c - axis;
                p[other] = base + offset;
                p
            };
            let (real, dummy) = if lit.positive {
                ((LiteralRole::Positive, pos_axis), (LiteralRole::DummyNegative, neg_axis))
            } else {
                ((LiteralRole::Negative, neg_axis), (LiteralRole::DummyPositive, pos_axis))
            };
            // the real literal point lies on the line of clause `l`; the
            // dummy sits on the unused offsets `m + l`
            literals.push(LiteralPoint {
                clause: l,
                category: cat,
                var: lit.var,
                role: real.0,
                apex: point(real.1, l),
                axis: real.1,
            });
            literals.push(LiteralPoint {
                clause: l,
                category: cat,
                var: lit.var,
                role: dummy.0,
                apex: point(dummy.1, m + l),
                axis: dummy.1,
            });

            let mut apex = [base + l; 3];
            apex[c] = 1;
            clauses.push(ClausePoint {
                clause: l,
                category: cat,
                apex,
                axis: c,
            });
            for other in (0..3).filter(|&a| a != c) {
                let mut p = apex;
                p[other] = s - 1;
                scaffolding.push(ScaffoldPoint {
                    kind: ScaffoldKind::C3,
                    apex: p,
                });
            }
        }
    }

    for cat in Category::ALL {
        let c = cat.index();
        for var in 1..=formula.vars[c] {
            let (a, b) = match c {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            for (hi, lo) in [(b, a), (a, b)] {
                let mut p = [0usize; 3];
                p[c] = var + 1;
                p[lo] = base;
                p[hi] = s - 1;
                scaffolding.push(ScaffoldPoint {
                    kind: ScaffoldKind::C4,
                    apex: p,
                });
            }
        }
    }

    for i in base + 1..=base + 2 * m {
        for p in [
            [s, i, base],
            [s, base, i],
            [base, s, i],
            [i, s, base],
            [i, base, s],
            [base, i, s],
        ] {
            scaffolding.push(ScaffoldPoint {
                kind: ScaffoldKind::C5,
                apex: p,
            });
        }
    }

    let grid = ValueGrid::new(vec![h.clone(), h.clone(), h.clone()])?;
    let mut entries: Vec<(Vec<usize>, Q)> = Vec::new();
    let to_index = |p: [usize; 3]| p.iter().map(|k| k - 1).collect::<Vec<_>>();
    for lp in &literals {
        entries.push((to_index(lp.apex), c1.clone()));
    }
    for cp in &clauses {
        entries.push((to_index(cp.apex), c2.clone()));
    }
    for sp in &scaffolding {
        let c = match sp.kind {
            ScaffoldKind::C3 => &c3,
            ScaffoldKind::C4 => &c4,
            ScaffoldKind::C5 => &c5,
        };
        entries.push((to_index(sp.apex), c.clone()));
    }
    let mut seen = std::collections::HashSet::new();
    for (p, _) in &entries {
        if !seen.insert(p.clone()) {
            return Err(AuctionError::ReductionConstraint(format!(
                "two construction points share grid index {:?}",
                p.iter().map(|k| k + 1).collect::<Vec<_>>()
            )));
        }
    }
    let prior = JointPrior::from_entries(grid, entries)?;

    let hk = |k: usize| h[k - 1].clone();
    let scaffold_profit = scaffolding
        .iter()
        .map(|sp| match sp.kind {
            ScaffoldKind::C3 => hk(s - 1) * &c3,
            ScaffoldKind::C4 => hk(s - 1) * &c4,
            ScaffoldKind::C5 => hk(s) * &c5,
        })
        .fold(Q::zero(), |a, b| a + b);

    let two_m = Q::from_integer(((2 * m) as i64).into());
    let mut inequalities = Vec::new();
    for l in 1..=m {
        inequalities.push(check(
            format!("clause line {l}"),
            hk(base + l) * (&c2 + &c3),
            hk(s - 1) * &c3,
        ));
    }
    for l in 1..=2 * m {
        inequalities.push(check(
            format!("literal line {l}"),
            hk(base + l) * (&two_m * &c1 + &c4),
            hk(s - 1) * &c4,
        ));
    }
    inequalities.push(check(
        "variable plane".into(),
        Q::from_integer((n_hat as i64).into()) * hk(n_hat + 1) * &c1,
        hk(s) * &c5,
    ));

    Ok(ReductionInstance {
        formula: formula.clone(),
        profile,
        constants,
        h,
        prior,
        literals,
        clauses,
        scaffolding,
        scaffold_profit,
        inequalities,
    })
}
