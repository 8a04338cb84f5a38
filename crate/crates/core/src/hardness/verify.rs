//! Checks that the constructed instance behaves as the reduction claims.

use num_traits::Zero;
use serde::Serialize;

use super::construction::{catsat_to_instance, ConstantsProfile, ReductionInstance, ScaffoldKind};
use super::formula::{CatAssignment, CatFormula};
use super::segments::{extract_segments, segments_to_mechanism, solve_3segments_exact, Segment};
use crate::error::Result;
use crate::mech::{expected_revenue, verify_truthful};
use crate::rational::Q;

/// Role of an extracted segment in the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum SegmentClass {
    Literal(usize),
    Clause(usize),
    /// The segment of a scaffolding point along the axis where its apex
    /// sits on one of the two top layers.
    Scaffold(usize),
    /// Another segment starting at a scaffolding point.
    ScaffoldSecondary(usize),
    Unexpected,
}

/// Axis of the intended segment at a scaffolding point.
pub fn scaffold_axis(inst: &ReductionInstance, apex: [usize; 3]) -> usize {
    let top = inst.side() - 1;
    (0..3).find(|&k| apex[k] >= top).expect("scaffolding points touch a top layer")
}

pub fn classify(inst: &ReductionInstance, seg: &Segment) -> SegmentClass {
    if let Some(k) = inst.literals.iter().position(|l| l.apex == seg.apex && l.axis == seg.axis) {
        return SegmentClass::Literal(k);
    }
    if let Some(k) = inst.clauses.iter().position(|c| c.apex == seg.apex && c.axis == seg.axis) {
        return SegmentClass::Clause(k);
    }
    if let Some(k) = inst.scaffolding.iter().position(|s| s.apex == seg.apex) {
        return if seg.axis == scaffold_axis(inst, seg.apex) {
            SegmentClass::Scaffold(k)
        } else {
            SegmentClass::ScaffoldSecondary(k)
        };
    }
    SegmentClass::Unexpected
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SegmentCensus {
    pub literal_segments: usize,
    pub clause_segments: usize,
    pub scaffold_segments: usize,
    pub secondary_segments: usize,
    /// Intended scaffolding segments whose weight differs from the
    /// scaffolding profit accounting, or that are missing.
    pub scaffold_weight_mismatches: Vec<[usize; 3]>,
    /// Segments that start at no construction point, or along the wrong axis.
    pub unexpected: Vec<Segment>,
    /// Literal or clause points with no segment along their intended axis.
    pub missing: Vec<[usize; 3]>,
    /// Literal segments of one variable with opposite types.
    pub literal_pairs: usize,
    /// Clause segments of one clause.
    pub clause_pairs: usize,
    /// A clause segment and the non-dummy literal segment of the same
    /// clause and category.
    pub clause_literal_pairs: usize,
    /// Any other intersection involving a literal, clause or intended
    /// scaffolding segment.
    pub violations: Vec<(Segment, Segment)>,
    /// Literal or clause segments crossing a secondary scaffolding segment.
    pub secondary_crossings: usize,
    /// Intersections among scaffolding segments.
    pub scaffold_pairs: usize,
}

impl SegmentCensus {
    /// Literal, clause and intended scaffolding segments are all present,
    /// correctly weighted, and intersect only in the sanctioned ways.
    pub fn ok(&self) -> bool {
        self.unexpected.is_empty()
            && self.missing.is_empty()
            && self.violations.is_empty()
            && self.scaffold_weight_mismatches.is_empty()
    }

    /// As [`SegmentCensus::ok`], and additionally no scaffolding point
    /// starts more than one segment.
    pub fn exact(&self) -> bool {
        self.ok() && self.secondary_segments == 0
    }
}

fn sanctioned(inst: &ReductionInstance, a: SegmentClass, b: SegmentClass) -> Option<u8> {
    use SegmentClass::*;
    match (a, b) {
        (Literal(i), Literal(j)) => {
            let (p, q) = (&inst.literals[i], &inst.literals[j]);
            (p.category == q.category && p.var == q.var && p.role.positive_type() != q.role.positive_type())
                .then_some(0)
        }
        (Clause(i), Clause(j)) => (inst.clauses[i].clause == inst.clauses[j].clause).then_some(1),
        (Clause(c), Literal(l)) | (Literal(l), Clause(c)) => {
            let (c, l) = (&inst.clauses[c], &inst.literals[l]);
            (c.clause == l.clause && c.category == l.category && !l.role.is_dummy()).then_some(2)
        }
        _ => None,
    }
}

/// Profit the accounting assigns to a scaffolding point: its value on the
/// top layer times its mass.
pub fn scaffold_weight(inst: &ReductionInstance, kind: ScaffoldKind, apex: [usize; 3]) -> Q {
    let [_, _, c3, c4, c5] = &inst.constants;
    let c = match kind {
        ScaffoldKind::C3 => c3,
        ScaffoldKind::C4 => c4,
        ScaffoldKind::C5 => c5,
    };
    inst.h(apex[scaffold_axis(inst, apex)]) * c
}

pub fn segment_census(inst: &ReductionInstance, segments: &[Segment]) -> SegmentCensus {
    let classes: Vec<SegmentClass> = segments.iter().map(|s| classify(inst, s)).collect();
    let mut census = SegmentCensus::default();
    for (s, c) in segments.iter().zip(&classes) {
        match c {
            SegmentClass::Literal(_) => census.literal_segments += 1,
            SegmentClass::Clause(_) => census.clause_segments += 1,
            SegmentClass::Scaffold(_) => census.scaffold_segments += 1,
            SegmentClass::ScaffoldSecondary(_) => census.secondary_segments += 1,
            SegmentClass::Unexpected => census.unexpected.push(s.clone()),
        }
    }
    let expected = inst
        .literals
        .iter()
        .map(|l| (l.apex, l.axis))
        .chain(inst.clauses.iter().map(|c| (c.apex, c.axis)));
    for (apex, axis) in expected {
        if !segments.iter().any(|s| s.apex == apex && s.axis == axis) {
            census.missing.push(apex);
        }
    }
    for (k, sp) in inst.scaffolding.iter().enumerate() {
        let found = segments
            .iter()
            .zip(&classes)
            .find(|(_, c)| **c == SegmentClass::Scaffold(k))
            .map(|(s, _)| &s.weight);
        if found != Some(&scaffold_weight(inst, sp.kind, sp.apex)) {
            census.scaffold_weight_mismatches.push(sp.apex);
        }
    }
    for a in 0..segments.len() {
        for b in a + 1..segments.len() {
            if !segments[a].intersects(&segments[b]) {
                continue;
            }
            let (ca, cb) = (classes[a], classes[b]);
            let structural = |c: SegmentClass| matches!(c, SegmentClass::Literal(_) | SegmentClass::Clause(_));
            let secondary = |c: SegmentClass| matches!(c, SegmentClass::ScaffoldSecondary(_));
            if !structural(ca) && !structural(cb) {
                census.scaffold_pairs += 1;
                continue;
            }
            if secondary(ca) || secondary(cb) {
                census.secondary_crossings += 1;
                continue;
            }
            match sanctioned(inst, ca, cb) {
                Some(0) => census.literal_pairs += 1,
                Some(1) => census.clause_pairs += 1,
                Some(_) => census.clause_literal_pairs += 1,
                None => census.violations.push((segments[a].clone(), segments[b].clone())),
            }
        }
    }
    census
}

/// Reads a truth assignment off a segment selection: a variable whose
/// positive-type segments are chosen is false, one whose negative-type
/// segments are chosen is true, any other is false.
pub fn decode_assignment(inst: &ReductionInstance, segments: &[Segment], selected: &[usize]) -> CatAssignment {
    let mut out: CatAssignment = std::array::from_fn(|c| vec![false; inst.formula.vars[c]]);
    for &k in selected {
        if let SegmentClass::Literal(l) = classify(inst, &segments[k]) {
            let lp = &inst.literals[l];
            out[lp.category.index()][lp.var - 1] = !lp.role.positive_type();
        }
    }
    out
}

/// Selection built from an assignment: the literal segments of the type the
/// assignment makes false, one clause segment per satisfied clause, and the
/// intended segment at each scaffolding point.
pub fn assignment_selection(inst: &ReductionInstance, segments: &[Segment], assignment: &CatAssignment) -> Vec<usize> {
    let classes: Vec<SegmentClass> = segments.iter().map(|s| classify(inst, s)).collect();
    let mut chosen = Vec::new();
    let mut clause_done = vec![false; inst.formula.m()];
    for (k, c) in classes.iter().enumerate() {
        match *c {
            SegmentClass::Literal(l) => {
                let lp = &inst.literals[l];
                let value = assignment[lp.category.index()][lp.var - 1];
                if lp.role.positive_type() != value {
                    chosen.push(k);
                }
            }
            SegmentClass::Clause(ci) => {
                let cp = &inst.clauses[ci];
                let lit = inst.formula.clauses[cp.clause - 1][cp.category.index()].expect("clause point has a literal");
                if !clause_done[cp.clause - 1] && lit.eval(assignment[cp.category.index()][lit.var - 1]) {
                    clause_done[cp.clause - 1] = true;
                    chosen.push(k);
                }
            }
            _ => {}
        }
    }
    chosen.extend(
        classes
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, SegmentClass::Scaffold(_)))
            .map(|(k, _)| k),
    );
    chosen.sort_unstable();
    chosen
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub profile: ConstantsProfile,
    pub clauses: usize,
    pub occurrences: usize,
    pub n_hat: usize,
    pub side: usize,
    pub segments: usize,
    pub inequalities_ok: bool,
    pub census: SegmentCensus,
    pub satisfiable: bool,
    pub max_satisfied: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub rho: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub optimum: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub cost1: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub cost2: Q,
    /// Weight of the selection built from a best assignment, and whether
    /// that selection is disjoint.
    #[serde(with = "crate::rational::serde_q")]
    pub witness_weight: Q,
    pub witness_disjoint: bool,
    /// Satisfiable: optimum equals cost1. Otherwise: optimum is at most cost2.
    pub bound_holds: bool,
    pub selected_clause_segments: usize,
    pub decoded_satisfied: usize,
    /// The decoded assignment satisfies at least as many clauses as there
    /// are chosen clause segments.
    pub decoding_ok: bool,
    /// The optimal selection, turned into an allocation, is truthful and
    /// earns the optimum.
    pub mechanism_ok: bool,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.inequalities_ok
            && self.census.ok()
            && self.witness_disjoint
            && self.bound_holds
            && self.decoding_ok
            && self.mechanism_ok
    }
}

/// Builds the instance, solves it exactly, and compares the optimum with
/// the satisfiability of the formula.
pub fn verify_reduction(formula: &CatFormula, profile: ConstantsProfile) -> Result<ReductionReport> {
    let inst = catsat_to_instance(formula, profile)?;
    let segments = extract_segments(&inst.prior)?;
    let census = segment_census(&inst, &segments);
    let sel = solve_3segments_exact(&segments)?;

    let (max_sat, best) = formula.max_satisfied()?;
    let m = formula.m();
    let rho = if m == 0 { Q::zero() } else { Q::new((max_sat as i64).into(), (m as i64).into()) };
    let satisfiable = max_sat == m;
    let cost1 = inst.cost1();
    let cost2 = inst.cost2(&rho);

    let witness = assignment_selection(&inst, &segments, &best);
    let witness_weight: Q = witness.iter().map(|&k| segments[k].weight.clone()).sum();
    let witness_disjoint = witness
        .iter()
        .enumerate()
        .all(|(i, &a)| witness[i + 1..].iter().all(|&b| !segments[a].intersects(&segments[b])));

    let bound_holds = if satisfiable { sel.weight == cost1 } else { sel.weight <= cost2 };

    let selected_clause_segments = sel
        .selected
        .iter()
        .filter(|&&k| matches!(classify(&inst, &segments[k]), SegmentClass::Clause(_)))
        .count();
    let decoded = decode_assignment(&inst, &segments, &sel.selected);
    let decoded_satisfied = formula.satisfied(&decoded);

    let chosen: Vec<Segment> = sel.selected.iter().map(|&k| segments[k].clone()).collect();
    let mech = segments_to_mechanism(&inst.prior, &chosen)?;
    let revenue = expected_revenue(&mech, &inst.prior)? * inst.prior.total_mass();
    let mechanism_ok = verify_truthful(&mech).is_pass() && revenue == sel.weight;

    Ok(ReductionReport {
        profile,
        clauses: m,
        occurrences: formula.occurrences(),
        n_hat: formula.n_hat(),
        side: inst.side(),
        segments: segments.len(),
        inequalities_ok: inst.inequalities_hold(),
        census,
        satisfiable,
        max_satisfied: max_sat,
        rho,
        optimum: sel.weight,
        cost1,
        cost2,
        witness_weight,
        witness_disjoint,
        bound_holds,
        selected_clause_segments,
        decoded_satisfied,
        decoding_ok: decoded_satisfied >= selected_clause_segments,
        mechanism_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardness::formula::Lit;
    use crate::rational::{q, qi};

    fn x1_and_not_x1() -> CatFormula {
        CatFormula::new([1, 0, 0], vec![[Some(Lit::pos(1)), None, None], [Some(Lit::neg(1)), None, None]]).unwrap()
    }

    #[test]
    fn full_clause_golden() {
        let f = CatFormula::new([1, 1, 1], vec![[Some(Lit::pos(1)), Some(Lit::pos(1)), Some(Lit::pos(1))]]).unwrap();
        let r = verify_reduction(&f, ConstantsProfile::Published).unwrap();
        // 1 + 3 * (3/2) + (6*4 + 6*4*3 + 12*5*(2/5))
        assert_eq!(r.cost1, qi(1) + q(9, 2) + qi(24 + 72 + 24));
        assert_eq!(r.optimum, r.cost1);
        assert_eq!(r.census.literal_segments, 6);
        assert_eq!(r.census.clause_segments, 3);
        assert_eq!(r.census.scaffold_segments, 6 + 6 + 12);
        assert_eq!(r.census.clause_pairs, 3);
        assert_eq!(r.census.clause_literal_pairs, 3);
        assert!(r.passed());
    }

    #[test]
    fn scaffolding_points_start_secondary_segments() {
        let f = CatFormula::new([1, 0, 0], vec![[Some(Lit::pos(1)), None, None]]).unwrap();
        let r = verify_reduction(&f, ConstantsProfile::Published).unwrap();
        assert!(r.census.ok());
        assert!(!r.census.exact());
        assert_eq!(r.census.secondary_segments, 32);
    }

    #[test]
    fn empty_clause_set_earns_scaffolding_only() {
        let f = CatFormula::new([1, 1, 1], vec![]).unwrap();
        let inst = catsat_to_instance(&f, ConstantsProfile::Published).unwrap();
        let r = verify_reduction(&f, ConstantsProfile::Published).unwrap();
        assert_eq!(r.optimum, inst.scaffold_profit);
        assert!(r.passed());
    }

    #[test]
    fn contradiction_breaks_published_constants() {
        let r = verify_reduction(&x1_and_not_x1(), ConstantsProfile::Published).unwrap();
        assert!(!r.satisfiable);
        assert_eq!(r.rho, q(1, 2));
        // both clause segments plus one dummy literal segment beat the bound
        assert!(r.optimum > r.cost2);
        assert_eq!(r.selected_clause_segments, 2);
        assert_eq!(r.decoded_satisfied, 1);
        assert!(!r.passed());
    }

    #[test]
    fn contradiction_holds_with_repaired_constants() {
        let r = verify_reduction(&x1_and_not_x1(), ConstantsProfile::Repaired).unwrap();
        assert_eq!(r.optimum, r.cost2);
        assert!(r.passed());
    }

    #[test]
    fn decoding_reads_literal_types() {
        let f = CatFormula::new([2, 0, 0], vec![[Some(Lit::pos(1)), None, None], [Some(Lit::neg(2)), None, None]]).unwrap();
        let inst = catsat_to_instance(&f, ConstantsProfile::Repaired).unwrap();
        let segs = extract_segments(&inst.prior).unwrap();
        let assignment: CatAssignment = [vec![true, false], vec![], vec![]];
        let chosen = assignment_selection(&inst, &segs, &assignment);
        assert_eq!(decode_assignment(&inst, &segs, &chosen), assignment);
        let w: Q = chosen.iter().map(|&k| segs[k].weight.clone()).sum();
        assert_eq!(w, inst.cost1());
    }
}
