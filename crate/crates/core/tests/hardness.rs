mod common;

use auction_core::hardness::verify::{classify, segment_census, SegmentClass};
use auction_core::hardness::{
    catsat_to_instance, extract_segments, max3sat_to_catsat, segments_to_mechanism, solve_3segments_exact,
    verify_reduction, CatFormula, Cnf, ConstantsProfile, Lit, Segment,
};
use auction_core::mech::{expected_revenue, verify_truthful};
use auction_core::multi::brute_force_n;
use auction_core::rational::qi;
use common::random_prior;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Points of a segment inside a cube of the given side.
fn cells(s: &Segment, side: usize) -> Vec<[usize; 3]> {
    (s.apex[s.axis]..=side)
        .map(|k| {
            let mut p = s.apex;
            p[s.axis] = k;
            p
        })
        .collect()
}

fn cnf_satisfiable(vars: usize, clauses: &[Vec<i64>]) -> bool {
    (0u32..1 << vars).any(|bits| {
        clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                v == (l > 0)
            })
        })
    })
}

fn cnf_strategy() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..4).prop_flat_map(|vars| {
        let lit = (1..=vars as i64, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        let clause = prop::collection::vec(lit, 1..=3);
        (Just(vars), prop::collection::vec(clause, 1..=3))
            .prop_filter("at most 8 occurrences", |(_, cs)| cs.iter().map(Vec::len).sum::<usize>() <= 8)
    })
}

fn catsat_strategy() -> impl Strategy<Value = CatFormula> {
    let lit = |n: usize| (1..=n, any::<bool>()).prop_map(|(v, s)| if s { Lit::pos(v) } else { Lit::neg(v) });
    (1usize..3, 1usize..3, 1usize..3).prop_flat_map(move |(a, b, c)| {
        let clause = (prop::option::of(lit(a)), prop::option::of(lit(b)), prop::option::of(lit(c)))
            .prop_filter("non-empty clause", |t| t.0.is_some() || t.1.is_some() || t.2.is_some())
            .prop_map(|(x, y, z)| [x, y, z]);
        prop::collection::vec(clause, 1..=2).prop_map(move |cs| CatFormula::new([a, b, c], cs).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn segment_optimum_is_revenue_optimum(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, c in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = random_prior(&mut rng, &[a, b, c], 0.4);
        let segs = extract_segments(&prior).unwrap();
        let sel = solve_3segments_exact(&segs).unwrap();
        let chosen: Vec<Segment> = sel.selected.iter().map(|&k| segs[k].clone()).collect();
        let mech = segments_to_mechanism(&prior, &chosen).unwrap();
        prop_assert!(verify_truthful(&mech).is_pass());
        let rev = expected_revenue(&mech, &prior).unwrap();
        prop_assert_eq!(&rev, &(&sel.weight / prior.total_mass()));
        prop_assert_eq!(rev, brute_force_n(&prior).unwrap().0);
    }

    #[test]
    fn intersection_means_shared_cell(
        axes in (0usize..3, 0usize..3),
        p in prop::array::uniform3(1usize..5),
        r in prop::array::uniform3(1usize..5),
    ) {
        let s = Segment { axis: axes.0, apex: p, weight: qi(1) };
        let t = Segment { axis: axes.1, apex: r, weight: qi(1) };
        let shared = cells(&s, 4).iter().any(|x| cells(&t, 4).contains(x));
        prop_assert_eq!(s.intersects(&t), shared);
        prop_assert_eq!(t.intersects(&s), shared);
    }

    #[test]
    fn max3sat_translation_preserves_satisfiability((vars, clauses) in cnf_strategy()) {
        let cnf = Cnf::new(vars, clauses.clone()).unwrap();
        let cat = max3sat_to_catsat(&cnf).unwrap();
        prop_assert_eq!(cat.is_satisfiable().unwrap(), cnf_satisfiable(vars, &clauses));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn repaired_reduction_is_sound(formula in catsat_strategy()) {
        let report = verify_reduction(&formula, ConstantsProfile::Repaired).unwrap();
        prop_assert!(report.passed(), "{:?}", report);
        prop_assert!(report.census.ok());
    }

    #[test]
    fn published_reduction_complete_on_satisfiable(formula in catsat_strategy()) {
        let report = verify_reduction(&formula, ConstantsProfile::Published).unwrap();
        prop_assert!(report.census.ok());
        prop_assert!(report.inequalities_ok);
        if report.satisfiable {
            prop_assert_eq!(&report.optimum, &report.cost1);
            prop_assert!(report.passed());
        }
        prop_assert!(report.witness_disjoint);
        prop_assert!(report.optimum >= report.witness_weight);
    }

    #[test]
    fn every_literal_and_clause_point_yields_a_segment(formula in catsat_strategy()) {
        let inst = catsat_to_instance(&formula, ConstantsProfile::Repaired).unwrap();
        let segs = extract_segments(&inst.prior).unwrap();
        let census = segment_census(&inst, &segs);
        prop_assert!(census.missing.is_empty());
        let literal = segs
            .iter()
            .filter(|s| matches!(classify(&inst, s), SegmentClass::Literal(_)))
            .count();
        prop_assert_eq!(literal, inst.literals.len());
    }
}
