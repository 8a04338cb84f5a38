//! Reduction from categorized 3-SAT to three-bidder revenue maximization.

pub mod construction;
pub mod formula;
mod search;
pub mod segments;
pub mod verify;

pub use construction::{catsat_to_instance, value_levels, ConstantsProfile, ReductionInstance};
pub use formula::{max3sat_to_catsat, parse_dimacs, CatClause, CatFormula, Category, Cnf, Lit};
pub use segments::{extract_segments, segments_to_mechanism, solve_3segments_exact, Segment, SegmentSelection};
pub use verify::{verify_reduction, ReductionReport};
