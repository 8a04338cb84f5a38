use thiserror::Error;

/// Errors raised by the auction pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuctionError {
    #[error("invalid value grid: {0}")]
    InvalidGrid(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("index {index:?} out of range for shape {shape:?}")]
    IndexOutOfRange { index: Vec<usize>, shape: Vec<usize> },
    #[error("shape mismatch: expected {expected:?}, got {found:?}")]
    ShapeMismatch { expected: Vec<usize>, found: Vec<usize> },
    #[error("bidder {bidder} out of range for {bidders} bidders")]
    BidderOutOfRange { bidder: usize, bidders: usize },
    #[error("duplicate bidder index {0}")]
    DuplicateBidder(usize),
    #[error("operation needs {expected} bidders, prior has {found}")]
    WrongBidderCount { expected: usize, found: usize },
    #[error("allocation is not monotone for bidder {bidder}: wins at {winning:?} but not at {losing:?}")]
    NonMonotone {
        bidder: usize,
        winning: Vec<usize>,
        losing: Vec<usize>,
    },
    #[error("allocation pair is not proper: {0}")]
    NotProper(String),
    #[error("selected points conflict: u{u:?} and w{w:?}")]
    ConflictingSelection { u: (usize, usize), w: (usize, usize) },
    #[error("segments {first} and {second} overlap")]
    OverlappingSegments { first: usize, second: usize },
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("density oracle rejected: {0}")]
    Oracle(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible transshipment plan: {0}")]
    InfeasiblePlan(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("reduction constraint violated: {0}")]
    ReductionConstraint(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, AuctionError>;
