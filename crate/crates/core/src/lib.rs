//! Revenue-optimal deterministic auctions for correlated bidder values.

pub mod continuous;
pub mod curve;
pub mod density;
pub mod error;
pub mod flow;
pub mod hardness;
pub mod io;
pub mod mech;
pub mod multi;
pub mod mwis;
pub mod priors;
pub mod rational;
pub mod solve2;

pub use error::{AuctionError, Result};
pub use rational::Q;
