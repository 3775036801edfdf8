//! Cache-aided interference networks with hypercube placement.
//!
//! The crate covers the whole pipeline for one network: [`model`] derives
//! the geometry, [`placement`] fills the caches, [`scheduler`] groups the
//! missing packets into one-shot blocks, [`phy`] checks that zero-forcing
//! plus cache cancellation decodes every block, and [`analytics`] compares
//! subpacketization against the baseline scheme.

pub mod analytics;
pub mod cli;
pub mod combinatorics;
pub mod config;
pub mod counting;
mod error;
pub mod model;
pub mod phy;
pub mod placement;
pub mod scheduler;
pub mod seeds;

pub use error::Error;
