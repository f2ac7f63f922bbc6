pub mod budget;
pub mod construction;
pub mod discrepancy;
pub mod error;
pub mod gf2;
pub mod graphs;
pub mod lemmas;
pub mod partitions;
pub mod report;
pub mod runner;
pub mod rng;
pub mod spectral;
pub mod walk_sim;

pub use error::{Error, Result};
