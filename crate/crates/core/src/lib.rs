//! Exact valuation-theoretic invariants of unibranch plane curve
//! singularities: monomial valuations, log discrepancies, volumes,
//! normalized-volume minimizers and the K-semistable log Fano cone
//! degenerations they induce, for single curves and sampled families.

pub mod algebra;
pub mod degeneration;
pub mod branch;
pub mod error;
pub mod families;
pub mod ideals;
pub mod invariants;
pub mod valuation;

pub use error::{Error, Result};
