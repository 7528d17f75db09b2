//! Language membership and inclusion for finite labeled prime event structures.

#![allow(clippy::needless_range_loop)]

pub mod label;
pub mod error;
pub mod structure;
pub mod semantics;
pub mod embedding;
pub mod decision;
pub mod nfa;
pub mod reductions;
pub mod benchgen;

pub use error::{Error, Result};
pub use label::{Label, Language, Word};
pub use semantics::{Configuration, Limits};
pub use structure::{EventId, EventStructure, RawStructure, ValidationReport};
