//! Two-source deterministic randomness extractors over prime fields, extension
//! fields and elliptic curves, together with an exhaustive audit engine that
//! measures their output distributions against the theoretical bounds.

pub mod arith;
pub mod audit;
pub mod catalog;
pub mod charsum;
pub mod cli;
pub mod ec;
mod error;
pub mod extract;
pub mod field;
pub mod fp;
pub mod fpn;

pub use error::{Error, Result};
