//! Invariants of Weil representations attached to finite quadratic modules.
#![allow(clippy::needless_range_loop)]

pub mod appl;
pub mod arith;
pub mod config;
pub mod cyclo;
pub mod error;
pub mod fqm;
pub mod fundamental;
pub mod induct;
pub mod snf;
pub mod weil;

pub use cyclo::CycloNumber;
pub use error::{Error, Result};
pub use fqm::{DiscriminantForm, Element, JordanSymbol};
