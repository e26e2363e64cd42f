//! Random walks on symmetric families of tuple graphs.

pub mod builtin;
pub mod chain;
pub mod error;
pub mod exact;
pub mod family;
pub mod hitting;
pub mod orbit;
pub mod stabilize;
pub mod pattern;
pub mod perm;
pub mod ratfun;

pub use error::{Error, Result};
