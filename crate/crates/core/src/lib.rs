//! A laboratory for finite promise constraint satisfaction templates:
//! structures and homomorphisms, polymorphism search, minor conditions,
//! primitive-positive constructions, partition approximation systems, and
//! the reductions that connect them.

pub mod caps;
pub mod condition;
pub mod derive;
pub mod error;
pub mod free;
pub mod json;
pub mod kw;
pub mod minion;
pub mod pas;
pub mod powerset;
pub mod pp;
pub mod schedule;
pub mod structure;
pub mod weakreduce;

mod enc;
mod solver;
mod unionfind;

pub use caps::{Caps, Deadline};
pub use error::{Error, Result};
