//! Local computation algorithms for minimum set cover.
//!
//! Four global simulations ([`global`]) share one hashed random tape ([`tape`]) with
//! per-query oracles ([`lca`]) that answer "is set S in the cover?" and "which set
//! covers e?" while probing only a bounded neighborhood of the instance.

pub mod baselines;
pub mod cli;
pub mod error;
pub mod global;
pub mod lca;
pub mod setsystem;
pub mod tape;

pub use error::{Error, Result};
