//! Signed sets, sijections and statistic-compatible constructions on
//! Gelfand-Tsetlin patterns, monotone triangles and shifted patterns.

pub mod acceptance;
pub mod cli;
pub mod elem;
pub mod error;
pub mod gamma;
pub mod gt;
mod memo;
pub mod signed;
pub mod sijection;
pub mod statistics;
pub mod triangles;

pub use elem::{Arrow, Elem};
pub use error::{Error, Result};
pub use signed::SignedSet;
pub use sijection::{Side, Sij};
