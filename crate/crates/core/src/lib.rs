//! Exact Klein TQFT engine for local real Gromov–Witten theory of curves.

pub mod characters;
pub mod combinatorics;
pub mod dsl;
pub mod error;
pub mod gv;
pub mod oracles;
pub mod powersum;
pub mod ring;
pub mod suites;
pub mod tqft;

pub use combinatorics::Partition;
pub use error::{Error, Result};
