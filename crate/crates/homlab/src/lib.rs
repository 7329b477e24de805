//! Desk-scale laboratory for reusability-restricted graph decompositions,
//! pursuit-evasion and pebble games, homomorphism counting, CFI graphs,
//! counting logics and game comonads.

pub mod error;
pub mod decomp;
pub mod graph;
pub mod homcount;
pub mod modelgames;
pub mod cfi;
pub mod pursuit;
pub mod logic;
pub mod comonad;
pub mod harness;

pub use error::{Error, Result};
