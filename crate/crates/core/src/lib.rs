//! Exact solvers for the capacitated protected rooted survivable network
//! problem: choose arcs (and up to `k'` protected arcs) of minimum cost so
//! that `|T|` units still flow from the root to the terminals after any `k`
//! non-protected selected arcs break down.
//!
//! Three formulations (cut-set, flow, bilevel) are solved by constraint and
//! column generation in [`engine`]; [`verify`] holds brute-force oracles.

pub mod formulations;
pub mod bench;
pub mod engine;
pub mod generate;
pub mod graph;
pub mod io;
pub mod separation;
pub mod verify;

pub use formulations::{CutSet, Design, ExtremePoint, FailureScenario};
pub use graph::{augment, ArcMask, AugmentedInstance, Instance};
