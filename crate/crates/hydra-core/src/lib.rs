//! Exact computation in hydra groups and their hyperbolic relatives.
//!
//! The crate provides, over exact integer arithmetic throughout:
//!
//! - freely reduced run-length words over named generator alphabets
//!   ([`word`]);
//! - endomorphisms of free groups with application, iterated powers,
//!   subgroup membership via folded graphs, and automorphism inversion
//!   ([`endo`]);
//! - the hydra battles, their step counters `H_k`, and the Ackermann
//!   hierarchy ([`hydra`]);
//! - free-by-cyclic groups `F ⋊ Z` with canonical `t^r·w` normal forms,
//!   including the hydra groups, the `Psi` family and the `Gamma`
//!   family ([`fbc`]);
//! - the subgroup-word constructions witnessing distortion, plus
//!   exhaustive freeness and distortion scans ([`lambda`]);
//! - finite presentations, the two presentations of `Gamma_k`, and the
//!   machine-checked generator maps between them ([`presentation`]);
//! - vertex links of presentation complexes with exact angles in π/6
//!   units, girth, 2π-loop enumeration and the flat-corner analysis
//!   ([`link`]).

pub mod budget;
pub mod endo;
pub mod error;
pub mod fbc;
mod fold;
pub mod hydra;
pub mod lambda;
pub mod link;
pub mod presentation;
pub mod runs;
pub mod word;

pub use budget::Budget;
pub use error::{Error, Result};
pub use word::{Alphabet, Generator, Word};

/// Toolkit version stamped into cache entries and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
