//! A finite model theory workbench.
//!
//! The crate is organised around a handful of layers:
//!
//! - [`structure`]: finite relational structures, induced substructures,
//!   extensions and partial isomorphisms, plus the plain-text structure format.
//! - [`logic`]: first-order syntax, a parser and printer, Tarskian evaluation
//!   over finite structures, prenexing and quantifier-prefix classification.
//! - [`preservation`]: cruxes, covers, hereditariness, extension closure and the
//!   duality between the last two, decided over explicit finite families.
//! - [`counterexample`]: the sentence family `phi(k)` that is hereditary in the
//!   finite yet not expressible with `k` leading existentials, its models and
//!   non-models, and the Duplicator's segment strategy that separates them.
//! - [`games`]: a brute-force solver for the `exists^k forall^n` variant of the
//!   Ehrenfeucht-Fraisse game, with re-checkable certificates.
//! - [`report`]: the line-oriented machine-readable report format.

pub mod counterexample;
pub mod games;
pub mod logic;
pub mod preservation;
pub mod random;
pub mod report;
pub mod structure;

pub use logic::{Formula, PrefixClass, Quantifier, Term};
pub use structure::{Element, PartialMap, Structure, Vocabulary};

/// Default limit on explored positions / checked pairs for exhaustive runs.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
