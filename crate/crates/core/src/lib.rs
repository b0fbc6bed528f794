//! Finite-mathematics workbench for the commutative-module operad `CM`.
//!
//! The crate models the category `F_*` of finite pointed sets, a generic
//! finite-category engine, the operad `CM` fibered over `F_*` (in a literal and
//! a strengthened reading of its morphism condition), the category `F+` of
//! finite sets with marked subsets together with the symmetric monoidal
//! envelope comparison, and the functor `A_{E,M}` obtained from a finite
//! commutative monoid `E` and a module `M`.
//!
//! Every check is exhaustive up to explicit size bounds and reports failures
//! as structured, deterministic [`Witness`] values.

pub mod cm_operad;
pub mod envelope;
pub mod error;
pub mod fincat;
pub mod finset;
pub mod report;
pub mod semantics;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::{Verdict, Witness};
