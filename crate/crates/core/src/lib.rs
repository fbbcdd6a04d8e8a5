//! Finitely many-valued coalgebraic modal logic.
//!
//! The crate is organized bottom-up:
//!
//! - [`algebra`]: finite FL_ew algebras (Łukasiewicz chains and validated
//!   operation tables) with the Baaz Delta and valuation operations.
//! - [`syntax`]: formulas, the three language flavors, parsing/printing,
//!   closure, substitution and rank classification.
//! - [`semantics`]: coalgebraic models for five functor kinds, predicate
//!   liftings, evaluation, one-step models and naturality checking.
//! - [`filtration`]: quotients by agreement on a closed formula set.
//! - [`proof`]: rule schemata, proof trees and a proof checker.
//! - [`decide`]: brute-force decision procedures and bounded searches.
//! - [`io`]: the JSON file formats shared by the command-line tool.

pub mod algebra;
pub mod decide;
pub mod error;
pub mod filtration;
pub mod io;
pub mod proof;
pub mod semantics;
pub mod syntax;

mod limits;

pub use algebra::{FiniteAlgebra, Rational, TruthValue};
pub use error::{BlowUp, Error};
pub use limits::Limits;
pub use semantics::{FunctorKind, ProbMode, Successors, TModel};
pub use syntax::{Flavor, Formula, Signature};
