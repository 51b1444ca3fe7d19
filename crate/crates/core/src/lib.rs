//! Frame-valued geometric logic.
//!
//! Formulas built from predicates, equality, finite conjunction, finite
//! joins and existential quantification are graded in a finite frame rather
//! than in the two-element Boolean algebra. The crate provides:
//!
//! - [`frame`]: finite frames with validated distributivity;
//! - [`syntax`]: terms, formulas, sequents, parsing and substitution;
//! - [`semantics`]: finite interpretations and graded satisfaction;
//! - [`proofs`]: the inference rules, derivation checking and soundness fuzzing;
//! - [`lindenbaum`]: the L-topological system of formula classes, its
//!   L-topology, and the propositional theory of a finite L-space.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod frame;
pub mod lindenbaum;
pub mod proofs;
pub mod random;
pub mod semantics;
pub mod syntax;

pub use frame::{build_frame, Elem, FiniteFrame, FrameConfig, FrameError, StandardFrame};
pub use semantics::{Assignment, Grade, Interpretation, SemanticsError, ValidityReport};
pub use syntax::{
    parse_formula, parse_sequent, parse_term, Formula, Sequent, Signature, Term, Var,
};
