//! Finite universal algebra with a pointed signature, and the weighted
//! commutator family it supports.
//!
//! The library works with finite algebras given by dense operation tables
//! over a universe `0..n-1`, in a signature that names a constant for the
//! distinguished zero element. On top of that base it provides:
//!
//! * subuniverse generation, powers, quotients, and term evaluation
//!   ([`algebra`]);
//! * congruence generation and the ideal/congruence correspondence
//!   ([`congruence`]);
//! * free algebras of the variety generated by an algebra, realized inside
//!   finite powers; identity checking; commutator-term enumeration;
//!   Mal'tsev-term and protomodularity-certificate search ([`free`]);
//! * the weighted subobject and weighted normal commutators `[X,Y | W]`,
//!   their Higgins/Huq (`W = {0}`) and weight-one (`W = A`) special cases,
//!   the Smith commutator of congruences, centrality decisions,
//!   a closed-form oracle for commutative rings, cross-validation between
//!   the routes, and divergence search ([`commutator`]);
//! * builders for verified corpus algebras: groups, commutative non-unital
//!   rings, loops ([`builders`]).
//!
//! Every commutator value is reported with an explicit status: `exact` when
//! a completeness certificate fired, `lower_bound` otherwise, and every
//! reported element carries a witness term that re-evaluates to it. Values
//! are never silently truncated; caps fail loudly ([`caps`]).
//!
//! With the default `parallel` feature, the heavy sweeps (free-algebra
//! closure rounds, assignment grids, suite scans) run on rayon; results are
//! identical to the sequential fallback by construction (candidates are
//! re-sorted deterministically before commitment).

pub mod algebra;
pub mod builders;
pub mod caps;
pub mod commutator;
pub mod congruence;
pub mod error;
pub mod exec;
pub mod format;
pub mod free;
pub mod structure;
pub mod term;

pub use algebra::{
    AlgebraMap, Assignment, El, FiniteAlgebra, OpDecl, PowerCodec, Signature, Subuniverse,
};
pub use caps::Caps;
pub use error::{Error, ValidationIssue};
pub use term::{Block, Term};
