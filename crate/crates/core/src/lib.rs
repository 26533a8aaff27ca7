//! Finite model theory toolkit.
//!
//! First-order syntax over finite signatures, finite models, model search,
//! the Post correspondence encoding, satisfiability-preserving signature
//! reductions, hereditarily finite sets and model minimisation.

pub mod bpcp;
pub mod gen;
pub mod hfs;
pub mod quotient;
pub mod reductions;
pub mod search;
pub mod semantics;
pub mod sexp;
pub mod syntax;
pub mod text;

pub use semantics::{satisfies, Assignment, FiniteModel, Interpretation};
pub use syntax::{Formula, FuncId, RelId, Signature, Term};
