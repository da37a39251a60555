//! Partial derivative automata for regular expressions extended with the
//! shuffle (interleaving) operator.
//!
//! The crate is organised bottom-up:
//!
//! - [`syntax`]: hash-consed expressions, concrete grammar, size metrics and
//!   nullability.
//! - [`lang_oracle`]: brute-force bounded-length language semantics, used as
//!   ground truth by the tests.
//! - [`derive`]: the support function `pi`, partial derivatives and their
//!   closures.
//! - [`automaton`]: the partial derivative NFA, membership, export and
//!   bounded equivalence.
//! - [`combinatorics`]: exact generating-function coefficients and the
//!   asymptotic size estimates.
//! - [`sampler`]: exact uniform random generation and the statistics harness.

pub mod automaton;
pub mod combinatorics;
pub mod derive;
pub mod lang_oracle;
pub mod sampler;
pub mod syntax;

pub use automaton::Nfa;
pub use derive::DerivClosure;
pub use lang_oracle::{BoundedLang, Word};
pub use syntax::{Alphabet, Expr, ExprArena, ExprSet, Node, Symbol, SyntaxError};
