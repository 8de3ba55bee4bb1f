//! Congruence classes as regular tree grammars, equational anti-unification
//! and the learning procedures built on it.

pub mod apps;
pub mod automata;
pub mod carriers;
pub mod congruence;
pub mod egen;
pub mod enumerate;
pub mod error;
pub mod grammar;
pub mod learn;
pub mod rewrite;
pub mod syntax;
pub mod term;
pub mod theory;

pub use error::{Error, Result};
pub use grammar::{Alt, Letter, Nt, TreeGrammar};
pub use term::{Signature, Substitution, Sym, Term};
