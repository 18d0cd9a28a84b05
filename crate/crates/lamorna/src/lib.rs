//! λ_amor^na: a non-affine, dependently-typed calculus for amortized
//! resource analysis of higher-order functional programs.
//!
//! The library is organized around the calculus itself:
//!
//! * [`ident`], [`types`], [`term`] — abstract syntax, free variables,
//!   capture-avoiding substitution, alpha-equivalence.
//! * [`potential`] — the potential-function language (primitive recursions
//!   over inductive values, exact rationals plus `+∞`), well-formedness,
//!   evaluation and substitution.
//! * [`simplify`] — normalization of potentials into linear combinations of
//!   measure atoms, constructor unfolding, case merging and re-rolling,
//!   min/max elimination.
//! * [`solver`] — a sound, incomplete entailment checker for potential
//!   inequalities plus a bounded enumeration oracle for testing, and an
//!   optional external solver hook.
//! * [`typer`] — the deterministic algorithmic type system, the feasibility
//!   check against requested judgements, elaboration into declarative
//!   derivations, and a validator for derivation trees.
//! * [`evaluator`] — small-step cost semantics over ⟨term, budget⟩
//!   configurations with a tick ledger.
//! * [`aara`] — the classic-AARA fragment: annotated types, potential
//!   extraction, term translation under a cost model, and the embedding
//!   check.
//! * [`syntax`] — concrete surface syntax: lexer, parser, printer.
//! * [`report`] — machine-readable reports shared by the CLI.

pub mod aara;
pub mod ctx;
pub mod evaluator;
pub mod ident;
pub mod potential;
pub mod report;
pub mod simplify;
pub mod solver;
pub mod syntax;
pub mod term;
pub mod typer;
pub mod types;

pub use ctx::{Ctx, Judgement};
pub use ident::{fresh_name, Ident, Supply};
pub use potential::{PotExpr, Rat};
pub use term::Term;
pub use types::TypeExpr;

/// Rational shorthand used throughout tests and the CLI.
pub fn rat(n: i64, d: i64) -> Rat {
    use num_bigint::BigInt;
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Integer-valued rational.
pub fn rint(n: i64) -> Rat {
    rat(n, 1)
}
