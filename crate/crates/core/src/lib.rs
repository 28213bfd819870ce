//! Refinement types over a domain-theoretic logic.
//!
//! The crate is organised bottom-up:
//!
//! * [`syntax`]: types, terms, the surface parser and printer, pure typing.
//! * [`findom`]: finite elements of Scott domains and their order theory.
//! * [`logic`]: formulas, compilation to finite elements, entailment, truncation.
//! * [`subtype`]: characteristic formulas of refinement types and subtyping.
//! * [`evalsem`]: a bounded lazy evaluator, semantic membership and the oracles.
//! * [`checker`]: the refinement type checker and its derivation traces.
//! * [`judgment`]: the judgment file format.
//! * [`par`]: data-parallel sweeps with a sequential fallback.

pub mod checker;
pub mod corpus;
pub mod evalsem;
pub mod findom;
pub mod gen;
pub mod judgment;
pub mod logic;
pub mod par;
pub mod subtype;
pub mod syntax;

pub use checker::{check, check_normal, CheckOptions, Verdict};
pub use findom::FinElt;
pub use logic::{Compiled, Formula};
pub use syntax::{BaseRegistry, Name, PureType, RefType, Term};

/// Runs `f` on a fresh stack segment when the remaining stack is low.
///
/// Evaluation, readback and checking recurse on the term and value structure;
/// deep fix unrollings would otherwise overflow the default thread stack.
#[inline]
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, f)
}
