//! Characteristic formulas of refinement types and subtyping by entailment.

use thiserror::Error;

use crate::logic::{entail_fin, truncate, Formula, LogicError};
use crate::syntax::PureType;
pub use crate::syntax::RefType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubtypeError {
    #[error("underlying types differ: {0} vs {1}")]
    Mismatch(String, String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// `(|T|, phi)` with `T` equivalent to `{|T| | phi}`.
pub fn char_type(t: &RefType) -> (PureType, Formula) {
    (t.underlying(), char_formula_of(t))
}

fn char_formula_of(t: &RefType) -> Formula {
    match t {
        RefType::Pure(_) => Formula::top(),
        RefType::Refine(_, f) => f.clone(),
        RefType::Prod(a, b) => {
            Formula::and([Formula::pi1(char_formula_of(a)), Formula::pi2(char_formula_of(b))])
        }
        RefType::Arrow(a, b) => Formula::arrow(char_formula_of(a), char_formula_of(b)),
    }
}

/// `S <: T` at truncation depth `k`.
pub fn subtype(s: &RefType, t: &RefType, k: usize) -> Result<bool, SubtypeError> {
    let (ps, fs) = char_type(s);
    let (pt, ft) = char_type(t);
    if !ps.alpha_eq(&pt) {
        return Err(SubtypeError::Mismatch(ps.to_string(), pt.to_string()));
    }
    Ok(entail_fin(&truncate(&fs, k)?, &truncate(&ft, k)?)?)
}
