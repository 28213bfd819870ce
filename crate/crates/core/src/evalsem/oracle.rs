//! Brute-force semantic checks over the finite elements of bounded rank.
//!
//! Satisfaction is defined structurally on finite elements, with `-o`
//! quantified over the whole enumerated domain; nothing here goes through
//! the compilation of formulas, so the oracles are independent of the
//! decision procedures they validate.

use std::collections::HashMap;

use thiserror::Error;

use super::machine::EvalError;
use super::lower_term;
use crate::findom::{enumerate, FinElt};
use crate::logic::{truncate, Formula, LogicError};
use crate::subtype::char_type;
use crate::syntax::{BaseRegistry, Name, PureType, RefType, Term};

/// Ranks above this are refused: the universes grow doubly exponentially.
pub const MAX_ORACLE_RANK: usize = 3;

/// Context instantiations above this are refused.
const MAX_INSTANTIATIONS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("rank {0} exceeds the oracle cap {MAX_ORACLE_RANK}")]
    RankTooLarge(usize),
    #[error("formula `{0}` still contains a schema; truncate it first")]
    Schema(String),
    #[error("element {elt} does not match type {ty}")]
    Shape { elt: String, ty: String },
    #[error("{0} context instantiations exceed the oracle limit")]
    TooLarge(usize),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

struct Universe<'r> {
    rank: usize,
    reg: &'r BaseRegistry,
    cache: HashMap<String, Vec<FinElt>>,
}

impl<'r> Universe<'r> {
    fn new(rank: usize, reg: &'r BaseRegistry) -> Result<Self, OracleError> {
        if rank > MAX_ORACLE_RANK {
            return Err(OracleError::RankTooLarge(rank));
        }
        Ok(Universe { rank, reg, cache: HashMap::new() })
    }

    fn of(&mut self, tau: &PureType) -> Vec<FinElt> {
        let (rank, reg) = (self.rank, self.reg);
        self.cache.entry(tau.to_string()).or_insert_with(|| enumerate(tau, rank, reg)).clone()
    }

    fn sat(&mut self, tau: &PureType, d: &FinElt, phi: &Formula) -> Result<bool, OracleError> {
        let shape = || OracleError::Shape { elt: d.to_string(), ty: tau.to_string() };
        Ok(match phi {
            Formula::Atom(a) => matches!(d, FinElt::Atom(b) if a == b),
            Formula::Pi1(f) | Formula::Pi2(f) => {
                let PureType::Prod(s, t) = tau else { return Err(shape()) };
                let first = matches!(phi, Formula::Pi1(_));
                let (ty, part) = match d {
                    FinElt::Pair(a, b) => {
                        if first {
                            (s, (**a).clone())
                        } else {
                            (t, (**b).clone())
                        }
                    }
                    FinElt::Bot => (if first { s } else { t }, FinElt::Bot),
                    _ => return Err(shape()),
                };
                self.sat(ty, &part, f)?
            }
            Formula::Fold(f) => {
                let u = tau.unfold_rec().ok_or_else(shape)?;
                match d {
                    FinElt::Fold(a) => self.sat(&u, a, f)?,
                    FinElt::Bot => self.sat(&u, &FinElt::Bot, f)?,
                    _ => return Err(shape()),
                }
            }
            Formula::Arrow(a, b) => {
                let PureType::Arrow(s, t) = tau else { return Err(shape()) };
                for e in self.of(s) {
                    if self.sat(s, &e, a)? && !self.sat(t, &d.apply(&e), b)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::And(fs) => {
                for f in fs {
                    if !self.sat(tau, d, f)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if self.sat(tau, d, f)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Schema(..) | Formula::Mu(..) | Formula::Nu(..) | Formula::PVar(_) => {
                return Err(OracleError::Schema(phi.to_string()))
            }
        })
    }
}

/// Structural satisfaction of a schema-free formula by a finite element,
/// with `-o` quantified over the elements of rank `rank` of the domain.
pub fn sat(
    tau: &PureType,
    d: &FinElt,
    phi: &Formula,
    rank: usize,
    reg: &BaseRegistry,
) -> Result<bool, OracleError> {
    Universe::new(rank, reg)?.sat(tau, d, phi)
}

/// Every element of rank `rank` satisfying `psi` satisfies `phi`.
pub fn oracle_entail(
    tau: &PureType,
    psi: &Formula,
    phi: &Formula,
    rank: usize,
    reg: &BaseRegistry,
) -> Result<bool, OracleError> {
    let mut u = Universe::new(rank, reg)?;
    for d in u.of(tau) {
        if u.sat(tau, &d, psi)? && !u.sat(tau, &d, phi)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Some element of rank `rank` satisfies `phi`.
pub fn oracle_consistent(
    tau: &PureType,
    phi: &Formula,
    rank: usize,
    reg: &BaseRegistry,
) -> Result<bool, OracleError> {
    let mut u = Universe::new(rank, reg)?;
    for d in u.of(tau) {
        if u.sat(tau, &d, phi)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JudgmentOracle {
    /// No instantiation violates the goal.
    Sound { instantiations: usize },
    /// A context instantiation and the computed value failing the goal.
    Violated { env: Vec<(Name, FinElt)>, value: FinElt },
}

/// Tests a judgment on every instantiation of its context by elements of
/// rank `rank` satisfying the (truncated) context formulas. The value of
/// the term is approximated from below at `fuel`, so a violation is exact
/// only when that approximation is the denotation, which holds for
/// terminating computations over types whose elements all have rank
/// `rank` (such as Bool, Bool * Bool and Bool -> Bool at rank 2).
pub fn judgment_oracle(
    ctx: &[(Name, RefType)],
    term: &Term,
    goal: &RefType,
    k: usize,
    rank: usize,
    fuel: u32,
    reg: &BaseRegistry,
) -> Result<JudgmentOracle, OracleError> {
    let mut u = Universe::new(rank, reg)?;
    let mut choices: Vec<(Name, Vec<FinElt>)> = Vec::new();
    let mut total: usize = 1;
    for (x, t) in ctx {
        let (tau, phi) = char_type(t);
        let phi = truncate(&phi, k)?;
        let mut ok = Vec::new();
        for d in u.of(&tau) {
            if u.sat(&tau, &d, &phi)? {
                ok.push(d);
            }
        }
        total = total.saturating_mul(ok.len());
        if total > MAX_INSTANTIATIONS {
            return Err(OracleError::TooLarge(total));
        }
        choices.push((x.clone(), ok));
    }
    let (gtau, gphi) = char_type(goal);
    let gphi = truncate(&gphi, k)?;
    let mut idx = vec![0usize; choices.len()];
    let mut count = 0;
    if choices.iter().any(|(_, v)| v.is_empty()) {
        return Ok(JudgmentOracle::Sound { instantiations: 0 });
    }
    loop {
        let env: Vec<(Name, FinElt)> =
            choices.iter().zip(&idx).map(|((x, v), &i)| (x.clone(), v[i].clone())).collect();
        let value = lower_term(term, &env, &gtau, fuel, rank, reg)?;
        count += 1;
        if !u.sat(&gtau, &value, &gphi)? {
            return Ok(JudgmentOracle::Violated { env, value });
        }
        // odometer over the instantiations
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(JudgmentOracle::Sound { instantiations: count });
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].1.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
