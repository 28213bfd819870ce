//! Bounded semantics: a lazy evaluator producing finite lower
//! approximations of denotations, semantic membership, and brute-force
//! oracles over enumerated finite elements.

mod machine;
mod oracle;

use thiserror::Error;

use crate::findom::{enumerate, FinElt};
use crate::logic::{compile, dnf_disjuncts, Compiled, Formula, LogicError};
use crate::syntax::{BaseRegistry, Name, PureType, Term};

pub use machine::{Env, EvalError, Machine, Th, Whnf, DEFAULT_BUDGET};
pub use oracle::{
    judgment_oracle, oracle_consistent, oracle_entail, sat, JudgmentOracle, OracleError,
    MAX_ORACLE_RANK,
};

/// Outcome of [`member`]: lower approximations can confirm membership of
/// an upward-closed set but never refute it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Holds,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MemberError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Finite approximation of `term` under `env` (variables bound to finite
/// elements) at `fuel`: `fix` is unrolled at most `fuel` deep, folds are
/// followed at most `fuel` deep, and functions are probed at every element
/// of rank `rank` of their domain.
pub fn lower_term(
    term: &Term,
    env: &[(Name, FinElt)],
    tau: &PureType,
    fuel: u32,
    rank: usize,
    reg: &BaseRegistry,
) -> Result<FinElt, EvalError> {
    let m = Machine::default();
    let th = m.delay(term, &m.fin_env(env), fuel);
    let mut cache: Vec<(PureType, Vec<FinElt>)> = Vec::new();
    let mut probes = |t: &PureType| {
        if let Some((_, v)) = cache.iter().find(|(u, _)| u == t) {
            return v.clone();
        }
        let v = enumerate(t, rank, reg);
        cache.push((t.clone(), v.clone()));
        v
    };
    m.lower(&th, tau, fuel, &mut probes)
}

/// Whether the value of `term` under `env` is known to satisfy the
/// schema-free formula `phi` at `fuel`.
pub fn member(
    term: &Term,
    env: &[(Name, FinElt)],
    phi: &Formula,
    fuel: u32,
) -> Result<Membership, MemberError> {
    let m = Machine::default();
    let th = m.delay(term, &m.fin_env(env), fuel);
    Ok(if member_th(&m, &th, phi)? { Membership::Holds } else { Membership::Unknown })
}

fn member_th<'t>(m: &Machine, th: &Th<'t>, phi: &Formula) -> Result<bool, MemberError> {
    crate::deep(|| {
        if phi.is_conjunctive() {
            return Ok(match compile(phi)? {
                Compiled::Empty => false,
                Compiled::Up(d) => m.below(&d, th)?,
            });
        }
        Ok(match phi {
            Formula::And(fs) => {
                for f in fs {
                    if !member_th(m, th, f)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if member_th(m, th, f)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => {
                let w = m.force(th)?;
                let inner = match (&*w, phi) {
                    (Whnf::Pair(a, _), Formula::Pi1(_)) => a.clone(),
                    (Whnf::Pair(_, b), Formula::Pi2(_)) => b.clone(),
                    (Whnf::Fold(a), Formula::Fold(_)) => a.clone(),
                    _ => m.fin(FinElt::Bot),
                };
                member_th(m, &inner, f)?
            }
            Formula::Arrow(a, b) => {
                // (a1 \/ ... \/ an) -o b holds iff every ai -o b does, and a
                // monotone function satisfies ai -o b iff its value at the
                // generator of ai does
                for ai in dnf_disjuncts(a)? {
                    if let Compiled::Up(e) = compile(&ai)? {
                        let res = m.apply(th, &m.fin(e));
                        if !member_th(m, &res, b)? {
                            return Ok(false);
                        }
                    }
                }
                true
            }
            _ => return Err(LogicError::Schema(phi.to_string()).into()),
        })
    })
}
