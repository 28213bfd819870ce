//! Truncation of schemas and the disjunctive / conjunctive normal forms.

use itertools::Itertools;

use super::decide::compile;
use super::{Formula, LogicError, Schema};
use crate::syntax::Name;

/// Upper bound on intermediate normal-form sizes.
const HARD_LIMIT: usize = 1 << 16;

/// Removes units: `[m] true`, `false -o f` and `f -o true` become true,
/// `[m] false` becomes false, nested connectives are flattened and
/// absorbing elements short-circuit.
pub fn simplify(phi: &Formula) -> Formula {
    crate::deep(|| match phi {
        Formula::Atom(_) | Formula::PVar(_) => phi.clone(),
        Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => {
            let g = simplify(f);
            if g.is_top() || g.is_bot() {
                return g;
            }
            match phi {
                Formula::Pi1(_) => Formula::pi1(g),
                Formula::Pi2(_) => Formula::pi2(g),
                _ => Formula::fold(g),
            }
        }
        Formula::Arrow(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            if a.is_bot() || b.is_top() {
                Formula::top()
            } else {
                Formula::arrow(a, b)
            }
        }
        Formula::And(fs) => {
            let mut out = Vec::new();
            for f in fs {
                match simplify(f) {
                    Formula::And(gs) => out.extend(gs),
                    g if g.is_bot() => return Formula::bot(),
                    g => out.push(g),
                }
            }
            let out: Vec<Formula> = out.into_iter().unique().collect();
            if out.len() == 1 {
                out.into_iter().next().expect("one")
            } else {
                Formula::And(out)
            }
        }
        Formula::Or(fs) => {
            let mut out = Vec::new();
            for f in fs {
                match simplify(f) {
                    Formula::Or(gs) => out.extend(gs),
                    g if g.is_top() => return Formula::top(),
                    g => out.push(g),
                }
            }
            let out: Vec<Formula> = out.into_iter().unique().collect();
            if out.len() == 1 {
                out.into_iter().next().expect("one")
            } else {
                Formula::Or(out)
            }
        }
        Formula::Schema(s, f) => Formula::schema(*s, simplify(f)),
        Formula::Mu(p, f) => Formula::Mu(p.clone(), Box::new(simplify(f))),
        Formula::Nu(p, f) => Formula::Nu(p.clone(), Box::new(simplify(f))),
    })
}

fn subst_pvar(phi: &Formula, p: &Name, by: &Formula) -> Formula {
    match phi {
        Formula::PVar(q) if q == p => by.clone(),
        Formula::Atom(_) | Formula::PVar(_) => phi.clone(),
        Formula::Pi1(f) => Formula::pi1(subst_pvar(f, p, by)),
        Formula::Pi2(f) => Formula::pi2(subst_pvar(f, p, by)),
        Formula::Fold(f) => Formula::fold(subst_pvar(f, p, by)),
        Formula::Arrow(a, b) => Formula::arrow(subst_pvar(a, p, by), subst_pvar(b, p, by)),
        Formula::And(fs) => Formula::And(fs.iter().map(|f| subst_pvar(f, p, by)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|f| subst_pvar(f, p, by)).collect()),
        Formula::Schema(s, f) => Formula::schema(*s, subst_pvar(f, p, by)),
        Formula::Mu(q, _) | Formula::Nu(q, _) if q == p => phi.clone(),
        Formula::Mu(q, f) => Formula::Mu(q.clone(), Box::new(subst_pvar(f, p, by))),
        Formula::Nu(q, f) => Formula::Nu(q.clone(), Box::new(subst_pvar(f, p, by))),
    }
}

fn next_n(f: Formula, n: usize) -> Formula {
    (0..n).fold(f, |g, _| Formula::next(g))
}

/// Replaces every schema by its depth-`k` approximation:
/// `[] f` by the conjunction of `X^n f` for `n < k`, `<> f` by the
/// disjunction, tree schemas by `k` iterations of their one-level unfolding
/// from true (`AG`, `EG`) or false (`AF`, `EF`), `nu` by `k` iterations from
/// true and `mu` by `k` iterations from false. The result is simplified.
pub fn truncate(phi: &Formula, k: usize) -> Result<Formula, LogicError> {
    Ok(simplify(&trunc(phi, k)?))
}

fn trunc(phi: &Formula, k: usize) -> Result<Formula, LogicError> {
    crate::deep(|| {
        Ok(match phi {
            Formula::Atom(_) => phi.clone(),
            Formula::PVar(p) => return Err(LogicError::UnboundVar(p.to_string())),
            Formula::Pi1(f) => Formula::pi1(trunc(f, k)?),
            Formula::Pi2(f) => Formula::pi2(trunc(f, k)?),
            Formula::Fold(f) => Formula::fold(trunc(f, k)?),
            Formula::Arrow(a, b) => Formula::arrow(trunc(a, k)?, trunc(b, k)?),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| trunc(f, k)).try_collect()?),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| trunc(f, k)).try_collect()?),
            Formula::Schema(s, f) => {
                let g = simplify(&trunc(f, k)?);
                match s {
                    Schema::Always => Formula::And((0..k).map(|n| next_n(g.clone(), n)).collect()),
                    Schema::Eventually => {
                        Formula::Or((0..k).map(|n| next_n(g.clone(), n)).collect())
                    }
                    Schema::AllAlways | Schema::ExAlways | Schema::AllEventually
                    | Schema::ExEventually => {
                        let start = if matches!(s, Schema::AllAlways | Schema::ExAlways) {
                            Formula::top()
                        } else {
                            Formula::bot()
                        };
                        let mut cur = start;
                        for _ in 0..k {
                            let l = Formula::lft(cur.clone());
                            let r = Formula::rght(cur);
                            let step = if matches!(s, Schema::AllAlways | Schema::AllEventually) {
                                Formula::and([l, r])
                            } else {
                                Formula::or([l, r])
                            };
                            cur = simplify(&if matches!(s, Schema::AllAlways | Schema::ExAlways) {
                                Formula::and([g.clone(), step])
                            } else {
                                Formula::or([g.clone(), step])
                            });
                        }
                        cur
                    }
                }
            }
            Formula::Mu(p, f) | Formula::Nu(p, f) => {
                let mut cur =
                    if matches!(phi, Formula::Nu(..)) { Formula::top() } else { Formula::bot() };
                for _ in 0..k {
                    cur = simplify(&trunc(&subst_pvar(f, p, &cur), k)?);
                }
                cur
            }
        })
    })
}

/// Pushes `[pi1]`, `[pi2]` and `[fold]` through conjunctions and
/// disjunctions so that they only apply to conjunctive formulas.
pub fn push_modalities(phi: &Formula) -> Formula {
    fn wrap(m: &Formula, g: Formula) -> Formula {
        match m {
            Formula::Pi1(_) => Formula::pi1(g),
            Formula::Pi2(_) => Formula::pi2(g),
            _ => Formula::fold(g),
        }
    }
    fn go(phi: &Formula) -> Formula {
        match phi {
            Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => match go(f) {
                Formula::And(gs) => Formula::And(gs.into_iter().map(|g| wrap(phi, g)).collect()),
                Formula::Or(gs) => Formula::Or(gs.into_iter().map(|g| wrap(phi, g)).collect()),
                g => wrap(phi, g),
            },
            Formula::Arrow(a, b) => Formula::arrow(go(a), go(b)),
            Formula::And(fs) => Formula::And(fs.iter().map(go).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(go).collect()),
            _ => phi.clone(),
        }
    }
    simplify(&go(&simplify(phi)))
}

fn consistent_conj(c: &[Formula]) -> Result<bool, LogicError> {
    Ok(compile(&Formula::And(c.to_vec()))?.up().is_some())
}

fn conj(c: Vec<Formula>) -> Formula {
    let f = simplify(&Formula::And(c));
    if f.is_conjunctive() {
        f
    } else {
        // simplify keeps conjunctive pieces conjunctive
        unreachable!("conjunction of conjunctive literals")
    }
}

/// Disjuncts of an equivalent disjunctive normal form; each disjunct is
/// conjunctive. Arrows are normalised with
/// `(a1 \/ a2) -o f == (a1 -o f) /\ (a2 -o f)` and, for conjunctive `a`,
/// `a -o (c1 \/ c2) == (a -o c1) \/ (a -o c2)`.
pub fn dnf_disjuncts(phi: &Formula) -> Result<Vec<Formula>, LogicError> {
    Ok(dnf(phi)?.into_iter().map(conj).unique().collect())
}

fn check_size(n: usize) -> Result<(), LogicError> {
    if n > HARD_LIMIT {
        Err(LogicError::TooLarge(n, HARD_LIMIT))
    } else {
        Ok(())
    }
}

fn product(parts: Vec<Vec<Vec<Formula>>>) -> Result<Vec<Vec<Formula>>, LogicError> {
    let mut acc: Vec<Vec<Formula>> = vec![Vec::new()];
    for part in parts {
        check_size(acc.len().saturating_mul(part.len()))?;
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for a in &acc {
            for p in &part {
                let mut c = a.clone();
                c.extend(p.iter().cloned());
                next.push(c);
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

// Each inner vector is a conjunction of conjunctive literals.
fn dnf(phi: &Formula) -> Result<Vec<Vec<Formula>>, LogicError> {
    crate::deep(|| match phi {
        Formula::Atom(_) => Ok(vec![vec![phi.clone()]]),
        Formula::And(fs) => product(fs.iter().map(dnf).try_collect()?),
        Formula::Or(fs) => {
            let mut out = Vec::new();
            for f in fs {
                out.extend(dnf(f)?);
                check_size(out.len())?;
            }
            Ok(out)
        }
        Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => {
            let wrap = |g: Formula| match phi {
                Formula::Pi1(_) => Formula::pi1(g),
                Formula::Pi2(_) => Formula::pi2(g),
                _ => Formula::fold(g),
            };
            Ok(dnf(f)?.into_iter().map(|c| vec![wrap(conj(c))]).collect())
        }
        Formula::Arrow(a, b) => {
            let ants = dnf(a)?;
            let cons: Vec<Formula> = dnf(b)?.into_iter().map(conj).unique().collect();
            let mut parts = Vec::new();
            for ai in ants {
                if !consistent_conj(&ai)? {
                    continue;
                }
                let a = conj(ai);
                if cons.is_empty() {
                    // a -o false with a satisfiable is false
                    return Ok(Vec::new());
                }
                parts.push(cons.iter().map(|c| vec![Formula::arrow(a.clone(), c.clone())]).collect());
            }
            product(parts)
        }
        Formula::Schema(..) | Formula::Mu(..) | Formula::Nu(..) | Formula::PVar(_) => {
            Err(LogicError::Schema(phi.to_string()))
        }
    })
}

/// The disjunctive normal form as a formula `\/ (/\ ...)`.
pub fn to_dnf(phi: &Formula) -> Result<Formula, LogicError> {
    let ds = dnf(phi)?;
    Ok(Formula::Or(
        ds.into_iter()
            .map(|c| match conj(c) {
                Formula::And(v) => Formula::And(v),
                f => Formula::And(vec![f]),
            })
            .unique()
            .collect(),
    ))
}

/// Clauses of an equivalent conjunction of disjunctions of conjunctive
/// formulas (the normal form used to split goals).
pub fn norm_clauses(phi: &Formula) -> Result<Vec<Vec<Formula>>, LogicError> {
    let cs = norm(phi)?;
    Ok(cs
        .into_iter()
        .map(|c| c.into_iter().unique().collect::<Vec<_>>())
        .unique()
        .collect())
}

fn norm(phi: &Formula) -> Result<Vec<Vec<Formula>>, LogicError> {
    crate::deep(|| match phi {
        Formula::Atom(_) => Ok(vec![vec![phi.clone()]]),
        _ if phi.is_conjunctive() && !matches!(phi, Formula::And(_)) => {
            let s = simplify(phi);
            if s.is_top() {
                Ok(Vec::new())
            } else if s.is_bot() {
                Ok(vec![Vec::new()])
            } else {
                Ok(vec![vec![s]])
            }
        }
        Formula::And(fs) => {
            let mut out = Vec::new();
            for f in fs {
                out.extend(norm(f)?);
                check_size(out.len())?;
            }
            Ok(out)
        }
        Formula::Or(fs) => {
            // a disjunction of conjunctions of clauses: pick one clause from
            // each disjunct and join them
            let mut acc: Vec<Vec<Formula>> = vec![Vec::new()];
            for f in fs {
                let cl = norm(f)?;
                if cl.is_empty() {
                    return Ok(Vec::new());
                }
                check_size(acc.len().saturating_mul(cl.len()))?;
                let mut next = Vec::new();
                for a in &acc {
                    for c in &cl {
                        let mut x = a.clone();
                        x.extend(c.iter().cloned());
                        next.push(x);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => {
            let wrap = |g: Formula| match phi {
                Formula::Pi1(_) => Formula::pi1(g),
                Formula::Pi2(_) => Formula::pi2(g),
                _ => Formula::fold(g),
            };
            Ok(norm(f)?.into_iter().map(|c| c.into_iter().map(wrap).collect()).collect())
        }
        Formula::Arrow(a, b) => {
            let ants = dnf(a)?;
            let clauses = norm(b)?;
            let mut out = Vec::new();
            for ai in ants {
                if !consistent_conj(&ai)? {
                    continue;
                }
                let a = conj(ai);
                for k in &clauses {
                    out.push(k.iter().map(|c| Formula::arrow(a.clone(), c.clone())).collect());
                }
                check_size(out.len())?;
            }
            Ok(out)
        }
        Formula::Schema(..) | Formula::Mu(..) | Formula::Nu(..) | Formula::PVar(_) => {
            Err(LogicError::Schema(phi.to_string()))
        }
    })
}
