//! Finite (compact) elements of the Scott domains denoted by pure types.
//!
//! Elements are kept in a canonical form so that structural equality is
//! equality in the domain:
//!
//! * the least element of every type is [`FinElt::Bot`]; `(bot, bot)`,
//!   `fold bot` and the empty step function all normalise to it;
//! * a step function lists exactly its jump points `(a, f(a))`: arguments
//!   where `f(a)` exceeds the join of `f` below `a`, sorted.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::syntax::{name, BaseRegistry, Name, PureType};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FinElt {
    Bot,
    Atom(Name),
    Pair(Arc<FinElt>, Arc<FinElt>),
    Fold(Arc<FinElt>),
    /// Steps `(arg, result)`; build with [`mk_fun`] to keep the invariants.
    Fun(Arc<[(FinElt, FinElt)]>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinError {
    #[error("element {elt} does not have type {ty}")]
    Shape { elt: String, ty: String },
    #[error("inconsistent steps {subset:?}: their arguments have a join but their results do not")]
    Inconsistent { subset: Vec<usize> },
}

impl FinElt {
    pub fn atom(c: &str) -> Self {
        FinElt::Atom(name(c))
    }

    /// Canonical pair: `(bot, bot)` is `bot`.
    pub fn pair(a: FinElt, b: FinElt) -> Self {
        if a == FinElt::Bot && b == FinElt::Bot {
            FinElt::Bot
        } else {
            FinElt::Pair(Arc::new(a), Arc::new(b))
        }
    }

    /// Canonical fold: `fold bot` is `bot`.
    pub fn fold(a: FinElt) -> Self {
        if a == FinElt::Bot {
            FinElt::Bot
        } else {
            FinElt::Fold(Arc::new(a))
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, FinElt::Bot)
    }

    /// The domain order on canonical elements.
    pub fn leq(&self, other: &FinElt) -> bool {
        crate::deep(|| match (self, other) {
            (FinElt::Bot, _) => true,
            (_, FinElt::Bot) => false,
            (FinElt::Atom(a), FinElt::Atom(b)) => a == b,
            (FinElt::Pair(a1, a2), FinElt::Pair(b1, b2)) => a1.leq(b1) && a2.leq(b2),
            (FinElt::Fold(a), FinElt::Fold(b)) => a.leq(b),
            (FinElt::Fun(f), FinElt::Fun(_)) => f.iter().all(|(a, r)| r.leq(&other.apply(a))),
            _ => false,
        })
    }

    /// Least upper bound, if the two elements are consistent.
    pub fn sup(&self, other: &FinElt) -> Option<FinElt> {
        crate::deep(|| match (self, other) {
            (FinElt::Bot, x) | (x, FinElt::Bot) => Some(x.clone()),
            (FinElt::Atom(a), FinElt::Atom(b)) => (a == b).then(|| self.clone()),
            (FinElt::Pair(a1, a2), FinElt::Pair(b1, b2)) => {
                Some(FinElt::pair(a1.sup(b1)?, a2.sup(b2)?))
            }
            (FinElt::Fold(a), FinElt::Fold(b)) => Some(FinElt::fold(a.sup(b)?)),
            (FinElt::Fun(f), FinElt::Fun(g)) => {
                if self == other {
                    return Some(self.clone());
                }
                let steps: Vec<_> = f.iter().chain(g.iter()).cloned().collect();
                build_fun(steps).ok()
            }
            _ => None,
        })
    }

    pub fn consistent(&self, other: &FinElt) -> bool {
        self.sup(other).is_some()
    }

    /// Applies a step function: the join of the results whose argument is
    /// below `d`. Non-functions (only `bot` is well typed) yield `bot`.
    pub fn apply(&self, d: &FinElt) -> FinElt {
        match self {
            FinElt::Fun(steps) => {
                let mut acc = FinElt::Bot;
                for (a, r) in steps.iter() {
                    if a.leq(d) {
                        acc = acc.sup(r).expect("step function invariant: results have a join");
                    }
                }
                acc
            }
            _ => FinElt::Bot,
        }
    }

    pub fn steps(&self) -> &[(FinElt, FinElt)] {
        match self {
            FinElt::Fun(s) => s,
            _ => &[],
        }
    }

    /// Number of constructors, counting each step of a function.
    pub fn size(&self) -> usize {
        match self {
            FinElt::Bot | FinElt::Atom(_) => 1,
            FinElt::Pair(a, b) => 1 + a.size() + b.size(),
            FinElt::Fold(a) => 1 + a.size(),
            FinElt::Fun(s) => 1 + s.iter().map(|(a, r)| a.size() + r.size()).sum::<usize>(),
        }
    }
}

/// Builds the canonical step function of a family of steps, checking that
/// every subfamily with joinable arguments has joinable results.
fn build_fun(steps: Vec<(FinElt, FinElt)>) -> Result<FinElt, FinError> {
    let live: Vec<(usize, &FinElt, &FinElt)> = steps
        .iter()
        .enumerate()
        .filter(|(_, (_, r))| !r.is_bot())
        .map(|(i, (a, r))| (i, a, r))
        .collect();
    if live.is_empty() {
        return Ok(FinElt::Bot);
    }
    // close the arguments under binary joins; every joinable subfamily has
    // its join in the closure
    let mut points: Vec<FinElt> = live.iter().map(|(_, a, _)| (*a).clone()).unique().collect();
    let mut seen: BTreeSet<FinElt> = points.iter().cloned().collect();
    let mut frontier = 0;
    while frontier < points.len() {
        let end = points.len();
        for i in frontier..end {
            for j in 0..i {
                if let Some(p) = points[i].sup(&points[j]) {
                    if seen.insert(p.clone()) {
                        points.push(p);
                    }
                }
            }
        }
        frontier = end;
    }
    // value at each closure point
    let value_at = |p: &FinElt| -> Result<FinElt, FinError> {
        let mut acc = FinElt::Bot;
        let mut used = Vec::new();
        for (i, a, r) in &live {
            if a.leq(p) {
                used.push(*i);
                acc = match acc.sup(r) {
                    Some(x) => x,
                    None => return Err(FinError::Inconsistent { subset: used }),
                };
            }
        }
        Ok(acc)
    };
    let mut graph = Vec::with_capacity(points.len());
    for p in &points {
        graph.push((p.clone(), value_at(p)?));
    }
    // keep the jump points of the saturated graph
    let args: Vec<FinElt> = live.iter().map(|(_, a, _)| (*a).clone()).unique().collect();
    let sat: Vec<(FinElt, FinElt)> = args
        .iter()
        .map(|a| {
            let v = graph.iter().find(|(p, _)| p == a).expect("arg in closure").1.clone();
            (a.clone(), v)
        })
        .collect();
    let mut keep = Vec::new();
    for (a, v) in &sat {
        if v.is_bot() {
            continue;
        }
        let mut below = FinElt::Bot;
        for (b, w) in &sat {
            if b != a && b.leq(a) {
                below = below.sup(w).expect("values below a point are bounded by its value");
            }
        }
        if !v.leq(&below) {
            keep.push((a.clone(), v.clone()));
        }
    }
    if keep.is_empty() {
        return Ok(FinElt::Bot);
    }
    keep.sort();
    Ok(FinElt::Fun(keep.into()))
}

/// Checks that `d` has type `tau` (and is built from registered constants).
pub fn check_shape(tau: &PureType, d: &FinElt, reg: &BaseRegistry) -> Result<(), FinError> {
    let bad = || FinError::Shape { elt: d.to_string(), ty: tau.to_string() };
    match (d, tau) {
        (FinElt::Bot, _) => Ok(()),
        (FinElt::Atom(c), PureType::Base(b)) => match reg.carrier(b) {
            Some(cs) if cs.contains(c) => Ok(()),
            _ => Err(bad()),
        },
        (FinElt::Pair(a, b), PureType::Prod(s, t)) => {
            check_shape(s, a, reg)?;
            check_shape(t, b, reg)
        }
        (FinElt::Fold(a), PureType::Rec(..)) => {
            check_shape(&tau.unfold_rec().expect("rec"), a, reg)
        }
        (FinElt::Fun(steps), PureType::Arrow(s, t)) => {
            for (a, r) in steps.iter() {
                check_shape(s, a, reg)?;
                check_shape(t, r, reg)?;
            }
            Ok(())
        }
        _ => Err(bad()),
    }
}

/// Rebuilds `d` bottom-up in canonical form.
pub fn canonicalize(d: &FinElt) -> Result<FinElt, FinError> {
    Ok(match d {
        FinElt::Bot | FinElt::Atom(_) => d.clone(),
        FinElt::Pair(a, b) => FinElt::pair(canonicalize(a)?, canonicalize(b)?),
        FinElt::Fold(a) => FinElt::fold(canonicalize(a)?),
        FinElt::Fun(steps) => {
            let steps = steps
                .iter()
                .map(|(a, r)| Ok((canonicalize(a)?, canonicalize(r)?)))
                .collect::<Result<Vec<_>, FinError>>()?;
            build_fun(steps)?
        }
    })
}

pub fn leq(tau: &PureType, d: &FinElt, e: &FinElt, reg: &BaseRegistry) -> Result<bool, FinError> {
    check_shape(tau, d, reg)?;
    check_shape(tau, e, reg)?;
    Ok(d.leq(e))
}

pub fn sup(
    tau: &PureType,
    d: &FinElt,
    e: &FinElt,
    reg: &BaseRegistry,
) -> Result<Option<FinElt>, FinError> {
    check_shape(tau, d, reg)?;
    check_shape(tau, e, reg)?;
    Ok(d.sup(e))
}

pub fn consistent(tau: &PureType, d: &FinElt, e: &FinElt, reg: &BaseRegistry) -> Result<bool, FinError> {
    Ok(sup(tau, d, e, reg)?.is_some())
}

pub fn apply(tau: &PureType, f: &FinElt, d: &FinElt, reg: &BaseRegistry) -> Result<FinElt, FinError> {
    check_shape(tau, f, reg)?;
    match tau {
        PureType::Arrow(dom, _) => {
            check_shape(dom, d, reg)?;
            Ok(f.apply(d))
        }
        _ => Err(FinError::Shape { elt: f.to_string(), ty: tau.to_string() }),
    }
}

/// The canonical join of the steps `(arg, result)`, or the offending steps.
pub fn mk_fun(
    tau: &PureType,
    steps: &[(FinElt, FinElt)],
    reg: &BaseRegistry,
) -> Result<FinElt, FinError> {
    let PureType::Arrow(dom, cod) = tau else {
        return Err(FinError::Shape { elt: "(fun ...)".into(), ty: tau.to_string() });
    };
    for (a, r) in steps {
        check_shape(dom, a, reg)?;
        check_shape(cod, r, reg)?;
    }
    build_fun(steps.to_vec())
}

/// Untyped [`mk_fun`] for callers that already know the shapes.
pub fn join_steps(steps: Vec<(FinElt, FinElt)>) -> Result<FinElt, FinError> {
    build_fun(steps)
}

/// All canonical elements of `tau` of rank at most `r`, without duplicates,
/// in a fixed order (sorted by the structural order of the representation).
///
/// Base types contribute all their constants at every rank; products pair
/// elements of the same rank; a recursive type at rank `r > 0` adds `fold`
/// of its unfolding at rank `r - 1`; a function type at rank `r > 0` joins
/// at most `r` steps drawn from rank `r - 1` arguments and results.
pub fn enumerate(tau: &PureType, r: usize, reg: &BaseRegistry) -> Vec<FinElt> {
    let mut out: Vec<FinElt> = enumerate_raw(tau, r, reg).into_iter().collect();
    out.sort();
    out
}

fn enumerate_raw(tau: &PureType, r: usize, reg: &BaseRegistry) -> BTreeSet<FinElt> {
    let mut out = BTreeSet::new();
    out.insert(FinElt::Bot);
    match tau {
        PureType::Base(b) => {
            for c in reg.carrier(b).unwrap_or(&[]) {
                out.insert(FinElt::Atom(c.clone()));
            }
        }
        PureType::Prod(s, t) => {
            let l = enumerate_raw(s, r, reg);
            let rr = enumerate_raw(t, r, reg);
            for a in &l {
                for b in &rr {
                    out.insert(FinElt::pair(a.clone(), b.clone()));
                }
            }
        }
        PureType::Rec(..) if r > 0 => {
            let u = tau.unfold_rec().expect("rec");
            for a in enumerate_raw(&u, r - 1, reg) {
                out.insert(FinElt::fold(a));
            }
        }
        PureType::Arrow(s, t) if r > 0 => {
            let args = enumerate_raw(s, r - 1, reg);
            let results: Vec<FinElt> =
                enumerate_raw(t, r - 1, reg).into_iter().filter(|x| !x.is_bot()).collect();
            let candidates: Vec<(FinElt, FinElt)> =
                args.iter().cartesian_product(results.iter()).map(|(a, b)| (a.clone(), b.clone())).collect();
            for n in 1..=r.min(candidates.len()) {
                for combo in candidates.iter().combinations(n) {
                    if let Ok(f) = build_fun(combo.into_iter().cloned().collect()) {
                        out.insert(f);
                    }
                }
            }
        }
        PureType::Rec(..) | PureType::Arrow(..) | PureType::Var(_) => {}
    }
    out
}

/// Order test by pointwise comparison, independent of [`FinElt::leq`]:
/// functions are compared at every argument of either side, closed under
/// joins, by evaluating both sides there.
pub fn leq_oracle(tau: &PureType, d: &FinElt, e: &FinElt, r: usize) -> bool {
    let _ = r;
    oracle_leq(tau, d, e)
}

fn oracle_leq(tau: &PureType, d: &FinElt, e: &FinElt) -> bool {
    match (tau, d, e) {
        (_, FinElt::Bot, _) => true,
        (_, _, FinElt::Bot) => false,
        (PureType::Base(_), FinElt::Atom(a), FinElt::Atom(b)) => a == b,
        (PureType::Prod(s, t), FinElt::Pair(a1, a2), FinElt::Pair(b1, b2)) => {
            oracle_leq(s, a1, b1) && oracle_leq(t, a2, b2)
        }
        (PureType::Rec(..), FinElt::Fold(a), FinElt::Fold(b)) => {
            oracle_leq(&tau.unfold_rec().expect("rec"), a, b)
        }
        (PureType::Arrow(s, t), FinElt::Fun(f), FinElt::Fun(g)) => {
            let mut probes: Vec<FinElt> = f.iter().chain(g.iter()).map(|(a, _)| a.clone()).collect();
            let mut i = 0;
            while i < probes.len() {
                for j in 0..i {
                    if let Some(p) = probes[i].sup(&probes[j]) {
                        if !probes.contains(&p) {
                            probes.push(p);
                        }
                    }
                }
                i += 1;
            }
            probes.iter().all(|p| {
                let at = |steps: &[(FinElt, FinElt)]| {
                    steps
                        .iter()
                        .filter(|(a, _)| oracle_leq(s, a, p))
                        .try_fold(FinElt::Bot, |acc, (_, r)| acc.sup(r))
                };
                match (at(f), at(g)) {
                    (Some(x), Some(y)) => oracle_leq(t, &x, &y),
                    _ => false,
                }
            })
        }
        _ => false,
    }
}

impl fmt::Display for FinElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinElt::Bot => write!(f, "(bot)"),
            FinElt::Atom(c) => write!(f, "(atom {c})"),
            FinElt::Pair(a, b) => write!(f, "(pair {a} {b})"),
            FinElt::Fold(a) => write!(f, "(fold {a})"),
            FinElt::Fun(steps) => {
                write!(f, "(fun")?;
                for (a, r) in steps.iter() {
                    write!(f, " ({a} -> {r})")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_type;

    fn reg() -> BaseRegistry {
        BaseRegistry::default()
    }
    fn ty(s: &str) -> PureType {
        parse_type(s, &reg()).unwrap()
    }
    fn tt() -> FinElt {
        FinElt::atom("tt")
    }
    fn ff() -> FinElt {
        FinElt::atom("ff")
    }
    fn fun(steps: &[(FinElt, FinElt)]) -> FinElt {
        join_steps(steps.to_vec()).unwrap()
    }

    #[test]
    fn leq_examples() {
        let bb = ty("Bool -> Bool");
        assert!(leq(&ty("Bool"), &FinElt::Bot, &tt(), &reg()).unwrap());
        assert!(leq(&bb, &fun(&[(tt(), tt())]), &fun(&[(FinElt::Bot, tt())]), &reg()).unwrap());
        assert!(!leq(&ty("Bool"), &tt(), &ff(), &reg()).unwrap());
        assert!(leq(&ty("Bool"), &tt(), &fun(&[(tt(), tt())]), &reg()).is_err());
    }

    #[test]
    fn sup_examples() {
        let b = ty("Bool");
        assert_eq!(sup(&b, &tt(), &ff(), &reg()).unwrap(), None);
        assert_eq!(sup(&b, &FinElt::Bot, &tt(), &reg()).unwrap(), Some(tt()));
        let bb = ty("Bool -> Bool");
        let neg = sup(&bb, &fun(&[(tt(), tt())]), &fun(&[(ff(), ff())]), &reg()).unwrap();
        assert_eq!(neg, Some(fun(&[(tt(), tt()), (ff(), ff())])));
        assert!(consistent(&b, &tt(), &tt(), &reg()).unwrap());
        assert!(!consistent(&bb, &fun(&[(FinElt::Bot, tt())]), &fun(&[(tt(), ff())]), &reg())
            .unwrap());
    }

    #[test]
    fn apply_examples() {
        let bb = ty("Bool -> Bool");
        let g = fun(&[(tt(), ff())]);
        assert_eq!(apply(&bb, &g, &tt(), &reg()).unwrap(), ff());
        assert_eq!(apply(&bb, &g, &FinElt::Bot, &reg()).unwrap(), FinElt::Bot);
        assert_eq!(apply(&bb, &fun(&[(FinElt::Bot, tt())]), &ff(), &reg()).unwrap(), tt());
    }

    #[test]
    fn mk_fun_examples() {
        let bb = ty("Bool -> Bool");
        assert_eq!(
            mk_fun(&bb, &[(tt(), tt()), (FinElt::Bot, tt())], &reg()).unwrap(),
            FinElt::Fun(vec![(FinElt::Bot, tt())].into())
        );
        match mk_fun(&bb, &[(tt(), tt()), (tt(), ff())], &reg()) {
            Err(FinError::Inconsistent { subset }) => assert_eq!(subset, vec![0, 1]),
            other => panic!("{other:?}"),
        }
        assert_eq!(mk_fun(&bb, &[], &reg()).unwrap(), FinElt::Bot);
    }

    #[test]
    fn enumerate_examples() {
        let r = reg();
        assert_eq!(enumerate(&ty("Bool"), 1, &r), vec![FinElt::Bot, tt(), ff()].into_iter().sorted().collect::<Vec<_>>());
        assert_eq!(enumerate(&ty("Bool * Bool"), 1, &r).len(), 9);
        let bb2 = enumerate(&ty("Bool -> Bool"), 2, &r);
        assert!(bb2.contains(&fun(&[(tt(), ff()), (ff(), tt())])));
        assert_eq!(bb2.len(), 11);
        assert_eq!(enumerate(&ty("Bool -> Bool"), 1, &r).len(), 7);
        assert_eq!(enumerate(&ty("Stream Bool"), 0, &r), vec![FinElt::Bot]);
    }

    #[test]
    fn canonical_forms() {
        let p = FinElt::Pair(Arc::new(FinElt::Bot), Arc::new(FinElt::Bot));
        assert_eq!(canonicalize(&p).unwrap(), FinElt::Bot);
        // redundant step at a join of two lower arguments
        let bb = ty("Bool * Bool -> Bool");
        let a = FinElt::pair(tt(), FinElt::Bot);
        let b = FinElt::pair(FinElt::Bot, tt());
        let ab = FinElt::pair(tt(), tt());
        let f = mk_fun(&bb, &[(a.clone(), tt()), (b.clone(), tt()), (ab, tt())], &reg()).unwrap();
        assert_eq!(f, mk_fun(&bb, &[(a, tt()), (b, tt())], &reg()).unwrap());
    }

    #[test]
    fn display_sexpr() {
        assert_eq!(fun(&[(tt(), ff())]).to_string(), "(fun ((atom tt) -> (atom ff)))");
        assert_eq!(FinElt::fold(FinElt::pair(tt(), FinElt::Bot)).to_string(), "(fold (pair (atom tt) (bot)))");
    }

    #[test]
    fn oracle_examples() {
        let bb = ty("Bool -> Bool");
        assert!(leq_oracle(&ty("Bool"), &FinElt::Bot, &FinElt::Bot, 2));
        assert!(!leq_oracle(&bb, &fun(&[(FinElt::Bot, tt())]), &fun(&[(tt(), tt())]), 2));
    }
}
