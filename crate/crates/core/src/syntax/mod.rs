//! Types, terms and the base-type registry.

mod lexer;
mod parser;
mod print;
mod typing;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::Formula;

pub use parser::{
    parse_entail_input, parse_formula, parse_judgment_text, parse_pure_context, parse_ref_type,
    parse_term, parse_term_in, parse_type, EntailInput, ParsedJudgment,
};
pub use typing::{check_pure, infer_pure, TypeError};
pub(crate) use typing::wf_ref_type;

/// Interned identifier.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PureType {
    Base(Name),
    Prod(Box<PureType>, Box<PureType>),
    Arrow(Box<PureType>, Box<PureType>),
    Var(Name),
    Rec(Name, Box<PureType>),
}

impl PureType {
    pub fn base(b: &str) -> Self {
        PureType::Base(name(b))
    }

    pub fn bool() -> Self {
        Self::base("Bool")
    }

    pub fn prod(a: PureType, b: PureType) -> Self {
        PureType::Prod(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: PureType, b: PureType) -> Self {
        PureType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn rec(x: &str, body: PureType) -> Self {
        PureType::Rec(name(x), Box::new(body))
    }

    pub fn var(x: &str) -> Self {
        PureType::Var(name(x))
    }

    /// `rec X. t * X`
    pub fn stream(t: PureType) -> Self {
        let x = fresh_type_var(&t);
        PureType::Rec(x.clone(), Box::new(Self::prod(t, PureType::Var(x))))
    }

    /// `rec X. t * (X * X)`
    pub fn tree(t: PureType) -> Self {
        let x = fresh_type_var(&t);
        let v = PureType::Var(x.clone());
        PureType::Rec(x, Box::new(Self::prod(t, Self::prod(v.clone(), v))))
    }

    /// `rec X. (X -> t) -> t`
    pub fn rou(t: PureType) -> Self {
        let x = fresh_type_var(&t);
        let v = PureType::Var(x.clone());
        PureType::Rec(x, Box::new(Self::arrow(Self::arrow(v, t.clone()), t)))
    }

    /// One-step unfolding `t[rec X.t / X]` of a recursive type.
    pub fn unfold_rec(&self) -> Option<PureType> {
        match self {
            PureType::Rec(x, body) => Some(subst_type(body, x, self)),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            PureType::Base(_) => {}
            PureType::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            PureType::Prod(a, b) | PureType::Arrow(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            PureType::Rec(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Equality up to renaming of `rec` binders.
    pub fn alpha_eq(&self, other: &PureType) -> bool {
        fn go(a: &PureType, b: &PureType, env: &mut Vec<(Name, Name)>) -> bool {
            match (a, b) {
                (PureType::Base(x), PureType::Base(y)) => x == y,
                (PureType::Var(x), PureType::Var(y)) => {
                    for (l, r) in env.iter().rev() {
                        if l == x || r == y {
                            return l == x && r == y;
                        }
                    }
                    x == y
                }
                (PureType::Prod(a1, a2), PureType::Prod(b1, b2))
                | (PureType::Arrow(a1, a2), PureType::Arrow(b1, b2)) => {
                    go(a1, b1, env) && go(a2, b2, env)
                }
                (PureType::Rec(x, a), PureType::Rec(y, b)) => {
                    env.push((x.clone(), y.clone()));
                    let r = go(a, b, env);
                    env.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    pub fn size(&self) -> usize {
        match self {
            PureType::Base(_) | PureType::Var(_) => 1,
            PureType::Prod(a, b) | PureType::Arrow(a, b) => 1 + a.size() + b.size(),
            PureType::Rec(_, b) => 1 + b.size(),
        }
    }
}

fn fresh_type_var(t: &PureType) -> Name {
    let fv = t.free_vars();
    let mut i = 0usize;
    loop {
        let cand = if i == 0 { "X".to_string() } else { format!("X{i}") };
        if !fv.iter().any(|v| **v == *cand) {
            return name(&cand);
        }
        i += 1;
    }
}

/// Capture-free substitution of a closed `replacement` for `var` in `body`.
pub fn subst_type(body: &PureType, var: &str, replacement: &PureType) -> PureType {
    match body {
        PureType::Base(_) => body.clone(),
        PureType::Var(x) if &**x == var => replacement.clone(),
        PureType::Var(_) => body.clone(),
        PureType::Prod(a, b) => PureType::prod(
            subst_type(a, var, replacement),
            subst_type(b, var, replacement),
        ),
        PureType::Arrow(a, b) => PureType::arrow(
            subst_type(a, var, replacement),
            subst_type(b, var, replacement),
        ),
        PureType::Rec(x, _) if &**x == var => body.clone(),
        PureType::Rec(x, b) => PureType::Rec(x.clone(), Box::new(subst_type(b, var, replacement))),
    }
}

/// Finite base types and their constants.
///
/// Constants are unique across all bases so that an atom `<c>` names its base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseRegistry {
    bases: BTreeMap<Name, Vec<Name>>,
    owner: BTreeMap<Name, Name>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("base type `{0}` declared twice")]
    DuplicateBase(String),
    #[error("base type `{0}` has an empty carrier")]
    EmptyCarrier(String),
    #[error("constant `{0}` declared twice")]
    DuplicateConstant(String),
    #[error("line {0}: expected `base Name = c1 c2 ...`")]
    Malformed(usize),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

impl Default for BaseRegistry {
    fn default() -> Self {
        let mut r = BaseRegistry { bases: BTreeMap::new(), owner: BTreeMap::new() };
        r.declare("Bool", &["tt", "ff"]).expect("builtin");
        r
    }
}

impl BaseRegistry {
    pub fn declare(&mut self, base: &str, carrier: &[&str]) -> Result<(), RegistryError> {
        if self.bases.contains_key(base) {
            return Err(RegistryError::DuplicateBase(base.into()));
        }
        if carrier.is_empty() {
            return Err(RegistryError::EmptyCarrier(base.into()));
        }
        for w in std::iter::once(&base).chain(carrier) {
            if lexer::is_keyword(w) || !lexer::is_ident(w) {
                return Err(RegistryError::Reserved((*w).into()));
            }
        }
        let mut seen = BTreeSet::new();
        for c in carrier {
            if !seen.insert(*c) || self.owner.contains_key(*c) {
                return Err(RegistryError::DuplicateConstant((*c).into()));
            }
        }
        let b = name(base);
        let cs: Vec<Name> = carrier.iter().map(|c| name(c)).collect();
        for c in &cs {
            self.owner.insert(c.clone(), b.clone());
        }
        self.bases.insert(b, cs);
        Ok(())
    }

    /// Reads `base Name = c1 c2 ...` lines on top of the builtin `Bool`.
    pub fn parse_decls(text: &str) -> Result<Self, RegistryError> {
        let mut reg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split("--").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let rest = line.strip_prefix("base ").ok_or(RegistryError::Malformed(i + 1))?;
            let (lhs, rhs) = rest.split_once('=').ok_or(RegistryError::Malformed(i + 1))?;
            let base = lhs.trim();
            let cs: Vec<&str> = rhs.split_whitespace().collect();
            if base.is_empty() || base.contains(char::is_whitespace) {
                return Err(RegistryError::Malformed(i + 1));
            }
            reg.declare(base, &cs)?;
        }
        Ok(reg)
    }

    pub fn carrier(&self, base: &str) -> Option<&[Name]> {
        self.bases.get(base).map(|v| v.as_slice())
    }

    pub fn base_of(&self, constant: &str) -> Option<&Name> {
        self.owner.get(constant)
    }

    pub fn has_base(&self, base: &str) -> bool {
        self.bases.contains_key(base)
    }

    pub fn bases(&self) -> impl Iterator<Item = (&Name, &[Name])> {
        self.bases.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

/// Refinement types: pure types, `{t | f}`, and products and arrows of those.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefType {
    Pure(PureType),
    Refine(PureType, Formula),
    Prod(Box<RefType>, Box<RefType>),
    Arrow(Box<RefType>, Box<RefType>),
}

impl RefType {
    pub fn refine(t: PureType, f: Formula) -> Self {
        RefType::Refine(t, f)
    }

    pub fn prod(a: RefType, b: RefType) -> Self {
        RefType::Prod(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: RefType, b: RefType) -> Self {
        RefType::Arrow(Box::new(a), Box::new(b))
    }

    /// The underlying pure type `|T|`.
    pub fn underlying(&self) -> PureType {
        match self {
            RefType::Pure(t) | RefType::Refine(t, _) => t.clone(),
            RefType::Prod(a, b) => PureType::prod(a.underlying(), b.underlying()),
            RefType::Arrow(a, b) => PureType::arrow(a.underlying(), b.underlying()),
        }
    }

    pub fn is_pure(&self) -> bool {
        match self {
            RefType::Pure(_) => true,
            RefType::Refine(..) => false,
            RefType::Prod(a, b) | RefType::Arrow(a, b) => a.is_pure() && b.is_pure(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Fst,
    Snd,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Fst => 1,
            Side::Snd => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(Name),
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    Fix(Name, Box<Term>),
    /// `fix x [inv1; ...; invn]. M`: a user-supplied invariant chain.
    FixAnn(Name, Vec<Formula>, Box<Term>),
    Fold(Box<Term>),
    Unfold(Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj(Side, Box<Term>),
    /// A constant together with its base type.
    Const(Name, Name),
    /// Branches follow the carrier order of the scrutinee's base.
    Case(Box<Term>, Vec<(Name, Term)>),
    Ascribe(Box<Term>, RefType),
}

impl Term {
    pub fn var(x: &str) -> Self {
        Term::Var(name(x))
    }
    pub fn lam(x: &str, b: Term) -> Self {
        Term::Lam(name(x), Box::new(b))
    }
    pub fn app(f: Term, a: Term) -> Self {
        Term::App(Box::new(f), Box::new(a))
    }
    pub fn fix(x: &str, b: Term) -> Self {
        Term::Fix(name(x), Box::new(b))
    }
    pub fn fold(t: Term) -> Self {
        Term::Fold(Box::new(t))
    }
    pub fn unfold(t: Term) -> Self {
        Term::Unfold(Box::new(t))
    }
    pub fn pair(a: Term, b: Term) -> Self {
        Term::Pair(Box::new(a), Box::new(b))
    }
    pub fn proj(s: Side, t: Term) -> Self {
        Term::Proj(s, Box::new(t))
    }
    pub fn pi1(t: Term) -> Self {
        Term::proj(Side::Fst, t)
    }
    pub fn pi2(t: Term) -> Self {
        Term::proj(Side::Snd, t)
    }
    pub fn constant(base: &str, c: &str) -> Self {
        Term::Const(name(base), name(c))
    }
    pub fn ascribe(t: Term, ty: RefType) -> Self {
        Term::Ascribe(Box::new(t), ty)
    }

    /// Number of syntax nodes; ascriptions are not counted.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(..) => 1,
            Term::Lam(_, b) | Term::Fix(_, b) | Term::FixAnn(_, _, b) => 1 + b.size(),
            Term::Fold(t) | Term::Unfold(t) | Term::Proj(_, t) => 1 + t.size(),
            Term::App(a, b) | Term::Pair(a, b) => 1 + a.size() + b.size(),
            Term::Case(s, bs) => 1 + s.size() + bs.iter().map(|(_, t)| t.size()).sum::<usize>(),
            Term::Ascribe(t, _) => t.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        fn go(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match t {
                Term::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Term::Const(..) => {}
                Term::Lam(x, b) | Term::Fix(x, b) | Term::FixAnn(x, _, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::Fold(a) | Term::Unfold(a) | Term::Proj(_, a) | Term::Ascribe(a, _) => {
                    go(a, bound, out)
                }
                Term::App(a, b) | Term::Pair(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Term::Case(s, bs) => {
                    go(s, bound, out);
                    for (_, b) in bs {
                        go(b, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// All binder names occurring in the term.
    pub fn binders(&self) -> BTreeSet<Name> {
        fn go(t: &Term, out: &mut BTreeSet<Name>) {
            match t {
                Term::Var(_) | Term::Const(..) => {}
                Term::Lam(x, b) | Term::Fix(x, b) | Term::FixAnn(x, _, b) => {
                    out.insert(x.clone());
                    go(b, out);
                }
                Term::Fold(a) | Term::Unfold(a) | Term::Proj(_, a) | Term::Ascribe(a, _) => {
                    go(a, out)
                }
                Term::App(a, b) | Term::Pair(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Term::Case(s, bs) => {
                    go(s, out);
                    for (_, b) in bs {
                        go(b, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// Replaces free occurrences of `x` by the closed term `v`, renaming the
    /// binders of each inserted copy apart from `avoid` and from each other.
    pub fn subst_closed(&self, x: &str, v: &Term, avoid: &mut NameSupply) -> Term {
        match self {
            Term::Var(y) if &**y == x => avoid.freshen(v),
            Term::Var(_) | Term::Const(..) => self.clone(),
            Term::Lam(y, _) | Term::Fix(y, _) | Term::FixAnn(y, _, _) if &**y == x => self.clone(),
            Term::Lam(y, b) => Term::Lam(y.clone(), Box::new(b.subst_closed(x, v, avoid))),
            Term::Fix(y, b) => Term::Fix(y.clone(), Box::new(b.subst_closed(x, v, avoid))),
            Term::FixAnn(y, inv, b) => {
                Term::FixAnn(y.clone(), inv.clone(), Box::new(b.subst_closed(x, v, avoid)))
            }
            Term::Fold(a) => Term::fold(a.subst_closed(x, v, avoid)),
            Term::Unfold(a) => Term::unfold(a.subst_closed(x, v, avoid)),
            Term::Proj(s, a) => Term::proj(*s, a.subst_closed(x, v, avoid)),
            Term::Ascribe(a, t) => Term::ascribe(a.subst_closed(x, v, avoid), t.clone()),
            Term::App(a, b) => Term::app(a.subst_closed(x, v, avoid), b.subst_closed(x, v, avoid)),
            Term::Pair(a, b) => {
                Term::pair(a.subst_closed(x, v, avoid), b.subst_closed(x, v, avoid))
            }
            Term::Case(s, bs) => Term::Case(
                Box::new(s.subst_closed(x, v, avoid)),
                bs.iter().map(|(c, b)| (c.clone(), b.subst_closed(x, v, avoid))).collect(),
            ),
        }
    }
}

/// Supplies variable names distinct from a growing set of used names.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<Name>,
}

impl NameSupply {
    pub fn new<'a>(used: impl IntoIterator<Item = &'a Name>) -> Self {
        NameSupply { used: used.into_iter().cloned().collect() }
    }

    pub fn reserve(&mut self, n: &Name) {
        self.used.insert(n.clone());
    }

    pub fn reserve_term(&mut self, t: &Term) {
        self.used.extend(t.binders());
        self.used.extend(t.free_vars());
    }

    /// A name based on `base` not used so far; it is then marked used.
    pub fn fresh(&mut self, base: &str) -> Name {
        let stem = base.split('\'').next().unwrap_or(base);
        let stem = if stem.is_empty() { "v" } else { stem };
        if !self.used.iter().any(|u| &**u == stem) {
            let n = name(stem);
            self.used.insert(n.clone());
            return n;
        }
        let mut i = 1usize;
        loop {
            let cand = format!("{stem}'{i}");
            if !self.used.iter().any(|u| **u == *cand) {
                let n = name(&cand);
                self.used.insert(n.clone());
                return n;
            }
            i += 1;
        }
    }

    /// Renames every binder of `t` to a fresh name.
    pub fn freshen(&mut self, t: &Term) -> Term {
        self.freshen_in(t, &mut Vec::new())
    }

    fn freshen_in(&mut self, t: &Term, ren: &mut Vec<(Name, Name)>) -> Term {
        let look = |ren: &Vec<(Name, Name)>, x: &Name| {
            ren.iter().rev().find(|(a, _)| a == x).map(|(_, b)| b.clone()).unwrap_or(x.clone())
        };
        match t {
            Term::Var(x) => Term::Var(look(ren, x)),
            Term::Const(..) => t.clone(),
            Term::Lam(x, b) | Term::Fix(x, b) | Term::FixAnn(x, _, b) => {
                let y = self.fresh(x);
                ren.push((x.clone(), y.clone()));
                let nb = Box::new(self.freshen_in(b, ren));
                ren.pop();
                match t {
                    Term::Lam(..) => Term::Lam(y, nb),
                    Term::Fix(..) => Term::Fix(y, nb),
                    Term::FixAnn(_, inv, _) => Term::FixAnn(y, inv.clone(), nb),
                    _ => unreachable!(),
                }
            }
            Term::Fold(a) => Term::fold(self.freshen_in(a, ren)),
            Term::Unfold(a) => Term::unfold(self.freshen_in(a, ren)),
            Term::Proj(s, a) => Term::proj(*s, self.freshen_in(a, ren)),
            Term::Ascribe(a, ty) => Term::ascribe(self.freshen_in(a, ren), ty.clone()),
            Term::App(a, b) => Term::app(self.freshen_in(a, ren), self.freshen_in(b, ren)),
            Term::Pair(a, b) => Term::pair(self.freshen_in(a, ren), self.freshen_in(b, ren)),
            Term::Case(s, bs) => Term::Case(
                Box::new(self.freshen_in(s, ren)),
                bs.iter().map(|(c, b)| (c.clone(), self.freshen_in(b, ren))).collect(),
            ),
        }
    }
}

/// Ordered list of typed variables.
pub type PureContext = Vec<(Name, PureType)>;

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi{}", self.index())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subst_examples() {
        let tau = PureType::bool();
        let body = PureType::prod(tau.clone(), PureType::var("X"));
        let s = PureType::stream(tau.clone());
        assert_eq!(subst_type(&body, "X", &s), PureType::prod(tau.clone(), s.clone()));
        assert_eq!(subst_type(&PureType::var("X"), "X", &tau), tau);
        let r = PureType::rec("X", PureType::var("X"));
        assert_eq!(subst_type(&r, "Y", &tau), r);
    }

    #[test]
    fn alpha_equivalence_renames_binders() {
        let a = PureType::rec("X", PureType::prod(PureType::bool(), PureType::var("X")));
        let b = PureType::rec("Y", PureType::prod(PureType::bool(), PureType::var("Y")));
        assert!(a.alpha_eq(&b));
        let c = PureType::rec("Y", PureType::prod(PureType::var("Y"), PureType::bool()));
        assert!(!a.alpha_eq(&c));
        // inner binder shadows the outer one
        let d = PureType::rec("X", PureType::rec("Y", PureType::var("X")));
        let e = PureType::rec("X", PureType::rec("X", PureType::var("X")));
        assert!(!d.alpha_eq(&e));
    }

    #[test]
    fn sugar_avoids_capture() {
        let s = PureType::stream(PureType::var("X"));
        assert_eq!(s.free_vars().into_iter().collect::<Vec<_>>(), vec![name("X")]);
    }

    #[test]
    fn registry_decls() {
        let r = BaseRegistry::parse_decls("base Color = red green blue\n-- comment\n").unwrap();
        assert_eq!(r.carrier("Color").unwrap().len(), 3);
        assert_eq!(&**r.base_of("tt").unwrap(), "Bool");
        assert!(BaseRegistry::parse_decls("base B = tt").is_err());
        assert!(BaseRegistry::parse_decls("base B =").is_err());
        assert!(BaseRegistry::parse_decls("bse B = x").is_err());
    }

    #[test]
    fn name_supply_is_fresh() {
        let mut ns = NameSupply::new(&[name("x"), name("x'1")]);
        assert_eq!(&*ns.fresh("x"), "x'2");
        assert_eq!(&*ns.fresh("y"), "y");
        assert_eq!(&*ns.fresh("y"), "y'1");
    }
}
