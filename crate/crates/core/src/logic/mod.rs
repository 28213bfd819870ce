//! Formulas over pure types, their compilation to finite elements and the
//! decision procedures for consistency and entailment.

mod decide;
mod enumerate;
mod normal;
mod wf;

use std::fmt;

use thiserror::Error;

use crate::findom::FinElt;
use crate::syntax::{name, Name};

pub use decide::{
    char_formula, compile, consistent_f, entail_conj, entail_fin, CompiledNorm,
    CompiledDnf,
};
pub use enumerate::enumerate_conjunctive;
pub use normal::{dnf_disjuncts, norm_clauses, push_modalities, simplify, to_dnf, truncate};
pub use wf::{check_formula, FormulaTypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    /// `[] f`: f at every position of a stream.
    Always,
    /// `<> f`: f at some position of a stream.
    Eventually,
    /// `AG f`
    AllAlways,
    /// `EG f`
    ExAlways,
    /// `AF f`
    AllEventually,
    /// `EF f`
    ExEventually,
}

impl Schema {
    pub fn keyword(self) -> &'static str {
        match self {
            Schema::Always => "[]",
            Schema::Eventually => "<>",
            Schema::AllAlways => "AG",
            Schema::ExAlways => "EG",
            Schema::AllEventually => "AF",
            Schema::ExEventually => "EF",
        }
    }

    pub fn on_streams(self) -> bool {
        matches!(self, Schema::Always | Schema::Eventually)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Name),
    Pi1(Box<Formula>),
    Pi2(Box<Formula>),
    Fold(Box<Formula>),
    /// `psi -o phi`
    Arrow(Box<Formula>, Box<Formula>),
    /// `And(vec![])` is true.
    And(Vec<Formula>),
    /// `Or(vec![])` is false.
    Or(Vec<Formula>),
    Schema(Schema, Box<Formula>),
    Mu(Name, Box<Formula>),
    Nu(Name, Box<Formula>),
    PVar(Name),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormulaClass {
    Conjunctive,
    Open,
    Normal,
    General,
}

/// The set denoted by a conjunctive formula: empty or the upper set of `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Compiled {
    Empty,
    Up(FinElt),
}

impl Compiled {
    pub fn up(&self) -> Option<&FinElt> {
        match self {
            Compiled::Up(d) => Some(d),
            Compiled::Empty => None,
        }
    }
}

impl fmt::Display for Compiled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Compiled::Empty => write!(f, "(empty)"),
            Compiled::Up(d) => write!(f, "(up {d})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("formula is not conjunctive: {0}")]
    NotConjunctive(String),
    #[error("formula still contains a temporal or fixpoint schema: {0}")]
    Schema(String),
    #[error("unbound propositional variable `{0}`")]
    UnboundVar(String),
    #[error("truncation produced {0} disjuncts, above the limit {1}")]
    TooLarge(usize, usize),
}

impl Formula {
    pub fn top() -> Self {
        Formula::And(Vec::new())
    }
    pub fn bot() -> Self {
        Formula::Or(Vec::new())
    }
    pub fn atom(a: &str) -> Self {
        Formula::Atom(name(a))
    }
    pub fn pi1(f: Formula) -> Self {
        Formula::Pi1(Box::new(f))
    }
    pub fn pi2(f: Formula) -> Self {
        Formula::Pi2(Box::new(f))
    }
    pub fn fold(f: Formula) -> Self {
        Formula::Fold(Box::new(f))
    }
    pub fn arrow(a: Formula, b: Formula) -> Self {
        Formula::Arrow(Box::new(a), Box::new(b))
    }
    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Self {
        Formula::And(fs.into_iter().collect())
    }
    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Or(fs.into_iter().collect())
    }
    pub fn schema(s: Schema, f: Formula) -> Self {
        Formula::Schema(s, Box::new(f))
    }
    pub fn always(f: Formula) -> Self {
        Self::schema(Schema::Always, f)
    }
    pub fn eventually(f: Formula) -> Self {
        Self::schema(Schema::Eventually, f)
    }
    /// `<hd> f = <fold><pi1> f` (also `<lbl>` on trees)
    pub fn hd(f: Formula) -> Self {
        Self::fold(Self::pi1(f))
    }
    /// `X f = <fold><pi2> f`
    pub fn next(f: Formula) -> Self {
        Self::fold(Self::pi2(f))
    }
    /// `<lft> f = <fold><pi2><pi1> f`
    pub fn lft(f: Formula) -> Self {
        Self::fold(Self::pi2(Self::pi1(f)))
    }
    /// `<rght> f = <fold><pi2><pi2> f`
    pub fn rght(f: Formula) -> Self {
        Self::fold(Self::pi2(Self::pi2(f)))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::And(v) if v.is_empty())
    }
    pub fn is_bot(&self) -> bool {
        matches!(self, Formula::Or(v) if v.is_empty())
    }

    /// Size used to bound exhaustive sweeps: leaves and unary nodes count one,
    /// an arrow counts one plus its parts, an n-ary connective counts its
    /// operands plus n-1 joining nodes (and one when empty).
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::PVar(_) => 1,
            Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) | Formula::Schema(_, f) => {
                1 + f.size()
            }
            Formula::Mu(_, f) | Formula::Nu(_, f) => 1 + f.size(),
            Formula::Arrow(a, b) => 1 + a.size() + b.size(),
            Formula::And(fs) | Formula::Or(fs) => {
                if fs.is_empty() {
                    1
                } else {
                    fs.iter().map(Formula::size).sum::<usize>() + fs.len() - 1
                }
            }
        }
    }

    pub fn has_schema(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::PVar(_) | Formula::Schema(..) | Formula::Mu(..) | Formula::Nu(..) => true,
            Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => f.has_schema(),
            Formula::Arrow(a, b) => a.has_schema() || b.has_schema(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_schema),
        }
    }

    /// Built from atoms, modalities, arrows of conjunctive formulas, finite
    /// conjunctions and the empty disjunction.
    pub fn is_conjunctive(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => f.is_conjunctive(),
            Formula::Arrow(a, b) => a.is_conjunctive() && b.is_conjunctive(),
            Formula::And(fs) => fs.iter().all(Formula::is_conjunctive),
            Formula::Or(fs) => fs.is_empty(),
            _ => false,
        }
    }

    fn is_open(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => f.is_open(),
            Formula::Arrow(a, b) => a.is_conjunctive() && b.is_open(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_open),
            _ => false,
        }
    }

    fn is_normal(&self) -> bool {
        let clause = |f: &Formula| match f {
            Formula::Or(ds) => ds.iter().all(Formula::is_conjunctive),
            f => f.is_conjunctive(),
        };
        match self {
            Formula::And(cs) => cs.iter().all(clause),
            f => clause(f),
        }
    }
}

/// The tightest syntactic class of a formula. Disjunctions of conjunctive
/// formulas are both open and normal; a top-level conjunction of such
/// clauses reports `Normal`, a bare disjunction `Open`.
pub fn classify(phi: &Formula) -> FormulaClass {
    if phi.is_conjunctive() {
        FormulaClass::Conjunctive
    } else if matches!(phi, Formula::And(_)) && phi.is_normal() {
        FormulaClass::Normal
    } else if phi.is_open() {
        FormulaClass::Open
    } else if phi.is_normal() {
        FormulaClass::Normal
    } else {
        FormulaClass::General
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt() -> Formula {
        Formula::atom("tt")
    }
    fn ff() -> Formula {
        Formula::atom("ff")
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&Formula::and([tt(), ff()])), FormulaClass::Conjunctive);
        assert_eq!(classify(&Formula::or([tt(), ff()])), FormulaClass::Open);
        let n = Formula::and([
            Formula::or([tt(), Formula::arrow(tt(), ff())]),
            Formula::or([Formula::fold(tt())]),
        ]);
        assert_eq!(classify(&n), FormulaClass::Normal);
        let open = Formula::fold(Formula::or([tt(), ff()]));
        assert_eq!(classify(&open), FormulaClass::Open);
        // a disjunction under an arrow antecedent leaves the open class
        let g = Formula::and([
            Formula::or([tt(), ff()]),
            Formula::arrow(Formula::or([tt(), ff()]), tt()),
        ]);
        assert_eq!(classify(&g), FormulaClass::General);
        let norm = Formula::and([
            Formula::or([Formula::arrow(tt(), ff())]),
            Formula::or([Formula::arrow(ff(), tt())]),
        ]);
        assert_eq!(classify(&norm), FormulaClass::Normal);
        assert_eq!(classify(&Formula::always(tt())), FormulaClass::General);
        assert_eq!(classify(&Formula::bot()), FormulaClass::Conjunctive);
    }

    #[test]
    fn sizes() {
        assert_eq!(Formula::top().size(), 1);
        assert_eq!(Formula::and([tt(), ff()]).size(), 3);
        assert_eq!(Formula::arrow(tt(), ff()).size(), 3);
        let neg = Formula::and([Formula::arrow(tt(), ff()), Formula::arrow(ff(), tt())]);
        assert_eq!(neg.size(), 7);
    }
}
