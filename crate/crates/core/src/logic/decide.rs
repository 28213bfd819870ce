//! Compilation of conjunctive formulas to finite elements and the decision
//! procedures built on it.

use super::normal::{dnf_disjuncts, norm_clauses};
use super::{Compiled, Formula, LogicError};
use crate::findom::{join_steps, FinElt};

/// The finite element generating a conjunctive formula's extension:
/// `Up(d)` when the extension is the upper set of `d`, `Empty` when it is
/// empty. Types are not consulted; well-formedness is `check_formula`'s job.
pub fn compile(phi: &Formula) -> Result<Compiled, LogicError> {
    crate::deep(|| {
        Ok(match phi {
            Formula::Atom(a) => Compiled::Up(FinElt::Atom(a.clone())),
            Formula::Pi1(f) | Formula::Pi2(f) | Formula::Fold(f) => match compile(f)? {
                Compiled::Empty => Compiled::Empty,
                Compiled::Up(d) => Compiled::Up(match phi {
                    Formula::Pi1(_) => FinElt::pair(d, FinElt::Bot),
                    Formula::Pi2(_) => FinElt::pair(FinElt::Bot, d),
                    _ => FinElt::fold(d),
                }),
            },
            Formula::Arrow(a, b) => match compile(a)? {
                Compiled::Empty => Compiled::Up(FinElt::Bot),
                Compiled::Up(e) => match compile(b)? {
                    Compiled::Empty => Compiled::Empty,
                    Compiled::Up(d) => {
                        Compiled::Up(join_steps(vec![(e, d)]).expect("a single step is consistent"))
                    }
                },
            },
            Formula::And(fs) => {
                let mut acc = FinElt::Bot;
                for f in fs {
                    match compile(f)? {
                        Compiled::Empty => return Ok(Compiled::Empty),
                        Compiled::Up(d) => match acc.sup(&d) {
                            Some(s) => acc = s,
                            None => return Ok(Compiled::Empty),
                        },
                    }
                }
                Compiled::Up(acc)
            }
            Formula::Or(fs) if fs.is_empty() => Compiled::Empty,
            Formula::Or(_) => return Err(LogicError::NotConjunctive(phi.to_string())),
            Formula::Schema(..) | Formula::Mu(..) | Formula::Nu(..) => {
                return Err(LogicError::Schema(phi.to_string()))
            }
            Formula::PVar(p) => return Err(LogicError::UnboundVar(p.to_string())),
        })
    })
}

/// A conjunctive formula whose extension is the upper set of `d`.
pub fn char_formula(d: &FinElt) -> Formula {
    crate::deep(|| match d {
        FinElt::Bot => Formula::top(),
        FinElt::Atom(a) => Formula::Atom(a.clone()),
        FinElt::Pair(a, b) => {
            Formula::and([Formula::pi1(char_formula(a)), Formula::pi2(char_formula(b))])
        }
        FinElt::Fold(a) => Formula::fold(char_formula(a)),
        FinElt::Fun(steps) => Formula::And(
            steps.iter().map(|(a, r)| Formula::arrow(char_formula(a), char_formula(r))).collect(),
        ),
    })
}

/// Whether a conjunctive formula has a nonempty extension.
pub fn consistent_f(phi: &Formula) -> Result<bool, LogicError> {
    Ok(compile(phi)?.up().is_some())
}

/// `psi |- phi` for conjunctive formulas.
pub fn entail_conj(psi: &Formula, phi: &Formula) -> Result<bool, LogicError> {
    Ok(match compile(psi)? {
        Compiled::Empty => true,
        Compiled::Up(dp) => match compile(phi)? {
            Compiled::Empty => false,
            Compiled::Up(df) => df.leq(&dp),
        },
    })
}

/// The left side of an entailment: the generators of its consistent
/// disjuncts. Its extension is the union of their upper sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledDnf {
    pub disjuncts: Vec<FinElt>,
}

impl CompiledDnf {
    pub fn of(phi: &Formula) -> Result<Self, LogicError> {
        let mut disjuncts = Vec::new();
        for c in dnf_disjuncts(phi)? {
            if let Compiled::Up(d) = compile(&c)? {
                if !disjuncts.contains(&d) {
                    disjuncts.push(d);
                }
            }
        }
        Ok(CompiledDnf { disjuncts })
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }
}

/// The right side of an entailment: clauses, each a union of upper sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledNorm {
    pub clauses: Vec<Vec<FinElt>>,
}

impl CompiledNorm {
    pub fn of(phi: &Formula) -> Result<Self, LogicError> {
        let mut clauses = Vec::new();
        for cl in norm_clauses(phi)? {
            let mut lits = Vec::new();
            for c in cl {
                if let Compiled::Up(d) = compile(&c)? {
                    lits.push(d);
                }
            }
            clauses.push(lits);
        }
        Ok(CompiledNorm { clauses })
    }

    /// Whether `d` lies in every clause.
    pub fn contains(&self, d: &FinElt) -> bool {
        self.clauses.iter().all(|cl| cl.iter().any(|e| e.leq(d)))
    }

    /// Whether the upper set of `d` is included: since upper sets of finite
    /// elements are compact this is membership of `d` itself.
    pub fn entailed_by(&self, lhs: &CompiledDnf) -> bool {
        lhs.disjuncts.iter().all(|d| self.contains(d))
    }
}

/// `psi |- phi` for schema-free formulas: every consistent disjunct of
/// `psi` is an upper set `up d`, and `up d` is included in a union of upper
/// sets iff `d` is in one of them.
pub fn entail_fin(psi: &Formula, phi: &Formula) -> Result<bool, LogicError> {
    let lhs = CompiledDnf::of(psi)?;
    if lhs.is_empty() {
        return Ok(true);
    }
    Ok(CompiledNorm::of(phi)?.entailed_by(&lhs))
}
