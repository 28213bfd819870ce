//! Bidirectional typing for the pure calculus.
//!
//! `fold`, `fix` and `\x.` need an expected type; it comes from the goal, an
//! enclosing ascription `(M : t)`, or the function type at an application.

use thiserror::Error;

use super::{BaseRegistry, Name, PureType, RefType, Term};
use crate::logic::check_formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{rule}: {msg} (in `{subterm}`)")]
pub struct TypeError {
    pub rule: &'static str,
    pub msg: String,
    pub subterm: String,
}

fn err(rule: &'static str, msg: impl Into<String>, t: &Term) -> TypeError {
    let mut subterm = t.to_string();
    if subterm.len() > 80 {
        let mut cut = 77;
        while !subterm.is_char_boundary(cut) {
            cut -= 1;
        }
        subterm.truncate(cut);
        subterm.push_str("...");
    }
    TypeError { rule, msg: msg.into(), subterm }
}

/// Synthesizes the pure type of `t` under `ctx`.
pub fn infer_pure(
    ctx: &[(Name, PureType)],
    t: &Term,
    reg: &BaseRegistry,
) -> Result<PureType, TypeError> {
    let mut cx = Cx { ctx: ctx.to_vec(), reg };
    cx.synth(t)
}

/// Checks `t` against the pure type `ty` under `ctx`.
pub fn check_pure(
    ctx: &[(Name, PureType)],
    t: &Term,
    ty: &PureType,
    reg: &BaseRegistry,
) -> Result<(), TypeError> {
    let mut cx = Cx { ctx: ctx.to_vec(), reg };
    cx.check(t, ty)
}

/// Refinement formulas must be well formed at their pure types.
pub(crate) fn wf_ref_type(ty: &RefType, reg: &BaseRegistry) -> Result<(), String> {
    match ty {
        RefType::Pure(t) => wf_pure(t, reg),
        RefType::Refine(t, f) => {
            wf_pure(t, reg)?;
            check_formula(f, t, reg).map_err(|e| e.to_string())
        }
        RefType::Prod(a, b) | RefType::Arrow(a, b) => {
            wf_ref_type(a, reg)?;
            wf_ref_type(b, reg)
        }
    }
}

fn wf_pure(t: &PureType, reg: &BaseRegistry) -> Result<(), String> {
    if let Some(v) = t.free_vars().into_iter().next() {
        return Err(format!("unbound type variable `{v}`"));
    }
    fn bases(t: &PureType, reg: &BaseRegistry) -> Result<(), String> {
        match t {
            PureType::Base(b) if !reg.has_base(b) => Err(format!("unknown base type `{b}`")),
            PureType::Base(_) | PureType::Var(_) => Ok(()),
            PureType::Prod(a, b) | PureType::Arrow(a, b) => {
                bases(a, reg)?;
                bases(b, reg)
            }
            PureType::Rec(_, b) => bases(b, reg),
        }
    }
    bases(t, reg)
}

struct Cx<'a> {
    ctx: Vec<(Name, PureType)>,
    reg: &'a BaseRegistry,
}

impl Cx<'_> {
    fn lookup(&self, x: &Name) -> Option<&PureType> {
        self.ctx.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    fn with<R>(&mut self, x: &Name, ty: PureType, f: impl FnOnce(&mut Self) -> R) -> R {
        self.ctx.push((x.clone(), ty));
        let r = f(self);
        self.ctx.pop();
        r
    }

    fn synth(&mut self, t: &Term) -> Result<PureType, TypeError> {
        crate::deep(|| self.synth_inner(t))
    }

    fn synth_inner(&mut self, t: &Term) -> Result<PureType, TypeError> {
        match t {
            Term::Var(x) => {
                self.lookup(x).cloned().ok_or_else(|| err("var", format!("unbound variable `{x}`"), t))
            }
            Term::Const(b, c) => {
                match self.reg.carrier(b) {
                    Some(cs) if cs.contains(c) => Ok(PureType::Base(b.clone())),
                    _ => Err(err("const", format!("unknown constant `{c}`"), t)),
                }
            }
            Term::App(n, v) => match self.synth(n)? {
                PureType::Arrow(a, b) => {
                    self.check(v, &a)?;
                    Ok(*b)
                }
                other => Err(err("app", format!("applying a term of type {other}"), t)),
            },
            Term::Pair(a, b) => Ok(PureType::prod(self.synth(a)?, self.synth(b)?)),
            Term::Proj(s, m) => match self.synth(m)? {
                PureType::Prod(a, b) => Ok(if s.index() == 1 { *a } else { *b }),
                other => Err(err("proj", format!("projecting from type {other}"), t)),
            },
            Term::Unfold(m) => {
                let ty = self.synth(m)?;
                ty.unfold_rec()
                    .ok_or_else(|| err("unfold", format!("unfolding a term of type {ty}"), t))
            }
            Term::Case(s, bs) => {
                self.scrutinee(t, s, bs)?;
                let mut found = None;
                let mut first_err = None;
                for (_, b) in bs {
                    match self.synth(b) {
                        Ok(ty) => {
                            found = Some(ty);
                            break;
                        }
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
                let ty = match found {
                    Some(ty) => ty,
                    None => return Err(first_err.expect("nonempty case")),
                };
                for (_, b) in bs {
                    self.check(b, &ty)?;
                }
                Ok(ty)
            }
            Term::Ascribe(m, ty) => {
                wf_ref_type(ty, self.reg).map_err(|e| err("ascription", e, t))?;
                let u = ty.underlying();
                self.check(m, &u)?;
                Ok(u)
            }
            Term::Lam(..) => Err(err("lam", "cannot infer the type of a lambda; add an ascription", t)),
            Term::Fix(..) | Term::FixAnn(..) => {
                Err(err("fix", "cannot infer the type of a fixpoint; add an ascription", t))
            }
            Term::Fold(_) => {
                Err(err("fold", "fold requires an ascribed recursive type", t))
            }
        }
    }

    fn scrutinee(&mut self, t: &Term, s: &Term, bs: &[(Name, Term)]) -> Result<(), TypeError> {
        let base = bs
            .first()
            .and_then(|(c, _)| self.reg.base_of(c))
            .ok_or_else(|| err("case", "case without known constants", t))?
            .clone();
        let carrier = self.reg.carrier(&base).expect("registered");
        if carrier.len() != bs.len() || carrier.iter().zip(bs).any(|(c, (d, _))| c != d) {
            return Err(err("case", format!("branches must cover `{base}` in order"), t));
        }
        self.check(s, &PureType::Base(base))
    }

    fn check(&mut self, t: &Term, ty: &PureType) -> Result<(), TypeError> {
        crate::deep(|| self.check_inner(t, ty))
    }

    fn check_inner(&mut self, t: &Term, ty: &PureType) -> Result<(), TypeError> {
        match t {
            Term::Lam(x, b) => match ty {
                PureType::Arrow(a, c) => self.with(x, (**a).clone(), |cx| cx.check(b, c)),
                _ => Err(err("lam", format!("a lambda cannot have type {ty}"), t)),
            },
            Term::Fix(x, b) => self.with(x, ty.clone(), |cx| cx.check(b, ty)),
            Term::FixAnn(x, inv, b) => {
                for f in inv {
                    if f.has_schema() || !f.is_conjunctive() {
                        return Err(err("fix", format!("invariant `{f}` is not conjunctive"), t));
                    }
                    check_formula(f, ty, self.reg).map_err(|e| err("fix", e.to_string(), t))?;
                }
                self.with(x, ty.clone(), |cx| cx.check(b, ty))
            }
            Term::Fold(m) => match ty.unfold_rec() {
                Some(u) => self.check(m, &u),
                None => Err(err("fold", format!("fold at non-recursive type {ty}"), t)),
            },
            Term::Pair(a, b) => match ty {
                PureType::Prod(l, r) => {
                    self.check(a, l)?;
                    self.check(b, r)
                }
                _ => Err(err("pair", format!("a pair cannot have type {ty}"), t)),
            },
            Term::Case(s, bs) => {
                self.scrutinee(t, s, bs)?;
                for (_, b) in bs {
                    self.check(b, ty)?;
                }
                Ok(())
            }
            Term::App(n, v) => match self.synth(n) {
                Ok(PureType::Arrow(a, c)) => {
                    if !c.alpha_eq(ty) {
                        return Err(err("app", format!("expected {ty}, found {c}"), t));
                    }
                    self.check(v, &a)
                }
                Ok(other) => Err(err("app", format!("applying a term of type {other}"), t)),
                Err(e) => match self.synth(v) {
                    Ok(a) => self.check(n, &PureType::arrow(a, ty.clone())),
                    Err(_) => Err(e),
                },
            },
            _ => {
                let got = self.synth(t)?;
                if got.alpha_eq(ty) {
                    Ok(())
                } else {
                    let rule = match t {
                        Term::Ascribe(..) => "ascription",
                        Term::Var(_) => "var",
                        Term::Const(..) => "const",
                        Term::Unfold(_) => "unfold",
                        Term::Proj(..) => "proj",
                        _ => "subsumption",
                    };
                    Err(err(rule, format!("expected {ty}, found {got}"), t))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};

    fn r() -> BaseRegistry {
        BaseRegistry::default()
    }

    #[test]
    fn omega_at_ascribed_stream() {
        let t = parse_term("(fix x. x : Stream Bool)", &r()).unwrap();
        let s = parse_type("Stream Bool", &r()).unwrap();
        assert!(infer_pure(&[], &t, &r()).unwrap().alpha_eq(&s));
    }

    #[test]
    fn map_source_at_concrete_types() {
        let reg = r();
        let src = "(\\f. fix g. \\x. (f (hd x)) :: (g (tl x)) \
                   : (Bool -> Bool) -> Stream Bool -> Stream Bool)";
        let t = parse_term(src, &reg).unwrap();
        let want = parse_type("(Bool -> Bool) -> Stream Bool -> Stream Bool", &reg).unwrap();
        assert!(infer_pure(&[], &t, &reg).unwrap().alpha_eq(&want));
    }

    #[test]
    fn unfold_of_unascribed_fold_is_rejected() {
        let t = parse_term("unfold (fold tt)", &r()).unwrap();
        let e = infer_pure(&[], &t, &r()).unwrap_err();
        assert_eq!(e.rule, "fold");
    }

    #[test]
    fn application_checks_function_from_argument() {
        let reg = r();
        let t = parse_term("(\\x. x) tt", &reg).unwrap();
        assert!(check_pure(&[], &t, &PureType::bool(), &reg).is_ok());
        assert!(infer_pure(&[], &t, &reg).is_err());
    }

    #[test]
    fn mismatches_are_reported() {
        let reg = r();
        let t = parse_term("(tt, ff)", &reg).unwrap();
        assert!(check_pure(&[], &t, &PureType::bool(), &reg).is_err());
        let t = parse_term("pi1 tt", &reg).unwrap();
        assert_eq!(infer_pure(&[], &t, &reg).unwrap_err().rule, "proj");
        let t = parse_term("y", &reg).unwrap();
        assert_eq!(infer_pure(&[], &t, &reg).unwrap_err().rule, "var");
    }

    #[test]
    fn case_branches_agree() {
        let reg = r();
        let t = parse_term("if tt then (tt, ff) else (ff, tt)", &reg).unwrap();
        assert_eq!(
            infer_pure(&[], &t, &reg).unwrap(),
            PureType::prod(PureType::bool(), PureType::bool())
        );
        let bad = parse_term("if tt then tt else (ff, tt)", &reg).unwrap();
        assert!(infer_pure(&[], &bad, &reg).is_err());
    }
}
