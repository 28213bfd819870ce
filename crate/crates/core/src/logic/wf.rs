use thiserror::Error;

use super::Formula;
use crate::syntax::{BaseRegistry, Name, PureType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula `{formula}` is not well formed at type {ty}: {reason}")]
pub struct FormulaTypeError {
    pub formula: String,
    pub ty: String,
    pub reason: String,
}

/// Checks the formation rules: atoms at base types, projections at products,
/// `[fold]` at recursive types, arrows at function types, stream schemas at
/// `rec X. t * X`, tree schemas at `rec X. t * (X * X)`, and fixpoint
/// variables used positively at their binding type.
pub fn check_formula(phi: &Formula, tau: &PureType, reg: &BaseRegistry) -> Result<(), FormulaTypeError> {
    go(phi, tau, reg, &mut Vec::new(), false)
}

fn fail(phi: &Formula, tau: &PureType, reason: impl Into<String>) -> FormulaTypeError {
    FormulaTypeError { formula: phi.to_string(), ty: tau.to_string(), reason: reason.into() }
}

pub(crate) fn is_stream(tau: &PureType) -> bool {
    matches!(tau.unfold_rec(), Some(PureType::Prod(_, rest)) if rest.alpha_eq(tau))
}

pub(crate) fn is_tree(tau: &PureType) -> bool {
    match tau.unfold_rec() {
        Some(PureType::Prod(_, rest)) => match *rest {
            PureType::Prod(l, r) => l.alpha_eq(tau) && r.alpha_eq(tau),
            _ => false,
        },
        _ => false,
    }
}

fn go(
    phi: &Formula,
    tau: &PureType,
    reg: &BaseRegistry,
    vars: &mut Vec<(Name, PureType)>,
    negative: bool,
) -> Result<(), FormulaTypeError> {
    match phi {
        Formula::Atom(c) => match tau {
            PureType::Base(b) => match reg.carrier(b) {
                Some(cs) if cs.contains(c) => Ok(()),
                _ => Err(fail(phi, tau, format!("`{c}` is not a constant of {b}"))),
            },
            _ => Err(fail(phi, tau, "atoms live at base types")),
        },
        Formula::Pi1(f) | Formula::Pi2(f) => match tau {
            PureType::Prod(a, b) => {
                let t = if matches!(phi, Formula::Pi1(_)) { a } else { b };
                go(f, t, reg, vars, negative)
            }
            _ => Err(fail(phi, tau, "projection modalities live at product types")),
        },
        Formula::Fold(f) => match tau.unfold_rec() {
            Some(u) => go(f, &u, reg, vars, negative),
            None => Err(fail(phi, tau, "[fold] lives at recursive types")),
        },
        Formula::Arrow(a, b) => match tau {
            PureType::Arrow(s, t) => {
                go(a, s, reg, vars, !negative)?;
                go(b, t, reg, vars, negative)
            }
            _ => Err(fail(phi, tau, "-o lives at function types")),
        },
        Formula::And(fs) | Formula::Or(fs) => {
            fs.iter().try_for_each(|f| go(f, tau, reg, vars, negative))
        }
        Formula::Schema(s, f) => {
            let ok = if s.on_streams() { is_stream(tau) } else { is_tree(tau) };
            if !ok {
                let want = if s.on_streams() { "a stream type" } else { "a tree type" };
                return Err(fail(phi, tau, format!("`{}` needs {want}", s.keyword())));
            }
            go(f, tau, reg, vars, negative)
        }
        Formula::Mu(p, f) | Formula::Nu(p, f) => {
            vars.push((p.clone(), tau.clone()));
            let r = go(f, tau, reg, vars, false);
            vars.pop();
            r
        }
        Formula::PVar(p) => match vars.iter().rev().find(|(q, _)| q == p) {
            None => Err(fail(phi, tau, format!("unbound variable `{p}`"))),
            Some(_) if negative => Err(fail(phi, tau, format!("`{p}` occurs negatively"))),
            Some((_, t)) if !t.alpha_eq(tau) => {
                Err(fail(phi, tau, format!("`{p}` is bound at type {t}")))
            }
            Some(_) => Ok(()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_type};

    fn ok(f: &str, t: &str) -> bool {
        let r = BaseRegistry::default();
        check_formula(&parse_formula(f, &r).unwrap(), &parse_type(t, &r).unwrap(), &r).is_ok()
    }

    #[test]
    fn formation_rules() {
        assert!(ok("<tt>", "Bool"));
        assert!(!ok("<tt>", "Bool * Bool"));
        assert!(ok("[pi2] <ff>", "Bool * Bool"));
        assert!(ok("[] [hd] <tt>", "Stream Bool"));
        assert!(!ok("[] [hd] <tt>", "Tree Bool"));
        assert!(ok("AG [lbl] <tt>", "Tree Bool"));
        assert!(ok("<tt> -o <ff>", "Bool -> Bool"));
        assert!(!ok("<tt> -o <ff>", "Bool"));
        assert!(ok("nu p. [hd] <tt> /\\ X p", "Stream Bool"));
        assert!(!ok("nu p. [hd] <tt> /\\ X [hd] p", "Stream Bool"));
        assert!(ok("[] [hd] [] [hd] <tt>", "Stream (Stream Bool)"));
    }

    #[test]
    fn positivity() {
        assert!(!ok("nu p. [fold] (p -o <tt>)", "rec X. X -> Bool"));
        assert!(ok("nu p. [fold] (<tt> -o <tt>)", "rec X. Bool -> Bool"));
    }
}
