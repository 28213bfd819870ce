//! Surface-syntax printing. Output re-parses to the same AST.

use std::fmt;

use super::{PureType, RefType, Term};
use crate::logic::Formula;

fn pure(t: &PureType, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        PureType::Base(b) => write!(f, "{b}"),
        PureType::Var(x) => write!(f, "{x}"),
        PureType::Arrow(a, b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            pure(a, 1, f)?;
            write!(f, " -> ")?;
            pure(b, 0, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        PureType::Prod(a, b) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            pure(a, 2, f)?;
            write!(f, " * ")?;
            pure(b, 1, f)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        PureType::Rec(x, b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write!(f, "rec {x}. ")?;
            pure(b, 0, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for PureType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        pure(self, 0, f)
    }
}

fn reft(t: &RefType, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        RefType::Pure(p) => pure(p, prec, f),
        RefType::Refine(p, phi) => write!(f, "{{{p} | {phi}}}"),
        RefType::Arrow(a, b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            reft(a, 1, f)?;
            write!(f, " -> ")?;
            reft(b, 0, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        RefType::Prod(a, b) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            reft(a, 2, f)?;
            write!(f, " * ")?;
            reft(b, 1, f)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for RefType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        reft(self, 0, f)
    }
}

// formula precedences: 0 arrow, 1 or, 2 and, 3 prefix
fn formula(phi: &Formula, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let open = |f: &mut fmt::Formatter<'_>, p: u8| if prec > p { write!(f, "(") } else { Ok(()) };
    let close = |f: &mut fmt::Formatter<'_>, p: u8| if prec > p { write!(f, ")") } else { Ok(()) };
    match phi {
        Formula::Atom(a) => write!(f, "<{a}>"),
        Formula::PVar(p) => write!(f, "{p}"),
        Formula::And(fs) if fs.is_empty() => write!(f, "true"),
        Formula::Or(fs) if fs.is_empty() => write!(f, "false"),
        Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => formula(&fs[0], prec, f),
        Formula::And(fs) => {
            open(f, 2)?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " /\\ ")?;
                }
                formula(g, 3, f)?;
            }
            close(f, 2)
        }
        Formula::Or(fs) => {
            open(f, 1)?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " \\/ ")?;
                }
                formula(g, 2, f)?;
            }
            close(f, 1)
        }
        Formula::Arrow(a, b) => {
            open(f, 0)?;
            formula(a, 1, f)?;
            write!(f, " -o ")?;
            formula(b, 0, f)?;
            close(f, 0)
        }
        Formula::Pi1(g) => {
            write!(f, "[pi1] ")?;
            formula(g, 3, f)
        }
        Formula::Pi2(g) => {
            write!(f, "[pi2] ")?;
            formula(g, 3, f)
        }
        Formula::Fold(g) => {
            write!(f, "[fold] ")?;
            formula(g, 3, f)
        }
        Formula::Schema(s, g) => {
            write!(f, "{} ", s.keyword())?;
            formula(g, 3, f)
        }
        Formula::Mu(p, g) | Formula::Nu(p, g) => {
            open(f, 0)?;
            let kw = if matches!(phi, Formula::Mu(..)) { "mu" } else { "nu" };
            write!(f, "{kw} {p}. ")?;
            formula(g, 0, f)?;
            close(f, 0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        formula(self, 0, f)
    }
}

// term precedences: 0 binders, 1 application, 2 atomic
fn term(t: &Term, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let open = |f: &mut fmt::Formatter<'_>, p: u8| if prec > p { write!(f, "(") } else { Ok(()) };
    let close = |f: &mut fmt::Formatter<'_>, p: u8| if prec > p { write!(f, ")") } else { Ok(()) };
    match t {
        Term::Var(x) => write!(f, "{x}"),
        Term::Const(_, c) => write!(f, "{c}"),
        Term::Lam(x, b) => {
            open(f, 0)?;
            write!(f, "\\{x}. ")?;
            term(b, 0, f)?;
            close(f, 0)
        }
        Term::Fix(x, b) => {
            open(f, 0)?;
            write!(f, "fix {x}. ")?;
            term(b, 0, f)?;
            close(f, 0)
        }
        Term::FixAnn(x, inv, b) => {
            open(f, 0)?;
            if inv.is_empty() {
                write!(f, "fix {x} []. ")?;
            } else {
                write!(f, "fix {x} [")?;
                for (i, g) in inv.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, "]. ")?;
            }
            term(b, 0, f)?;
            close(f, 0)
        }
        Term::App(a, b) => {
            open(f, 1)?;
            term(a, 1, f)?;
            write!(f, " ")?;
            term(b, 2, f)?;
            close(f, 1)
        }
        Term::Fold(a) | Term::Unfold(a) | Term::Proj(_, a) => {
            open(f, 1)?;
            match t {
                Term::Fold(_) => write!(f, "fold ")?,
                Term::Unfold(_) => write!(f, "unfold ")?,
                Term::Proj(s, _) => write!(f, "{s} ")?,
                _ => unreachable!(),
            }
            term(a, 2, f)?;
            close(f, 1)
        }
        Term::Pair(a, b) => {
            write!(f, "(")?;
            term(a, 0, f)?;
            write!(f, ", ")?;
            term(b, 0, f)?;
            write!(f, ")")
        }
        Term::Case(s, bs) => {
            write!(f, "case ")?;
            term(s, 0, f)?;
            write!(f, " of {{ ")?;
            for (i, (c, b)) in bs.iter().enumerate() {
                if i > 0 {
                    write!(f, " | ")?;
                }
                write!(f, "{c} -> ")?;
                term(b, 0, f)?;
            }
            write!(f, " }}")
        }
        Term::Ascribe(a, ty) => {
            write!(f, "(")?;
            term(a, 0, f)?;
            write!(f, " : {ty})")
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        term(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse_formula, parse_ref_type, parse_term, BaseRegistry};

    #[test]
    fn round_trips() {
        let r = BaseRegistry::default();
        for src in [
            "\\f. fix g. \\x. fold (f (pi1 (unfold x)), g (pi2 (unfold x)))",
            "case p x of { tt -> fold (x, y) | ff -> g (f x) y }",
            "fix x [[fold] [pi1] <tt>; true]. (x : rec X. Bool * X)",
            "(\\x. x) ((a, b), c)",
        ] {
            let t = parse_term(src, &r).unwrap();
            assert_eq!(t.to_string(), src);
            assert_eq!(parse_term(&t.to_string(), &r).unwrap(), t);
        }
        for src in [
            "<tt> /\\ (<ff> \\/ <tt>) -o [fold] [pi1] <tt>",
            "(<tt> -o <ff>) -o <tt>",
            "[] ([fold] [pi1] <tt> /\\ <> <ff>)",
            "nu p. <tt> /\\ [fold] [pi2] p",
            "true \\/ false",
        ] {
            let f = parse_formula(src, &r).unwrap();
            assert_eq!(f.to_string(), src);
        }
        for src in [
            "{Bool | <tt>} -> Bool * Bool -> Bool",
            "(Bool -> Bool) * (rec X. Bool * X)",
            "rec X. (X -> Bool) -> Bool",
        ] {
            let t = parse_ref_type(src, &r).unwrap();
            assert_eq!(t.to_string(), src);
        }
    }
}
