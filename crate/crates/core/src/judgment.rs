//! The judgment file format.
//!
//! A file is a sequence of stanzas separated by blank lines. A stanza is
//! either a definition `def NAME = TERM` or a judgment `ctx |- term : type`;
//! either may span several lines. Lines starting with `--` are comments,
//! except the directive `-- options: k=2 nfix=4 fuel=16 rank=2`, which sets
//! options for every later stanza. Definitions are closed terms, may use
//! earlier definitions, and are substituted into later judgments.

use thiserror::Error;

use crate::checker::{CheckOptions, Judgment};
use crate::syntax::{parse_judgment_text, parse_term, BaseRegistry, Name, NameSupply, ParseError, Term};

#[derive(Clone, Debug, PartialEq)]
pub struct Stanza {
    /// 1-based line of the first line of the stanza.
    pub line: usize,
    pub text: String,
    /// The last plain comment line before the stanza.
    pub label: Option<String>,
    pub judgment: Judgment,
    pub opts: CheckOptions,
    /// Oracle rank, when set by a directive.
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FileError {
    #[error("line {line}: {err}")]
    Parse { line: usize, err: ParseError },
    #[error("line {line}: {msg}")]
    Directive { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Definition { line: usize, msg: String },
}

struct Def {
    name: Name,
    term: Term,
}

fn directive(line: usize, rest: &str, opts: &mut CheckOptions, rank: &mut Option<usize>) -> Result<(), FileError> {
    let bad = |msg: String| FileError::Directive { line, msg };
    for item in rest.split_whitespace() {
        let (key, val) = item.split_once('=').ok_or_else(|| bad(format!("expected key=value, found `{item}`")))?;
        let n: usize = val.parse().map_err(|_| bad(format!("`{val}` is not a natural number")))?;
        match key {
            "k" => opts.k = n,
            "nfix" => opts.n_fix = n,
            "fuel" => opts.fuel = u32::try_from(n).map_err(|_| bad(format!("fuel {n} is too large")))?,
            "rank" => *rank = Some(n),
            _ => return Err(bad(format!("unknown option `{key}`"))),
        }
    }
    Ok(())
}

fn substitute(t: &Term, defs: &[Def], bound: &[Name], supply: &mut NameSupply) -> Term {
    let mut out = t.clone();
    for d in defs.iter().rev() {
        if !bound.contains(&d.name) && out.free_vars().contains(&d.name) {
            out = out.subst_closed(&d.name, &d.term, supply);
        }
    }
    out
}

/// Parses a judgment file, starting from the options `base`.
pub fn parse_file(text: &str, reg: &BaseRegistry, base: &CheckOptions) -> Result<Vec<Stanza>, FileError> {
    let mut opts = base.clone();
    let mut rank = None;
    let mut label: Option<String> = None;
    let mut defs: Vec<Def> = Vec::new();
    let mut out = Vec::new();
    let mut chunk: Vec<(usize, &str)> = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    loop {
        let next = lines.next();
        let at_break = match next {
            None => true,
            Some((_, l)) => l.trim().is_empty(),
        };
        if let Some((n, l)) = next {
            let t = l.trim();
            if let Some(c) = t.strip_prefix("--") {
                if let Some(rest) = c.trim().strip_prefix("options:") {
                    directive(n, rest, &mut opts, &mut rank)?;
                } else if chunk.is_empty() {
                    label = Some(c.trim().to_string());
                }
                continue;
            }
            if !at_break {
                chunk.push((n, t));
                continue;
            }
        }
        if !chunk.is_empty() {
            let line = chunk[0].0;
            let body = chunk.iter().map(|(_, l)| *l).collect::<Vec<_>>().join(" ");
            chunk.clear();
            if let Some(rest) = body.strip_prefix("def ") {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| FileError::Definition { line, msg: "expected `def NAME = TERM`".into() })?;
                let name: Name = lhs.trim().into();
                if defs.iter().any(|d| d.name == name) {
                    return Err(FileError::Definition { line, msg: format!("`{name}` is defined twice") });
                }
                let t = parse_term(rhs, reg).map_err(|err| FileError::Parse { line, err })?;
                let mut supply = NameSupply::default();
                supply.reserve_term(&t);
                let t = substitute(&t, &defs, &[], &mut supply);
                if let Some(x) = t.free_vars().into_iter().next() {
                    return Err(FileError::Definition { line, msg: format!("`{name}` uses the unbound variable `{x}`") });
                }
                defs.push(Def { name, term: t });
                label = None;
            } else {
                let p = parse_judgment_text(&body, reg).map_err(|err| FileError::Parse { line, err })?;
                let mut j: Judgment = p.into();
                let bound: Vec<Name> = j.ctx.iter().map(|(x, _)| x.clone()).collect();
                let mut supply = NameSupply::new(&bound);
                supply.reserve_term(&j.term);
                j.term = substitute(&j.term, &defs, &bound, &mut supply);
                out.push(Stanza { line, text: body, label: label.take(), judgment: j, opts: opts.clone(), rank });
            }
        }
        if next.is_none() {
            break;
        }
    }
    Ok(out)
}
