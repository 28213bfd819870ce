//! The refinement type checker.
//!
//! A judgment `x1 : T1, ..., xn : Tn |- M : T` is checked by
//!
//! 1. pure typing of `M` against `|T|`;
//! 2. truncating the characteristic formulas of the context and the goal at
//!    depth `k`;
//! 3. splitting every context formula into its consistent disjuncts (each
//!    an upper set `up e`) and the goal into clauses of disjuncts;
//! 4. deriving, for every choice of context disjuncts and every goal
//!    clause, a finite judgment `x1 : up e1, ... |- M : up d` for some `d`
//!    in the clause (see [`finite`]).
//!
//! Success yields a [`Trace`]; failure is `Unknown`, never a refutation.

mod finite;
mod trace;

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::evalsem::{EvalError, DEFAULT_BUDGET};
use crate::findom::FinElt;
use crate::logic::{
    char_formula, compile, dnf_disjuncts, norm_clauses, truncate, Compiled, Formula, LogicError,
};
use crate::subtype::char_type;
use crate::syntax::{
    check_pure, wf_ref_type, BaseRegistry, Name, NameSupply, ParsedJudgment, RefType, Side, Term,
    TypeError,
};

pub use finite::Fail;
use finite::{show_judgment, Engine, FinCtx};
pub use trace::{Fact, Rule, Step, Trace};

/// `ctx |- term : goal`
#[derive(Clone, Debug, PartialEq)]
pub struct Judgment {
    pub ctx: Vec<(Name, RefType)>,
    pub term: Term,
    pub goal: RefType,
}

impl From<ParsedJudgment> for Judgment {
    fn from(p: ParsedJudgment) -> Self {
        Judgment { ctx: p.ctx, term: p.term, goal: p.goal }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.ctx.iter().map(|(x, t)| format!("{x} : {t}")).collect();
        if !cs.is_empty() {
            write!(f, "{} ", cs.join(", "))?;
        }
        write!(f, "|- {} : {}", self.term, self.goal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Truncation depth of temporal schemas.
    pub k: usize,
    /// Longest Kleene chain tried for an unannotated `fix`.
    pub n_fix: usize,
    /// Unrolling depth of `fix` during the semantic searches.
    pub fuel: u32,
    /// Read argument refinements off evaluation when no ascription or
    /// hypothesis provides one.
    pub use_semantic_fallback: bool,
    /// Most combinations of context disjuncts examined.
    pub disjunct_limit: usize,
    /// Evaluation step budget of each semantic search.
    pub budget: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            k: 2,
            n_fix: 4,
            fuel: 16,
            use_semantic_fallback: true,
            disjunct_limit: 64,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Derivable(Trace),
    /// No derivation was found; `subgoal` is the first one that failed.
    Unknown { reason: String, subgoal: String },
    IllTyped(TypeError),
}

impl Verdict {
    pub fn is_derivable(&self) -> bool {
        matches!(self, Verdict::Derivable(_))
    }

    pub fn trace(&self) -> Option<&Trace> {
        match self {
            Verdict::Derivable(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("context formula for `{0}` is unsatisfiable")]
    EmptyContext(String),
    #[error("argument type `{0}` is not a refinement of a pure type")]
    NotNormal(String),
}

fn unknown(reason: impl Into<String>, subgoal: impl Into<String>) -> Verdict {
    Verdict::Unknown { reason: reason.into(), subgoal: subgoal.into() }
}

fn ill_typed(rule: &'static str, msg: String, t: &Term) -> Verdict {
    let mut subterm = t.to_string();
    if subterm.len() > 80 {
        let mut cut = 77;
        while !subterm.is_char_boundary(cut) {
            cut -= 1;
        }
        subterm.truncate(cut);
        subterm.push_str("...");
    }
    Verdict::IllTyped(TypeError { rule, msg, subterm })
}

/// Pure typing of the judgment and well-formedness of its refinements.
fn pure_check(j: &Judgment, reg: &BaseRegistry) -> Result<(), Verdict> {
    for (x, t) in &j.ctx {
        wf_ref_type(t, reg).map_err(|e| ill_typed("context", format!("`{x}`: {e}"), &j.term))?;
    }
    wf_ref_type(&j.goal, reg).map_err(|e| ill_typed("goal", e, &j.term))?;
    let pctx: Vec<(Name, _)> = j.ctx.iter().map(|(x, t)| (x.clone(), t.underlying())).collect();
    check_pure(&pctx, &j.term, &j.goal.underlying(), reg).map_err(Verdict::IllTyped)
}

/// Checks `j` with the goal taken as one characteristic formula.
pub fn check(j: &Judgment, opts: &CheckOptions, reg: &BaseRegistry) -> Verdict {
    if let Err(v) = pure_check(j, reg) {
        return v;
    }
    check_typed(j, opts)
}

fn check_typed(j: &Judgment, opts: &CheckOptions) -> Verdict {
    let mut eng = Engine::new(opts);
    let mut ctx_formulas: Vec<(Name, Formula)> = Vec::new();
    let mut choices: Vec<(Name, Vec<FinElt>)> = Vec::new();
    for (x, t) in &j.ctx {
        let (_, phi) = char_type(t);
        let phi = match truncate(&phi, opts.k) {
            Ok(p) => p,
            Err(e) => return unknown(e.to_string(), format!("context entry `{x}`")),
        };
        let mut gens = Vec::new();
        match dnf_disjuncts(&phi) {
            Ok(ds) => {
                for d in ds {
                    match compile(&d) {
                        Ok(Compiled::Up(e)) => gens.push(e),
                        Ok(Compiled::Empty) => {}
                        Err(e) => return unknown(e.to_string(), format!("context entry `{x}`")),
                    }
                }
            }
            Err(e) => return unknown(e.to_string(), format!("context entry `{x}`")),
        }
        gens.sort();
        gens.dedup();
        ctx_formulas.push((x.clone(), phi));
        choices.push((x.clone(), gens));
    }
    let (_, goal) = char_type(&j.goal);
    let goal = match truncate(&goal, opts.k) {
        Ok(g) => g,
        Err(e) => return unknown(e.to_string(), "goal"),
    };
    let root_j = show_judgment(&ctx_formulas, &j.term, &goal);

    if let Some((x, _)) = choices.iter().find(|(_, g)| g.is_empty()) {
        let f = ctx_formulas.iter().find(|(y, _)| y == x).map(|(_, f)| f.clone()).unwrap_or_else(Formula::bot);
        eng.trace.push(Rule::BotLeft, root_j, vec![], vec![Fact::Entails { lhs: f, rhs: Formula::bot() }]);
        return Verdict::Derivable(eng.trace);
    }
    let combos: usize = choices.iter().map(|(_, g)| g.len()).product();
    if combos > opts.disjunct_limit {
        return unknown(
            format!("{combos} combinations of context disjuncts exceed the limit {}", opts.disjunct_limit),
            root_j,
        );
    }
    let clauses = match norm_clauses(&goal) {
        Ok(c) => c,
        Err(e) => return unknown(e.to_string(), root_j),
    };
    if clauses.is_empty() {
        eng.trace.push(Rule::Top, root_j, vec![], vec![]);
        return Verdict::Derivable(eng.trace);
    }
    let compiled: Vec<Vec<(Formula, FinElt)>> = clauses
        .iter()
        .map(|cl| {
            cl.iter()
                .filter_map(|c| match compile(c) {
                    Ok(Compiled::Up(e)) => Some((c.clone(), e)),
                    _ => None,
                })
                .collect()
        })
        .collect();

    let mut case_roots = Vec::new();
    let product = choices.iter().map(|(x, g)| g.iter().map(move |e| (x.clone(), e.clone()))).multi_cartesian_product();
    // the cartesian product of zero factors is a single empty context
    let combos: Vec<FinCtx> = if choices.is_empty() { vec![vec![]] } else { product.collect() };
    for ctx in &combos {
        let mut clause_roots = Vec::new();
        for (clause, cands) in clauses.iter().zip(&compiled) {
            match prove_clause(&mut eng, ctx, &j.term, clause, cands) {
                Ok(i) => clause_roots.push(i),
                Err(f) => return unknown(f.reason, f.subgoal),
            }
        }
        let cj = show_ctx_goal(ctx, &j.term, &goal);
        case_roots.push(eng.trace.push(Rule::AndRight, cj, clause_roots, vec![]));
    }
    let lhs = Formula::and(ctx_formulas.iter().map(|(_, f)| f.clone()));
    let rhs = Formula::or(
        combos.iter().map(|c| Formula::and(c.iter().map(|(_, e)| char_formula(e)))),
    );
    let facts = if j.ctx.is_empty() { vec![] } else { vec![Fact::Entails { lhs, rhs }] };
    eng.trace.push(Rule::OrLeft, root_j, case_roots, facts);
    Verdict::Derivable(eng.trace)
}

fn show_ctx_goal(ctx: &FinCtx, t: &Term, goal: &Formula) -> String {
    let cs: Vec<(Name, Formula)> = ctx.iter().map(|(x, e)| (x.clone(), char_formula(e))).collect();
    show_judgment(&cs, t, goal)
}

fn prove_clause(
    eng: &mut Engine<'_>,
    ctx: &FinCtx,
    t: &Term,
    clause: &[Formula],
    cands: &[(Formula, FinElt)],
) -> Result<usize, Fail> {
    let whole = Formula::or(clause.iter().cloned());
    let mut first_fail = None;
    for (c, e) in cands {
        match eng.reaches(ctx, t, e) {
            Ok(true) => {}
            Ok(false) => continue,
            Err(err) => {
                first_fail.get_or_insert(Fail {
                    reason: format!("evaluation failed: {err}"),
                    subgoal: show_ctx_goal(ctx, t, c),
                });
                continue;
            }
        }
        match eng.judge(ctx, t, e) {
            Ok(i) => {
                let fact = Fact::Entails { lhs: c.clone(), rhs: whole.clone() };
                return Ok(eng.trace.push(Rule::OrRight, show_ctx_goal(ctx, t, &whole), vec![i], vec![fact]));
            }
            Err(f) => {
                first_fail.get_or_insert(f);
            }
        }
    }
    Err(first_fail.unwrap_or_else(|| Fail {
        reason: format!("no disjunct of the goal is reached at fuel {}", eng.opts.fuel),
        subgoal: show_ctx_goal(ctx, t, &whole),
    }))
}

/// Splits a product goal into projections and a function goal into an
/// application to a fresh hypothesis, until every goal is a refinement of
/// a pure type.
pub fn eta_expand(j: &Judgment, supply: &mut NameSupply) -> Result<Vec<Judgment>, CheckError> {
    match &j.goal {
        RefType::Pure(_) | RefType::Refine(..) => Ok(vec![j.clone()]),
        RefType::Prod(a, b) => {
            let mut out = Vec::new();
            for (side, g) in [(Side::Fst, a), (Side::Snd, b)] {
                let sub = Judgment {
                    ctx: j.ctx.clone(),
                    term: Term::proj(side, j.term.clone()),
                    goal: (**g).clone(),
                };
                out.extend(eta_expand(&sub, supply)?);
            }
            Ok(out)
        }
        RefType::Arrow(a, b) => {
            if !matches!(**a, RefType::Pure(_) | RefType::Refine(..)) {
                return Err(CheckError::NotNormal(a.to_string()));
            }
            for (x, _) in &j.ctx {
                supply.reserve(x);
            }
            supply.reserve_term(&j.term);
            let x = supply.fresh("x");
            let mut ctx = j.ctx.clone();
            ctx.push((x.clone(), (**a).clone()));
            let sub = Judgment { ctx, term: Term::app(j.term.clone(), Term::Var(x)), goal: (**b).clone() };
            eta_expand(&sub, supply)
        }
    }
}

/// Checks `j` after eta expansion, one derivation per expanded judgment.
pub fn check_normal(j: &Judgment, opts: &CheckOptions, reg: &BaseRegistry) -> Verdict {
    if let Err(v) = pure_check(j, reg) {
        return v;
    }
    let parts = match eta_expand(j, &mut NameSupply::default()) {
        Ok(p) => p,
        Err(e) => return unknown(e.to_string(), j.to_string()),
    };
    let mut trace = Trace { k: opts.k, n_fix: opts.n_fix, fuel: opts.fuel, ..Trace::default() };
    let mut roots = Vec::new();
    for p in &parts {
        match check_typed(p, opts) {
            Verdict::Derivable(t) => roots.extend(trace.append(t)),
            other => return other,
        }
    }
    if parts.len() == 1 {
        return Verdict::Derivable(trace);
    }
    let (_, g) = char_type(&j.goal);
    let cs: Vec<(Name, Formula)> = j.ctx.iter().map(|(x, t)| (x.clone(), char_type(t).1)).collect();
    trace.push(Rule::Eta, show_judgment(&cs, &j.term, &g), roots, vec![]);
    Verdict::Derivable(trace)
}

/// The shortest chain of at most `n` Kleene iterates of `fix x. body`
/// reaching `target`, as the formulas `true = psi_0, ..., psi_m` with
/// `ctx, x : psi_j |- body : psi_{j+1}` and `psi_m |- target`. Context and
/// target formulas must be conjunctive and schema free.
pub fn fix_iterate(
    ctx: &[(Name, Formula)],
    x: &Name,
    body: &Term,
    target: &Formula,
    n: usize,
    fuel: u32,
) -> Result<Option<Vec<Formula>>, CheckError> {
    let mut fctx = FinCtx::new();
    for (y, f) in ctx {
        match compile(f)? {
            Compiled::Up(e) => fctx.push((y.clone(), e)),
            Compiled::Empty => return Err(CheckError::EmptyContext(y.to_string())),
        }
    }
    let Compiled::Up(d) = compile(target)? else {
        return Ok(None);
    };
    let opts = CheckOptions { n_fix: n, fuel, ..CheckOptions::default() };
    let mut eng = Engine::new(&opts);
    Ok(eng.fix_chain(&fctx, x, body, &d)?.map(|c| c.iter().map(char_formula).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{name, parse_formula, parse_judgment_text, parse_term};

    fn reg() -> BaseRegistry {
        BaseRegistry::default()
    }

    fn run(s: &str) -> Verdict {
        let r = reg();
        let j: Judgment = parse_judgment_text(s, &r).unwrap().into();
        check(&j, &CheckOptions::default(), &r)
    }

    fn derivable(s: &str) {
        match run(s) {
            Verdict::Derivable(t) => t.replay().unwrap(),
            v => panic!("{s}: {v:?}"),
        }
    }

    #[test]
    fn constants_and_identity() {
        derivable("|- tt : {Bool | <tt>}");
        derivable("|- \\x. x : {Bool -> Bool | <tt> -o <tt>}");
        derivable("|- \\x. x : {Bool -> Bool | (<tt> -o <tt>) /\\ (<ff> -o <ff>)}");
        derivable("|- (tt, ff) : {Bool * Bool | [pi1] <tt> /\\ [pi2] <ff>}");
        derivable("f : {Bool -> Bool | <tt> -o <ff>} |- f tt : {Bool | <ff>}");
        derivable("b : {Bool | <tt> \\/ <ff>} |- if b then ff else tt : {Bool | <tt> \\/ <ff>}");
    }

    #[test]
    fn unsound_goals_are_unknown() {
        assert!(matches!(run("|- tt : {Bool | <ff>}"), Verdict::Unknown { .. }));
        assert!(matches!(run("|- fix x. (x : Bool) : {Bool | <tt>}"), Verdict::Unknown { .. }));
        assert!(matches!(run("|- tt : {Bool * Bool | true}"), Verdict::IllTyped(_)));
    }

    #[test]
    fn empty_context_is_vacuous() {
        let v = run("b : {Bool | <tt> /\\ <ff>} |- b : {Bool | <ff>}");
        assert_eq!(v.trace().unwrap().root().unwrap().rule, Rule::BotLeft);
    }

    #[test]
    fn streams() {
        derivable("|- hd ((tt :: fix s. ff :: s) : Stream Bool) : {Bool | <tt>}");
        derivable("|- fix s. (tt :: s : Stream Bool) : {Stream Bool | [] [hd] <tt>}");
    }

    #[test]
    fn fix_iterate_examples() {
        let r = reg();
        let body = parse_term("x", &r).unwrap();
        let x = name("x");
        assert_eq!(fix_iterate(&[], &x, &body, &Formula::top(), 4, 16).unwrap(), Some(vec![Formula::top()]));
        let tt = parse_formula("<tt>", &r).unwrap();
        assert_eq!(fix_iterate(&[], &x, &body, &tt, 4, 16).unwrap(), None);
    }

    #[test]
    fn eta_expansion() {
        let r = reg();
        let j: Judgment = parse_judgment_text("|- \\x. (x, x) : {Bool | <tt>} -> {Bool | <tt>} * Bool", &r)
            .unwrap()
            .into();
        let parts = eta_expand(&j, &mut NameSupply::default()).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(check_normal(&j, &CheckOptions::default(), &r).is_derivable());
    }
}
