//! Derivations of finite judgments: every context entry and the goal are
//! generated by finite elements.
//!
//! The judgment `x1 : up e1, ... |- M : up d` is sound iff `d` is below the
//! value of `M` with every `xi` bound to `ei`. Each rule is chosen by the
//! shape of `M`; the premises are found by running `M` lazily and reading
//! back what the run inspected: the argument portion an application needed,
//! or the chain of Kleene iterates a fixpoint needed.

use std::collections::HashMap;

use super::trace::{Fact, Rule, Trace};
use super::CheckOptions;
use crate::evalsem::{EvalError, Machine, Th};
use crate::findom::{join_steps, FinElt};
use crate::logic::{char_formula, compile, truncate, Compiled, Formula};
use crate::subtype::char_type;
use crate::syntax::{Name, Term};

pub type FinCtx = Vec<(Name, FinElt)>;

/// Why a subgoal could not be closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fail {
    pub reason: String,
    pub subgoal: String,
}

pub(crate) struct Engine<'o> {
    pub opts: &'o CheckOptions,
    pub trace: Trace,
    memo: HashMap<(usize, FinCtx, FinElt), usize>,
}

fn short(t: &Term) -> String {
    let mut s = t.to_string();
    if s.len() > 120 {
        let mut cut = 117;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str("...");
    }
    s
}

pub(crate) fn show_judgment(ctx: &[(Name, Formula)], t: &Term, goal: &Formula) -> String {
    let cs: Vec<String> = ctx.iter().map(|(x, f)| format!("{x} : {f}")).collect();
    format!("{} |- {} : {}", cs.join(", "), short(t), goal)
}

fn show(ctx: &FinCtx, t: &Term, d: &FinElt) -> String {
    let cs: Vec<(Name, Formula)> = ctx
        .iter()
        .filter(|(_, e)| !e.is_bot())
        .map(|(x, e)| (x.clone(), char_formula(e)))
        .collect();
    show_judgment(&cs, t, &char_formula(d))
}

fn lookup<'c>(ctx: &'c FinCtx, x: &str) -> Option<&'c FinElt> {
    ctx.iter().rev().find(|(y, _)| &**y == x).map(|(_, e)| e)
}

fn bind(ctx: &FinCtx, x: &Name, e: FinElt) -> FinCtx {
    let mut c = ctx.clone();
    c.push((x.clone(), e));
    c
}

fn entails(lhs: &FinElt, rhs: &FinElt) -> Fact {
    Fact::Entails { lhs: char_formula(lhs), rhs: char_formula(rhs) }
}

impl<'o> Engine<'o> {
    pub fn new(opts: &'o CheckOptions) -> Self {
        let trace = Trace { k: opts.k, n_fix: opts.n_fix, fuel: opts.fuel, ..Trace::default() };
        Engine { opts, trace, memo: HashMap::new() }
    }

    fn machine(&self) -> Machine {
        Machine::new(self.opts.budget)
    }

    fn charge(&mut self, m: &Machine) {
        self.trace.eval_steps += m.steps_used();
    }

    fn fail(&self, ctx: &FinCtx, t: &Term, d: &FinElt, reason: impl Into<String>) -> Fail {
        Fail { reason: reason.into(), subgoal: show(ctx, t, d) }
    }

    fn eval_fail(&self, ctx: &FinCtx, t: &Term, d: &FinElt, e: EvalError) -> Fail {
        self.fail(ctx, t, d, format!("evaluation failed: {e}"))
    }

    /// Whether `d` is below the value of `t` in `ctx`.
    pub fn reaches(&mut self, ctx: &FinCtx, t: &Term, d: &FinElt) -> Result<bool, EvalError> {
        let m = self.machine();
        let th = m.delay(t, &m.fin_env(ctx), self.opts.fuel);
        let r = m.below(d, &th);
        self.charge(&m);
        r
    }

    /// Derives `ctx |- t : up d`, returning the index of the concluding step.
    pub fn judge(&mut self, ctx: &FinCtx, t: &Term, d: &FinElt) -> Result<usize, Fail> {
        crate::deep(|| {
            if d.is_bot() {
                let j = show(ctx, t, d);
                return Ok(self.trace.push(Rule::Top, j, vec![], vec![]));
            }
            if let Term::Ascribe(m, _) = t {
                return self.judge(ctx, m, d);
            }
            let key = (t as *const Term as usize, ctx.clone(), d.clone());
            if let Some(&i) = self.memo.get(&key) {
                return Ok(i);
            }
            let i = self.judge_rule(ctx, t, d)?;
            self.memo.insert(key, i);
            Ok(i)
        })
    }

    fn judge_rule(&mut self, ctx: &FinCtx, t: &Term, d: &FinElt) -> Result<usize, Fail> {
        let j = || show(ctx, t, d);
        match t {
            Term::Var(x) => {
                let e = lookup(ctx, x)
                    .ok_or_else(|| self.fail(ctx, t, d, format!("variable `{x}` is not in scope")))?;
                if d.leq(e) {
                    Ok(self.trace.push(Rule::Var, j(), vec![], vec![entails(e, d)]))
                } else {
                    Err(self.fail(ctx, t, d, format!("the hypothesis on `{x}` is too weak")))
                }
            }
            Term::Const(_, c) => {
                let e = FinElt::Atom(c.clone());
                if d.leq(&e) {
                    Ok(self.trace.push(Rule::Const, j(), vec![], vec![entails(&e, d)]))
                } else {
                    Err(self.fail(ctx, t, d, format!("constant `{c}` does not satisfy the goal")))
                }
            }
            Term::Lam(x, b) => {
                let FinElt::Fun(steps) = d else {
                    return Err(self.fail(ctx, t, d, "a lambda only satisfies function formulas"));
                };
                let mut ps = Vec::new();
                for (a, r) in steps.iter() {
                    ps.push(self.judge(&bind(ctx, x, a.clone()), b, r)?);
                }
                Ok(self.trace.push(Rule::Lam, j(), ps, vec![]))
            }
            Term::Pair(a, b) => {
                let FinElt::Pair(l, r) = d else {
                    return Err(self.fail(ctx, t, d, "a pair only satisfies product formulas"));
                };
                let pl = self.judge(ctx, a, l)?;
                let pr = self.judge(ctx, b, r)?;
                Ok(self.trace.push(Rule::Pair, j(), vec![pl, pr], vec![]))
            }
            Term::Proj(s, m) => {
                let g = if s.index() == 1 {
                    FinElt::pair(d.clone(), FinElt::Bot)
                } else {
                    FinElt::pair(FinElt::Bot, d.clone())
                };
                let p = self.judge(ctx, m, &g)?;
                Ok(self.trace.push(Rule::Proj, j(), vec![p], vec![]))
            }
            Term::Fold(m) => {
                let FinElt::Fold(a) = d else {
                    return Err(self.fail(ctx, t, d, "fold only satisfies [fold] formulas"));
                };
                let p = self.judge(ctx, m, a)?;
                Ok(self.trace.push(Rule::Fold, j(), vec![p], vec![]))
            }
            Term::Unfold(m) => {
                let p = self.judge(ctx, m, &FinElt::fold(d.clone()))?;
                Ok(self.trace.push(Rule::Unfold, j(), vec![p], vec![]))
            }
            Term::Case(s, bs) => {
                let m = self.machine();
                let w = m.eval(s, &m.fin_env(ctx), self.opts.fuel);
                self.charge(&m);
                let w = w.map_err(|e| self.eval_fail(ctx, t, d, e))?;
                let crate::evalsem::Whnf::Atom(b) = &*w else {
                    return Err(self.fail(ctx, t, d, "the scrutinee does not reach a constant"));
                };
                let b = b.clone();
                let branch = &bs.iter().find(|(c, _)| *c == b).expect("total case").1;
                let ps = self.judge(ctx, s, &FinElt::Atom(b.clone()))?;
                let pb = self.judge(ctx, branch, d)?;
                let others: Vec<String> =
                    bs.iter().filter(|(c, _)| *c != b).map(|(c, _)| format!("branch {c}")).collect();
                let facts = if others.is_empty() {
                    vec![]
                } else {
                    vec![Fact::Pure(format!("{} well typed", others.join(", ")))]
                };
                Ok(self.trace.push(Rule::Case, j(), vec![ps, pb], facts))
            }
            Term::App(n, v) => self.judge_app(ctx, t, n, v, d),
            Term::Fix(x, b) => {
                let chain = self
                    .fix_chain(ctx, x, b, d)
                    .map_err(|e| self.eval_fail(ctx, t, d, e))?
                    .ok_or_else(|| {
                        self.fail(
                            ctx,
                            t,
                            d,
                            format!("no chain of at most {} iterates reaches the goal", self.opts.n_fix),
                        )
                    })?;
                self.fix_links(ctx, t, x, b, &chain, d)
            }
            Term::FixAnn(x, invs, b) => {
                let mut chain = vec![Some(FinElt::Bot)];
                for f in invs {
                    let f = truncate(f, self.opts.k).map_err(|e| self.fail(ctx, t, d, e.to_string()))?;
                    match compile(&f) {
                        Ok(Compiled::Up(e)) => chain.push(Some(e)),
                        Ok(Compiled::Empty) => chain.push(None),
                        Err(e) => return Err(self.fail(ctx, t, d, e.to_string())),
                    }
                }
                let chain = self.close_annotated(ctx, t, d, chain)?;
                self.fix_links(ctx, t, x, b, &chain, d)
            }
            Term::Ascribe(..) => unreachable!("handled by judge"),
        }
    }

    // An empty invariant can only be followed by more empty ones; every
    // link out of an empty hypothesis is vacuous, so it is cut there.
    fn close_annotated(
        &self,
        ctx: &FinCtx,
        t: &Term,
        d: &FinElt,
        chain: Vec<Option<FinElt>>,
    ) -> Result<Vec<FinElt>, Fail> {
        let mut out = Vec::new();
        for e in chain {
            match e {
                Some(e) => out.push(e),
                None => {
                    return Err(self.fail(ctx, t, d, "an invariant of the annotation is unsatisfiable"))
                }
            }
        }
        Ok(out)
    }

    /// Links `ctx, x : up e_j |- body : up e_{j+1}`, then weakening of the
    /// last iterate to the goal.
    fn fix_links(
        &mut self,
        ctx: &FinCtx,
        t: &Term,
        x: &Name,
        body: &Term,
        chain: &[FinElt],
        d: &FinElt,
    ) -> Result<usize, Fail> {
        let last = chain.last().expect("chain starts at bottom");
        if !d.leq(last) {
            return Err(self.fail(ctx, t, d, "the invariant chain does not reach the goal"));
        }
        let mut prev = self.trace.push(Rule::Top, show(ctx, t, &chain[0]), vec![], vec![]);
        for w in chain.windows(2) {
            let link = self.judge(&bind(ctx, x, w[0].clone()), body, &w[1])?;
            prev = self.trace.push(Rule::Fix, show(ctx, t, &w[1]), vec![prev, link], vec![]);
        }
        if last == d {
            return Ok(prev);
        }
        Ok(self.trace.push(Rule::Sub, show(ctx, t, d), vec![prev], vec![entails(last, d)]))
    }

    /// The shortest chain `bot = e_0, ..., e_n` (n at most n_fix) of
    /// inspected portions of the iterates `T_0 = bot`, `T_{j+1} = body[x := T_j]`
    /// with `d` below `T_n`.
    pub fn fix_chain(
        &mut self,
        ctx: &FinCtx,
        x: &Name,
        body: &Term,
        d: &FinElt,
    ) -> Result<Option<Vec<FinElt>>, EvalError> {
        for n in 0..=self.opts.n_fix {
            let m = self.machine();
            let env = m.fin_env(ctx);
            let mut iterates: Vec<Th<'_>> = vec![m.fin(FinElt::Bot)];
            for j in 0..n {
                let next = m.delay(body, &env.bind(x.clone(), iterates[j].clone()), self.opts.fuel);
                iterates.push(next);
            }
            let hit = m.below(d, &iterates[n]);
            self.charge(&m);
            if hit? {
                let chain = iterates.iter().map(|th| m.readback(th)).collect::<Result<Vec<_>, _>>()?;
                return Ok(Some(chain));
            }
        }
        Ok(None)
    }

    fn judge_app(&mut self, ctx: &FinCtx, t: &Term, n: &Term, v: &Term, d: &FinElt) -> Result<usize, Fail> {
        let mut candidates: Vec<FinElt> = Vec::new();
        // (1) a refinement ascribed to the argument
        if let Term::Ascribe(_, ty) = v {
            if !ty.is_pure() {
                let (_, f) = char_type(ty);
                if let Ok(Compiled::Up(e)) = truncate(&f, self.opts.k).and_then(|f| compile(&f)) {
                    candidates.push(e);
                }
            }
        }
        // (2) arguments of the hypothesis on a variable in function position
        if let Term::Var(f) = n {
            if let Some(e) = lookup(ctx, f) {
                for (a, r) in e.steps() {
                    if d.leq(r) || d.leq(&e.apply(a)) {
                        candidates.push(a.clone());
                    }
                }
            }
        }
        let mut last_fail = None;
        for e in candidates {
            match self.app_with(ctx, t, n, v, &e, d) {
                Ok(Some(i)) => return Ok(i),
                Ok(None) => {}
                Err(f) => last_fail = Some(f),
            }
        }
        // (3) the portion of the argument the application inspects
        if self.opts.use_semantic_fallback {
            let m = self.machine();
            let env = m.fin_env(ctx);
            let fth = m.delay(n, &env, self.opts.fuel);
            let ath = m.delay(v, &env, self.opts.fuel);
            let res = m.apply(&fth, &ath);
            let hit = m.below(d, &res);
            self.charge(&m);
            match hit {
                Ok(true) => {
                    let e = m.readback(&ath).map_err(|e| self.eval_fail(ctx, t, d, e))?;
                    return self.app_premises(ctx, t, n, v, &e, d);
                }
                Ok(false) => {
                    return Err(last_fail.unwrap_or_else(|| {
                        self.fail(ctx, t, d, format!("the application does not reach the goal at fuel {}", self.opts.fuel))
                    }))
                }
                Err(e) => return Err(self.eval_fail(ctx, t, d, e)),
            }
        }
        Err(last_fail.unwrap_or_else(|| self.fail(ctx, t, d, "no refinement found for the argument")))
    }

    // Tries a candidate argument refinement after checking it semantically.
    fn app_with(
        &mut self,
        ctx: &FinCtx,
        t: &Term,
        n: &Term,
        v: &Term,
        e: &FinElt,
        d: &FinElt,
    ) -> Result<Option<usize>, Fail> {
        let fun_goal = join_steps(vec![(e.clone(), d.clone())]).expect("one step");
        let ok = self.reaches(ctx, v, e).and_then(|a| Ok(a && self.reaches(ctx, n, &fun_goal)?));
        match ok {
            Ok(true) => self.app_premises(ctx, t, n, v, e, d).map(Some),
            Ok(false) => Ok(None),
            Err(err) => Err(self.eval_fail(ctx, t, d, err)),
        }
    }

    fn app_premises(
        &mut self,
        ctx: &FinCtx,
        t: &Term,
        n: &Term,
        v: &Term,
        e: &FinElt,
        d: &FinElt,
    ) -> Result<usize, Fail> {
        let fun_goal = join_steps(vec![(e.clone(), d.clone())]).expect("one step");
        let pn = self.judge(ctx, n, &fun_goal)?;
        let pv = self.judge(ctx, v, e)?;
        Ok(self.trace.push(Rule::App, show(ctx, t, d), vec![pn, pv], vec![]))
    }
}
