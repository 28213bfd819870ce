//! A lazy call-by-name evaluator with memoised thunks.
//!
//! Values are computed to weak head normal form on demand. Every function
//! value records the applications it has served, so that after a run the
//! portion of each thunk that was actually inspected can be read back as a
//! finite element (see [`Machine::readback`]). That portion is below the
//! denotation, and the run only depended on it.
//!
//! `fix` carries fuel: at fuel `n` it is the `n`-th Kleene iterate, and at
//! fuel 0 it is bottom. A global step budget bounds the total work.

use std::cell::{Cell, RefCell};
use std::collections::HashSet;
use std::rc::Rc;

use thiserror::Error;

use crate::findom::{join_steps, FinElt};
use crate::syntax::{Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation exceeded its budget of {0} steps")]
    Budget(u64),
    #[error("unbound variable `{0}` during evaluation")]
    Unbound(String),
    #[error("read back an inconsistent function: {0}")]
    Readback(String),
}

pub type Th<'t> = Rc<RefCell<State<'t>>>;

pub enum State<'t> {
    Delayed { term: &'t Term, env: Env<'t>, fuel: u32 },
    Apply { fun: Th<'t>, arg: Th<'t> },
    Fin(FinElt),
    Forcing,
    Done(Rc<Whnf<'t>>),
}

pub enum Whnf<'t> {
    Bot,
    Atom(Name),
    Pair(Th<'t>, Th<'t>),
    Fold(Th<'t>),
    Fun(FunVal<'t>),
}

pub struct FunVal<'t> {
    kind: FunKind<'t>,
    /// `(argument, result)` thunks of every application so far.
    log: RefCell<Vec<(Th<'t>, Th<'t>)>>,
}

enum FunKind<'t> {
    Closure { param: &'t Name, body: &'t Term, env: Env<'t>, fuel: u32 },
    Finite(FinElt),
}

/// Persistent environment.
#[derive(Clone, Default)]
pub struct Env<'t>(Option<Rc<(Name, Th<'t>, Env<'t>)>>);

impl<'t> Env<'t> {
    pub fn empty() -> Self {
        Env(None)
    }

    pub fn bind(&self, x: Name, th: Th<'t>) -> Self {
        Env(Some(Rc::new((x, th, self.clone()))))
    }

    fn lookup(&self, x: &str) -> Option<&Th<'t>> {
        let mut cur = self;
        while let Some(node) = &cur.0 {
            if &*node.0 == x {
                return Some(&node.1);
            }
            cur = &node.2;
        }
        None
    }
}

pub const DEFAULT_BUDGET: u64 = 2_000_000;

pub struct Machine {
    steps: Cell<u64>,
    budget: u64,
}

impl Default for Machine {
    fn default() -> Self {
        Machine::new(DEFAULT_BUDGET)
    }
}

fn new_th<'t>(s: State<'t>) -> Th<'t> {
    Rc::new(RefCell::new(s))
}

impl Machine {
    pub fn new(budget: u64) -> Self {
        Machine { steps: Cell::new(0), budget }
    }

    pub fn steps_used(&self) -> u64 {
        self.steps.get()
    }

    fn tick(&self) -> Result<(), EvalError> {
        let n = self.steps.get() + 1;
        self.steps.set(n);
        if n > self.budget {
            Err(EvalError::Budget(self.budget))
        } else {
            Ok(())
        }
    }

    pub fn delay<'t>(&self, term: &'t Term, env: &Env<'t>, fuel: u32) -> Th<'t> {
        new_th(State::Delayed { term, env: env.clone(), fuel })
    }

    pub fn fin<'t>(&self, d: FinElt) -> Th<'t> {
        new_th(State::Fin(d))
    }

    /// The (lazy) application of a function thunk to an argument thunk.
    pub fn apply<'t>(&self, fun: &Th<'t>, arg: &Th<'t>) -> Th<'t> {
        new_th(State::Apply { fun: fun.clone(), arg: arg.clone() })
    }

    /// Environment binding each name to an unforced finite element.
    pub fn fin_env<'t>(&self, binds: &[(Name, FinElt)]) -> Env<'t> {
        binds.iter().fold(Env::empty(), |env, (x, d)| env.bind(x.clone(), self.fin(d.clone())))
    }

    fn whnf_of<'t>(&self, d: &FinElt) -> Whnf<'t> {
        match d {
            FinElt::Bot => Whnf::Bot,
            FinElt::Atom(a) => Whnf::Atom(a.clone()),
            FinElt::Pair(a, b) => {
                Whnf::Pair(self.fin((**a).clone()), self.fin((**b).clone()))
            }
            FinElt::Fold(a) => Whnf::Fold(self.fin((**a).clone())),
            FinElt::Fun(_) => Whnf::Fun(FunVal {
                kind: FunKind::Finite(d.clone()),
                log: RefCell::new(Vec::new()),
            }),
        }
    }

    /// Forces a thunk to weak head normal form.
    pub fn force<'t>(&self, th: &Th<'t>) -> Result<Rc<Whnf<'t>>, EvalError> {
        crate::deep(|| self.force_inner(th))
    }

    fn force_inner<'t>(&self, th: &Th<'t>) -> Result<Rc<Whnf<'t>>, EvalError> {
        let state = std::mem::replace(&mut *th.borrow_mut(), State::Forcing);
        let w = match state {
            State::Done(w) => {
                *th.borrow_mut() = State::Done(w.clone());
                return Ok(w);
            }
            // a thunk that needs its own value denotes bottom at this stage
            State::Forcing => Rc::new(Whnf::Bot),
            State::Fin(d) => Rc::new(self.whnf_of(&d)),
            State::Delayed { term, env, fuel } => self.eval(term, &env, fuel)?,
            State::Apply { fun, arg } => {
                let f = self.force(&fun)?;
                match &*f {
                    Whnf::Fun(fv) => {
                        fv.log.borrow_mut().push((arg.clone(), th.clone()));
                        match &fv.kind {
                            FunKind::Closure { param, body, env, fuel } => {
                                let env = env.bind((*param).clone(), arg);
                                self.eval(body, &env, *fuel)?
                            }
                            FunKind::Finite(g) => {
                                let mut acc = FinElt::Bot;
                                for (a, r) in g.steps() {
                                    if self.below(a, &arg)? {
                                        acc = acc.sup(r).expect("step function invariant");
                                    }
                                }
                                Rc::new(self.whnf_of(&acc))
                            }
                        }
                    }
                    _ => Rc::new(Whnf::Bot),
                }
            }
        };
        *th.borrow_mut() = State::Done(w.clone());
        Ok(w)
    }

    /// Evaluates `term` to weak head normal form.
    pub fn eval<'t>(&self, term: &'t Term, env: &Env<'t>, fuel: u32) -> Result<Rc<Whnf<'t>>, EvalError> {
        crate::deep(|| self.eval_inner(term, env, fuel))
    }

    fn eval_inner<'t>(&self, term: &'t Term, env: &Env<'t>, fuel: u32) -> Result<Rc<Whnf<'t>>, EvalError> {
        self.tick()?;
        Ok(match term {
            Term::Var(x) => {
                let th = env.lookup(x).ok_or_else(|| EvalError::Unbound(x.to_string()))?.clone();
                return self.force(&th);
            }
            Term::Const(_, c) => Rc::new(Whnf::Atom(c.clone())),
            Term::Lam(x, b) => Rc::new(Whnf::Fun(FunVal {
                kind: FunKind::Closure { param: x, body: b, env: env.clone(), fuel },
                log: RefCell::new(Vec::new()),
            })),
            Term::App(n, v) => {
                let f = self.delay(n, env, fuel);
                let a = self.delay(v, env, fuel);
                return self.force(&self.apply(&f, &a));
            }
            Term::Fix(x, b) | Term::FixAnn(x, _, b) => {
                if fuel == 0 {
                    Rc::new(Whnf::Bot)
                } else {
                    let rec = self.delay(term, env, fuel - 1);
                    return self.eval(b, &env.bind(x.clone(), rec), fuel);
                }
            }
            Term::Fold(m) => Rc::new(Whnf::Fold(self.delay(m, env, fuel))),
            Term::Unfold(m) => match &*self.eval(m, env, fuel)? {
                Whnf::Fold(t) => return self.force(t),
                _ => Rc::new(Whnf::Bot),
            },
            Term::Pair(a, b) => {
                Rc::new(Whnf::Pair(self.delay(a, env, fuel), self.delay(b, env, fuel)))
            }
            Term::Proj(s, m) => match &*self.eval(m, env, fuel)? {
                Whnf::Pair(a, b) => return self.force(if s.index() == 1 { a } else { b }),
                _ => Rc::new(Whnf::Bot),
            },
            Term::Case(s, bs) => match &*self.eval(s, env, fuel)? {
                Whnf::Atom(c) => match bs.iter().find(|(d, _)| d == c) {
                    Some((_, b)) => return self.eval(b, env, fuel),
                    None => Rc::new(Whnf::Bot),
                },
                _ => Rc::new(Whnf::Bot),
            },
            Term::Ascribe(m, _) => return self.eval(m, env, fuel),
        })
    }

    /// Whether `d` is below the value of `th`, forcing only what the
    /// comparison needs.
    pub fn below<'t>(&self, d: &FinElt, th: &Th<'t>) -> Result<bool, EvalError> {
        crate::deep(|| {
            if d.is_bot() {
                return Ok(true);
            }
            let w = self.force(th)?;
            Ok(match (d, &*w) {
                (FinElt::Atom(a), Whnf::Atom(b)) => a == b,
                (FinElt::Pair(a, b), Whnf::Pair(x, y)) => self.below(a, x)? && self.below(b, y)?,
                (FinElt::Fold(a), Whnf::Fold(x)) => self.below(a, x)?,
                (FinElt::Fun(steps), Whnf::Fun(_)) => {
                    for (a, r) in steps.iter() {
                        let res = self.apply(th, &self.fin(a.clone()));
                        if !self.below(r, &res)? {
                            return Ok(false);
                        }
                    }
                    true
                }
                _ => false,
            })
        })
    }

    /// The finite portion of `th` that has been forced so far.
    pub fn readback(&self, th: &Th<'_>) -> Result<FinElt, EvalError> {
        let mut path = HashSet::new();
        self.readback_in(th, &mut path)
    }

    fn readback_in(&self, th: &Th<'_>, path: &mut HashSet<*const ()>) -> Result<FinElt, EvalError> {
        crate::deep(|| {
            let w = match &*th.borrow() {
                State::Done(w) => w.clone(),
                _ => return Ok(FinElt::Bot),
            };
            let key = Rc::as_ptr(&w) as *const ();
            if !path.insert(key) {
                return Ok(FinElt::Bot);
            }
            let out = match &*w {
                Whnf::Bot => FinElt::Bot,
                Whnf::Atom(a) => FinElt::Atom(a.clone()),
                Whnf::Pair(a, b) => {
                    FinElt::pair(self.readback_in(a, path)?, self.readback_in(b, path)?)
                }
                Whnf::Fold(a) => FinElt::fold(self.readback_in(a, path)?),
                Whnf::Fun(fv) => {
                    let log: Vec<_> = fv.log.borrow().clone();
                    let mut steps = Vec::with_capacity(log.len());
                    for (a, r) in &log {
                        let r = self.readback_in(r, path)?;
                        if !r.is_bot() {
                            steps.push((self.readback_in(a, path)?, r));
                        }
                    }
                    join_steps(steps).map_err(|e| EvalError::Readback(e.to_string()))?
                }
            };
            path.remove(&key);
            Ok(out)
        })
    }

    /// A finite element below the value of `th`: components are forced,
    /// folds are followed at most `depth` times, and functions are probed at
    /// every element of `probes(domain)`.
    pub fn lower<'t>(
        &self,
        th: &Th<'t>,
        tau: &crate::syntax::PureType,
        depth: u32,
        probes: &mut dyn FnMut(&crate::syntax::PureType) -> Vec<FinElt>,
    ) -> Result<FinElt, EvalError> {
        use crate::syntax::PureType;
        crate::deep(|| {
            let w = self.force(th)?;
            Ok(match (&*w, tau) {
                (Whnf::Atom(a), PureType::Base(_)) => FinElt::Atom(a.clone()),
                (Whnf::Pair(a, b), PureType::Prod(s, t)) => FinElt::pair(
                    self.lower(a, s, depth, probes)?,
                    self.lower(b, t, depth, probes)?,
                ),
                (Whnf::Fold(a), PureType::Rec(..)) if depth > 0 => {
                    let u = tau.unfold_rec().expect("rec");
                    FinElt::fold(self.lower(a, &u, depth - 1, probes)?)
                }
                (Whnf::Fun(_), PureType::Arrow(s, t)) => {
                    let mut steps = Vec::new();
                    for p in probes(s) {
                        let res = self.apply(th, &self.fin(p.clone()));
                        let r = self.lower(&res, t, depth, probes)?;
                        if !r.is_bot() {
                            steps.push((p, r));
                        }
                    }
                    join_steps(steps).map_err(|e| EvalError::Readback(e.to_string()))?
                }
                _ => FinElt::Bot,
            })
        })
    }
}
