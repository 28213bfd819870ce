//! Seeded random judgments over small first-order types.
//!
//! Contexts and goals live at `Bool`, `Bool * Bool` and `Bool -> Bool`, the
//! types whose rank-2 finite elements are exactly all of their elements,
//! so the judgment oracle is exact on them. Terms stay well typed and use
//! variables, constants, pairs, projections, lambdas, applications, case
//! and fix.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checker::Judgment;
use crate::evalsem::{lower_term, sat};
use crate::findom::FinElt;
use crate::logic::{compile, enumerate_conjunctive, Compiled, Formula};
use crate::syntax::{name, BaseRegistry, Name, PureType, RefType, Term};

/// The three generator types.
pub fn small_types() -> [PureType; 3] {
    let b = PureType::bool();
    [b.clone(), PureType::prod(b.clone(), b.clone()), PureType::arrow(b.clone(), b)]
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Size budget of generated terms.
    pub term_size: usize,
    /// Most context entries.
    pub max_ctx: usize,
    /// Formulas are drawn from the conjunctive formulas of this size.
    pub formula_size: usize,
    /// Allow disjunctive context and goal formulas.
    pub disjunctive: bool,
    /// Probability that the goal is chosen among formulas the term is known
    /// to satisfy, rather than uniformly.
    pub guided: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { term_size: 8, max_ctx: 2, formula_size: 4, disjunctive: true, guided: 0.5 }
    }
}

/// A seeded generator; equal seeds give equal sequences.
pub struct Generator<'r> {
    rng: ChaCha8Rng,
    reg: &'r BaseRegistry,
    cfg: GenConfig,
    formulas: Vec<(PureType, Vec<Formula>)>,
    counter: usize,
}

fn tt() -> Term {
    Term::constant("Bool", "tt")
}
fn ff() -> Term {
    Term::constant("Bool", "ff")
}

impl<'r> Generator<'r> {
    pub fn new(seed: u64, cfg: GenConfig, reg: &'r BaseRegistry) -> Self {
        let formulas =
            small_types().into_iter().map(|t| (t.clone(), enumerate_conjunctive(&t, cfg.formula_size, reg))).collect();
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), reg, cfg, formulas, counter: 0 }
    }

    fn pool(&self, tau: &PureType) -> &[Formula] {
        &self.formulas.iter().find(|(t, _)| t == tau).expect("small type").1
    }

    /// A conjunctive formula at `tau`.
    pub fn conjunctive(&mut self, tau: &PureType) -> Formula {
        let n = self.pool(tau).len();
        let i = self.rng.gen_range(0..n);
        self.pool(tau)[i].clone()
    }

    /// A formula at `tau`, a disjunction of two conjunctive ones a quarter
    /// of the time when disjunctions are enabled.
    pub fn formula(&mut self, tau: &PureType) -> Formula {
        if self.cfg.disjunctive && self.rng.gen_bool(0.25) {
            let a = self.conjunctive(tau);
            let b = self.conjunctive(tau);
            Formula::or([a, b])
        } else {
            self.conjunctive(tau)
        }
    }

    fn fresh(&mut self, stem: &str) -> Name {
        self.counter += 1;
        name(&format!("{stem}{}", self.counter))
    }

    fn ty(&mut self) -> PureType {
        small_types().choose(&mut self.rng).expect("nonempty").clone()
    }

    fn leaf(&mut self, ctx: &[(Name, PureType)], tau: &PureType) -> Term {
        let vars: Vec<&Name> = ctx.iter().filter(|(_, t)| t == tau).map(|(x, _)| x).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.6) {
            return Term::Var((*vars.choose(&mut self.rng).expect("nonempty")).clone());
        }
        match tau {
            PureType::Prod(..) => {
                let a = self.leaf(ctx, &PureType::bool());
                let b = self.leaf(ctx, &PureType::bool());
                Term::pair(a, b)
            }
            PureType::Arrow(..) => {
                let x = self.fresh("x");
                let body = match self.rng.gen_range(0..3) {
                    0 => Term::Var(x.clone()),
                    1 => tt(),
                    _ => ff(),
                };
                Term::ascribe(Term::Lam(x, Box::new(body)), RefType::Pure(tau.clone()))
            }
            _ => {
                if self.rng.gen_bool(0.5) {
                    tt()
                } else {
                    ff()
                }
            }
        }
    }

    /// A term of type `tau` under `ctx` with about `size` nodes.
    pub fn term(&mut self, ctx: &[(Name, PureType)], tau: &PureType, size: usize) -> Term {
        if size <= 1 {
            return self.leaf(ctx, tau);
        }
        let bool_t = PureType::bool();
        let bb = PureType::prod(bool_t.clone(), bool_t.clone());
        let b2b = PureType::arrow(bool_t.clone(), bool_t.clone());
        let choice = self.rng.gen_range(0..10);
        match (choice, tau) {
            (0..=1, _) => {
                let rest = size - 1;
                let s = self.term(ctx, &bool_t, rest / 3 + 1);
                let a = self.term(ctx, tau, rest / 3);
                let b = self.term(ctx, tau, rest / 3);
                Term::Case(Box::new(s), vec![(name("tt"), a), (name("ff"), b)])
            }
            (2, _) => {
                // fix: the recursion variable is in scope, mostly unused
                // at Bool * Bool and used through a case at Bool -> Bool
                let x = self.fresh("r");
                let mut c = ctx.to_vec();
                c.push((x.clone(), tau.clone()));
                let body = self.term(&c, tau, size - 1);
                Term::ascribe(Term::Fix(x, Box::new(body)), RefType::Pure(tau.clone()))
            }
            (3..=4, _) => {
                // application of a Bool -> Bool term
                let f = self.term(ctx, &b2b, (size - 1) / 2);
                let a = self.term(ctx, &bool_t, (size - 1) / 2);
                let app = Term::app(f, a);
                if *tau == bool_t {
                    app
                } else if *tau == bb {
                    let b = self.leaf(ctx, &bool_t);
                    Term::pair(app, b)
                } else {
                    let x = self.fresh("x");
                    Term::ascribe(Term::Lam(x, Box::new(app)), RefType::Pure(tau.clone()))
                }
            }
            (5..=6, PureType::Arrow(..)) => {
                let x = self.fresh("x");
                let mut c = ctx.to_vec();
                c.push((x.clone(), bool_t.clone()));
                let body = self.term(&c, &bool_t, size - 1);
                Term::ascribe(Term::Lam(x, Box::new(body)), RefType::Pure(tau.clone()))
            }
            (5..=6, PureType::Prod(..)) => {
                let a = self.term(ctx, &bool_t, (size - 1) / 2);
                let b = self.term(ctx, &bool_t, (size - 1) / 2);
                Term::pair(a, b)
            }
            (5..=6, _) => {
                let p = self.term(ctx, &bb, size - 1);
                if self.rng.gen_bool(0.5) {
                    Term::pi1(p)
                } else {
                    Term::pi2(p)
                }
            }
            _ => self.leaf(ctx, tau),
        }
    }

    /// A random judgment: up to `max_ctx` hypotheses, a term, and a goal.
    pub fn judgment(&mut self) -> Judgment {
        let n = self.rng.gen_range(0..=self.cfg.max_ctx);
        let mut ctx = Vec::new();
        let mut pctx = Vec::new();
        for _ in 0..n {
            let t = self.ty();
            let x = self.fresh("y");
            let f = self.formula(&t);
            pctx.push((x.clone(), t.clone()));
            ctx.push((x, RefType::Refine(t, f)));
        }
        let tau = self.ty();
        let size = self.rng.gen_range(1..=self.cfg.term_size);
        let term = self.term(&pctx, &tau, size);
        let goal = if self.rng.gen_bool(self.cfg.guided) {
            self.guided_goal(&ctx, &term, &tau).unwrap_or_else(|| self.formula(&tau))
        } else {
            self.formula(&tau)
        };
        Judgment { ctx, term, goal: RefType::Refine(tau, goal) }
    }

    // A conjunctive goal satisfied by the value of `term` under the least
    // instantiation of the first disjunct of every hypothesis.
    fn guided_goal(&mut self, ctx: &[(Name, RefType)], term: &Term, tau: &PureType) -> Option<Formula> {
        let mut env = Vec::new();
        for (x, t) in ctx {
            let RefType::Refine(_, f) = t else { return None };
            let first = match f {
                Formula::Or(fs) => fs.first()?.clone(),
                f => f.clone(),
            };
            match compile(&first).ok()? {
                Compiled::Up(e) => env.push((x.clone(), e)),
                Compiled::Empty => env.push((x.clone(), FinElt::Bot)),
            }
        }
        let v = lower_term(term, &env, tau, 16, 2, self.reg).ok()?;
        let pool = self.pool(tau).to_vec();
        let ok: Vec<&Formula> = pool.iter().filter(|f| sat(tau, &v, f, 2, self.reg).unwrap_or(false)).collect();
        ok.choose(&mut self.rng).map(|f| (*f).clone())
    }
}

/// The `i`-th judgment of the stream seeded by `seed`: independent of the
/// other indices, so sweeps can generate in parallel.
pub fn judgment_at(seed: u64, i: u64, cfg: &GenConfig, reg: &BaseRegistry) -> Judgment {
    let mut g = Generator::new(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15), cfg.clone(), reg);
    g.judgment()
}
