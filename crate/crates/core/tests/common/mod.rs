//! The eight acceptance criteria as functions, shared by the acceptance
//! runner and the integration tests.

#![allow(dead_code)]

use dtlf_core::checker::{check, check_normal, CheckOptions, Verdict};
use dtlf_core::corpus::{cross_validate, stanzas_at};
use dtlf_core::evalsem::{judgment_oracle, lower_term, oracle_consistent, oracle_entail, sat, JudgmentOracle};
use dtlf_core::findom::{canonicalize, enumerate, leq_oracle, mk_fun};
use dtlf_core::gen::{judgment_at, GenConfig};
use dtlf_core::logic::{char_formula, compile, consistent_f, entail_conj, entail_fin, enumerate_conjunctive};
use dtlf_core::par::{self, Mode};
use dtlf_core::syntax::{parse_formula, parse_term, parse_type};
use dtlf_core::{BaseRegistry, Compiled, FinElt, Formula, PureType};
use itertools::Itertools;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        let mut detail = summary;
        if let Some(f) = failures.first() {
            detail.push_str(&format!("; first failure: {f}"));
        }
        Outcome { pass: failures.is_empty(), detail }
    }
}

pub fn reg() -> BaseRegistry {
    BaseRegistry::default()
}

pub fn ty(s: &str) -> PureType {
    parse_type(s, &reg()).unwrap()
}

pub fn f(s: &str) -> Formula {
    parse_formula(s, &reg()).unwrap()
}

/// The four types of the exhaustive logic sweeps.
pub fn sweep_types() -> Vec<PureType> {
    ["Bool", "Bool * Bool", "Bool -> Bool", "Stream Bool"].iter().map(|s| ty(s)).collect()
}

pub const MAX_FORMULA: usize = 6;
pub const RANK: usize = 2;

/// Decision procedures against the oracle on every pair of conjunctive
/// formulas.
pub fn criterion1(mode: Mode) -> Outcome {
    let r = reg();
    let mut failures = Vec::new();
    let (mut pairs, mut singles) = (0, 0);
    for tau in sweep_types() {
        let fs = enumerate_conjunctive(&tau, MAX_FORMULA, &r);
        let rows = par::map(mode, &fs, |psi| {
            let mut bad = Vec::new();
            let c = consistent_f(psi).unwrap();
            if c != oracle_consistent(&tau, psi, RANK, &r).unwrap() {
                bad.push(format!("consistent {psi} at {tau}"));
            }
            for phi in &fs {
                if entail_conj(psi, phi).unwrap() != oracle_entail(&tau, psi, phi, RANK, &r).unwrap() {
                    bad.push(format!("{psi} |- {phi} at {tau}"));
                }
            }
            bad
        });
        singles += fs.len();
        pairs += fs.len() * fs.len();
        failures.extend(rows.into_iter().flatten());
    }
    Outcome::new(&failures, format!("{pairs} entailments, {singles} consistency checks, {} disagreements", failures.len()))
}

/// Exactly one of consistency and entailment of false.
pub fn criterion2(mode: Mode) -> Outcome {
    let r = reg();
    let mut failures = Vec::new();
    let mut n = 0;
    for tau in sweep_types() {
        let fs = enumerate_conjunctive(&tau, MAX_FORMULA, &r);
        n += fs.len();
        let bad = par::map(mode, &fs, |phi| {
            let c = consistent_f(phi).unwrap();
            let e = entail_conj(phi, &Formula::bot()).unwrap();
            (c == e).then(|| format!("{phi}: consistent={c}, entails false={e}"))
        });
        failures.extend(bad.into_iter().flatten());
    }
    Outcome::new(&failures, format!("{n} formulas, {} exceptions", failures.len()))
}

/// Round trips between finite elements and characteristic formulas.
pub fn criterion3(mode: Mode) -> Outcome {
    let r = reg();
    let mut failures = Vec::new();
    let (mut elts, mut forms) = (0, 0);
    for tau in sweep_types() {
        let univ = enumerate(&tau, RANK, &r);
        elts += univ.len();
        for d in &univ {
            let got = compile(&char_formula(d)).unwrap();
            if got != Compiled::Up(canonicalize(d).unwrap()) {
                failures.push(format!("compile(char {d}) = {got}"));
            }
        }
        let fs = enumerate_conjunctive(&tau, MAX_FORMULA, &r);
        forms += fs.len();
        let bad = par::map(mode, &fs, |phi| match compile(phi).unwrap() {
            Compiled::Up(d) => {
                let chi = char_formula(&d);
                univ.iter()
                    .find(|e| sat(&tau, e, phi, RANK, &r).unwrap() != sat(&tau, e, &chi, RANK, &r).unwrap())
                    .map(|e| format!("{phi} and char {d} differ at {e}"))
            }
            Compiled::Empty => univ
                .iter()
                .find(|e| sat(&tau, e, phi, RANK, &r).unwrap())
                .map(|e| format!("{phi} compiles to empty but {e} satisfies it")),
        });
        failures.extend(bad.into_iter().flatten());
    }
    Outcome::new(&failures, format!("{elts} elements, {forms} formulas, {} failures", failures.len()))
}

fn both_ways(a: &Formula, b: &Formula) -> bool {
    entail_fin(a, b).unwrap() && entail_fin(b, a).unwrap()
}

/// Families of small formulas for the derivable-rule instances.
fn small_pool() -> Vec<Formula> {
    [
        "<tt>",
        "<ff>",
        "true",
        "false",
        "[pi1] <tt>",
        "[pi2] <ff>",
        "[pi1] <tt> /\\ [pi2] <tt>",
        "[pi1] <ff> \\/ [pi2] <tt>",
        "[fold] [pi1] <tt>",
        "[fold] [pi2] [fold] [pi1] <ff>",
        "<tt> -o <ff>",
        "(<tt> \\/ <ff>) -o <tt>",
    ]
    .iter()
    .map(|s| f(s))
    .collect()
}

/// The derivable sequents, instantiated with concrete formulas.
pub fn criterion4() -> Outcome {
    let pool = small_pool();
    let mut failures = Vec::new();
    let mut counts: Vec<(&str, usize)> = Vec::new();
    let mut record = |name: &'static str, ok: bool, what: String, failures: &mut Vec<String>| {
        match counts.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += 1,
            None => counts.push((name, 1)),
        }
        if !ok {
            failures.push(format!("{name}: {what}"));
        }
    };

    // premises psi_i |- phi_i drawn from entailing pairs of the pool
    let entailing: Vec<(Formula, Formula)> = pool
        .iter()
        .cartesian_product(pool.iter())
        .filter(|(a, b)| a != b && entail_fin(a, b).unwrap())
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    for (n, fam) in entailing.iter().combinations(3).step_by(97).take(6).enumerate() {
        let fam: Vec<_> = fam.into_iter().take(2 + n % 2).collect();
        let lhs = Formula::And(fam.iter().map(|(a, _)| a.clone()).collect());
        let rhs = Formula::And(fam.iter().map(|(_, b)| b.clone()).collect());
        record("and-congruence", entail_fin(&lhs, &rhs).unwrap(), format!("{lhs} |- {rhs}"), &mut failures);
        let lhs = Formula::Or(fam.iter().map(|(a, _)| a.clone()).collect());
        let rhs = Formula::Or(fam.iter().map(|(_, b)| b.clone()).collect());
        record("or-congruence", entail_fin(&lhs, &rhs).unwrap(), format!("{lhs} |- {rhs}"), &mut failures);
    }

    // modalities commute with finite conjunctions and disjunctions
    type Modality = fn(Formula) -> Formula;
    let modal: [(&str, Modality); 3] =
        [("pi1", Formula::pi1), ("pi2", Formula::pi2), ("fold", Formula::fold)];
    for (name, m) in modal {
        for fam in pool.iter().combinations(2).step_by(11).take(5) {
            let fs: Vec<Formula> = fam.into_iter().cloned().collect();
            let a = m(Formula::And(fs.clone()));
            let b = Formula::And(fs.iter().cloned().map(m).collect());
            record("modal-and", both_ways(&a, &b), format!("[{name}] {a} -||- {b}"), &mut failures);
            let a = Formula::Or(fs.iter().cloned().map(m).collect());
            let b = m(Formula::Or(fs.clone()));
            record("modal-or", both_ways(&a, &b), format!("[{name}] {a} -||- {b}"), &mut failures);
        }
    }

    // distributivity on 3-by-2 instances, both directions
    let comps = ["[pi1] <tt>", "[pi1] <ff>", "[pi2] <tt>", "[pi2] <ff>", "[pi1] true", "[pi2] false"];
    let comps: Vec<Formula> = comps.iter().map(|s| f(s)).collect();
    for (n, rows) in comps.iter().permutations(6).step_by(113).take(6).enumerate() {
        let m: Vec<Vec<Formula>> = rows.chunks(2).map(|c| c.iter().map(|x| (*x).clone()).collect()).collect();
        // D: /\_i \/_j m_ij -||- \/_f /\_i m_i,f(i)
        let lhs = Formula::And(m.iter().map(|r| Formula::Or(r.clone())).collect());
        let choices: Vec<Vec<usize>> = (0..3).map(|_| 0..2).multi_cartesian_product().collect();
        let rhs = Formula::Or(
            choices.iter().map(|c| Formula::And((0..3).map(|i| m[i][c[i]].clone()).collect())).collect(),
        );
        record("distributivity", both_ways(&lhs, &rhs), format!("#{n}: {lhs} -||- {rhs}"), &mut failures);
        // dual: /\_f \/_i m_i,f(i) -||- \/_i /\_j m_ij
        let lhs = Formula::And(
            choices.iter().map(|c| Formula::Or((0..3).map(|i| m[i][c[i]].clone()).collect())).collect(),
        );
        let rhs = Formula::Or(m.iter().map(|r| Formula::And(r.clone())).collect());
        record("dual distributivity", both_ways(&lhs, &rhs), format!("#{n}: {lhs} -||- {rhs}"), &mut failures);
    }
    let few: Vec<String> = counts.iter().filter(|(_, c)| *c < 5).map(|(n, c)| format!("{n} has {c} instances")).collect();
    failures.extend(few);
    let summary = counts.iter().map(|(n, c)| format!("{n} x{c}")).join(", ");
    Outcome::new(&failures, summary)
}

/// Result of one refinement corpus instance.
pub struct SpecRow {
    pub file: &'static str,
    pub k: usize,
    pub label: String,
    pub derivable: bool,
    pub replayed: bool,
    pub validated: Result<usize, String>,
}

pub const SPEC_FILES: [&str; 4] = ["map", "filter", "diag", "bft"];

pub fn spec_rows(mode: Mode) -> Vec<SpecRow> {
    let r = reg();
    let mut jobs = Vec::new();
    for file in SPEC_FILES {
        for k in [1, 2] {
            for s in stanzas_at(file, k, &r).unwrap() {
                jobs.push((file, k, s));
            }
        }
    }
    par::map(mode, &jobs, |(file, k, s)| {
        let opts = CheckOptions { k: *k, n_fix: 4, fuel: 16, ..s.opts.clone() };
        let v = check_normal(&s.judgment, &opts, &r);
        SpecRow {
            file,
            k: *k,
            label: s.label.clone().unwrap_or_else(|| s.text.clone()),
            derivable: v.is_derivable(),
            replayed: v.trace().map(|t| t.replay().is_ok()).unwrap_or(false),
            validated: cross_validate(&s.judgment, &opts, &r),
        }
    })
}

/// Refinement corpus: every instance Derivable and confirmed on at least three
/// instantiations.
pub fn criterion5(mode: Mode) -> Outcome {
    let rows = spec_rows(mode);
    let failures: Vec<String> = rows
        .iter()
        .filter(|w| !(w.derivable && w.replayed && matches!(w.validated, Ok(n) if n >= 3)))
        .map(|w| format!("{} at k={} ({})", w.label, w.k, if w.derivable { "not validated" } else { "Unknown" }))
        .collect();
    let mut o = Outcome::new(&[], format!("{}/{} instances derivable and validated", rows.len() - failures.len(), rows.len()));
    if !failures.is_empty() {
        o.pass = false;
        o.detail.push_str(&format!("; failing: {}", failures.join(", ")));
    }
    o
}

pub const SOUNDNESS_SEED: u64 = 0x5eed;
pub const SOUNDNESS_COUNT: u64 = 1000;

/// Derivable verdicts on random judgments are never refuted by the oracle.
pub fn criterion6(mode: Mode) -> Outcome {
    let r = reg();
    let cfg = GenConfig::default();
    let o = CheckOptions::default();
    let rows = par::map_range(mode, SOUNDNESS_COUNT as usize, |i| {
        let j = judgment_at(SOUNDNESS_SEED, i as u64, &cfg, &r);
        match check(&j, &o, &r) {
            Verdict::Derivable(t) => {
                if let Err(e) = t.replay() {
                    return (1, Some(format!("{j}: trace does not replay: {e}")));
                }
                match judgment_oracle(&j.ctx, &j.term, &j.goal, o.k, RANK, o.fuel, &r) {
                    Ok(JudgmentOracle::Sound { .. }) => (1, None),
                    Ok(JudgmentOracle::Violated { env, value }) => {
                        (1, Some(format!("{j}: violated under {env:?} with value {value}")))
                    }
                    Err(e) => (1, Some(format!("{j}: oracle error {e}"))),
                }
            }
            Verdict::Unknown { .. } => (0, None),
            Verdict::IllTyped(e) => (0, Some(format!("{j}: generator produced an ill-typed judgment: {e}"))),
        }
    });
    let derivable: usize = rows.iter().map(|(d, _)| d).sum();
    let failures: Vec<String> = rows.into_iter().filter_map(|(_, f)| f).collect();
    Outcome::new(
        &failures,
        format!("{SOUNDNESS_COUNT} judgments, {derivable} derivable, {} violations", failures.len()),
    )
}

pub const COMPLETENESS_SEED: u64 = 0xc0de;
pub const COMPLETENESS_COUNT: usize = 200;
pub const COMPLETENESS_MAX_SIZE: usize = 8;

/// The first `COMPLETENESS_COUNT` generated finite judgments with terms of
/// size at most 8 that the oracle confirms sound.
pub fn sound_finite_judgments(mode: Mode) -> Vec<dtlf_core::checker::Judgment> {
    let r = reg();
    let cfg = GenConfig { disjunctive: false, guided: 0.8, ..GenConfig::default() };
    let mut out = Vec::new();
    let mut start = 0usize;
    while out.len() < COMPLETENESS_COUNT {
        let batch = par::map_range(mode, 256, |i| {
            let j = judgment_at(COMPLETENESS_SEED, (start + i) as u64, &cfg, &r);
            let ok = j.term.size() <= COMPLETENESS_MAX_SIZE
                && matches!(
                    judgment_oracle(&j.ctx, &j.term, &j.goal, 2, RANK, 16, &r),
                    Ok(JudgmentOracle::Sound { .. })
                );
            ok.then_some(j)
        });
        out.extend(batch.into_iter().flatten());
        start += 256;
    }
    out.truncate(COMPLETENESS_COUNT);
    out
}

/// Every oracle-sound finite judgment is derivable.
pub fn criterion7(mode: Mode) -> Outcome {
    let r = reg();
    let js = sound_finite_judgments(mode);
    let o = CheckOptions::default();
    let bad = par::map(mode, &js, |j| match check(j, &o, &r) {
        Verdict::Derivable(t) => t.replay().err().map(|e| format!("{j}: trace does not replay: {e}")),
        v => Some(format!("{j}: {v:?}")),
    });
    let failures: Vec<String> = bad.into_iter().flatten().collect();
    Outcome::new(&failures, format!("{}/{} derivable", js.len() - failures.len(), js.len()))
}

/// Types of the order-theory sweeps.
pub fn order_types() -> Vec<PureType> {
    ["Bool", "Bool * Bool", "Bool -> Bool", "Stream Bool", "(Bool * Bool) -> Bool", "(Bool -> Bool) -> Bool"]
        .iter()
        .map(|s| ty(s))
        .collect()
}

/// Terms of the fuel-monotonicity sweep with their types.
pub fn fuel_terms() -> Vec<(dtlf_core::Term, PureType)> {
    let r = reg();
    let mut out: Vec<(dtlf_core::Term, PureType)> = [
        ("fix x. (x : Bool)", "Bool"),
        ("(fix s. tt :: s : Stream Bool)", "Stream Bool"),
        ("(fix s. tt :: ff :: s : Stream Bool)", "Stream Bool"),
        ("(fix f. \\x. if x then tt else f x : Bool -> Bool)", "Bool -> Bool"),
        ("(fix p. (pi2 p, tt) : Bool * Bool)", "Bool * Bool"),
        ("(fix f. \\x. (x, pi1 (f x)) : Bool -> Bool * Bool)", "Bool -> Bool * Bool"),
    ]
    .iter()
    .map(|(t, s)| (parse_term(t, &r).unwrap(), ty(s)))
    .collect();
    let cfg = GenConfig { max_ctx: 0, ..GenConfig::default() };
    for i in 0..100 {
        let j = judgment_at(0xf0e1, i, &cfg, &r);
        out.push((j.term.clone(), j.goal.underlying()));
    }
    out
}

/// Order laws, least upper bounds, monotone application, step-function
/// consistency and fuel monotonicity.
pub fn criterion8(mode: Mode) -> Outcome {
    let r = reg();
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for tau in order_types() {
        let u = enumerate(&tau, RANK, &r);
        checked += u.len();
        let rows = par::map(mode, &u, |d| {
            let mut bad = Vec::new();
            if !d.leq(d) {
                bad.push(format!("{d} not reflexive"));
            }
            for e in &u {
                let de = d.leq(e);
                if de != leq_oracle(&tau, d, e, RANK) {
                    bad.push(format!("leq {d} {e} disagrees with pointwise order"));
                }
                if de && e.leq(d) && d != e {
                    bad.push(format!("antisymmetry fails for {d}, {e}"));
                }
                if de {
                    for g in u.iter().filter(|g| e.leq(g)) {
                        if !d.leq(g) {
                            bad.push(format!("transitivity fails for {d} {e} {g}"));
                        }
                    }
                }
                let uppers: Vec<&FinElt> = u.iter().filter(|g| d.leq(g) && e.leq(g)).collect();
                match d.sup(e) {
                    Some(s) => {
                        if !(d.leq(&s) && e.leq(&s)) || uppers.iter().any(|g| !s.leq(g)) {
                            bad.push(format!("sup {d} {e} = {s} is not least"));
                        }
                    }
                    None => {
                        if !uppers.is_empty() {
                            bad.push(format!("{d} {e} have upper bound {} but no sup", uppers[0]));
                        }
                    }
                }
            }
            bad
        });
        failures.extend(rows.into_iter().flatten());
        if let PureType::Arrow(dom, _) = &tau {
            let args = enumerate(dom, RANK, &r);
            for (f, g) in u.iter().cartesian_product(u.iter()).filter(|(f, g)| f.leq(g)) {
                for (a, b) in args.iter().cartesian_product(args.iter()).filter(|(a, b)| a.leq(b)) {
                    if !f.apply(a).leq(&g.apply(b)) {
                        failures.push(format!("apply not monotone at {f} <= {g}, {a} <= {b}"));
                    }
                }
            }
        }
    }

    // mk_fun accepts exactly the step sets whose subsets with joinable
    // arguments have joinable results
    let bb = ty("Bool -> Bool");
    let pb = ty("(Bool * Bool) -> Bool");
    for tau in [bb, pb] {
        let PureType::Arrow(dom, cod) = &tau else { unreachable!() };
        let steps: Vec<(FinElt, FinElt)> = enumerate(dom, 1, &r)
            .into_iter()
            .cartesian_product(enumerate(cod, 1, &r).into_iter().filter(|x| !x.is_bot()))
            .collect();
        for n in 1..=3 {
            for set in steps.iter().cloned().combinations(n) {
                checked += 1;
                let brute = (1..=set.len()).all(|m| {
                    set.iter().combinations(m).all(|sub| {
                        let arg = sub.iter().try_fold(FinElt::Bot, |acc, (a, _)| acc.sup(a));
                        let res = sub.iter().try_fold(FinElt::Bot, |acc, (_, b)| acc.sup(b));
                        arg.is_none() || res.is_some()
                    })
                });
                if mk_fun(&tau, &set, &r).is_ok() != brute {
                    failures.push(format!("mk_fun disagrees on {set:?}"));
                }
            }
        }
    }

    // fuel monotonicity of the bounded evaluator
    let terms = fuel_terms();
    let bad = par::map(mode, &terms, |(t, tau)| {
        let vals: Vec<FinElt> = (0..=9).map(|fuel| lower_term(t, &[], tau, fuel, RANK, &r).unwrap()).collect();
        vals.windows(2).position(|w| !w[0].leq(&w[1])).map(|i| format!("{t} not monotone at fuel {i}"))
    });
    failures.extend(bad.into_iter().flatten());
    Outcome::new(&failures, format!("{checked} elements and step sets, {} terms by fuel 0..9, {} failures", terms.len(), failures.len()))
}

pub type Criterion = (usize, &'static str, fn(Mode) -> Outcome);

pub fn all() -> Vec<Criterion> {
    vec![
        (1, "decision procedures agree with the oracle", criterion1),
        (2, "consistency / entailment of false dichotomy", criterion2),
        (3, "compile and characteristic formula round trips", criterion3),
        (4, "derivable sequents", |_| criterion4()),
        (5, "refinement corpus derivable and validated", criterion5),
        (6, "soundness on random judgments", criterion6),
        (7, "completeness on sound finite judgments", criterion7),
        (8, "order theory and fuel monotonicity", criterion8),
    ]
}
