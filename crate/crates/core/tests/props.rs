//! Property tests over generated formulas, terms and judgments.

mod common;

use common::{reg, sweep_types, ty};
use dtlf_core::checker::{check, check_normal, eta_expand, CheckOptions, Judgment, Verdict};
use dtlf_core::evalsem::{judgment_oracle, oracle_entail, JudgmentOracle};
use dtlf_core::gen::{judgment_at, GenConfig, Generator};
use dtlf_core::logic::{entail_fin, enumerate_conjunctive, push_modalities, simplify, to_dnf, truncate};
use dtlf_core::syntax::{parse_formula, parse_judgment_text, parse_term, NameSupply};
use dtlf_core::{Formula, RefType};
use proptest::prelude::*;

fn pool(i: usize) -> (dtlf_core::PureType, Vec<Formula>) {
    let tau = sweep_types()[i % 4].clone();
    let fs = enumerate_conjunctive(&tau, 5, &reg());
    (tau, fs)
}

// A formula combining up to four pool formulas with /\ and \/.
fn mixed(fs: &[Formula], picks: &[usize], ops: &[bool]) -> Formula {
    let mut acc = fs[picks[0] % fs.len()].clone();
    for (p, and) in picks[1..].iter().zip(ops) {
        let g = fs[p % fs.len()].clone();
        acc = if *and { Formula::and([acc, g]) } else { Formula::or([acc, g]) };
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_monotone(i in 0usize..1000, k in 0usize..4) {
        let (_, fs) = pool(3);
        let phi = fs[i % fs.len()].clone();
        let b = Formula::always(Formula::hd(phi.clone()));
        let d = Formula::eventually(Formula::hd(phi));
        prop_assert!(entail_fin(&truncate(&b, k + 1).unwrap(), &truncate(&b, k).unwrap()).unwrap());
        prop_assert!(entail_fin(&truncate(&d, k).unwrap(), &truncate(&d, k + 1).unwrap()).unwrap());
    }

    #[test]
    fn normal_forms_preserve_meaning(t in 0usize..4, picks in proptest::collection::vec(0usize..1000, 1..4),
                                     ops in proptest::collection::vec(any::<bool>(), 3)) {
        let (tau, fs) = pool(t);
        let phi = mixed(&fs, &picks, &ops);
        let r = reg();
        for g in [simplify(&phi), push_modalities(&phi), to_dnf(&phi).unwrap()] {
            prop_assert!(oracle_entail(&tau, &phi, &g, 2, &r).unwrap(), "{} vs {}", phi, g);
            prop_assert!(oracle_entail(&tau, &g, &phi, 2, &r).unwrap(), "{} vs {}", g, phi);
        }
    }

    #[test]
    fn entail_fin_matches_oracle_on_disjunctions(t in 0usize..4, a in proptest::collection::vec(0usize..1000, 1..3),
                                                  b in proptest::collection::vec(0usize..1000, 1..3)) {
        let (tau, fs) = pool(t);
        let psi = mixed(&fs, &a, &[false, false]);
        let phi = mixed(&fs, &b, &[false, false]);
        let r = reg();
        prop_assert_eq!(entail_fin(&psi, &phi).unwrap(), oracle_entail(&tau, &psi, &phi, 2, &r).unwrap());
    }

    #[test]
    fn eta_expansion_preserves_oracle_verdict(seed in any::<u64>()) {
        let r = reg();
        let mut g = Generator::new(seed, GenConfig::default(), &r);
        let b = ty("Bool");
        let bb = ty("Bool -> Bool");
        let term = g.term(&[], &bb, 6);
        let (dom, cod) = (g.conjunctive(&b), g.formula(&b));
        let j = Judgment {
            ctx: vec![],
            term,
            goal: RefType::arrow(RefType::Refine(b.clone(), dom), RefType::Refine(b.clone(), cod)),
        };
        let whole = matches!(judgment_oracle(&j.ctx, &j.term, &j.goal, 2, 2, 16, &r).unwrap(), JudgmentOracle::Sound { .. });
        let parts = eta_expand(&j, &mut NameSupply::default()).unwrap();
        prop_assert_eq!(parts.len(), 1);
        let split = parts.iter().all(|p| matches!(judgment_oracle(&p.ctx, &p.term, &p.goal, 2, 2, 16, &r).unwrap(), JudgmentOracle::Sound { .. }));
        prop_assert_eq!(whole, split, "{}", j);
        // the two checker pipelines agree on these judgments
        let o = CheckOptions::default();
        prop_assert_eq!(check(&j, &o, &r).is_derivable(), check_normal(&j, &o, &r).is_derivable());
    }

    #[test]
    fn more_fix_iterations_never_lose_derivations(i in 0u64..10_000) {
        let r = reg();
        let j = judgment_at(0xab, i, &GenConfig::default(), &r);
        let o = CheckOptions { n_fix: 2, ..CheckOptions::default() };
        if check(&j, &o, &r).is_derivable() {
            let more = CheckOptions { n_fix: 3, ..o };
            prop_assert!(check(&j, &more, &r).is_derivable(), "{}", j);
        }
    }

    #[test]
    fn checking_is_deterministic(i in 0u64..10_000) {
        let r = reg();
        let j = judgment_at(0xcd, i, &GenConfig::default(), &r);
        let o = CheckOptions::default();
        prop_assert_eq!(check(&j, &o, &r), check(&j, &o, &r));
    }

    #[test]
    fn printed_judgments_parse_back(i in 0u64..10_000) {
        let r = reg();
        let j = judgment_at(0xef, i, &GenConfig::default(), &r);
        let back: Judgment = parse_judgment_text(&j.to_string(), &r).unwrap().into();
        prop_assert_eq!(&back, &j);
        prop_assert_eq!(parse_term(&j.term.to_string(), &r).unwrap(), j.term.clone());
    }
}

#[test]
fn derivable_traces_replay_and_end_at_the_goal() {
    let r = reg();
    let j: Judgment = parse_judgment_text(
        "f : {Bool -> Bool | <tt> -o <ff>}, b : {Bool | <tt> \\/ <ff>} |- if b then f b else tt : {Bool | <ff> \\/ <tt>}",
        &r,
    )
    .unwrap()
    .into();
    let Verdict::Derivable(t) = check(&j, &CheckOptions::default(), &r) else { panic!() };
    t.replay().unwrap();
    assert!(t.root().unwrap().judgment.contains("|- case b of"));
    assert_eq!(t.k, 2);
}

#[test]
fn schema_goals_need_truncation_depth() {
    let r = reg();
    let phi = parse_formula("[] [hd] <tt>", &r).unwrap();
    assert!(entail_fin(&truncate(&phi, 3).unwrap(), &truncate(&phi, 2).unwrap()).unwrap());
    assert!(!entail_fin(&truncate(&phi, 2).unwrap(), &truncate(&phi, 3).unwrap()).unwrap());
}
