//! Derivation traces in post-order, with a replay validator.

use std::fmt;

use serde::Serialize;

use crate::logic::{entail_fin, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `M : {t | true}` from the pure premise.
    Top,
    /// A context entry with an empty extension.
    BotLeft,
    /// Conjunction introduction over goal clauses.
    AndRight,
    /// Disjunction elimination over context disjuncts.
    OrLeft,
    /// Weakening to a goal clause containing the proved disjunct.
    OrRight,
    /// Subsumption by entailment.
    Sub,
    Var,
    Const,
    Lam,
    App,
    Pair,
    Proj,
    Fold,
    Unfold,
    Case,
    Fix,
    /// Product and function goals split into normal judgments.
    Eta,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Top => "top",
            Rule::BotLeft => "bot-left",
            Rule::AndRight => "and-right",
            Rule::OrLeft => "or-left",
            Rule::OrRight => "or-right",
            Rule::Sub => "sub",
            Rule::Var => "var",
            Rule::Const => "const",
            Rule::Lam => "lam",
            Rule::App => "app",
            Rule::Pair => "pair",
            Rule::Proj => "proj",
            Rule::Fold => "fold",
            Rule::Unfold => "unfold",
            Rule::Case => "case",
            Rule::Fix => "fix",
            Rule::Eta => "eta",
        };
        f.write_str(s)
    }
}

/// A side condition of a step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Fact {
    /// `lhs |- rhs`, re-decided on replay.
    Entails {
        #[serde(serialize_with = "as_text")]
        lhs: Formula,
        #[serde(serialize_with = "as_text")]
        rhs: Formula,
    },
    /// A premise of the pure type system, established before checking.
    Pure(String),
}

fn as_text<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: Rule,
    /// `ctx |- term : formula`
    pub judgment: String,
    /// Indices of earlier steps.
    pub premises: Vec<usize>,
    pub facts: Vec<Fact>,
}

/// Steps in post-order: premises come before their conclusion and the
/// last step concludes the checked judgment.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub steps: Vec<Step>,
    pub k: usize,
    pub n_fix: usize,
    pub fuel: u32,
    /// Evaluation steps spent by the semantic searches.
    pub eval_steps: u64,
}

impl Trace {
    pub fn push(&mut self, rule: Rule, judgment: String, premises: Vec<usize>, facts: Vec<Fact>) -> usize {
        self.steps.push(Step { rule, judgment, premises, facts });
        self.steps.len() - 1
    }

    pub fn root(&self) -> Option<&Step> {
        self.steps.last()
    }

    /// Appends `other`, renumbering its premises; returns the index of its root.
    pub fn append(&mut self, other: Trace) -> Option<usize> {
        let off = self.steps.len();
        let n = other.steps.len();
        self.eval_steps += other.eval_steps;
        for mut s in other.steps {
            for p in &mut s.premises {
                *p += off;
            }
            self.steps.push(s);
        }
        (n > 0).then(|| off + n - 1)
    }

    /// Checks that every premise is an earlier step and every entailment
    /// side condition holds.
    pub fn replay(&self) -> Result<(), String> {
        if self.steps.is_empty() {
            return Err("empty trace".into());
        }
        for (i, s) in self.steps.iter().enumerate() {
            if let Some(p) = s.premises.iter().find(|&&p| p >= i) {
                return Err(format!("step {i} ({}) cites later step {p}", s.rule));
            }
            for f in &s.facts {
                if let Fact::Entails { lhs, rhs } = f {
                    match entail_fin(lhs, rhs) {
                        Ok(true) => {}
                        Ok(false) => {
                            return Err(format!("step {i} ({}): {lhs} does not entail {rhs}", s.rule))
                        }
                        Err(e) => return Err(format!("step {i} ({}): {e}", s.rule)),
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of steps per rule, in rule order.
    pub fn rule_counts(&self) -> Vec<(Rule, usize)> {
        let mut out: Vec<(Rule, usize)> = Vec::new();
        for s in &self.steps {
            match out.iter_mut().find(|(r, _)| *r == s.rule) {
                Some((_, n)) => *n += 1,
                None => out.push((s.rule, 1)),
            }
        }
        out
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            write!(f, "{i:>4} {:<9} {}", s.rule.to_string(), s.judgment)?;
            if !s.premises.is_empty() {
                let ps: Vec<String> = s.premises.iter().map(|p| p.to_string()).collect();
                write!(f, "  [from {}]", ps.join(","))?;
            }
            writeln!(f)?;
            for fact in &s.facts {
                match fact {
                    Fact::Entails { lhs, rhs } => writeln!(f, "         by {lhs} |- {rhs}")?,
                    Fact::Pure(p) => writeln!(f, "         pure {p}")?,
                }
            }
        }
        Ok(())
    }
}
