//! Exhaustive generation of conjunctive formulas, used by the sweeps.

use std::collections::HashMap;
use std::rc::Rc;

use super::Formula;
use crate::syntax::{BaseRegistry, PureType};

/// All conjunctive formulas at `tau` of size at most `max_size`, up to the
/// order and multiplicity of conjuncts: conjunctions have at least two
/// operands, none of them a conjunction or a unit, in increasing order.
/// The output is sorted by size, then by the formula order.
pub fn enumerate_conjunctive(tau: &PureType, max_size: usize, reg: &BaseRegistry) -> Vec<Formula> {
    let mut g = Gen { reg, memo: HashMap::new() };
    let mut out = Vec::new();
    for s in 1..=max_size {
        let mut layer: Vec<Formula> = g.exact(tau, s).as_ref().clone();
        layer.sort();
        out.extend(layer);
    }
    out
}

struct Gen<'a> {
    reg: &'a BaseRegistry,
    memo: HashMap<(String, usize), Rc<Vec<Formula>>>,
}

impl Gen<'_> {
    fn exact(&mut self, tau: &PureType, s: usize) -> Rc<Vec<Formula>> {
        let key = (tau.to_string(), s);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = self.non_and(tau, s);
        if s >= 3 {
            let mut ops = Vec::new();
            for k in 1..=s - 2 {
                for f in self.non_and(tau, k) {
                    if !f.is_top() && !f.is_bot() {
                        ops.push((f, k));
                    }
                }
            }
            ops.sort();
            let mut cur = Vec::new();
            conjunctions(&ops, 0, s, &mut cur, &mut out);
        }
        let v = Rc::new(out);
        self.memo.insert(key, v.clone());
        v
    }

    fn non_and(&mut self, tau: &PureType, s: usize) -> Vec<Formula> {
        let mut out = Vec::new();
        if s == 1 {
            out.push(Formula::top());
            out.push(Formula::bot());
            if let PureType::Base(b) = tau {
                for c in self.reg.carrier(b).unwrap_or(&[]) {
                    out.push(Formula::Atom(c.clone()));
                }
            }
            return out;
        }
        match tau {
            PureType::Prod(a, b) => {
                out.extend(self.exact(a, s - 1).iter().cloned().map(Formula::pi1));
                out.extend(self.exact(b, s - 1).iter().cloned().map(Formula::pi2));
            }
            PureType::Rec(..) => {
                let u = tau.unfold_rec().expect("rec");
                out.extend(self.exact(&u, s - 1).iter().cloned().map(Formula::fold));
            }
            PureType::Arrow(a, b) => {
                for k in 1..s - 1 {
                    let l = self.exact(a, k);
                    let r = self.exact(b, s - 1 - k);
                    for x in l.iter() {
                        for y in r.iter() {
                            out.push(Formula::arrow(x.clone(), y.clone()));
                        }
                    }
                }
            }
            PureType::Base(_) | PureType::Var(_) => {}
        }
        out
    }
}

// Strictly increasing selections of at least two operands whose sizes plus
// joining nodes add up to `left`.
fn conjunctions(
    ops: &[(Formula, usize)],
    from: usize,
    left: usize,
    cur: &mut Vec<Formula>,
    out: &mut Vec<Formula>,
) {
    for i in from..ops.len() {
        let (f, k) = &ops[i];
        let cost = if cur.is_empty() { *k } else { *k + 1 };
        if cost > left {
            continue;
        }
        cur.push(f.clone());
        if cost == left {
            if cur.len() >= 2 {
                out.push(Formula::And(cur.clone()));
            }
        } else {
            conjunctions(ops, i + 1, left - cost, cur, out);
        }
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{check_formula, classify, FormulaClass};

    #[test]
    fn bool_layer_counts() {
        let reg = BaseRegistry::default();
        let fs = enumerate_conjunctive(&PureType::bool(), 3, &reg);
        // true, false, <tt>, <ff>, and <tt> /\ <ff>
        assert_eq!(fs.len(), 5);
        assert!(fs.iter().all(|f| f.size() <= 3));
    }

    #[test]
    fn formulas_are_well_formed_conjunctive_and_distinct() {
        let reg = BaseRegistry::default();
        for tau in [
            PureType::prod(PureType::bool(), PureType::bool()),
            PureType::arrow(PureType::bool(), PureType::bool()),
            PureType::stream(PureType::bool()),
        ] {
            let fs = enumerate_conjunctive(&tau, 5, &reg);
            let mut seen = std::collections::BTreeSet::new();
            for f in &fs {
                assert_eq!(classify(f), FormulaClass::Conjunctive, "{f}");
                assert!(check_formula(f, &tau, &reg).is_ok(), "{f} at {tau}");
                assert!(f.size() <= 5);
                assert!(seen.insert(f.clone()), "duplicate {f}");
            }
        }
    }
}
