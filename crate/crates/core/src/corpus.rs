//! The bundled judgment corpus and semantic cross-validation of verdicts.
//!
//! `sources` checks the stream and tree functions against their pure types;
//! the other files state their refinement specifications.

use crate::checker::{eta_expand, CheckOptions, Judgment};
use crate::evalsem::{member, Membership};
use crate::findom::FinElt;
use crate::judgment::{parse_file, FileError, Stanza};
use crate::logic::{compile, dnf_disjuncts, truncate, Compiled};
use crate::subtype::char_type;
use crate::syntax::{BaseRegistry, NameSupply, PureType};

/// A bundled judgment file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusFile {
    pub name: &'static str,
    pub text: &'static str,
}

pub const FILES: &[CorpusFile] = &[
    CorpusFile { name: "sources.dtlf", text: include_str!("../../../corpus/sources.dtlf") },
    CorpusFile { name: "map.dtlf", text: include_str!("../../../corpus/map.dtlf") },
    CorpusFile { name: "filter.dtlf", text: include_str!("../../../corpus/filter.dtlf") },
    CorpusFile { name: "diag.dtlf", text: include_str!("../../../corpus/diag.dtlf") },
    CorpusFile { name: "bft.dtlf", text: include_str!("../../../corpus/bft.dtlf") },
];

pub fn file(name: &str) -> Option<&'static CorpusFile> {
    FILES.iter().find(|f| f.name == name || f.name.trim_end_matches(".dtlf") == name)
}

/// The stanzas of a bundled file with the truncation depth forced to `k`.
pub fn stanzas_at(name: &str, k: usize, reg: &BaseRegistry) -> Result<Vec<Stanza>, FileError> {
    let f = file(name).ok_or_else(|| FileError::Directive { line: 0, msg: format!("no corpus file `{name}`") })?;
    let mut ss = parse_file(f.text, reg, &CheckOptions::default())?;
    for s in &mut ss {
        s.opts.k = k;
    }
    Ok(ss)
}

// Replaces bottoms at base and recursive positions by `fill`-chosen
// constants, unfolding recursive types `depth` more times.
fn complete(tau: &PureType, d: &FinElt, depth: usize, pick: usize, reg: &BaseRegistry) -> FinElt {
    match (tau, d) {
        (PureType::Base(b), FinElt::Bot) => match reg.carrier(b) {
            Some(cs) if !cs.is_empty() => FinElt::Atom(cs[pick % cs.len()].clone()),
            _ => FinElt::Bot,
        },
        (PureType::Prod(s, t), FinElt::Bot) => FinElt::pair(
            complete(s, &FinElt::Bot, depth, pick, reg),
            complete(t, &FinElt::Bot, depth, pick, reg),
        ),
        (PureType::Prod(s, t), FinElt::Pair(a, b)) => {
            FinElt::pair(complete(s, a, depth, pick, reg), complete(t, b, depth, pick, reg))
        }
        (PureType::Rec(..), FinElt::Bot) if depth > 0 => {
            let u = tau.unfold_rec().expect("rec");
            FinElt::fold(complete(&u, &FinElt::Bot, depth - 1, pick, reg))
        }
        (PureType::Rec(..), FinElt::Fold(a)) => {
            let u = tau.unfold_rec().expect("rec");
            FinElt::fold(complete(&u, a, depth, pick, reg))
        }
        _ => d.clone(),
    }
}

/// Cross-validates a judgment semantically: after eta expansion, the term
/// is evaluated under concrete instantiations of the context (the
/// generators of the truncated context formulas and completions of them
/// by each constant) and must satisfy the truncated goal. Returns the
/// number of instantiations checked, or a description of the first one
/// that was not confirmed.
pub fn cross_validate(j: &Judgment, opts: &CheckOptions, reg: &BaseRegistry) -> Result<usize, String> {
    let parts = eta_expand(j, &mut NameSupply::default()).map_err(|e| e.to_string())?;
    let mut count = 0;
    for p in &parts {
        let mut entries: Vec<(crate::syntax::Name, PureType, Vec<FinElt>)> = Vec::new();
        for (x, t) in &p.ctx {
            let (tau, phi) = char_type(t);
            let phi = truncate(&phi, opts.k).map_err(|e| e.to_string())?;
            let mut gens = Vec::new();
            for d in dnf_disjuncts(&phi).map_err(|e| e.to_string())? {
                if let Compiled::Up(e) = compile(&d).map_err(|e| e.to_string())? {
                    gens.push(e);
                }
            }
            if gens.is_empty() {
                // no instantiation exists; the judgment holds vacuously
                return Ok(count);
            }
            entries.push((x.clone(), tau, gens));
        }
        let (_, goal) = char_type(&p.goal);
        let goal = truncate(&goal, opts.k).map_err(|e| e.to_string())?;
        // variant 0 uses the generators; variant 1 + c completes them with
        // the c-th constant two unfoldings deep
        let widest = entries.iter().map(|(_, _, g)| g.len()).max().unwrap_or(1);
        for g in 0..widest {
            for variant in 0..3 {
                let env: Vec<_> = entries
                    .iter()
                    .map(|(x, tau, gens)| {
                        let e = &gens[g % gens.len()];
                        let v = if variant == 0 { e.clone() } else { complete(tau, e, 2, variant - 1, reg) };
                        (x.clone(), v)
                    })
                    .collect();
                match member(&p.term, &env, &goal, opts.fuel) {
                    Ok(Membership::Holds) => count += 1,
                    Ok(Membership::Unknown) => {
                        let shown: Vec<String> = env.iter().map(|(x, v)| format!("{x} = {v}")).collect();
                        return Err(format!("not confirmed under {}", shown.join(", ")));
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
    }
    Ok(count)
}
