//! The subcommands. Each returns text, a JSON value and whether the verdict
//! was positive; input errors are reported through [`CliError`].

use std::fmt::Write as _;
use std::path::Path;

use dtlf_core::checker::{check_normal, CheckOptions, Judgment, Trace, Verdict};
use dtlf_core::corpus::{self, FILES};
use dtlf_core::evalsem::{
    judgment_oracle, lower_term, member, oracle_consistent, oracle_entail, EvalError, JudgmentOracle, Machine,
    Membership, OracleError,
};
use dtlf_core::judgment::{parse_file, FileError, Stanza};
use dtlf_core::logic::{
    check_formula, classify, compile, consistent_f, dnf_disjuncts, entail_conj, entail_fin, enumerate_conjunctive,
    truncate, CompiledDnf, CompiledNorm, FormulaClass, FormulaTypeError, LogicError,
};
use dtlf_core::par::{self, Mode};
use dtlf_core::syntax::{
    infer_pure, parse_entail_input, parse_formula, parse_term, parse_type, EntailInput, ParseError, RegistryError,
};
use dtlf_core::{BaseRegistry, Compiled, Formula, PureType};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::{Cli, Cmd};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("{0}")]
    Bases(#[from] RegistryError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    File(String),
    #[error("{0}")]
    Formula(#[from] FormulaTypeError),
    #[error("{0}")]
    Logic(#[from] LogicError),
    #[error("{0}")]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Usage(String),
}

pub struct Output {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

fn read_input(arg: &str) -> Result<String, CliError> {
    if arg == "-" {
        return std::io::read_to_string(std::io::stdin()).map_err(|err| CliError::Io { path: "<stdin>".into(), err });
    }
    let p = Path::new(arg);
    let looks_like_path = arg.ends_with(".dtlf") || arg.starts_with('/') || arg.starts_with("./");
    if p.is_file() || looks_like_path {
        std::fs::read_to_string(p).map_err(|err| CliError::Io { path: arg.into(), err })
    } else {
        Ok(arg.to_string())
    }
}

fn registry(cli: &Cli) -> Result<BaseRegistry, CliError> {
    match &cli.bases {
        None => Ok(BaseRegistry::default()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|err| CliError::Io { path: p.display().to_string(), err })?;
            Ok(BaseRegistry::parse_decls(&text)?)
        }
    }
}

fn options(cli: &Cli) -> CheckOptions {
    let mut o = CheckOptions::default();
    override_options(cli, &mut o);
    o
}

fn override_options(cli: &Cli, o: &mut CheckOptions) {
    if let Some(k) = cli.k {
        o.k = k;
    }
    if let Some(n) = cli.nfix {
        o.n_fix = n;
    }
    if let Some(f) = cli.fuel {
        o.fuel = f;
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let reg = registry(cli)?;
    match &cli.cmd {
        Cmd::Entail { input } => entail(cli, &reg, &read_input(input)?),
        Cmd::Consistent { input } => consistent(cli, &reg, &read_input(input)?),
        Cmd::Compile { input } => compile_cmd(cli, &reg, &read_input(input)?),
        Cmd::Check { inputs, brief } => check_cmd(cli, &reg, inputs, *brief),
        Cmd::Eval { term, member } => eval(cli, &reg, &read_input(term)?, member.as_deref()),
        Cmd::Oracle { input: Some(input), .. } => oracle_query(cli, &reg, &read_input(input)?),
        Cmd::Oracle { sweep: Some(ty), size, .. } => oracle_sweep(cli, &reg, ty, *size),
        Cmd::Oracle { .. } => Err(CliError::Usage("oracle needs a query or --sweep TYPE".into())),
        Cmd::Corpus { names, sequential } => corpus_cmd(cli, &reg, names, *sequential),
    }
}

/// Parses `tau ; f1 ; ...` with exactly `n` formulas, checks them at `tau`
/// and truncates them at `k`.
fn formulas(text: &str, n: usize, k: usize, reg: &BaseRegistry) -> Result<(PureType, Vec<Formula>), CliError> {
    let EntailInput { tau, formulas } = parse_entail_input(text.trim(), reg)?;
    if formulas.len() != n {
        return Err(CliError::Usage(format!("expected `tau` followed by {n} `; formula` parts, found {}", formulas.len())));
    }
    let mut out = Vec::with_capacity(n);
    for f in &formulas {
        check_formula(f, &tau, reg)?;
        out.push(truncate(f, k)?);
    }
    Ok((tau, out))
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn entail(cli: &Cli, reg: &BaseRegistry, text: &str) -> Result<Output, CliError> {
    let o = options(cli);
    let (tau, fs) = formulas(text, 2, o.k, reg)?;
    let (psi, phi) = (&fs[0], &fs[1]);
    if classify(phi) == FormulaClass::General {
        return Err(CliError::Usage(format!("right-hand side `{phi}` is not in normal form after truncation")));
    }
    let holds = entail_fin(psi, phi)?;
    let lhs = CompiledDnf::of(psi)?;
    let rhs = CompiledNorm::of(phi)?;
    let verdict = if holds { "ENTAILS" } else { "NOT-ENTAILS" };
    let lhs_s = strings(&lhs.disjuncts);
    let rhs_s: Vec<Vec<String>> = rhs.clauses.iter().map(|c| strings(c)).collect();
    let mut text = format!("{verdict}\n");
    let _ = writeln!(text, "  type  {tau}\n  psi   {psi}\n  phi   {phi}");
    let _ = writeln!(text, "  psi generators: {}", if lhs_s.is_empty() { "(none)".into() } else { lhs_s.join(" ") });
    for (i, c) in rhs_s.iter().enumerate() {
        let _ = writeln!(text, "  phi clause {i}: {}", if c.is_empty() { "(empty)".into() } else { c.join(" ") });
    }
    let json = json!({
        "verdict": verdict,
        "type": tau.to_string(),
        "k": o.k,
        "psi": psi.to_string(),
        "phi": phi.to_string(),
        "psi_generators": lhs_s,
        "phi_clauses": rhs_s,
    });
    Ok(Output { text, json, ok: holds })
}

fn consistent(cli: &Cli, reg: &BaseRegistry, text: &str) -> Result<Output, CliError> {
    let o = options(cli);
    let (_, fs) = formulas(text, 1, o.k, reg)?;
    let phi = &fs[0];
    if classify(phi) != FormulaClass::Conjunctive {
        return Err(CliError::Usage(format!("`{phi}` is not conjunctive after truncation")));
    }
    let c = compile(phi)?;
    let (text, json) = match &c {
        Compiled::Up(d) => (format!("CONSISTENT d={d}\n"), json!({ "verdict": "CONSISTENT", "d": d.to_string() })),
        Compiled::Empty => ("INCONSISTENT\n".to_string(), json!({ "verdict": "INCONSISTENT" })),
    };
    Ok(Output { text, json, ok: c.up().is_some() })
}

fn compile_cmd(cli: &Cli, reg: &BaseRegistry, text: &str) -> Result<Output, CliError> {
    let o = options(cli);
    let (_, fs) = formulas(text, 1, o.k, reg)?;
    let phi = &fs[0];
    let parts: Vec<(String, String)> = if phi.is_conjunctive() {
        vec![(phi.to_string(), compile(phi)?.to_string())]
    } else {
        let mut v = Vec::new();
        for d in dnf_disjuncts(phi)? {
            v.push((d.to_string(), compile(&d)?.to_string()));
        }
        v
    };
    let mut text = String::new();
    for (f, c) in &parts {
        let _ = writeln!(text, "{c}  ; {f}");
    }
    let json = json!({
        "formula": phi.to_string(),
        "disjuncts": parts.iter().map(|(f, c)| json!({ "formula": f, "compiled": c })).collect::<Vec<_>>(),
    });
    Ok(Output { text, json, ok: true })
}

#[derive(Serialize)]
struct CheckReport {
    source: String,
    line: usize,
    label: Option<String>,
    judgment: String,
    verdict: &'static str,
    k: usize,
    n_fix: usize,
    fuel: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Trace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subgoal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<String>,
}

impl CheckReport {
    fn positive(&self) -> bool {
        self.verdict == "derivable"
    }
}

fn shorten(mut s: String) -> String {
    const MAX: usize = 240;
    if s.len() > MAX {
        let mut cut = MAX - 3;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str("...");
    }
    s
}

// Semantic second opinion on a judgment the checker could not derive.
fn oracle_opinion(j: &Judgment, o: &CheckOptions, rank: usize, reg: &BaseRegistry) -> String {
    match judgment_oracle(&j.ctx, &j.term, &j.goal, o.k, rank, o.fuel, reg) {
        Ok(JudgmentOracle::Sound { instantiations }) => {
            format!("no violation among {instantiations} rank-{rank} instantiations")
        }
        Ok(JudgmentOracle::Violated { env, value }) => {
            let shown: Vec<String> = env.iter().map(|(x, v)| format!("{x} = {v}")).collect();
            let under = if shown.is_empty() { String::new() } else { format!(" under {}", shown.join(", ")) };
            format!("UNSOUND: value {}{} violates the goal", shorten(value.to_string()), shorten(under))
        }
        Err(e) => format!("unavailable ({e})"),
    }
}

fn check_stanza(source: &str, s: &Stanza, rank: usize, with_oracle: bool, reg: &BaseRegistry) -> CheckReport {
    let mut r = CheckReport {
        source: source.to_string(),
        line: s.line,
        label: s.label.clone(),
        judgment: s.judgment.to_string(),
        verdict: "derivable",
        k: s.opts.k,
        n_fix: s.opts.n_fix,
        fuel: s.opts.fuel,
        trace: None,
        reason: None,
        subgoal: None,
        oracle: None,
    };
    match check_normal(&s.judgment, &s.opts, reg) {
        Verdict::Derivable(t) => r.trace = Some(t),
        Verdict::Unknown { reason, subgoal } => {
            r.verdict = "unknown";
            r.reason = Some(reason);
            r.subgoal = Some(subgoal);
            if with_oracle {
                r.oracle = Some(oracle_opinion(&s.judgment, &s.opts, s.rank.unwrap_or(rank), reg));
            }
        }
        Verdict::IllTyped(e) => {
            r.verdict = "ill-typed";
            r.reason = Some(e.to_string());
        }
    }
    r
}

fn render(r: &CheckReport, with_trace: bool, out: &mut String) {
    let label = r.label.as_deref().map(|l| format!(" [{l}]")).unwrap_or_default();
    let _ = writeln!(out, "{}:{}{label}: {}", r.source, r.line, r.verdict.to_uppercase());
    let _ = writeln!(out, "  {}", r.judgment);
    match &r.trace {
        Some(t) => {
            let _ = writeln!(
                out,
                "  k={} nfix={} fuel={}: {} steps, {} evaluation steps",
                r.k,
                r.n_fix,
                r.fuel,
                t.steps.len(),
                t.eval_steps
            );
            if with_trace {
                for l in t.to_string().lines() {
                    let _ = writeln!(out, "  {l}");
                }
            }
        }
        None => {
            let _ = writeln!(out, "  k={} nfix={} fuel={}", r.k, r.n_fix, r.fuel);
            if let Some(reason) = &r.reason {
                let _ = writeln!(out, "  reason: {reason}");
            }
            if let Some(g) = &r.subgoal {
                let _ = writeln!(out, "  subgoal: {g}");
            }
            if let Some(o) = &r.oracle {
                let _ = writeln!(out, "  oracle: {o}");
            }
        }
    }
}

fn summarize(reports: Vec<CheckReport>, with_trace: bool) -> Output {
    let mut text = String::new();
    for r in &reports {
        render(r, with_trace, &mut text);
    }
    let derivable = reports.iter().filter(|r| r.positive()).count();
    let _ = writeln!(text, "{derivable}/{} derivable", reports.len());
    let ok = derivable == reports.len();
    let json = json!({ "derivable": derivable, "total": reports.len(), "judgments": reports });
    Output { text, json, ok }
}

fn check_cmd(cli: &Cli, reg: &BaseRegistry, inputs: &[String], brief: bool) -> Result<Output, CliError> {
    let mut reports = Vec::new();
    for input in inputs {
        let text = read_input(input)?;
        let source = if Path::new(input).is_file() { input.clone() } else { "<inline>".to_string() };
        let mut stanzas = parse_file(&text, reg, &CheckOptions::default())
            .map_err(|e: FileError| CliError::File(format!("{source}: {e}")))?;
        if stanzas.is_empty() {
            return Err(CliError::Usage(format!("{source}: no judgments")));
        }
        for s in &mut stanzas {
            override_options(cli, &mut s.opts);
        }
        reports.extend(stanzas.iter().map(|s| check_stanza(&source, s, cli.rank, true, reg)));
    }
    if reports.iter().any(|r| r.verdict == "ill-typed") {
        let mut msg = String::new();
        for r in reports.iter().filter(|r| r.verdict == "ill-typed") {
            let _ = write!(msg, "\n{}:{}: {}", r.source, r.line, r.reason.as_deref().unwrap_or(""));
        }
        return Err(CliError::Usage(format!("ill-typed judgment{msg}")));
    }
    Ok(summarize(reports, !brief))
}

fn corpus_cmd(cli: &Cli, reg: &BaseRegistry, names: &[String], sequential: bool) -> Result<Output, CliError> {
    let files: Vec<_> = if names.is_empty() {
        FILES.iter().collect()
    } else {
        names
            .iter()
            .map(|n| corpus::file(n).ok_or_else(|| CliError::Usage(format!("no bundled file `{n}`"))))
            .collect::<Result<_, _>>()?
    };
    let mut jobs = Vec::new();
    for f in files {
        let mut ss = parse_file(f.text, reg, &CheckOptions::default())
            .map_err(|e| CliError::File(format!("{}: {e}", f.name)))?;
        for s in &mut ss {
            override_options(cli, &mut s.opts);
        }
        jobs.extend(ss.into_iter().map(|s| (f.name, s)));
    }
    let mode = if sequential { Mode::Sequential } else { Mode::Parallel };
    let reports = par::map(mode, &jobs, |(name, s)| check_stanza(name, s, cli.rank, false, reg));
    Ok(summarize(reports, false))
}

fn eval(cli: &Cli, reg: &BaseRegistry, text: &str, member_f: Option<&str>) -> Result<Output, CliError> {
    let o = options(cli);
    // a top-level ascription `M : T` is accepted without parentheses
    let t = match parse_term(text.trim(), reg) {
        Ok(t) => t,
        Err(e) => parse_term(&format!("({})", text.trim()), reg).map_err(|_| e)?,
    };
    if let Some(x) = t.free_vars().into_iter().next() {
        return Err(CliError::Usage(format!("term has the free variable `{x}`")));
    }
    // typed terms are probed at every function argument of the given rank;
    // untyped ones are read back as far as evaluation forced them
    let (ty, value) = match infer_pure(&[], &t, reg) {
        Ok(tau) => {
            let v = lower_term(&t, &[], &tau, o.fuel, cli.rank, reg)?;
            (Some(tau), v)
        }
        Err(_) => {
            let m = Machine::new(o.budget);
            let th = m.delay(&t, &m.fin_env(&[]), o.fuel);
            m.force(&th)?;
            (None, m.readback(&th)?)
        }
    };
    let mut text = format!("{value}\n");
    let mut json = json!({
        "term": t.to_string(),
        "type": ty.as_ref().map(ToString::to_string),
        "fuel": o.fuel,
        "value": value.to_string(),
    });
    let mut ok = true;
    if let Some(f) = member_f {
        let phi = parse_formula(f, reg)?;
        if let Some(tau) = &ty {
            check_formula(&phi, tau, reg)?;
        }
        let phi = truncate(&phi, o.k)?;
        let holds = member(&t, &[], &phi, o.fuel).map_err(|e| CliError::Usage(e.to_string()))? == Membership::Holds;
        let shown = if holds { "holds" } else { "unknown" };
        let _ = writeln!(text, "member {phi}: {shown}");
        json["member"] = json!({ "formula": phi.to_string(), "result": shown });
        ok = holds;
    }
    Ok(Output { text, json, ok })
}

fn oracle_query(cli: &Cli, reg: &BaseRegistry, text: &str) -> Result<Output, CliError> {
    let o = options(cli);
    let n = parse_entail_input(text.trim(), reg)?.formulas.len();
    let (tau, fs) = match n {
        1 | 2 => formulas(text, n, o.k, reg)?,
        _ => return Err(CliError::Usage("expected `tau ; phi` or `tau ; psi ; phi`".into())),
    };
    let (kind, decided, oracle) = if n == 1 {
        let c = if fs[0].is_conjunctive() { consistent_f(&fs[0])? } else { !CompiledDnf::of(&fs[0])?.is_empty() };
        ("consistent", c, oracle_consistent(&tau, &fs[0], cli.rank, reg)?)
    } else {
        ("entails", entail_fin(&fs[0], &fs[1])?, oracle_entail(&tau, &fs[0], &fs[1], cli.rank, reg)?)
    };
    let agree = decided == oracle;
    let text = format!(
        "{kind}: decided {decided}, oracle {oracle} at rank {}\nagree: {}/1\n",
        cli.rank,
        usize::from(agree)
    );
    let json = json!({ "query": kind, "decided": decided, "oracle": oracle, "rank": cli.rank, "agree": agree });
    Ok(Output { text, json, ok: agree })
}

#[derive(Serialize)]
struct Disagreement {
    query: &'static str,
    psi: String,
    phi: Option<String>,
    decided: bool,
    oracle: bool,
}

fn oracle_sweep(cli: &Cli, reg: &BaseRegistry, ty: &str, size: usize) -> Result<Output, CliError> {
    let tau = parse_type(ty, reg)?;
    if cli.rank > dtlf_core::evalsem::MAX_ORACLE_RANK {
        return Err(OracleError::RankTooLarge(cli.rank).into());
    }
    let fs = enumerate_conjunctive(&tau, size, reg);
    let rank = cli.rank;
    let rows = par::map(Mode::Parallel, &fs, |psi| -> Result<(usize, Vec<Disagreement>), CliError> {
        let mut n = 1;
        let mut bad = Vec::new();
        let c = consistent_f(psi)?;
        let oc = oracle_consistent(&tau, psi, rank, reg)?;
        if c != oc {
            bad.push(Disagreement { query: "consistent", psi: psi.to_string(), phi: None, decided: c, oracle: oc });
        }
        for phi in &fs {
            n += 1;
            let e = entail_conj(psi, phi)?;
            let oe = oracle_entail(&tau, psi, phi, rank, reg)?;
            if e != oe {
                bad.push(Disagreement {
                    query: "entails",
                    psi: psi.to_string(),
                    phi: Some(phi.to_string()),
                    decided: e,
                    oracle: oe,
                });
            }
        }
        Ok((n, bad))
    });
    let mut total = 0;
    let mut bad = Vec::new();
    for r in rows {
        let (n, b) = r?;
        total += n;
        bad.extend(b);
    }
    let agreed = total - bad.len();
    let mut text = String::new();
    let _ = writeln!(text, "{} formulas at {tau} of size <= {size}, rank {rank}", fs.len());
    for d in &bad {
        let rhs = d.phi.as_deref().map(|p| format!(" |- {p}")).unwrap_or_default();
        let _ = writeln!(text, "DISAGREE {} {}{rhs}: decided {}, oracle {}", d.query, d.psi, d.decided, d.oracle);
    }
    let _ = writeln!(text, "agree: {agreed}/{total}");
    let json = json!({
        "type": tau.to_string(),
        "size": size,
        "rank": rank,
        "formulas": fs.len(),
        "agree": agreed,
        "total": total,
        "disagreements": bad,
    });
    Ok(Output { text, json, ok: bad.is_empty() })
}
