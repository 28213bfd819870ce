use super::lexer::{is_keyword, lex, Tok, Token};
use super::{name, BaseRegistry, Name, NameSupply, ParseError, PureType, RefType, Term};
use crate::logic::Formula;

/// `tau ; f1 ; f2 ...` as read by the entailment and consistency commands.
#[derive(Clone, Debug, PartialEq)]
pub struct EntailInput {
    pub tau: PureType,
    pub formulas: Vec<Formula>,
}

/// `x : T, ... |- M : T`
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedJudgment {
    pub ctx: Vec<(Name, RefType)>,
    pub term: Term,
    pub goal: RefType,
}

pub fn parse_type(text: &str, reg: &BaseRegistry) -> Result<PureType, ParseError> {
    let mut p = Parser::new(text, reg, &[])?;
    let at = p.here();
    let t = p.ref_type()?;
    p.expect_eof()?;
    match t {
        RefType::Pure(t) => Ok(t),
        _ => Err(at.error("expected a pure type, found a refinement")),
    }
}

pub fn parse_ref_type(text: &str, reg: &BaseRegistry) -> Result<RefType, ParseError> {
    let mut p = Parser::new(text, reg, &[])?;
    let t = p.ref_type()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_formula(text: &str, reg: &BaseRegistry) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, reg, &[])?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses a closed or open term; free identifiers that name constants of the
/// registry become constants.
pub fn parse_term(text: &str, reg: &BaseRegistry) -> Result<Term, ParseError> {
    parse_term_in(text, reg, &[])
}

/// Parses a term whose free variables include `scope` (which may not be rebound).
pub fn parse_term_in(text: &str, reg: &BaseRegistry, scope: &[Name]) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, reg, scope)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_judgment_text(text: &str, reg: &BaseRegistry) -> Result<ParsedJudgment, ParseError> {
    let mut p = Parser::new(text, reg, &[])?;
    let mut ctx = Vec::new();
    if p.toks.iter().any(|t| t.tok == Tok::Turnstile) && !p.eat(&Tok::Turnstile) {
        loop {
            let at = p.here();
            let x = p.ident()?;
            if ctx.iter().any(|(y, _)| *y == x) {
                return Err(at.error(&format!("duplicate context variable `{x}`")));
            }
            p.check_binder(&x, &at)?;
            p.expect(&Tok::Colon)?;
            let t = p.ref_type()?;
            ctx.push((x, t));
            if p.eat(&Tok::Turnstile) {
                break;
            }
            p.expect(&Tok::Comma)?;
        }
    }
    p.scope = ctx.iter().map(|(x, _)| x.clone()).collect();
    let term = p.term()?;
    p.expect(&Tok::Colon)?;
    let goal = p.ref_type()?;
    p.expect_eof()?;
    Ok(ParsedJudgment { ctx, term, goal })
}

pub fn parse_pure_context(
    text: &str,
    reg: &BaseRegistry,
) -> Result<Vec<(Name, PureType)>, ParseError> {
    let mut p = Parser::new(text, reg, &[])?;
    let mut out: Vec<(Name, PureType)> = Vec::new();
    if p.peek() == &Tok::Eof {
        return Ok(out);
    }
    loop {
        let at = p.here();
        let x = p.ident()?;
        if out.iter().any(|(y, _)| *y == x) {
            return Err(at.error(&format!("duplicate context variable `{x}`")));
        }
        p.expect(&Tok::Colon)?;
        let at = p.here();
        match p.ref_type()? {
            RefType::Pure(t) => out.push((x, t)),
            _ => return Err(at.error("expected a pure type")),
        }
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect_eof()?;
    Ok(out)
}

pub fn parse_entail_input(text: &str, reg: &BaseRegistry) -> Result<EntailInput, ParseError> {
    let mut p = Parser::new(text, reg, &[])?;
    let at = p.here();
    let tau = match p.ref_type()? {
        RefType::Pure(t) => t,
        _ => return Err(at.error("expected a pure type")),
    };
    let mut formulas = Vec::new();
    while p.eat(&Tok::Semi) {
        formulas.push(p.formula()?);
    }
    p.expect_eof()?;
    Ok(EntailInput { tau, formulas })
}

#[derive(Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

impl Pos {
    fn error(self, msg: &str) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.to_string() }
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    reg: &'a BaseRegistry,
    tvars: Vec<Name>,
    pvars: Vec<Name>,
    scope: Vec<Name>,
    supply: NameSupply,
}

/// Term sugar that behaves like a function of fixed arity.
#[derive(Clone, Copy)]
enum Sugar {
    Fold,
    Unfold,
    Pi1,
    Pi2,
    Hd,
    Tl,
    Lbl,
    Lft,
    Rght,
    Node,
}

impl Sugar {
    fn from(s: &str) -> Option<Sugar> {
        Some(match s {
            "fold" => Sugar::Fold,
            "unfold" => Sugar::Unfold,
            "pi1" => Sugar::Pi1,
            "pi2" => Sugar::Pi2,
            "hd" => Sugar::Hd,
            "tl" => Sugar::Tl,
            "lbl" => Sugar::Lbl,
            "lft" => Sugar::Lft,
            "rght" => Sugar::Rght,
            "Node" => Sugar::Node,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Sugar::Node => 3,
            _ => 1,
        }
    }

    fn build(self, mut args: Vec<Term>) -> Term {
        let one = |args: &mut Vec<Term>| args.pop().expect("arity");
        match self {
            Sugar::Fold => Term::fold(one(&mut args)),
            Sugar::Unfold => Term::unfold(one(&mut args)),
            Sugar::Pi1 => Term::pi1(one(&mut args)),
            Sugar::Pi2 => Term::pi2(one(&mut args)),
            Sugar::Hd | Sugar::Lbl => Term::pi1(Term::unfold(one(&mut args))),
            Sugar::Tl => Term::pi2(Term::unfold(one(&mut args))),
            Sugar::Lft => Term::pi1(Term::pi2(Term::unfold(one(&mut args)))),
            Sugar::Rght => Term::pi2(Term::pi2(Term::unfold(one(&mut args)))),
            Sugar::Node => {
                let r = args.pop().expect("arity");
                let l = args.pop().expect("arity");
                let h = args.pop().expect("arity");
                Term::fold(Term::pair(h, Term::pair(l, r)))
            }
        }
    }
}

impl<'a> Parser<'a> {
    fn new(text: &str, reg: &'a BaseRegistry, scope: &[Name]) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        let mut supply = NameSupply::new(scope);
        for t in &toks {
            if let Tok::Ident(s) = &t.tok {
                supply.reserve(&name(s));
            }
        }
        Ok(Parser {
            toks,
            pos: 0,
            reg,
            tvars: Vec::new(),
            pvars: Vec::new(),
            scope: scope.to_vec(),
            supply,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> Pos {
        let t = &self.toks[self.pos];
        Pos { line: t.line, col: t.col }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.here().error(&format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// A non-keyword identifier.
    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(name(&s))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    // ---- types ----

    /// `X` is the next-step modality in formulas but a fine type variable.
    fn type_binder(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) || s == "X" => {
                self.bump();
                Ok(name(&s))
            }
            _ => Err(self.unexpected("a type variable")),
        }
    }

    fn ref_type(&mut self) -> Result<RefType, ParseError> {
        let lhs = self.prod_type()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.ref_type()?;
            return Ok(match (lhs, rhs) {
                (RefType::Pure(a), RefType::Pure(b)) => RefType::Pure(PureType::arrow(a, b)),
                (a, b) => RefType::arrow(a, b),
            });
        }
        Ok(lhs)
    }

    fn prod_type(&mut self) -> Result<RefType, ParseError> {
        let lhs = self.atom_type()?;
        if self.eat(&Tok::Star) {
            let rhs = self.prod_type()?;
            return Ok(match (lhs, rhs) {
                (RefType::Pure(a), RefType::Pure(b)) => RefType::Pure(PureType::prod(a, b)),
                (a, b) => RefType::prod(a, b),
            });
        }
        Ok(lhs)
    }

    fn pure_of(&self, t: RefType, at: Pos) -> Result<PureType, ParseError> {
        match t {
            RefType::Pure(t) => Ok(t),
            _ => Err(at.error("a refinement is not allowed here")),
        }
    }

    fn atom_type(&mut self) -> Result<RefType, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ref_type()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::LBrace => {
                self.bump();
                let at = self.here();
                let t = self.ref_type()?;
                let t = self.pure_of(t, at)?;
                self.expect(&Tok::Bar)?;
                let f = self.formula()?;
                self.expect(&Tok::RBrace)?;
                Ok(RefType::Refine(t, f))
            }
            Tok::Ident(s) => {
                self.bump();
                match s.as_str() {
                    "rec" => {
                        let x = self.type_binder()?;
                        self.expect(&Tok::Dot)?;
                        self.tvars.push(x.clone());
                        let at = self.here();
                        let body = self.ref_type();
                        self.tvars.pop();
                        let body = self.pure_of(body?, at)?;
                        Ok(RefType::Pure(PureType::Rec(x, Box::new(body))))
                    }
                    "Stream" | "Tree" | "Rou" => {
                        let at = self.here();
                        let arg = self.atom_type()?;
                        let arg = self.pure_of(arg, at)?;
                        Ok(RefType::Pure(match s.as_str() {
                            "Stream" => PureType::stream(arg),
                            "Tree" => PureType::tree(arg),
                            _ => PureType::rou(arg),
                        }))
                    }
                    _ if self.tvars.iter().any(|v| **v == *s) => {
                        Ok(RefType::Pure(PureType::Var(name(&s))))
                    }
                    _ if self.reg.has_base(&s) => Ok(RefType::Pure(PureType::Base(name(&s)))),
                    _ if is_keyword(&s) => Err(at.error(&format!("unexpected keyword `{s}`"))),
                    _ if s.chars().next().is_some_and(|c| c.is_ascii_uppercase()) => {
                        Err(at.error(&format!("unknown base type or unbound type variable `{s}`")))
                    }
                    _ => Err(at.error(&format!("unknown base type `{s}`"))),
                }
            }
            _ => Err(self.unexpected("a type")),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_formula()?;
        if self.eat(&Tok::Lolli) {
            let rhs = self.formula()?;
            return Ok(Formula::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or_formula(&mut self) -> Result<Formula, ParseError> {
        let mut fs = vec![self.and_formula()?];
        while self.eat(&Tok::Vee) {
            fs.push(self.and_formula()?);
        }
        Ok(if fs.len() == 1 { fs.pop().expect("one") } else { Formula::Or(fs) })
    }

    fn and_formula(&mut self) -> Result<Formula, ParseError> {
        let mut fs = vec![self.unary_formula()?];
        while self.eat(&Tok::Wedge) {
            fs.push(self.unary_formula()?);
        }
        Ok(if fs.len() == 1 { fs.pop().expect("one") } else { Formula::And(fs) })
    }

    fn unary_formula(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Lt => {
                self.bump();
                let c = match self.bump() {
                    Tok::Ident(c) => c,
                    _ => return Err(at.error("expected a constant after `<`")),
                };
                if self.reg.base_of(&c).is_none() {
                    return Err(at.error(&format!("unknown constant `{c}`")));
                }
                self.expect(&Tok::Gt)?;
                Ok(Formula::atom(&c))
            }
            Tok::LBrack => {
                self.bump();
                let m = match self.bump() {
                    Tok::Ident(m) => m,
                    _ => return Err(at.error("expected a modality name")),
                };
                self.expect(&Tok::RBrack)?;
                let f = self.unary_formula()?;
                Ok(match m.as_str() {
                    "pi1" => Formula::pi1(f),
                    "pi2" => Formula::pi2(f),
                    "fold" => Formula::fold(f),
                    "hd" | "lbl" => Formula::hd(f),
                    "tl" => Formula::next(f),
                    "lft" => Formula::lft(f),
                    "rght" => Formula::rght(f),
                    _ => return Err(at.error(&format!("unknown modality `[{m}]`"))),
                })
            }
            Tok::BoxOp => {
                self.bump();
                Ok(Formula::always(self.unary_formula()?))
            }
            Tok::Diamond => {
                self.bump();
                Ok(Formula::eventually(self.unary_formula()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) => {
                self.bump();
                use crate::logic::Schema;
                match s.as_str() {
                    "true" => Ok(Formula::top()),
                    "false" => Ok(Formula::bot()),
                    "X" => Ok(Formula::next(self.unary_formula()?)),
                    "AG" => Ok(Formula::schema(Schema::AllAlways, self.unary_formula()?)),
                    "EG" => Ok(Formula::schema(Schema::ExAlways, self.unary_formula()?)),
                    "AF" => Ok(Formula::schema(Schema::AllEventually, self.unary_formula()?)),
                    "EF" => Ok(Formula::schema(Schema::ExEventually, self.unary_formula()?)),
                    "mu" | "nu" => {
                        let p = self.ident()?;
                        self.expect(&Tok::Dot)?;
                        self.pvars.push(p.clone());
                        let body = self.formula();
                        self.pvars.pop();
                        let body = Box::new(body?);
                        Ok(if s == "mu" { Formula::Mu(p, body) } else { Formula::Nu(p, body) })
                    }
                    _ if self.pvars.iter().any(|p| **p == *s) => Ok(Formula::PVar(name(&s))),
                    _ => Err(at.error(&format!("unexpected `{s}` in formula"))),
                }
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    // ---- terms ----

    fn check_binder(&self, x: &Name, at: &Pos) -> Result<(), ParseError> {
        if self.scope.contains(x) {
            return Err(at.error(&format!("duplicate binder `{x}` in scope")));
        }
        if self.reg.base_of(x).is_some() {
            return Err(at.error(&format!("binder `{x}` is a constant")));
        }
        Ok(())
    }

    fn binder(&mut self) -> Result<Name, ParseError> {
        let at = self.here();
        let x = self.ident()?;
        self.check_binder(&x, &at)?;
        Ok(x)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::Lambda) {
            let x = self.binder()?;
            self.expect(&Tok::Dot)?;
            self.scope.push(x.clone());
            let body = self.term();
            self.scope.pop();
            return Ok(Term::Lam(x, Box::new(body?)));
        }
        if self.eat_kw("fix") {
            let x = self.binder()?;
            let mut inv = None;
            if self.eat(&Tok::LBrack) {
                let mut fs = vec![self.formula()?];
                while self.eat(&Tok::Semi) {
                    fs.push(self.formula()?);
                }
                self.expect(&Tok::RBrack)?;
                inv = Some(fs);
            } else if self.peek() == &Tok::BoxOp {
                // `fix x []. M`: an empty chain
                self.bump();
                inv = Some(Vec::new());
            }
            self.expect(&Tok::Dot)?;
            self.scope.push(x.clone());
            let body = self.term();
            self.scope.pop();
            let body = Box::new(body?);
            return Ok(match inv {
                Some(fs) => Term::FixAnn(x, fs, body),
                None => Term::Fix(x, body),
            });
        }
        if self.eat_kw("if") {
            let c = self.term()?;
            self.expect_kw("then")?;
            let a = self.term()?;
            self.expect_kw("else")?;
            let b = self.term()?;
            return Ok(Term::Case(Box::new(c), vec![(name("tt"), a), (name("ff"), b)]));
        }
        let lhs = self.app_term()?;
        if self.eat(&Tok::Cons) {
            let rhs = self.term()?;
            return Ok(Term::fold(Term::pair(lhs, rhs)));
        }
        Ok(lhs)
    }

    fn starts_atomic(&self) -> bool {
        match self.peek() {
            Tok::LParen => true,
            Tok::Ident(s) => {
                !is_keyword(s) || Sugar::from(s).is_some() || s == "case"
            }
            _ => false,
        }
    }

    fn app_term(&mut self) -> Result<Term, ParseError> {
        let mut head = match self.peek() {
            Tok::Ident(s) if Sugar::from(s).is_some() => {
                let sg = Sugar::from(s).expect("sugar");
                self.bump();
                let mut args = Vec::new();
                while args.len() < sg.arity() && self.starts_atomic() {
                    args.push(self.atomic()?);
                }
                self.saturate(sg, args)
            }
            _ => self.atomic()?,
        };
        while self.starts_atomic() {
            let arg = self.atomic()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    /// Applies sugar to the given arguments, abstracting the missing ones.
    fn saturate(&mut self, sg: Sugar, mut args: Vec<Term>) -> Term {
        let mut vars = Vec::new();
        while args.len() < sg.arity() {
            let v = self.supply.fresh("s");
            args.push(Term::Var(v.clone()));
            vars.push(v);
        }
        let mut t = sg.build(args);
        for v in vars.into_iter().rev() {
            t = Term::Lam(v, Box::new(t));
        }
        t
    }

    fn atomic(&mut self) -> Result<Term, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                if self.eat(&Tok::Comma) {
                    let u = self.term()?;
                    self.expect(&Tok::RParen)?;
                    return Ok(Term::pair(t, u));
                }
                if self.eat(&Tok::Colon) {
                    let ty = self.ref_type()?;
                    self.expect(&Tok::RParen)?;
                    return Ok(Term::ascribe(t, ty));
                }
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if s == "case" => {
                self.bump();
                self.case_rest(at)
            }
            Tok::Ident(s) if Sugar::from(&s).is_some() => {
                self.bump();
                let sg = Sugar::from(&s).expect("sugar");
                Ok(self.saturate(sg, Vec::new()))
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                let x = name(&s);
                if self.scope.contains(&x) {
                    return Ok(Term::Var(x));
                }
                if let Some(b) = self.reg.base_of(&s) {
                    return Ok(Term::Const(b.clone(), x));
                }
                Ok(Term::Var(x))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn case_rest(&mut self, at: Pos) -> Result<Term, ParseError> {
        let scrut = self.term()?;
        self.expect_kw("of")?;
        self.expect(&Tok::LBrace)?;
        let mut branches: Vec<(Name, Term)> = Vec::new();
        let mut base: Option<Name> = None;
        loop {
            let cat = self.here();
            let c = match self.bump() {
                Tok::Ident(c) => name(&c),
                _ => return Err(cat.error("expected a constant")),
            };
            let b = self
                .reg
                .base_of(&c)
                .ok_or_else(|| cat.error(&format!("unknown constant `{c}`")))?
                .clone();
            match &base {
                Some(b0) if *b0 != b => {
                    return Err(cat.error(&format!("constant `{c}` is not of base `{b0}`")))
                }
                _ => base = Some(b),
            }
            if branches.iter().any(|(d, _)| *d == c) {
                return Err(cat.error(&format!("duplicate branch `{c}`")));
            }
            self.expect(&Tok::Arrow)?;
            let t = self.term()?;
            branches.push((c, t));
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        self.expect(&Tok::RBrace)?;
        let base = base.expect("at least one branch");
        let carrier = self.reg.carrier(&base).expect("registered");
        if branches.len() != carrier.len() {
            return Err(at.error(&format!("non-total case over `{base}`")));
        }
        let mut ordered = Vec::with_capacity(carrier.len());
        for c in carrier {
            let i = branches.iter().position(|(d, _)| d == c).expect("total");
            ordered.push(branches.swap_remove(i));
        }
        Ok(Term::Case(Box::new(scrut), ordered))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> BaseRegistry {
        BaseRegistry::default()
    }

    #[test]
    fn type_examples() {
        let r = reg();
        assert_eq!(
            parse_type("Stream Bool", &r).unwrap(),
            PureType::rec("X", PureType::prod(PureType::bool(), PureType::var("X")))
        );
        assert_eq!(parse_type("Bool", &r).unwrap(), PureType::bool());
        assert_eq!(
            parse_type("Rou Bool", &r).unwrap(),
            PureType::rec(
                "X",
                PureType::arrow(
                    PureType::arrow(PureType::var("X"), PureType::bool()),
                    PureType::bool()
                )
            )
        );
        let b = PureType::bool();
        assert_eq!(
            parse_type("Bool -> Bool -> Bool", &r).unwrap(),
            PureType::arrow(b.clone(), PureType::arrow(b.clone(), b.clone()))
        );
        assert_eq!(
            parse_type("Bool * Bool -> Bool", &r).unwrap(),
            PureType::arrow(PureType::prod(b.clone(), b.clone()), b.clone())
        );
    }

    #[test]
    fn type_errors() {
        let r = reg();
        assert!(parse_type("Nat", &r).unwrap_err().msg.contains("unknown base"));
        assert!(parse_type("rec X. Y", &r).unwrap_err().msg.contains("unbound"));
        let e = parse_type("Bool ->", &r).unwrap_err();
        assert_eq!((e.line, e.col), (1, 8));
    }

    #[test]
    fn refinement_types() {
        let r = reg();
        let t = parse_ref_type("{Bool | <tt>} -> {Bool | <ff>}", &r).unwrap();
        assert_eq!(
            t,
            RefType::arrow(
                RefType::Refine(PureType::bool(), Formula::atom("tt")),
                RefType::Refine(PureType::bool(), Formula::atom("ff"))
            )
        );
        assert_eq!(t.underlying(), PureType::arrow(PureType::bool(), PureType::bool()));
    }

    #[test]
    fn formula_precedence() {
        let r = reg();
        let f = parse_formula("<tt> /\\ <ff> \\/ <tt> -o <ff> -o <tt>", &r).unwrap();
        let tt = Formula::atom("tt");
        let ff = Formula::atom("ff");
        assert_eq!(
            f,
            Formula::arrow(
                Formula::or([Formula::and([tt.clone(), ff.clone()]), tt.clone()]),
                Formula::arrow(ff.clone(), tt.clone())
            )
        );
        let g = parse_formula("[] [hd] <tt> /\\ X <ff>", &r).unwrap();
        assert_eq!(
            g,
            Formula::and([Formula::always(Formula::hd(tt.clone())), Formula::next(ff.clone())])
        );
        let m = parse_formula("nu p. <tt> /\\ X p", &r).unwrap();
        assert!(matches!(m, Formula::Nu(..)));
        assert!(parse_formula("<zz>", &r).is_err());
        assert!(parse_formula("p", &r).is_err());
    }

    #[test]
    fn term_examples() {
        let r = reg();
        assert_eq!(parse_term("fix x. x", &r).unwrap(), Term::fix("x", Term::var("x")));
        assert_eq!(parse_term("hd s", &r).unwrap(), Term::pi1(Term::unfold(Term::var("s"))));
        assert_eq!(
            parse_term("h :: t", &r).unwrap(),
            Term::fold(Term::pair(Term::var("h"), Term::var("t")))
        );
        assert_eq!(
            parse_term("f (hd x) y", &r).unwrap(),
            Term::app(
                Term::app(Term::var("f"), Term::pi1(Term::unfold(Term::var("x")))),
                Term::var("y")
            )
        );
        let t = parse_term("if tt then ff else tt", &r).unwrap();
        assert_eq!(
            t,
            Term::Case(
                Box::new(Term::constant("Bool", "tt")),
                vec![
                    (name("tt"), Term::constant("Bool", "ff")),
                    (name("ff"), Term::constant("Bool", "tt"))
                ]
            )
        );
    }

    #[test]
    fn filter_source_parses() {
        let r = reg();
        let src = "\\p. fix g. \\x. if p (hd x) then (hd x) :: (g (tl x)) else g (tl x)";
        let t = parse_term(src, &r).unwrap();
        let Term::Lam(p, body) = t else { panic!() };
        assert_eq!(&*p, "p");
        let Term::Fix(g, body) = *body else { panic!() };
        assert_eq!(&*g, "g");
        let Term::Lam(_, body) = *body else { panic!() };
        assert!(matches!(*body, Term::Case(..)));
    }

    #[test]
    fn term_errors() {
        let r = reg();
        assert!(parse_term("\\x. \\x. x", &r).unwrap_err().msg.contains("duplicate binder"));
        assert!(parse_term("case x of { tt -> ff }", &r).unwrap_err().msg.contains("non-total"));
        assert!(parse_term("\\tt. tt", &r).is_err());
        assert!(parse_term("(x", &r).is_err());
        // sibling scopes may reuse names
        assert!(parse_term("(\\x. x) (\\x. x)", &r).is_ok());
    }

    #[test]
    fn unapplied_sugar_abstracts() {
        let r = reg();
        let t = parse_term("hd", &r).unwrap();
        assert_eq!(t, Term::lam("s", Term::pi1(Term::unfold(Term::var("s")))));
        let n = parse_term("Node tt l", &r).unwrap();
        assert!(matches!(n, Term::Lam(..)));
    }

    #[test]
    fn judgments_and_entail_inputs() {
        let r = reg();
        let j = parse_judgment_text("x : {Bool | <tt>} |- x : {Bool | <tt>}", &r).unwrap();
        assert_eq!(j.ctx.len(), 1);
        assert_eq!(j.term, Term::var("x"));
        let j = parse_judgment_text("|- tt : Bool", &r).unwrap();
        assert!(j.ctx.is_empty());
        let j = parse_judgment_text("(\\x. x : Bool -> Bool) : Bool -> Bool", &r).unwrap();
        assert!(matches!(j.term, Term::Ascribe(..)));
        let e = parse_entail_input("Bool ; <tt> /\\ <ff> ; false", &r).unwrap();
        assert_eq!(e.formulas.len(), 2);
        assert!(parse_judgment_text("x : Bool, x : Bool |- x : Bool", &r).is_err());
        assert!(parse_judgment_text("x : Bool |- \\x. x : Bool -> Bool", &r).is_err());
    }
}
