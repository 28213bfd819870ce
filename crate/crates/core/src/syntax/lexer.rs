use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Lambda,
    Dot,
    LParen,
    RParen,
    Comma,
    Colon,
    Arrow,
    Star,
    LBrace,
    RBrace,
    Bar,
    Semi,
    LBrack,
    RBrack,
    BoxOp,
    Lt,
    Gt,
    Diamond,
    Lolli,
    Wedge,
    Vee,
    Cons,
    Turnstile,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Lambda => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Star => "`*`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Semi => "`;`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::BoxOp => "`[]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Diamond => "`<>`".into(),
            Tok::Lolli => "`-o`".into(),
            Tok::Wedge => "`/\\`".into(),
            Tok::Vee => "`\\/`".into(),
            Tok::Cons => "`::`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "fix", "fold", "unfold", "pi1", "pi2", "case", "of", "if", "then", "else", "rec", "Stream",
    "Tree", "Rou", "true", "false", "mu", "nu", "AG", "EG", "AF", "EF", "X", "hd", "tl", "lbl",
    "lft", "rght", "Node",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let next = chars.get(i + 1).copied();
        let mut push = |tok: Tok, n: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: l0, col: c0 });
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '-' if next == Some('-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if next == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '-' if next == Some('o') => {
                let after = chars.get(i + 2).copied();
                if after.is_some_and(|a| a.is_ascii_alphanumeric() || a == '_') {
                    return Err(err(l0, c0, "unexpected `-`".into()));
                }
                push(Tok::Lolli, 2, &mut i, &mut col)
            }
            '\\' if next == Some('/') => push(Tok::Vee, 2, &mut i, &mut col),
            '/' if next == Some('\\') => push(Tok::Wedge, 2, &mut i, &mut col),
            '\\' | 'λ' => push(Tok::Lambda, 1, &mut i, &mut col),
            ':' if next == Some(':') => push(Tok::Cons, 2, &mut i, &mut col),
            '|' if next == Some('-') => push(Tok::Turnstile, 2, &mut i, &mut col),
            '[' if next == Some(']') => push(Tok::BoxOp, 2, &mut i, &mut col),
            '<' if next == Some('>') => push(Tok::Diamond, 2, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '*' | '×' => push(Tok::Star, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            '[' => push(Tok::LBrack, 1, &mut i, &mut col),
            ']' => push(Tok::RBrack, 1, &mut i, &mut col),
            '<' => push(Tok::Lt, 1, &mut i, &mut col),
            '>' => push(Tok::Gt, 1, &mut i, &mut col),
            '⊢' => push(Tok::Turnstile, 1, &mut i, &mut col),
            '→' => push(Tok::Arrow, 1, &mut i, &mut col),
            '⊸' => push(Tok::Lolli, 1, &mut i, &mut col),
            '∧' => push(Tok::Wedge, 1, &mut i, &mut col),
            '∨' => push(Tok::Vee, 1, &mut i, &mut col),
            '□' => push(Tok::BoxOp, 1, &mut i, &mut col),
            '◇' => push(Tok::Diamond, 1, &mut i, &mut col),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            }
            other => return Err(err(l0, c0, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}
