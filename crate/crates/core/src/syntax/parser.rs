//! Surface syntax: a hand-written lexer and recursive-descent parser.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::{
    DefId, Dialect, Formula, Name, Nat, ParamDef, ProcTerm, Program, SymbolTable, ValueTerm, VarId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: definition `{name}` is defined twice")]
    DuplicateDef {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: `{name}` expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        line: usize,
        col: usize,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) enum Tok {
    Ident(String),
    Num(Nat),
    LParen,
    RParen,
    Dot,
    Bar,
    Quote,
    Bang,
    Comma,
    Eq,
    Lt,
    Gt,
    Plus,
    Tilde,
    AndOp,
    OrOp,
    Arrow,
    Semi,
    Colon,
    Backslash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Eof => f.write_str("end of input"),
            other => {
                let s = match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::Dot => ".",
                    Tok::Bar => "|",
                    Tok::Quote => "'",
                    Tok::Bang => "!",
                    Tok::Comma => ",",
                    Tok::Eq => "=",
                    Tok::Lt => "<",
                    Tok::Gt => ">",
                    Tok::Plus => "+",
                    Tok::Tilde => "~",
                    Tok::AndOp => "/\\",
                    Tok::OrOp => "\\/",
                    Tok::Arrow => "=>",
                    Tok::Semi => ";",
                    Tok::Colon => ":",
                    Tok::Backslash => "\\",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) struct Lexer;

impl Lexer {
    pub fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let (mut i, mut line, mut col) = (0, 1, 1);
        while i < chars.len() {
            let c = chars[i];
            let (tl, tc) = (line, col);
            let advance = |n: usize, i: &mut usize, col: &mut usize| {
                *i += n;
                *col += n;
            };
            if c == '\n' {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            if c.is_whitespace() {
                advance(1, &mut i, &mut col);
                continue;
            }
            if c == '/' && chars.get(i + 1) == Some(&'/') {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let tok = match two.as_str() {
                "/\\" => Some(Tok::AndOp),
                "\\/" => Some(Tok::OrOp),
                "=>" => Some(Tok::Arrow),
                _ => None,
            };
            if let Some(tok) = tok {
                out.push(Spanned { tok, line: tl, col: tc });
                advance(2, &mut i, &mut col);
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                col += i - start;
                let n = digits.parse::<Nat>().expect("digit run parses");
                out.push(Spanned {
                    tok: Tok::Num(n),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '.' => Tok::Dot,
                '|' => Tok::Bar,
                '\'' => Tok::Quote,
                '!' => Tok::Bang,
                ',' => Tok::Comma,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '+' => Tok::Plus,
                '~' => Tok::Tilde,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '\\' => Tok::Backslash,
                other => {
                    return Err(ParseError::Syntax {
                        line: tl,
                        col: tc,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push(Spanned { tok, line: tl, col: tc });
            advance(1, &mut i, &mut col);
        }
        out.push(Spanned {
            tok: Tok::Eof,
            line,
            col,
        });
        Ok(out)
    }
}

const KEYWORDS: &[&str] = &[
    "def", "main", "if", "then", "else", "case", "of", "end", "let", "in", "new", "tt", "ff",
    "exists", "forall",
];

fn canonical_index(s: &str, prefix: char) -> Option<u64> {
    let digits = s.strip_prefix(prefix)?;
    let k = digits.parse::<u64>().ok()?;
    (k.to_string() == digits).then_some(k)
}

/// Deterministic identifier-to-index assignment for one namespace.
#[derive(Default)]
pub(crate) struct Interner {
    prefix: char,
    start: u64,
    reserved: HashSet<u64>,
    used: HashSet<u64>,
    map: BTreeMap<String, u64>,
}

impl Interner {
    fn new(prefix: char, start: u64, idents: &[String]) -> Self {
        let reserved = idents
            .iter()
            .filter_map(|s| canonical_index(s, prefix))
            .collect();
        Interner {
            prefix,
            start,
            reserved,
            used: HashSet::new(),
            map: BTreeMap::new(),
        }
    }

    pub fn intern(&mut self, s: &str) -> u64 {
        if let Some(&k) = self.map.get(s) {
            return k;
        }
        let k = match canonical_index(s, self.prefix) {
            Some(k) => k,
            None => {
                let mut k = self.start;
                while self.reserved.contains(&k) || self.used.contains(&k) {
                    k += 1;
                }
                k
            }
        };
        self.used.insert(k);
        self.map.insert(s.to_string(), k);
        k
    }
}

pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    pub names: Interner,
    pub vars: Interner,
    defs: HashMap<String, (u64, usize)>,
    pub bang_used: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(text: &str) -> PResult<Self> {
        let toks = Lexer::tokenize(text)?;
        let idents: Vec<String> = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Ident(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        Ok(Parser {
            names: Interner::new('n', 1, &idents),
            vars: Interner::new('x', 0, &idents),
            toks,
            pos: 0,
            defs: HashMap::new(),
            bang_used: false,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(ParseError::Syntax {
            line: s.line,
            col: s.col,
            message: message.into(),
        })
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    pub fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    /// A non-keyword identifier.
    pub fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    pub fn name(&mut self) -> PResult<Name> {
        let s = self.ident()?;
        Ok(Name(self.names.intern(&s)))
    }

    pub fn var(&mut self) -> PResult<VarId> {
        let s = self.ident()?;
        Ok(VarId(self.vars.intern(&s)))
    }

    pub fn symtab(&self) -> SymbolTable {
        SymbolTable {
            names: self.names.map.iter().map(|(k, v)| (k.clone(), Name(*v))).collect(),
            vars: self.vars.map.iter().map(|(k, v)| (k.clone(), VarId(*v))).collect(),
        }
    }

    fn is_ident_at(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
    }

    /// Index of the token after the parenthesis group starting at the current `(`.
    pub fn after_group(&self) -> usize {
        let mut depth = 0usize;
        let mut i = self.pos;
        while i < self.toks.len() {
            match self.toks[i].tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return i + 1;
                    }
                }
                Tok::Eof => return i,
                _ => {}
            }
            i += 1;
        }
        self.toks.len() - 1
    }

    pub fn tok_at_index(&self, i: usize) -> &Tok {
        &self.toks[i.min(self.toks.len() - 1)].tok
    }

    // ---- programs ----------------------------------------------------------

    fn prescan_defs(&mut self) -> PResult<()> {
        let mut i = 0;
        let mut next_id = 1u64;
        while i + 2 < self.toks.len() {
            if matches!(&self.toks[i].tok, Tok::Ident(s) if s == "def") {
                if let Tok::Ident(name) = &self.toks[i + 1].tok {
                    let mut arity = 0;
                    let mut j = i + 3;
                    while j < self.toks.len()
                        && !matches!(self.toks[j].tok, Tok::RParen | Tok::Eof)
                    {
                        if matches!(self.toks[j].tok, Tok::Ident(_)) {
                            arity += 1;
                        }
                        j += 1;
                    }
                    if self.defs.contains_key(name) {
                        return Err(ParseError::DuplicateDef {
                            name: name.clone(),
                            line: self.toks[i + 1].line,
                            col: self.toks[i + 1].col,
                        });
                    }
                    self.defs.insert(name.clone(), (next_id, arity));
                    next_id += 1;
                }
            }
            i += 1;
        }
        Ok(())
    }

    pub fn program(&mut self) -> PResult<Program> {
        self.prescan_defs()?;
        let mut defs = Vec::new();
        loop {
            if self.is_keyword("def") {
                self.bump();
                let name = self.ident()?;
                self.expect(Tok::LParen)?;
                let mut params: Vec<VarId> = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        let v = self.var()?;
                        if params.contains(&v) {
                            return self.error(format!("parameter {v} repeated in `{name}`"));
                        }
                        params.push(v);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                let body = self.term()?;
                defs.push(ParamDef { name, params, body });
            } else if self.is_keyword("main") {
                self.bump();
                self.expect(Tok::Eq)?;
                let main = self.term()?;
                if *self.peek() != Tok::Eof {
                    return self.error(format!("expected end of input, found {}", self.peek()));
                }
                let dialect = if self.bang_used {
                    if !defs.is_empty() {
                        return self.error("replication cannot be combined with definitions");
                    }
                    Dialect::Bang
                } else {
                    Dialect::P
                };
                return Ok(Program {
                    dialect,
                    defs,
                    main,
                    symtab: self.symtab(),
                });
            } else {
                return self.error(format!("expected `def` or `main`, found {}", self.peek()));
            }
        }
    }

    // ---- process terms -----------------------------------------------------

    pub fn term(&mut self) -> PResult<ProcTerm> {
        let mut left = self.prefix()?;
        while self.eat(&Tok::Bar) {
            let right = self.prefix()?;
            left = ProcTerm::par(left, right);
        }
        Ok(left)
    }

    pub fn prefix(&mut self) -> PResult<ProcTerm> {
        match self.peek().clone() {
            Tok::Num(n) => {
                if n == Nat::from(0u32) {
                    self.bump();
                    Ok(ProcTerm::Nil)
                } else {
                    self.error(format!("expected a process, found `{n}`"))
                }
            }
            Tok::LParen => {
                if self.is_ident_at(1) && *self.peek_at(2) == Tok::RParen {
                    self.bump();
                    let c = self.name()?;
                    self.bump();
                    let body = self.prefix()?;
                    Ok(ProcTerm::Res(c, Box::new(body)))
                } else {
                    self.bump();
                    let t = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(t)
                }
            }
            Tok::Quote => {
                self.bump();
                let a = self.name()?;
                let t = if self.eat(&Tok::LParen) {
                    let t = self.vterm()?;
                    self.expect(Tok::RParen)?;
                    t
                } else {
                    ValueTerm::num(0)
                };
                self.expect(Tok::Dot)?;
                let body = self.prefix()?;
                Ok(ProcTerm::Out(a, t, Box::new(body)))
            }
            Tok::Bang => {
                self.bump();
                self.bang_used = true;
                match self.prefix()? {
                    ProcTerm::In(a, x, b) => Ok(ProcTerm::RepIn(a, x, b)),
                    ProcTerm::Out(a, t, b) => Ok(ProcTerm::RepOut(a, t, b)),
                    _ => self.error("`!` must prefix an input or output"),
                }
            }
            Tok::Ident(kw) if kw == "new" => {
                self.bump();
                let c = self.name()?;
                self.expect(Tok::Dot)?;
                let body = self.prefix()?;
                Ok(ProcTerm::Res(c, Box::new(body)))
            }
            Tok::Ident(kw) if kw == "if" => {
                self.bump();
                let phi = self.formula()?;
                self.expect_keyword("then")?;
                let s = self.prefix()?;
                if self.is_keyword("else") {
                    self.bump();
                    let t = self.prefix()?;
                    Ok(ProcTerm::if_else(phi, s, t))
                } else {
                    Ok(ProcTerm::cond(phi, s))
                }
            }
            Tok::Ident(kw) if kw == "case" => {
                self.bump();
                let scrutinee = self.vterm()?;
                self.expect_keyword("of")?;
                let placeholder = VarId(self.vars.intern("_"));
                let mut arms = Vec::new();
                while !self.is_keyword("end") {
                    let phi = self.disjunction()?;
                    self.expect(Tok::Arrow)?;
                    let t = self.term()?;
                    arms.push((phi, t));
                    if !self.eat(&Tok::Semi) {
                        break;
                    }
                }
                self.expect_keyword("end")?;
                Ok(ProcTerm::Case {
                    placeholder,
                    scrutinee,
                    arms,
                })
            }
            Tok::Ident(kw) if kw == "let" => {
                self.bump();
                let x = self.var()?;
                self.expect(Tok::Eq)?;
                let t = self.vterm()?;
                self.expect_keyword("in")?;
                let body = self.prefix()?;
                Ok(ProcTerm::Let(x, t, Box::new(body)))
            }
            Tok::Ident(_) => self.ident_led(),
            other => self.error(format!("expected a process, found {other}")),
        }
    }

    fn ident_led(&mut self) -> PResult<ProcTerm> {
        let (line, col) = self.here();
        let id = self.ident()?;
        match self.peek() {
            Tok::LParen => {
                let after = self.after_group();
                if *self.tok_at_index(after) == Tok::Dot {
                    self.bump();
                    let x = self.var()?;
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Dot)?;
                    let a = Name(self.names.intern(&id));
                    let body = self.prefix()?;
                    Ok(ProcTerm::In(a, x, Box::new(body)))
                } else {
                    let Some(&(j, arity)) = self.defs.get(&id) else {
                        return Err(ParseError::Syntax {
                            line,
                            col,
                            message: format!("unknown definition `{id}`"),
                        });
                    };
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.vterm()?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    if args.len() != arity {
                        return Err(ParseError::Arity {
                            name: id,
                            expected: arity,
                            found: args.len(),
                            line,
                            col,
                        });
                    }
                    Ok(ProcTerm::Call(DefId(j), args))
                }
            }
            Tok::Dot => {
                self.bump();
                let a = Name(self.names.intern(&id));
                let body = self.prefix()?;
                let mut used = Vec::new();
                super::transform::all_vars(&body, &mut used);
                let mut x = 0;
                while used.contains(&VarId(x)) {
                    x += 1;
                }
                Ok(ProcTerm::In(a, VarId(x), Box::new(body)))
            }
            other => Err(ParseError::Syntax {
                line,
                col,
                message: format!("expected `(` or `.` after `{id}`, found {other}"),
            }),
        }
    }

    // ---- value terms -------------------------------------------------------

    pub fn vterm(&mut self) -> PResult<ValueTerm> {
        let mut left = self.vatom()?;
        while self.eat(&Tok::Plus) {
            let right = self.vatom()?;
            left = ValueTerm::add(left, right);
        }
        Ok(left)
    }

    fn vatom(&mut self) -> PResult<ValueTerm> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(ValueTerm::Num(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.vterm()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if s == "s" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let t = self.vterm()?;
                self.expect(Tok::RParen)?;
                Ok(ValueTerm::succ(t))
            }
            Tok::Ident(_) => Ok(ValueTerm::Var(self.var()?)),
            other => self.error(format!("expected a value term, found {other}")),
        }
    }

    // ---- formulas ----------------------------------------------------------

    pub fn formula(&mut self) -> PResult<Formula> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let right = self.formula()?;
            Ok(Formula::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::OrOp) {
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut left = self.unary()?;
        while self.eat(&Tok::AndOp) {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "tt" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(kw) if kw == "ff" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
                self.bump();
                let v = self.var()?;
                self.expect(Tok::Dot)?;
                let body = Box::new(self.formula()?);
                Ok(if kw == "exists" {
                    Formula::Exists(v, body)
                } else {
                    Formula::Forall(v, body)
                })
            }
            Tok::LParen => {
                let save = self.pos;
                if let Ok(f) = self.comparison() {
                    return Ok(f);
                }
                self.pos = save;
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let s = self.vterm()?;
        match self.peek() {
            Tok::Lt => {
                self.bump();
                Ok(Formula::Lt(s, self.vterm()?))
            }
            Tok::Eq => {
                self.bump();
                Ok(Formula::Eq(s, self.vterm()?))
            }
            other => self.error(format!("expected `<` or `=`, found {other}")),
        }
    }
}

/// Parses a whole program: definitions followed by `main = term`.
pub fn parse_source(text: &str) -> Result<Program, ParseError> {
    Parser::new(text)?.program()
}

/// Parses a single definition-free term.
pub fn parse_term(text: &str) -> Result<ProcTerm, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("expected end of input, found {}", p.peek()));
    }
    Ok(t)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("expected end of input, found {}", p.peek()));
    }
    Ok(f)
}
