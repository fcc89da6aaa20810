//! Lexer and recursive-descent parser for the expression grammar.
//!
//! The grammar is documented in `docs/grammar.md`.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {col}: {msg}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Punct(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Punct(c) => write!(f, "'{c}'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Group(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Wedge(Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    /// `W{m=4; [c1, ..., c4]}`
    Witt(usize, Vec<Expr>),
}

impl Expr {
    /// Strip grouping parentheses.
    pub fn ungroup(&self) -> &Expr {
        match self {
            Expr::Group(e) => e.ungroup(),
            e => e,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingDesc {
    Rationals,
    Galois(u64, usize),
    Universal(Vec<String>),
    RatFun(Box<RingDesc>, String),
    Ext(Box<RingDesc>, String, Expr),
    /// `R[t]/t^e`
    Trunc(Box<RingDesc>, usize),
}

impl RingDesc {
    pub fn truncation(&self) -> Option<usize> {
        match self {
            RingDesc::Trunc(_, e) => Some(*e),
            _ => None,
        }
    }

    pub fn base(&self) -> &RingDesc {
        match self {
            RingDesc::Trunc(b, _) => b,
            r => r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Context {
    /// `in W(m, R)`
    Witt(usize, RingDesc),
    /// `over R [mod t^e]`
    Over(RingDesc, Option<usize>),
    /// `(mod t^e)` or `mod t^e`
    Mod(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Expr(Expr, Option<Context>),
    /// `c*{e1, ..., en} + ...`
    Symbols(Vec<(i64, Vec<Expr>)>, Option<Context>),
    /// `(a, b, ...)`, a point tuple
    Tuple(Vec<Expr>, Option<Context>),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut toks = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            toks.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "+-*/^(){}[],;=".contains(c) {
            toks.push((Tok::Punct(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().expect("char");
            return Err(position(src, i, format!("unexpected character '{ch}'")));
        }
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

fn position(src: &str, offset: usize, msg: String) -> SyntaxError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |p| before[p + 1..].chars().count()) + 1;
    SyntaxError { line, col, msg }
}

pub struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> PResult<Self> {
        Ok(Parser {
            src,
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(position(self.src, self.toks[self.pos].1, msg.into()))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> PResult<()> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            self.unexpected(&format!("'{c}'"))
        }
    }

    fn expect_ident(&mut self, s: &str) -> PResult<()> {
        if self.is_ident(s) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn uint(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Int(n) => match u64::try_from(&n) {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(_) => self.error("integer out of range"),
            },
            _ => self.unexpected("integer"),
        }
    }

    fn usize(&mut self) -> PResult<usize> {
        Ok(self.uint()? as usize)
    }

    fn at_end(&self) -> bool {
        *self.peek() == Tok::End
    }

    fn finish(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_punct('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_punct('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_punct('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_punct('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_punct('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> PResult<Expr> {
        let mut lhs = self.atom()?;
        while self.eat_punct('^') {
            match self.peek().clone() {
                Tok::Int(_) => {
                    let e = self.uint()?;
                    lhs = Expr::Pow(Box::new(lhs), e as i64);
                }
                Tok::Punct('-') if matches!(self.peek_at(1), Tok::Int(_)) => {
                    self.bump();
                    let e = self.uint()?;
                    lhs = Expr::Pow(Box::new(lhs), -(e as i64));
                }
                _ => {
                    let rhs = self.atom()?;
                    lhs = Expr::Wedge(Box::new(lhs), Box::new(rhs));
                }
            }
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Punct('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(')')?;
                Ok(Expr::Group(Box::new(e)))
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "W" && self.is_punct('{') {
                    return self.witt_literal();
                }
                if self.is_punct('(') && !matches!(self.peek_at(1), Tok::Ident(s) if s == "mod") {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.is_punct(')') {
                        args.push(self.expr()?);
                        while self.eat_punct(',') {
                            args.push(self.expr()?);
                        }
                    }
                    self.expect_punct(')')?;
                    return Ok(Expr::Call(name, args));
                }
                Ok(Expr::Var(name))
            }
            _ => self.unexpected("expression"),
        }
    }

    fn witt_literal(&mut self) -> PResult<Expr> {
        self.expect_punct('{')?;
        self.expect_ident("m")?;
        self.expect_punct('=')?;
        let m = self.usize()?;
        self.expect_punct(';')?;
        self.expect_punct('[')?;
        let mut coords = Vec::new();
        if !self.is_punct(']') {
            coords.push(self.expr()?);
            while self.eat_punct(',') {
                coords.push(self.expr()?);
            }
        }
        self.expect_punct(']')?;
        self.expect_punct('}')?;
        if coords.len() != m {
            return self.error(format!("W{{m={m}; ...}} needs {m} coordinates, found {}", coords.len()));
        }
        Ok(Expr::Witt(m, coords))
    }

    fn idents(&mut self) -> PResult<Vec<String>> {
        let mut v = vec![self.ident()?];
        while self.eat_punct(',') {
            v.push(self.ident()?);
        }
        Ok(v)
    }

    pub fn ring(&mut self) -> PResult<RingDesc> {
        let base = self.base_ring()?;
        if self.is_punct('[') && matches!(self.peek_at(1), Tok::Ident(s) if s == "t") {
            self.bump();
            self.expect_ident("t")?;
            self.expect_punct(']')?;
            self.expect_punct('/')?;
            self.expect_ident("t")?;
            self.expect_punct('^')?;
            let e = self.usize()?;
            if e == 0 {
                return self.error("truncation exponent must be positive");
            }
            return Ok(RingDesc::Trunc(Box::new(base), e));
        }
        Ok(base)
    }

    fn base_ring(&mut self) -> PResult<RingDesc> {
        let name = self.ident()?;
        let mut ring = match name.as_str() {
            "QQ" | "Qq" | "Q" => RingDesc::Rationals,
            "GF" | "F" => {
                self.expect_punct('(')?;
                let p = self.uint()?;
                let d = if self.eat_punct(',') { self.usize()? } else { 1 };
                self.expect_punct(')')?;
                RingDesc::Galois(p, d)
            }
            "Z" | "ZZ" => {
                self.expect_punct('[')?;
                let vars = self.idents()?;
                self.expect_punct(']')?;
                return Ok(RingDesc::Universal(vars));
            }
            "RatFun" => {
                self.expect_punct('(')?;
                let base = self.ring()?;
                self.expect_punct(',')?;
                let var = self.ident()?;
                self.expect_punct(')')?;
                RingDesc::RatFun(Box::new(base), var)
            }
            "Ext" => {
                self.expect_punct('(')?;
                let base = self.ring()?;
                self.expect_punct(',')?;
                let var = self.ident()?;
                self.expect_punct(',')?;
                let modulus = self.expr()?;
                self.expect_punct(')')?;
                RingDesc::Ext(Box::new(base), var, modulus)
            }
            _ => {
                self.pos -= 1;
                return self.error(format!("unknown ring '{name}'"));
            }
        };
        // QQ(x, y) and GF(p)(x) shorthands
        if self.is_punct('(') && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            for v in self.idents()? {
                ring = RingDesc::RatFun(Box::new(ring), v);
            }
            self.expect_punct(')')?;
        }
        Ok(ring)
    }

    fn context(&mut self) -> PResult<Option<Context>> {
        if self.is_ident("in") {
            self.bump();
            self.expect_ident("W")?;
            self.expect_punct('(')?;
            let m = self.usize()?;
            self.expect_punct(',')?;
            let r = self.ring()?;
            self.expect_punct(')')?;
            return Ok(Some(Context::Witt(m, r)));
        }
        if self.is_ident("over") {
            self.bump();
            let r = self.ring()?;
            let e = if self.is_ident("mod") { Some(self.modulus()?) } else { None };
            return Ok(Some(Context::Over(r, e)));
        }
        if self.is_ident("mod") {
            return Ok(Some(Context::Mod(self.modulus()?)));
        }
        if self.is_punct('(') && matches!(self.peek_at(1), Tok::Ident(s) if s == "mod") {
            self.bump();
            let e = self.modulus()?;
            self.expect_punct(')')?;
            return Ok(Some(Context::Mod(e)));
        }
        Ok(None)
    }

    fn modulus(&mut self) -> PResult<usize> {
        self.expect_ident("mod")?;
        self.expect_ident("t")?;
        self.expect_punct('^')?;
        let e = self.usize()?;
        if e == 0 {
            return self.error("truncation exponent must be positive");
        }
        Ok(e)
    }

    fn symbol(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct('{')?;
        let mut entries = vec![self.expr()?];
        while self.eat_punct(',') {
            entries.push(self.expr()?);
        }
        self.expect_punct('}')?;
        Ok(entries)
    }

    fn symbol_term(&mut self, sign: i64) -> PResult<(i64, Vec<Expr>)> {
        let mut c = sign;
        if let Tok::Int(_) = self.peek() {
            c *= self.uint()? as i64;
            self.expect_punct('*')?;
        }
        Ok((c, self.symbol()?))
    }

    fn looks_like_symbols(&self) -> bool {
        match self.peek() {
            Tok::Punct('{') => true,
            Tok::Punct('-') => matches!(self.peek_at(1), Tok::Punct('{'))
                || matches!((self.peek_at(1), self.peek_at(2), self.peek_at(3)), (Tok::Int(_), Tok::Punct('*'), Tok::Punct('{'))),
            Tok::Int(_) => matches!((self.peek_at(1), self.peek_at(2)), (Tok::Punct('*'), Tok::Punct('{'))),
            _ => false,
        }
    }

    pub fn statement(&mut self) -> PResult<Statement> {
        if self.looks_like_symbols() {
            let mut terms = Vec::new();
            let first_sign = if self.eat_punct('-') { -1 } else { 1 };
            terms.push(self.symbol_term(first_sign)?);
            loop {
                if self.eat_punct('+') {
                    terms.push(self.symbol_term(1)?);
                } else if self.eat_punct('-') {
                    terms.push(self.symbol_term(-1)?);
                } else {
                    break;
                }
            }
            let ctx = self.context()?;
            self.finish()?;
            return Ok(Statement::Symbols(terms, ctx));
        }
        let e = self.expr()?;
        let ctx = self.context()?;
        self.finish()?;
        Ok(Statement::Expr(e, ctx))
    }
}

/// Parse a statement: an expression, a symbol sum, or a tuple, with an
/// optional ring context.
pub fn parse_statement(src: &str) -> PResult<Statement> {
    let mut p = Parser::new(src)?;
    if p.is_punct('(') && tuple_ahead(&p) {
        p.bump();
        let mut items = vec![p.expr()?];
        while p.eat_punct(',') {
            items.push(p.expr()?);
        }
        p.expect_punct(')')?;
        let ctx = p.context()?;
        p.finish()?;
        return Ok(Statement::Tuple(items, ctx));
    }
    p.statement()
}

fn tuple_ahead(p: &Parser) -> bool {
    let mut depth = 0i32;
    for (t, _) in &p.toks[p.pos..] {
        match t {
            Tok::Punct('(') | Tok::Punct('{') | Tok::Punct('[') => depth += 1,
            Tok::Punct(')') | Tok::Punct('}') | Tok::Punct(']') => {
                depth -= 1;
                if depth == 0 {
                    return false;
                }
            }
            Tok::Punct(',') if depth == 1 => return true,
            _ => {}
        }
    }
    false
}

pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_ring(src: &str) -> PResult<RingDesc> {
    let mut p = Parser::new(src)?;
    let r = p.ring()?;
    p.finish()?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rings() {
        assert_eq!(parse_ring("GF(5)").unwrap(), RingDesc::Galois(5, 1));
        assert_eq!(
            parse_ring("GF(3)[t]/t^2").unwrap(),
            RingDesc::Trunc(Box::new(RingDesc::Galois(3, 1)), 2)
        );
        assert_eq!(
            parse_ring("QQ(x)").unwrap(),
            RingDesc::RatFun(Box::new(RingDesc::Rationals), "x".into())
        );
        assert_eq!(parse_ring("Z[a,b]").unwrap(), RingDesc::Universal(vec!["a".into(), "b".into()]));
        assert!(parse_ring("RatFun(GF(5), x)").is_ok());
        let err = parse_ring("Foo").unwrap_err();
        assert_eq!((err.line, err.col), (1, 1));
    }

    #[test]
    fn statements() {
        match parse_statement("teich(3) in W(4, GF(5))").unwrap() {
            Statement::Expr(Expr::Call(f, _), Some(Context::Witt(4, RingDesc::Galois(5, 1)))) => assert_eq!(f, "teich"),
            s => panic!("{s:?}"),
        }
        match parse_statement("{1 - t/2, 3} over QQ mod t^3").unwrap() {
            Statement::Symbols(terms, Some(Context::Over(RingDesc::Rationals, Some(3)))) => {
                assert_eq!(terms.len(), 1);
                assert_eq!(terms[0].1.len(), 2);
            }
            s => panic!("{s:?}"),
        }
        assert!(matches!(
            parse_statement("1 + 2*t + t^2 (mod t^3)").unwrap(),
            Statement::Expr(_, Some(Context::Mod(3)))
        ));
        assert!(matches!(
            parse_statement("(2, 3) over GF(5)").unwrap(),
            Statement::Tuple(v, Some(_)) if v.len() == 2
        ));
        assert!(matches!(
            parse_statement("2*{1 + t, 3} - {1 + t, 2} over GF(5) mod t^2").unwrap(),
            Statement::Symbols(v, _) if v[0].0 == 2 && v[1].0 == -1
        ));
    }

    #[test]
    fn wedge_and_power() {
        let e = parse_expr("t^2*dx^dy").unwrap();
        assert!(matches!(e, Expr::Mul(_, ref r) if matches!(**r, Expr::Wedge(_, _))));
        assert!(matches!(parse_expr("x^-2").unwrap(), Expr::Pow(_, -2)));
    }

    #[test]
    fn positions() {
        let err = parse_expr("1 +\n  * 2").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
        let err = parse_expr("3 $ 4").unwrap_err();
        assert_eq!((err.line, err.col), (1, 3));
    }
}
