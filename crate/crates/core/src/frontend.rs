//! Concrete syntax.
//!
//! ```text
//! type ::= '*' | type '->' type | '(' type ')'        -- arrows associate right
//! term ::= ident | '\' ident ':' type '.' term | term term | '(' term ')'
//! ```
//!
//! Application associates left and binds tighter than a lambda body, which
//! extends as far right as possible. `--` starts a line comment.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{infer_type_located, Checked, Cxt, Nf, PathStep, Tm, Ty, TypeError, Var};

/// A 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

/// Named lambda terms as written by the user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceTm {
    Var {
        name: String,
        pos: Pos,
    },
    Abs {
        name: String,
        ty: Ty,
        body: Box<SurfaceTm>,
        pos: Pos,
    },
    App(Box<SurfaceTm>, Box<SurfaceTm>),
}

impl SurfaceTm {
    /// Where the term starts in the source.
    pub fn pos(&self) -> Pos {
        match self {
            SurfaceTm::Var { pos, .. } | SurfaceTm::Abs { pos, .. } => *pos,
            SurfaceTm::App(fun, _) => fun.pos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {pos}: expected {}, found {found}", expected_list(.expected))]
pub struct ParseError {
    pub pos: Pos,
    pub expected: BTreeSet<String>,
    pub found: String,
}

fn expected_list(expected: &BTreeSet<String>) -> String {
    let items: Vec<&str> = expected.iter().map(String::as_str).collect();
    match items.as_slice() {
        [] => "nothing".to_owned(),
        [one] => (*one).to_owned(),
        many => format!("one of {}", many.join(", ")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown variable `{name}` at {pos}")]
pub struct ScopeError {
    pub name: String,
    pub pos: Pos,
}

/// Anything that can go wrong between source text and a checked term.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Scope(#[from] ScopeError),
    #[error("type error at {pos}: {error}")]
    Type { error: TypeError, pos: Pos },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Backslash,
    Colon,
    Dot,
    LParen,
    RParen,
    Star,
    Arrow,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Backslash => "'\\'".to_owned(),
            Token::Colon => "':'".to_owned(),
            Token::Dot => "'.'".to_owned(),
            Token::LParen => "'('".to_owned(),
            Token::RParen => "')'".to_owned(),
            Token::Star => "'*'".to_owned(),
            Token::Arrow => "'->'".to_owned(),
            Token::Eof => "end of input".to_owned(),
        }
    }
}

const IDENT: &str = "identifier";

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(input: &str) -> Result<Vec<(Token, Pos)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = input.chars().peekable();
    let mut line = 1;
    let mut col = 1;

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        let token = match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '\\' => Token::Backslash,
            ':' => Token::Colon,
            '.' => Token::Dot,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '*' => Token::Star,
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('>') => Token::Arrow,
                    Some('-') => {
                        while let Some(&c) = chars.peek() {
                            if c == '\n' {
                                break;
                            }
                            bump(&mut chars);
                        }
                        continue;
                    }
                    other => {
                        return Err(ParseError {
                            pos,
                            expected: ["'->'".to_owned(), "'--'".to_owned()].into(),
                            found: match other {
                                Some(c) => format!("'-{c}'"),
                                None => "'-'".to_owned(),
                            },
                        })
                    }
                }
            }
            c if is_ident_start(c) => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    name.push(c);
                    bump(&mut chars);
                }
                tokens.push((Token::Ident(name), pos));
                continue;
            }
            other => {
                return Err(ParseError {
                    pos,
                    expected: ["token".to_owned()].into(),
                    found: format!("character {other:?}"),
                })
            }
        };
        bump(&mut chars);
        tokens.push((token, pos));
    }
    tokens.push((Token::Eof, Pos { line, col }));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, Pos)>,
    index: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.index].0
    }

    fn pos(&self) -> Pos {
        self.tokens[self.index].1
    }

    fn advance(&mut self) -> (Token, Pos) {
        let token = self.tokens[self.index].clone();
        if self.index + 1 < self.tokens.len() {
            self.index += 1;
        }
        token
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| (*s).to_owned()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, token: Token) -> Result<Pos, ParseError> {
        if *self.peek() == token {
            Ok(self.advance().1)
        } else {
            Err(self.error(&[&token.describe()]))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek() {
            Token::Ident(_) => match self.advance() {
                (Token::Ident(name), pos) => Ok((name, pos)),
                _ => unreachable!(),
            },
            _ => Err(self.error(&[IDENT])),
        }
    }

    fn ty(&mut self) -> Result<Ty, ParseError> {
        crate::stack::guard(|| self.ty_unguarded())
    }

    fn ty_unguarded(&mut self) -> Result<Ty, ParseError> {
        let dom = match self.peek() {
            Token::Star => {
                self.advance();
                Ty::Star
            }
            Token::LParen => {
                self.advance();
                let inner = self.ty()?;
                self.expect(Token::RParen)?;
                inner
            }
            _ => return Err(self.error(&["'*'", "'('"])),
        };
        if *self.peek() == Token::Arrow {
            self.advance();
            Ok(Ty::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn lambda(&mut self) -> Result<SurfaceTm, ParseError> {
        let pos = self.expect(Token::Backslash)?;
        let (name, _) = self.ident()?;
        self.expect(Token::Colon)?;
        let ty = self.ty()?;
        self.expect(Token::Dot)?;
        let body = self.term()?;
        Ok(SurfaceTm::Abs {
            name,
            ty,
            body: Box::new(body),
            pos,
        })
    }

    fn atom(&mut self) -> Result<Option<SurfaceTm>, ParseError> {
        match self.peek() {
            Token::Ident(_) => {
                let (name, pos) = self.ident()?;
                Ok(Some(SurfaceTm::Var { name, pos }))
            }
            Token::LParen => {
                self.advance();
                let inner = self.term()?;
                self.expect(Token::RParen)?;
                Ok(Some(inner))
            }
            _ => Ok(None),
        }
    }

    fn term(&mut self) -> Result<SurfaceTm, ParseError> {
        crate::stack::guard(|| {
            if *self.peek() == Token::Backslash {
                return self.lambda();
            }
            let Some(mut term) = self.atom()? else {
                return Err(self.error(&[IDENT, "'('", "'\\'"]));
            };
            loop {
                if *self.peek() == Token::Backslash {
                    let arg = self.lambda()?;
                    return Ok(SurfaceTm::App(Box::new(term), Box::new(arg)));
                }
                match self.atom()? {
                    Some(arg) => term = SurfaceTm::App(Box::new(term), Box::new(arg)),
                    None => return Ok(term),
                }
            }
        })
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Token::Eof => Ok(()),
            _ => Err(self.error(&["end of input", IDENT, "'('", "'\\'"])),
        }
    }
}

/// Parse a term.
pub fn parse(input: &str) -> Result<SurfaceTm, ParseError> {
    let mut parser = Parser {
        tokens: lex(input)?,
        index: 0,
    };
    let term = parser.term()?;
    parser.finish()?;
    Ok(term)
}

/// Parse a type.
pub fn parse_ty(input: &str) -> Result<Ty, ParseError> {
    let mut parser = Parser {
        tokens: lex(input)?,
        index: 0,
    };
    let ty = parser.ty()?;
    match parser.peek() {
        Token::Eof => Ok(ty),
        _ => Err(parser.error(&["end of input", "'->'"])),
    }
}

/// The context described by free-variable declarations, outermost first.
pub fn free_cxt(free: &[(String, Ty)]) -> Cxt {
    free.iter().map(|(_, ty)| ty.clone()).collect()
}

/// Convert names to de Bruijn indices. Binders shadow free declarations and
/// each other; among free declarations the last one with a name wins.
pub fn resolve(free: &[(String, Ty)], term: &SurfaceTm) -> Result<Tm, ScopeError> {
    let mut binders = Vec::new();
    resolve_in(free, &mut binders, term)
}

fn resolve_in<'a>(
    free: &[(String, Ty)],
    binders: &mut Vec<&'a str>,
    term: &'a SurfaceTm,
) -> Result<Tm, ScopeError> {
    crate::stack::guard(|| match term {
        SurfaceTm::Var { name, pos } => {
            if let Some(i) = binders.iter().rposition(|b| b == name) {
                return Ok(Tm::var(binders.len() - 1 - i));
            }
            match free.iter().rposition(|(n, _)| n == name) {
                Some(i) => Ok(Tm::var(binders.len() + free.len() - 1 - i)),
                None => Err(ScopeError {
                    name: name.clone(),
                    pos: *pos,
                }),
            }
        }
        SurfaceTm::Abs { name, ty, body, .. } => {
            binders.push(name);
            let body = resolve_in(free, binders, body);
            binders.pop();
            Ok(Tm::abs(ty.clone(), body?))
        }
        SurfaceTm::App(fun, arg) => Ok(Tm::app(
            resolve_in(free, binders, fun)?,
            resolve_in(free, binders, arg)?,
        )),
    })
}

/// Parse, resolve and type check source text against free declarations.
pub fn elaborate(free: &[(String, Ty)], input: &str) -> Result<Checked, FrontendError> {
    let surface = parse(input)?;
    let term = resolve(free, &surface)?;
    infer_type_located(&free_cxt(free), &term).map_err(|located| FrontendError::Type {
        error: located.error,
        pos: locate(&surface, &located.path),
    })
}

fn locate(term: &SurfaceTm, path: &[PathStep]) -> Pos {
    let mut node = term;
    for step in path {
        node = match (step, node) {
            (PathStep::Body, SurfaceTm::Abs { body, .. }) => body,
            (PathStep::Fun, SurfaceTm::App(fun, _)) => fun,
            (PathStep::Arg, SurfaceTm::App(_, arg)) => arg,
            _ => break,
        };
    }
    node.pos()
}

/// Canonical binder names `x0, x1, ...`, skipping any that clash with free names.
struct Names<'a> {
    free: Vec<&'a str>,
    fresh: Vec<String>,
    next: usize,
}

impl<'a> Names<'a> {
    fn new(free: &'a [(String, Ty)]) -> Names<'a> {
        Names {
            free: free.iter().map(|(n, _)| n.as_str()).collect(),
            fresh: Vec::new(),
            next: 0,
        }
    }

    /// Name of the binder with `depth` binders above it.
    fn binder(&mut self, depth: usize) -> String {
        while self.fresh.len() <= depth {
            let candidate = format!("x{}", self.next);
            self.next += 1;
            if !self.free.contains(&candidate.as_str()) {
                self.fresh.push(candidate);
            }
        }
        self.fresh[depth].clone()
    }

    fn var(&self, binders: &[String], x: Var) -> String {
        let depth = binders.len();
        if x.0 < depth {
            return binders[depth - 1 - x.0].clone();
        }
        let k = x.0 - depth;
        match self.free.len().checked_sub(k + 1) {
            Some(i) => self.free[i].to_owned(),
            None => format!("#{}", x.0),
        }
    }
}

/// Print a term with named binders; free variables take their declared names.
pub fn print_tm(free: &[(String, Ty)], term: &Tm) -> String {
    let mut names = Names::new(free);
    let mut binders = Vec::new();
    let mut out = String::new();
    write_tm(&mut names, &mut binders, term, Prec::Top, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Fun,
    Arg,
}

fn write_tm(names: &mut Names, binders: &mut Vec<String>, term: &Tm, prec: Prec, out: &mut String) {
    crate::stack::guard(|| match term {
        Tm::Var(x) => out.push_str(&names.var(binders, *x)),
        Tm::Abs(dom, body) => {
            let name = names.binder(binders.len());
            if prec > Prec::Top {
                out.push('(');
            }
            out.push_str(&format!("\\{name}:{dom}. "));
            binders.push(name);
            write_tm(names, binders, body, Prec::Top, out);
            binders.pop();
            if prec > Prec::Top {
                out.push(')');
            }
        }
        Tm::App(fun, arg) => {
            if prec == Prec::Arg {
                out.push('(');
            }
            write_tm(names, binders, fun, Prec::Fun, out);
            out.push(' ');
            write_tm(names, binders, arg, Prec::Arg, out);
            if prec == Prec::Arg {
                out.push(')');
            }
        }
    })
}

/// Print a normal form of type `ty` whose free variables are `free`.
pub fn print_nf(free: &[(String, Ty)], ty: &Ty, nf: &Nf) -> Result<String, TypeError> {
    let term = crate::syntax::embed_nf(&free_cxt(free), ty, nf)?;
    Ok(print_tm(free, &term))
}

/// Print a term with bare de Bruijn indices, e.g. `\*->*. \*. 1 (1 0)`.
pub fn print_de_bruijn(term: &Tm) -> String {
    let mut out = String::new();
    write_de_bruijn(term, Prec::Top, &mut out);
    out
}

fn write_de_bruijn(term: &Tm, prec: Prec, out: &mut String) {
    crate::stack::guard(|| match term {
        Tm::Var(x) => out.push_str(&x.0.to_string()),
        Tm::Abs(dom, body) => {
            if prec > Prec::Top {
                out.push('(');
            }
            out.push_str(&format!("\\{dom}. "));
            write_de_bruijn(body, Prec::Top, out);
            if prec > Prec::Top {
                out.push(')');
            }
        }
        Tm::App(fun, arg) => {
            if prec == Prec::Arg {
                out.push('(');
            }
            write_de_bruijn(fun, Prec::Fun, out);
            out.push(' ');
            write_de_bruijn(arg, Prec::Arg, out);
            if prec == Prec::Arg {
                out.push(')');
            }
        }
    })
}
