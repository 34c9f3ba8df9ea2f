//! Concrete syntax.
//!
//! ```text
//! expr  ::= '\' var '.' expr | 'let' binds 'in' expr | app
//! app   ::= atom var*
//! atom  ::= var | '(' expr ')'
//! binds ::= var '=' expr ((',' | ';') var '=' expr)*
//! ```
//!
//! `λ` is accepted for `\`, and `#` starts a comment running to the end of
//! the line. Application arguments must be variables; anything else is
//! either rejected or rewritten through [`desugar_app`].

use std::fmt;

use thiserror::Error;

use super::expr::{desugar_app, Expr};
use super::name::{is_ident_continue, is_ident_start, Name, NameError, NameSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error(
        "general application: the argument must be a variable; \
         `e1 e2` has to be pre-processed to `let x = e2 in e1 x`"
    )]
    GeneralApplication,
    #[error("`{0}` is bound twice in the same let")]
    DuplicateBinder(Name),
    #[error(transparent)]
    Name(#[from] NameError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Dot,
    LParen,
    RParen,
    Eq,
    Sep,
    Let,
    In,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Lambda => f.write_str("`\\`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Sep => f.write_str("`,`"),
            Tok::Let => f.write_str("`let`"),
            Tok::In => f.write_str("`in`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let bump = |line: &mut usize, col: &mut usize, c: char| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            bump(&mut line, &mut col, c);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                s.push(c);
                chars.next();
                col += 1;
            }
            let tok = match s.as_str() {
                "let" => Tok::Let,
                "in" => Tok::In,
                _ => Tok::Ident(s),
            };
            out.push((tok, pos));
            continue;
        }
        let tok = match c {
            '\\' | 'λ' => Tok::Lambda,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => Tok::Eq,
            ',' | ';' => Tok::Sep,
            _ => return Err(ParseError { pos, kind: ParseErrorKind::UnexpectedChar(c) }),
        };
        chars.next();
        bump(&mut line, &mut col, c);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    desugar: bool,
    avoid: NameSet,
    warnings: Vec<String>,
}

impl Parser {
    fn new(src: &str, desugar: bool) -> Result<Parser, ParseError> {
        let toks = lex(src)?;
        let mut avoid = NameSet::new();
        for (t, _) in &toks {
            if let Tok::Ident(s) = t {
                if let Ok(n) = Name::parse(s) {
                    avoid.insert(n);
                }
            }
        }
        Ok(Parser { toks, at: 0, desugar, avoid, warnings: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1.clone()
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found: self.peek().to_string(),
            },
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Name::parse(&s).map_err(|e| ParseError { pos, kind: e.into() })
            }
            _ => self.fail("a variable"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Lambda => {
                self.next();
                let x = self.name()?;
                self.expect(Tok::Dot, "`.`")?;
                Ok(Expr::lam(x, self.expr()?))
            }
            Tok::Let => {
                self.next();
                let mut binds: Vec<(Name, Expr)> = Vec::new();
                loop {
                    let pos = self.pos();
                    let x = self.name()?;
                    if binds.iter().any(|(y, _)| *y == x) {
                        return Err(ParseError { pos, kind: ParseErrorKind::DuplicateBinder(x) });
                    }
                    self.expect(Tok::Eq, "`=`")?;
                    binds.push((x, self.expr()?));
                    match self.peek() {
                        Tok::Sep => {
                            self.next();
                        }
                        Tok::In => {
                            self.next();
                            break;
                        }
                        _ => return self.fail("`,` or `in`"),
                    }
                }
                Ok(Expr::let_in(binds, self.expr()?))
            }
            _ => self.app(),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Ident(_) => Ok(Expr::Var(self.name()?)),
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.fail("an expression"),
        }
    }

    fn app(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            match self.peek() {
                Tok::Ident(_) => {
                    let x = self.name()?;
                    e = Expr::app(e, x);
                }
                Tok::LParen | Tok::Lambda | Tok::Let => {
                    let pos = self.pos();
                    let arg = match self.peek() {
                        Tok::LParen => self.atom()?,
                        _ => self.expr()?,
                    };
                    if let Expr::Var(x) = arg {
                        e = Expr::app(e, x);
                        continue;
                    }
                    if !self.desugar {
                        return Err(ParseError { pos, kind: ParseErrorKind::GeneralApplication });
                    }
                    let d = desugar_app(e, arg, &self.avoid);
                    if let Expr::Let(bs, _) = &d {
                        self.avoid.insert(bs[0].0.clone());
                        self.warnings.push(format!(
                            "{pos}: general application rewritten with `let {} = ...`",
                            bs[0].0
                        ));
                    }
                    e = d;
                }
                _ => return Ok(e),
            }
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }
}

/// Parses an expression, rejecting general applications.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, false)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses an expression, rewriting general applications into lets. Returns
/// one warning per rewrite.
pub fn parse_desugared(src: &str) -> Result<(Expr, Vec<String>), ParseError> {
    let mut p = Parser::new(src, true)?;
    let e = p.expr()?;
    p.finish()?;
    Ok((e, p.warnings))
}

/// Parses a single `name = expr` heap line.
pub(crate) fn parse_binding(src: &str, desugar: bool) -> Result<(Name, Expr, Vec<String>), ParseError> {
    let mut p = Parser::new(src, desugar)?;
    let x = p.name()?;
    p.expect(Tok::Eq, "`=`")?;
    let e = p.expr()?;
    p.finish()?;
    Ok((x, e, p.warnings))
}
