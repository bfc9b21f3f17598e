use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use super::{Expr, Func, Q};
use crate::jet::{JetContext, Resolve};

/// Error while reading an expression; offsets are byte positions in the
/// parsed text.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared symbol `{name}` at byte {offset}")]
    Undeclared { offset: usize, name: String },
    #[error("subscript `{subscript}` at byte {offset} does not name declared independent variables")]
    BadSubscript { offset: usize, subscript: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::Undeclared { offset, .. }
            | ParseError::BadSubscript { offset, .. } => *offset,
        }
    }

    /// Same error with the offset moved by `by` bytes.
    pub fn shifted(self, by: usize) -> ParseError {
        match self {
            ParseError::Syntax { offset, message } => ParseError::Syntax { offset: offset + by, message },
            ParseError::Undeclared { offset, name } => ParseError::Undeclared { offset: offset + by, name },
            ParseError::BadSubscript { offset, subscript } => {
                ParseError::BadSubscript { offset: offset + by, subscript }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let int_part = &text[start..i];
            let mut value = Q::from_integer(int_part.parse::<BigInt>().unwrap_or_else(|_| BigInt::zero()));
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let fs = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let frac = &text[fs..i];
                if !frac.is_empty() {
                    let n: BigInt = frac.parse().expect("digits");
                    let d = BigInt::from(10).pow(frac.len() as u32);
                    value += Q::new(n, d);
                }
            }
            out.push((start, Tok::Num(value)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()[],'".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(ParseError::Syntax { offset: i, message: format!("unexpected character `{ch}`") });
        }
    }
    Ok(out)
}

/// Recursive-descent reader for the expression language: `+ - * / ^`,
/// `exp log sin cos sqrt`, declared functions with primes (`V'(r)`),
/// jet names such as `u_xy` or `q1dd`, total derivatives `D[x](e)` and,
/// optionally, named subexpressions.
pub struct ExprParser<'a> {
    ctx: &'a JetContext,
    names: Option<&'a BTreeMap<String, Expr>>,
}

struct Cursor<'t> {
    toks: &'t [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::Syntax { offset: self.offset(), message: format!("expected `{c}`") })
        }
    }
}

impl<'a> ExprParser<'a> {
    pub fn new(ctx: &'a JetContext) -> Self {
        ExprParser { ctx, names: None }
    }

    /// Allows references to previously defined named expressions.
    pub fn with_names(mut self, names: &'a BTreeMap<String, Expr>) -> Self {
        self.names = Some(names);
        self
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        let toks = lex(text)?;
        let mut cur = Cursor { toks: &toks, pos: 0, end: text.len() };
        if toks.is_empty() {
            return Err(ParseError::Syntax { offset: 0, message: "empty expression".into() });
        }
        let e = self.sum(&mut cur)?;
        if cur.pos < toks.len() {
            return Err(ParseError::Syntax { offset: cur.offset(), message: "unexpected trailing input".into() });
        }
        Ok(e)
    }

    fn sum(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let mut terms = vec![self.product(cur)?];
        loop {
            if cur.eat('+') {
                terms.push(self.product(cur)?);
            } else if cur.eat('-') {
                terms.push(self.product(cur)?.neg());
            } else {
                return Ok(Expr::add_all(terms));
            }
        }
    }

    fn product(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let mut acc = self.unary(cur)?;
        loop {
            if cur.eat('*') {
                acc = acc * self.unary(cur)?;
            } else if cur.eat('/') {
                acc = acc / self.unary(cur)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        if cur.eat('-') {
            return Ok(self.unary(cur)?.neg());
        }
        if cur.eat('+') {
            return self.unary(cur);
        }
        self.power(cur)
    }

    fn power(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let base = self.primary(cur)?;
        if !cur.eat('^') {
            return Ok(base);
        }
        let exponent = self.unary(cur)?;
        Ok(match exponent.as_num() {
            Some(n) => Expr::pow(&base, n.clone()),
            None => Expr::exp(&(exponent * Expr::log(&base))),
        })
    }

    fn call_arg(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        cur.expect('(')?;
        let e = self.sum(cur)?;
        cur.expect(')')?;
        Ok(e)
    }

    fn primary(&self, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let offset = cur.offset();
        let Some(tok) = cur.peek().cloned() else {
            return Err(ParseError::Syntax { offset, message: "unexpected end of expression".into() });
        };
        cur.pos += 1;
        match tok {
            Tok::Num(n) => Ok(Expr::num(n)),
            Tok::Op('(') => {
                let e = self.sum(cur)?;
                cur.expect(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(ParseError::Syntax { offset, message: format!("unexpected `{c}`") }),
            Tok::Ident(name) => self.identifier(&name, offset, cur),
        }
    }

    fn identifier(&self, name: &str, offset: usize, cur: &mut Cursor) -> Result<Expr, ParseError> {
        let builtin = match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        };
        if let Some(f) = builtin {
            return Ok(Expr::func(f, &self.call_arg(cur)?));
        }
        if name == "sqrt" {
            return Ok(self.call_arg(cur)?.sqrt());
        }
        if name == "D" && cur.peek() == Some(&Tok::Op('[')) {
            cur.pos += 1;
            let var_offset = cur.offset();
            let var = match cur.peek().cloned() {
                Some(Tok::Ident(v)) => v,
                _ => return Err(ParseError::Syntax { offset: var_offset, message: "expected a variable".into() }),
            };
            cur.pos += 1;
            let Some(i) = self.ctx.independent_names().iter().position(|n| **n == *var) else {
                return Err(ParseError::BadSubscript { offset: var_offset, subscript: var });
            };
            cur.expect(']')?;
            let arg = self.call_arg(cur)?;
            return Ok(self.ctx.total_derivative(&arg, i));
        }
        if self.ctx.is_function(name) {
            let mut order = 0;
            while cur.eat('\'') {
                order += 1;
            }
            return Ok(Expr::apply(name, order, &self.call_arg(cur)?));
        }
        if let Some(e) = self.names.and_then(|m| m.get(name)) {
            return Ok(e.clone());
        }
        match self.ctx.resolve(name) {
            Ok(e) => Ok(e),
            Err(Resolve::Undeclared) => Err(ParseError::Undeclared { offset, name: name.to_string() }),
            Err(Resolve::BadSubscript(subscript)) => Err(ParseError::BadSubscript { offset, subscript }),
        }
    }
}

/// Parses `text` against the declarations of `ctx`.
pub fn parse_expr(text: &str, ctx: &JetContext) -> Result<Expr, ParseError> {
    ExprParser::new(ctx).parse(text)
}
