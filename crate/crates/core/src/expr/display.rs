use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{Expr, Node, Q};

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(self, f)
    }
}

fn write_sum(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Add(items) => {
            for (k, t) in items.iter().enumerate() {
                let (c, body) = t.split_coefficient();
                match (k, c.is_negative()) {
                    (0, true) => f.write_char('-')?,
                    (0, false) => {}
                    (_, true) => f.write_str(" - ")?,
                    (_, false) => f.write_str(" + ")?,
                }
                write_product(&c.abs(), &body, f)?;
            }
            Ok(())
        }
        _ => write_term(e, f),
    }
}

/// A single summand, sign included.
fn write_term(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (c, body) = e.split_coefficient();
    if c.is_negative() {
        f.write_char('-')?;
    }
    write_product(&c.abs(), &body, f)
}

/// `c * body` with `c > 0`; negative powers of `body` go after a slash.
fn write_product(c: &Q, body: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if body.is_one_literal() {
        return write_number(c, f);
    }
    let factors: Vec<Expr> = match body.node() {
        Node::Mul(items) => items.clone(),
        _ => vec![body.clone()],
    };
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for g in factors {
        match g.node() {
            Node::Pow(b, e) if e.is_negative() => den.push(Expr::pow(b, -e.clone())),
            _ => num.push(g),
        }
    }
    let mut wrote = false;
    if !c.is_one() {
        if c.is_integer() {
            write!(f, "{}", c.numer())?;
        } else {
            write!(f, "({}/{})", c.numer(), c.denom())?;
        }
        wrote = true;
    }
    for g in &num {
        if wrote {
            f.write_char('*')?;
        }
        write_factor(g, f)?;
        wrote = true;
    }
    if !wrote {
        f.write_char('1')?;
    }
    match den.len() {
        0 => Ok(()),
        1 => {
            f.write_char('/')?;
            write_factor(&den[0], f)
        }
        _ => {
            f.write_str("/(")?;
            for (k, g) in den.iter().enumerate() {
                if k > 0 {
                    f.write_char('*')?;
                }
                write_factor(g, f)?;
            }
            f.write_char(')')
        }
    }
}

fn write_number(c: &Q, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Operand of `*` or `/`.
fn write_factor(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Add(_) | Node::Mul(_) => {
            f.write_char('(')?;
            write_sum(e, f)?;
            f.write_char(')')
        }
        Node::Num(n) if n.is_negative() || !n.is_integer() => {
            f.write_char('(')?;
            write_number(n, f)?;
            f.write_char(')')
        }
        Node::Pow(b, n) if n.is_negative() => {
            f.write_char('(')?;
            write_sum(&Expr::wrap(Node::Pow(b.clone(), n.clone())), f)?;
            f.write_char(')')
        }
        Node::Pow(b, n) => {
            write_base(b, f)?;
            f.write_char('^')?;
            if n.is_integer() {
                write!(f, "{}", n.numer())
            } else {
                write!(f, "({}/{})", n.numer(), n.denom())
            }
        }
        _ => write_atom(e, f),
    }
}

fn write_base(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Sym(_) | Node::Func(..) | Node::Apply { .. } => write_atom(e, f),
        Node::Num(n) if !n.is_negative() && n.is_integer() => write_number(n, f),
        _ => {
            f.write_char('(')?;
            write_sum(e, f)?;
            f.write_char(')')
        }
    }
}

fn write_atom(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Num(n) => write_number(n, f),
        Node::Sym(s) => f.write_str(s.name()),
        Node::Func(k, a) => {
            write!(f, "{}(", k.name())?;
            write_sum(a, f)?;
            f.write_char(')')
        }
        Node::Apply { name, order, arg } => {
            f.write_str(name)?;
            for _ in 0..*order {
                f.write_char('\'')?;
            }
            f.write_char('(')?;
            write_sum(arg, f)?;
            f.write_char(')')
        }
        _ => {
            f.write_char('(')?;
            write_sum(e, f)?;
            f.write_char(')')
        }
    }
}
