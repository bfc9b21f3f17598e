//! Immutable expression trees with exact rational coefficients.
//!
//! Every [`Expr`] is built through smart constructors which keep the tree in
//! a light canonical shape: sums and products are flattened and sorted,
//! numeric constants are folded, like terms and like bases are merged.
//! Deeper simplification (common denominators, cancellation, exponential
//! bookkeeping) lives in [`canonicalize`].

mod diff;
mod display;
mod eval;
mod normal;
mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::jet::MultiIndex;

pub use diff::{derive_with, partial_derivative};
pub use eval::{evaluate_at, DomainError, FunctionTable, Point};
pub use normal::canonicalize;
pub use parse::{parse_expr, ExprParser, ParseError};

/// Exact rational number used for coefficients and exponents.
pub type Q = BigRational;

/// Builds a rational from a numerator and denominator.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// What a symbol stands for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    /// The `i`-th independent variable.
    Independent(usize),
    /// The jet coordinate `u^a_J`.
    Jet { dep: usize, index: MultiIndex },
    /// A free constant such as `eps` or `c1`.
    Parameter(Arc<str>),
}

/// A named variable. Identity is carried by the kind alone; the name only
/// matters for printing, so `u_xy` and `u_yx` are the same symbol.
#[derive(Clone, Debug)]
pub struct Symbol {
    kind: SymbolKind,
    name: Arc<str>,
}

impl Symbol {
    pub fn new(kind: SymbolKind, name: impl Into<Arc<str>>) -> Self {
        Symbol { kind, name: name.into() }
    }

    pub fn parameter(name: &str) -> Self {
        Symbol::new(SymbolKind::Parameter(name.into()), name)
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Jet order of the symbol (0 for variables and parameters).
    pub fn jet_order(&self) -> u32 {
        match &self.kind {
            SymbolKind::Jet { index, .. } => index.order(),
            _ => 0,
        }
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self.kind, SymbolKind::Parameter(_))
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind.cmp(&other.kind)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Elementary functions of one argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

/// Node of an expression tree. Variant order is the node order used when
/// sorting sums and products.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Q),
    Sym(Symbol),
    Pow(Expr, Q),
    Func(Func, Expr),
    /// `name^(order)(arg)`: formal derivative of an uninterpreted function.
    Apply { name: Arc<str>, order: u32, arg: Expr },
    Mul(Vec<Expr>),
    Add(Vec<Expr>),
}

/// Shared immutable expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(n: Q) -> Self {
        Expr::num(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::sym(s)
    }
}

impl Expr {
    fn wrap(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(n: Q) -> Self {
        Expr::wrap(Node::Num(n))
    }

    pub fn int(n: i64) -> Self {
        Expr::num(Q::from_integer(n.into()))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Expr::num(q(n, d))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn sym(s: Symbol) -> Self {
        Expr::wrap(Node::Sym(s))
    }

    pub fn parameter(name: &str) -> Self {
        Expr::sym(Symbol::parameter(name))
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self.node() {
            Node::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        self.as_num().is_some_and(|n| n.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        self.as_num().is_some_and(|n| n.is_one())
    }

    /// Sum with flattening, constant folding and collection of like terms.
    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Q::zero();
        let mut collected: BTreeMap<Expr, Q> = BTreeMap::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Num(n) => constant += n,
                Node::Add(items) => stack.extend(items.iter().rev().cloned()),
                _ => {
                    let (c, body) = t.split_coefficient();
                    *collected.entry(body).or_insert_with(Q::zero) += c;
                }
            }
        }
        let mut out = Vec::with_capacity(collected.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (body, c) in collected {
            if !c.is_zero() {
                out.push(Expr::scaled(c, body));
            }
        }
        out.sort();
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::wrap(Node::Add(out)),
        }
    }

    /// Product with flattening, constant folding and merging of like bases.
    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coeff = Q::one();
        let mut bases: BTreeMap<Expr, Q> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Num(n) => {
                    if n.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= n;
                }
                Node::Mul(items) => stack.extend(items.iter().cloned()),
                Node::Func(Func::Exp, a) => exp_args.push(a.clone()),
                Node::Pow(b, e) => *bases.entry(b.clone()).or_insert_with(Q::zero) += e,
                _ => *bases.entry(f.clone()).or_insert_with(Q::zero) += Q::one(),
            }
        }
        Expr::assemble_product(coeff, bases, exp_args)
    }

    fn assemble_product(mut coeff: Q, bases: BTreeMap<Expr, Q>, exp_args: Vec<Expr>) -> Expr {
        let mut out: Vec<Expr> = Vec::new();
        let mut pending: Vec<Expr> = Vec::new();
        for (b, e) in bases {
            if e.is_zero() {
                continue;
            }
            let p = Expr::pow(&b, e);
            match p.node() {
                Node::Num(n) => coeff *= n,
                Node::Pow(..) | Node::Sym(_) | Node::Func(..) | Node::Apply { .. } | Node::Add(_) => out.push(p),
                Node::Mul(_) => pending.push(p),
            }
        }
        if !exp_args.is_empty() {
            let arg = Expr::add_all(exp_args);
            let e = Expr::exp(&arg);
            match e.node() {
                Node::Num(n) => coeff *= n,
                Node::Func(Func::Exp, _) => out.push(e),
                _ => pending.push(e),
            }
        }
        if !pending.is_empty() {
            pending.extend(out);
            pending.push(Expr::num(coeff));
            return Expr::mul_all(pending);
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        out.sort();
        if !coeff.is_one() {
            out.insert(0, Expr::num(coeff));
        }
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().unwrap(),
            _ => Expr::wrap(Node::Mul(out)),
        }
    }

    /// Splits `c * body` with `c` the numeric coefficient.
    pub fn split_coefficient(&self) -> (Q, Expr) {
        match self.node() {
            Node::Num(n) => (n.clone(), Expr::one()),
            Node::Mul(items) => match items[0].node() {
                Node::Num(n) => {
                    let rest: Vec<Expr> = items[1..].to_vec();
                    let body = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr::wrap(Node::Mul(rest))
                    };
                    (n.clone(), body)
                }
                _ => (Q::one(), self.clone()),
            },
            _ => (Q::one(), self.clone()),
        }
    }

    fn scaled(c: Q, body: Expr) -> Expr {
        if c.is_one() {
            return body;
        }
        if body.is_one_literal() {
            return Expr::num(c);
        }
        let mut items = match body.node() {
            Node::Mul(items) => items.clone(),
            _ => vec![body],
        };
        items.insert(0, Expr::num(c));
        Expr::wrap(Node::Mul(items))
    }

    /// `base^e` for a rational exponent.
    pub fn pow(base: &Expr, e: Q) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return base.clone();
        }
        match base.node() {
            Node::Num(n) => {
                if e.is_integer() {
                    if n.is_zero() && e.is_negative() {
                        return Expr::wrap(Node::Pow(base.clone(), e));
                    }
                    return Expr::num(rational_powi(n, e.to_integer()));
                }
                if n.is_zero() {
                    return if e.is_positive() { Expr::zero() } else { Expr::wrap(Node::Pow(base.clone(), e)) };
                }
                if n.is_one() {
                    return Expr::one();
                }
                if let Some(root) = exact_rational_root(n, &e) {
                    return Expr::num(root);
                }
                Expr::wrap(Node::Pow(base.clone(), e))
            }
            Node::Pow(b, e2) => {
                if e.is_integer() || e2.numer().abs().is_one() {
                    Expr::pow(b, e2 * &e)
                } else {
                    Expr::wrap(Node::Pow(base.clone(), e))
                }
            }
            Node::Mul(items) if e.is_integer() => Expr::mul_all(items.iter().map(|f| Expr::pow(f, e.clone()))),
            Node::Func(Func::Exp, a) => Expr::exp(&Expr::mul_all([Expr::num(e), a.clone()])),
            _ => Expr::wrap(Node::Pow(base.clone(), e)),
        }
    }

    pub fn powi(&self, n: i64) -> Expr {
        Expr::pow(self, Q::from_integer(n.into()))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::pow(self, q(1, 2))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn neg(&self) -> Expr {
        Expr::mul_all([Expr::int(-1), self.clone()])
    }

    pub fn exp(arg: &Expr) -> Expr {
        match arg.node() {
            Node::Num(n) if n.is_zero() => Expr::one(),
            Node::Func(Func::Log, inner) => inner.clone(),
            _ => Expr::wrap(Node::Func(Func::Exp, arg.clone())),
        }
    }

    pub fn log(arg: &Expr) -> Expr {
        match arg.node() {
            Node::Num(n) if n.is_one() => Expr::zero(),
            Node::Func(Func::Exp, inner) => inner.clone(),
            _ => Expr::wrap(Node::Func(Func::Log, arg.clone())),
        }
    }

    pub fn sin(arg: &Expr) -> Expr {
        if arg.is_zero_literal() {
            return Expr::zero();
        }
        Expr::wrap(Node::Func(Func::Sin, arg.clone()))
    }

    pub fn cos(arg: &Expr) -> Expr {
        if arg.is_zero_literal() {
            return Expr::one();
        }
        Expr::wrap(Node::Func(Func::Cos, arg.clone()))
    }

    pub fn func(f: Func, arg: &Expr) -> Expr {
        match f {
            Func::Exp => Expr::exp(arg),
            Func::Log => Expr::log(arg),
            Func::Sin => Expr::sin(arg),
            Func::Cos => Expr::cos(arg),
        }
    }

    /// Uninterpreted function `name` differentiated `order` times, applied to `arg`.
    pub fn apply(name: &str, order: u32, arg: &Expr) -> Expr {
        Expr::wrap(Node::Apply { name: name.into(), order, arg: arg.clone() })
    }

    /// All symbols occurring in the expression.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            Node::Pow(b, _) => b.collect_symbols(out),
            Node::Func(_, a) | Node::Apply { arg: a, .. } => a.collect_symbols(out),
            Node::Mul(items) | Node::Add(items) => items.iter().for_each(|t| t.collect_symbols(out)),
        }
    }

    /// Names of uninterpreted functions occurring in the expression.
    pub fn function_names(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Node::Apply { name, .. } = e.node() {
                out.insert(name.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self.node() {
            Node::Num(_) | Node::Sym(_) => {}
            Node::Pow(b, _) => b.visit(f),
            Node::Func(_, a) | Node::Apply { arg: a, .. } => a.visit(f),
            Node::Mul(items) | Node::Add(items) => items.iter().for_each(|t| t.visit(f)),
        }
    }

    /// Highest jet order among the symbols of the expression.
    pub fn jet_order(&self) -> u32 {
        self.symbols().iter().map(Symbol::jet_order).max().unwrap_or(0)
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if e.as_symbol() == Some(s) {
                found = true;
            }
        });
        found
    }

    /// Simultaneous substitution of symbols, followed by canonicalization.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        canonicalize(&self.replace(bindings))
    }

    /// Simultaneous substitution without canonicalization.
    pub fn replace(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        self.map_bottom_up(&|e| match e.node() {
            Node::Sym(s) => bindings.get(s).cloned(),
            _ => None,
        })
    }

    /// Rebuilds the tree through the smart constructors, letting `f` replace
    /// leaves first.
    pub fn map_bottom_up(&self, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        if let Some(r) = f(self) {
            return r;
        }
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Pow(b, e) => Expr::pow(&b.map_bottom_up(f), e.clone()),
            Node::Func(k, a) => Expr::func(*k, &a.map_bottom_up(f)),
            Node::Apply { name, order, arg } => Expr::apply(name, *order, &arg.map_bottom_up(f)),
            Node::Mul(items) => Expr::mul_all(items.iter().map(|t| t.map_bottom_up(f))),
            Node::Add(items) => Expr::add_all(items.iter().map(|t| t.map_bottom_up(f))),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

pub(crate) fn rational_powi(n: &Q, e: BigInt) -> Q {
    let k: i32 = e.clone().try_into().expect("exponent out of range");
    if k >= 0 {
        num_traits::pow(n.clone(), k as usize)
    } else {
        num_traits::pow(n.recip(), (-k) as usize)
    }
}

/// Exact `n^e` when both numerator and denominator are perfect powers.
fn exact_rational_root(n: &Q, e: &Q) -> Option<Q> {
    let d: u32 = e.denom().try_into().ok()?;
    let root = |x: &BigInt| -> Option<BigInt> {
        if x.is_negative() {
            if d.is_multiple_of(2) {
                return None;
            }
            let r = (-x).nth_root(d);
            return (num_traits::pow(r.clone(), d as usize) == -x).then(|| -r);
        }
        let r = x.nth_root(d);
        (num_traits::pow(r.clone(), d as usize) == *x).then_some(r)
    };
    let base = Q::new(root(n.numer())?, root(n.denom())?);
    Some(rational_powi(&base, e.numer().clone()))
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add_all([self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add_all([self, rhs.neg()])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul_all([self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul_all([self, rhs.recip()])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl<'a> std::ops::Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add_all([self.clone(), rhs.clone()])
    }
}

impl<'a> std::ops::Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::add_all([self.clone(), rhs.neg()])
    }
}

impl<'a> std::ops::Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul_all([self.clone(), rhs.clone()])
    }
}

impl<'a> std::ops::Div<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        Expr::mul_all([self.clone(), rhs.recip()])
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add_all(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul_all(iter)
    }
}
