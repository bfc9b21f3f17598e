//! Rational normal form.
//!
//! An expression is mapped to `num / prod(f_k^{e_k})` where `num` is a
//! Laurent polynomial over a set of atoms (symbols, exponentials, logs,
//! trig functions, uninterpreted functions and radicals) and each `f_k` is
//! a distinct normalized polynomial: no monomial content, leading
//! coefficient one. Factors common to numerator and denominator are
//! removed by exact division. The form is unique for rational functions in
//! algebraically independent atoms, so symbolic zero testing is complete
//! there; anything beyond that falls to the numeric oracle.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{rational_powi, Expr, Func, Node, Symbol, Q};

const DIVISION_STEP_CAP: usize = 20_000;
const TRIAL_DIVISION_CAP: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Sym(Symbol),
    /// Positive integer base carrying a fractional exponent.
    Prime(BigInt),
    /// `exp(m)` for a monomial `m` with unit coefficient.
    Exp(Mono),
    /// `exp(m / den)` for a non-polynomial argument.
    ExpOf(Box<Rat>),
    Log(Box<Rat>),
    Sin(Box<Rat>),
    Cos(Box<Rat>),
    Apply(Arc<str>, u32, Box<Rat>),
    /// Non-monomial base carrying a fractional exponent.
    Radical(Box<Rat>),
    /// Result of dividing by an identically vanishing expression.
    Undefined,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Mono(Vec<(Atom, Q)>);

impl Mono {
    fn one() -> Self {
        Mono(Vec::new())
    }

    fn atom(a: Atom, e: Q) -> Self {
        if e.is_zero() {
            Mono::one()
        } else {
            Mono(vec![(a, e)])
        }
    }

    fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, o: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].0.cmp(&o.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(o.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = &self.0[i].1 + &o.0[j].1;
                    if !e.is_zero() {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Mono(out)
    }

    fn pow(&self, e: &Q) -> Mono {
        if e.is_zero() {
            return Mono::one();
        }
        Mono(self.0.iter().map(|(a, k)| (a.clone(), k * e)).collect())
    }

    fn inv(&self) -> Mono {
        Mono(self.0.iter().map(|(a, k)| (a.clone(), -k)).collect())
    }

    fn is_nonneg(&self) -> bool {
        self.0.iter().all(|(_, k)| !k.is_negative())
    }
}

/// Lexicographic order on exponent vectors, a group order on Laurent
/// monomials.
fn lex_cmp(a: &Mono, b: &Mono) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.0.get(i), b.0.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some((_, ea)), None) => return sign_order(ea),
            (None, Some((_, eb))) => return sign_order(eb).reverse(),
            (Some((xa, ea)), Some((xb, eb))) => match xa.cmp(xb) {
                Ordering::Equal => match ea.cmp(eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    o => return o,
                },
                Ordering::Less => return sign_order(ea),
                Ordering::Greater => return sign_order(eb).reverse(),
            },
        }
    }
}

fn sign_order(e: &Q) -> Ordering {
    if e.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Poly(BTreeMap<Mono, Q>);

impl Poly {
    fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    fn constant(c: Q) -> Self {
        Poly::term(Mono::one(), c)
    }

    fn term(m: Mono, c: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(m.clone(), -c);
        }
        out
    }

    fn scale(&self, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * s)).collect())
    }

    fn mul_term(&self, m: &Mono, s: &Q) -> Poly {
        let mut out = Poly::zero();
        for (mm, c) in &self.0 {
            out.add_term(mm.mul(m), c * s);
        }
        out
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    fn powu(&self, k: u32) -> Poly {
        let mut out = Poly::constant(Q::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    fn as_monomial(&self) -> Option<(&Mono, &Q)> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        match self.as_monomial() {
            Some((m, c)) if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    fn leading(&self) -> (&Mono, &Q) {
        self.0
            .iter()
            .max_by(|a, b| lex_cmp(a.0, b.0))
            .expect("leading term of zero polynomial")
    }

    /// Componentwise minimum exponent, counting absent atoms as zero.
    fn min_exponents(&self) -> Mono {
        let mut mins: BTreeMap<Atom, Q> = BTreeMap::new();
        for m in self.0.keys() {
            for (a, e) in &m.0 {
                mins.entry(a.clone())
                    .and_modify(|x| {
                        if e < x {
                            *x = e.clone()
                        }
                    })
                    .or_insert_with(|| e.clone());
            }
        }
        for (a, e) in mins.iter_mut() {
            if e.is_positive() && self.0.keys().any(|m| !m.0.iter().any(|(b, _)| b == a)) {
                *e = Q::zero();
            }
        }
        Mono(mins.into_iter().filter(|(_, e)| !e.is_zero()).collect())
    }

    /// Splits `self = c * m * g` with `g` normalized.
    fn split_content(&self) -> (Q, Mono, Poly) {
        let m = self.min_exponents();
        let minv = m.inv();
        let shifted = self.mul_term(&minv, &Q::one());
        let lc = shifted.leading().1.clone();
        let g = shifted.scale(&lc.recip());
        (lc, m, g)
    }
}

/// Exact division in the Laurent ring, `None` when `d` does not divide `n`.
/// `d` must be normalized.
fn div_exact(n: &Poly, d: &Poly) -> Option<Poly> {
    if d.is_one() {
        return Some(n.clone());
    }
    if n.is_zero() {
        return Some(Poly::zero());
    }
    let shift = n.min_exponents();
    let mut r = n.mul_term(&shift.inv(), &Q::one());
    let (dm, dc) = d.leading();
    let (dm, dc) = (dm.clone(), dc.clone());
    let mut quot = Poly::zero();
    let mut steps = 0;
    while !r.is_zero() {
        steps += 1;
        if steps > DIVISION_STEP_CAP {
            return None;
        }
        let (rm, rc) = r.leading();
        let t = rm.mul(&dm.inv());
        if !t.is_nonneg() {
            return None;
        }
        let c = rc / &dc;
        r = r.sub(&d.mul_term(&t, &c));
        quot.add_term(t, c);
    }
    Some(quot.mul_term(&shift, &Q::one()))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Rat {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

impl Rat {
    fn from_poly(num: Poly) -> Rat {
        Rat { num, den: Vec::new() }
    }

    fn constant(c: Q) -> Rat {
        Rat::from_poly(Poly::constant(c))
    }

    fn atom(a: Atom, e: Q) -> Rat {
        Rat::from_poly(Poly::term(Mono::atom(a, e), Q::one())).reduce()
    }

    fn undefined() -> Rat {
        Rat::from_poly(Poly::term(Mono::atom(Atom::Undefined, Q::one()), Q::one()))
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn expanded_den(&self) -> Poly {
        let mut out = Poly::constant(Q::one());
        for (f, k) in &self.den {
            out = out.mul(&f.powu(*k));
        }
        out
    }

    fn add(&self, o: &Rat) -> Rat {
        if self.den.is_empty() && o.den.is_empty() {
            return Rat::from_poly(self.num.add(&o.num)).reduce();
        }
        let mut lcm: BTreeMap<Poly, u32> = BTreeMap::new();
        for (f, k) in self.den.iter().chain(o.den.iter()) {
            let e = lcm.entry(f.clone()).or_insert(0);
            *e = (*e).max(*k);
        }
        let lift = |r: &Rat| -> Poly {
            let mut p = r.num.clone();
            for (f, k) in &lcm {
                let have = r.den.iter().find(|(g, _)| g == f).map(|(_, e)| *e).unwrap_or(0);
                if *k > have {
                    p = p.mul(&f.powu(k - have));
                }
            }
            p
        };
        let num = lift(self).add(&lift(o));
        Rat { num, den: lcm.into_iter().collect() }.reduce()
    }

    fn neg(&self) -> Rat {
        Rat { num: self.num.scale(&-Q::one()), den: self.den.clone() }
    }

    fn sub(&self, o: &Rat) -> Rat {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Rat) -> Rat {
        if self.is_zero() || o.is_zero() {
            return Rat::constant(Q::zero());
        }
        Rat { num: self.num.mul(&o.num), den: merge_den(&self.den, &o.den) }.reduce()
    }

    fn inv(&self) -> Rat {
        if self.is_zero() {
            return Rat::undefined();
        }
        let (c, m, g) = self.num.split_content();
        let num = self.expanded_den().mul_term(&m.inv(), &c.recip());
        let den = if g.is_one() { Vec::new() } else { vec![(g, 1)] };
        Rat { num, den }.reduce()
    }

    fn powi(&self, k: i64) -> Rat {
        if k < 0 {
            return self.inv().powi(-k);
        }
        if k == 0 {
            return Rat::constant(Q::one());
        }
        if let Some((m, c)) = self.num.as_monomial() {
            let kq = Q::from_integer(k.into());
            let num = Poly::term(m.pow(&kq), rational_powi(c, k.into()));
            let den = self.den.iter().map(|(f, e)| (f.clone(), e * k as u32)).collect();
            return Rat { num, den }.reduce();
        }
        let mut out = Rat::constant(Q::one());
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Rational power with the real positive branch.
    fn powq(&self, e: &Q) -> Rat {
        if e.is_integer() {
            return match e.to_integer().to_i64() {
                Some(k) => self.powi(k),
                None => Rat::undefined(),
            };
        }
        if self.is_zero() {
            return if e.is_positive() { Rat::constant(Q::zero()) } else { Rat::undefined() };
        }
        let mut out = if let Some((m, c)) = self.num.as_monomial() {
            const_pow(c, e).mul(&Rat::from_poly(Poly::term(m.pow(e), Q::one())))
        } else {
            let (c, m, g) = self.num.split_content();
            let radical = Atom::Radical(Box::new(Rat::from_poly(g)));
            const_pow(&c, e)
                .mul(&Rat::from_poly(Poly::term(m.pow(e), Q::one())))
                .mul(&Rat::atom(radical, e.clone()))
        };
        for (f, k) in &self.den {
            let radical = Atom::Radical(Box::new(Rat::from_poly(f.clone())));
            out = out.mul(&Rat::atom(radical, -e * Q::from_integer((*k).into())));
        }
        out
    }

    fn reduce(mut self) -> Rat {
        for _ in 0..64 {
            match tidy(&self.num) {
                Some(t) => {
                    self.num = t.num;
                    self.den = merge_den(&self.den, &t.den);
                }
                None => break,
            }
        }
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let mut den = Vec::with_capacity(self.den.len());
        for (f, mut k) in std::mem::take(&mut self.den) {
            while k > 0 {
                match div_exact(&self.num, &f) {
                    Some(q) => {
                        self.num = q;
                        k -= 1;
                    }
                    None => break,
                }
            }
            if k > 0 {
                den.push((f, k));
            }
        }
        self.den = den;
        self
    }

    /// Sign of the lexicographically leading coefficient.
    fn leading_negative(&self) -> bool {
        !self.num.is_zero() && self.num.leading().1.is_negative()
    }
}

fn merge_den(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> Vec<(Poly, u32)> {
    if b.is_empty() {
        return a.to_vec();
    }
    let mut m: BTreeMap<Poly, u32> = a.iter().cloned().collect();
    for (f, k) in b {
        *m.entry(f.clone()).or_insert(0) += k;
    }
    m.into_iter().collect()
}

fn needs_tidy(a: &Atom, e: &Q) -> bool {
    match a {
        Atom::Prime(_) | Atom::Radical(_) => !(e.is_positive() && e < &Q::one()),
        Atom::Cos(_) => e >= &Q::from_integer(2.into()),
        _ => false,
    }
}

/// Rewrites monomials holding out-of-range radical exponents or `cos^k`
/// with `k >= 2`; `None` when nothing needs rewriting.
fn tidy(num: &Poly) -> Option<Rat> {
    if !num.0.keys().any(|m| m.0.iter().any(|(a, e)| needs_tidy(a, e))) {
        return None;
    }
    let mut plain = Poly::zero();
    let mut rewritten: Vec<Rat> = Vec::new();
    for (m, c) in &num.0 {
        if !m.0.iter().any(|(a, e)| needs_tidy(a, e)) {
            plain.add_term(m.clone(), c.clone());
            continue;
        }
        let mut coeff = c.clone();
        let mut keep = Mono::one();
        let mut extra = Rat::constant(Q::one());
        for (a, e) in &m.0 {
            if !needs_tidy(a, e) {
                keep = keep.mul(&Mono::atom(a.clone(), e.clone()));
                continue;
            }
            match a {
                Atom::Prime(p) => {
                    let n = e.floor();
                    coeff *= rational_powi(&Q::from_integer(p.clone()), n.to_integer());
                    keep = keep.mul(&Mono::atom(a.clone(), e - n));
                }
                Atom::Radical(base) => {
                    let n = e.floor();
                    keep = keep.mul(&Mono::atom(a.clone(), e - &n));
                    match n.to_integer().to_i64() {
                        Some(k) => extra = extra.mul(&base.powi(k)),
                        None => extra = Rat::undefined(),
                    }
                }
                Atom::Cos(arg) => {
                    let two = Q::from_integer(2.into());
                    keep = keep.mul(&Mono::atom(a.clone(), e - &two));
                    let sin2 = Poly::term(Mono::atom(Atom::Sin(arg.clone()), two), Q::one());
                    let one_minus = Poly::constant(Q::one()).sub(&sin2);
                    extra = extra.mul(&Rat::from_poly(one_minus));
                }
                _ => unreachable!(),
            }
        }
        rewritten.push(Rat::from_poly(Poly::term(keep, coeff)).mul(&extra));
    }
    let mut out = Rat::from_poly(plain);
    for r in rewritten {
        out = out.add(&r);
    }
    Some(out)
}

fn factor_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::from(2);
    let mut tried = 0u64;
    while &d * &d <= n && tried < TRIAL_DIVISION_CAP {
        let mut k = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            k += 1;
        }
        if k > 0 {
            out.push((d.clone(), k));
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
        tried += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// `c^e` for a rational constant `c` and fractional `e`.
fn const_pow(c: &Q, e: &Q) -> Rat {
    if e.is_integer() {
        return Rat::constant(rational_powi(c, e.to_integer()));
    }
    if c.is_zero() {
        return if e.is_positive() { Rat::constant(Q::zero()) } else { Rat::undefined() };
    }
    let mut sign = Q::one();
    let mut c = c.clone();
    if c.is_negative() {
        if e.denom().is_even() {
            return Rat::atom(Atom::Radical(Box::new(Rat::constant(c))), e.clone());
        }
        if e.numer().is_odd() {
            sign = -sign;
        }
        c = -c;
    }
    let mut m = Mono::one();
    for (p, k) in factor_integer(c.numer()) {
        m = m.mul(&Mono::atom(Atom::Prime(p), e * Q::from_integer(k.into())));
    }
    for (p, k) in factor_integer(c.denom()) {
        m = m.mul(&Mono::atom(Atom::Prime(p), -e * Q::from_integer(k.into())));
    }
    Rat::from_poly(Poly::term(m, sign)).reduce()
}

/// Normal form of an expression.
pub(crate) fn rat_of(e: &Expr) -> Rat {
    match e.node() {
        Node::Num(n) => Rat::constant(n.clone()),
        Node::Sym(s) => Rat::atom(Atom::Sym(s.clone()), Q::one()),
        Node::Add(items) => {
            let mut acc = Rat::constant(Q::zero());
            for t in items {
                acc = acc.add(&rat_of(t));
            }
            acc
        }
        Node::Mul(items) => {
            let mut acc = Rat::constant(Q::one());
            for t in items {
                acc = acc.mul(&rat_of(t));
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Node::Pow(b, n) => match b.node() {
            Node::Num(c) => const_pow(c, n),
            _ => rat_of(b).powq(n),
        },
        Node::Func(Func::Exp, a) => exp_of(&rat_of(a)),
        Node::Func(Func::Log, a) => log_of(&rat_of(a)),
        Node::Func(f @ (Func::Sin | Func::Cos), a) => {
            let ra = rat_of(a);
            if ra.is_zero() {
                return Rat::constant(if *f == Func::Sin { Q::zero() } else { Q::one() });
            }
            let flip = ra.leading_negative();
            let arg = Box::new(if flip { ra.neg() } else { ra });
            match f {
                Func::Sin if flip => Rat::atom(Atom::Sin(arg), Q::one()).neg(),
                Func::Sin => Rat::atom(Atom::Sin(arg), Q::one()),
                _ => Rat::atom(Atom::Cos(arg), Q::one()),
            }
        }
        Node::Apply { name, order, arg } => Rat::atom(Atom::Apply(name.clone(), *order, Box::new(rat_of(arg))), Q::one()),
    }
}

fn exp_of(a: &Rat) -> Rat {
    let mut out = Rat::constant(Q::one());
    if a.den.is_empty() {
        for (m, c) in &a.num.0 {
            let factor = match m.0.as_slice() {
                [(Atom::Log(inner), k)] if k.is_one() => inner.powq(c),
                _ => Rat::atom(Atom::Exp(m.clone()), c.clone()),
            };
            out = out.mul(&factor);
        }
    } else {
        for (m, c) in &a.num.0 {
            let arg = Rat { num: Poly::term(m.clone(), Q::one()), den: a.den.clone() };
            out = out.mul(&Rat::atom(Atom::ExpOf(Box::new(arg)), c.clone()));
        }
    }
    out
}

fn log_atom(r: Rat) -> Rat {
    Rat::atom(Atom::Log(Box::new(r)), Q::one())
}

fn log_of(a: &Rat) -> Rat {
    if a.is_zero() {
        return Rat::undefined();
    }
    let mut out = Rat::constant(Q::zero());
    for (f, k) in &a.den {
        let term = log_atom(Rat::from_poly(f.clone()));
        out = out.sub(&term.mul(&Rat::constant(Q::from_integer((*k).into()))));
    }
    let (c, m, g) = a.num.split_content();
    if c.is_negative() {
        return out.add(&log_atom(Rat::from_poly(a.num.clone())));
    }
    for (p, k) in factor_integer(c.numer()) {
        out = out.add(&log_atom(Rat::constant(Q::from_integer(p))).mul(&Rat::constant(Q::from_integer(k.into()))));
    }
    for (p, k) in factor_integer(c.denom()) {
        out = out.sub(&log_atom(Rat::constant(Q::from_integer(p))).mul(&Rat::constant(Q::from_integer(k.into()))));
    }
    for (atom, e) in &m.0 {
        let piece = match atom {
            Atom::Exp(inner) => Rat::from_poly(Poly::term(inner.clone(), Q::one())),
            Atom::Prime(p) => log_atom(Rat::constant(Q::from_integer(p.clone()))),
            other => log_atom(Rat::atom(other.clone(), Q::one())),
        };
        out = out.add(&piece.mul(&Rat::constant(e.clone())));
    }
    if !g.is_one() {
        out = out.add(&log_atom(Rat::from_poly(g)));
    }
    out
}

fn atom_expr(a: &Atom) -> Expr {
    match a {
        Atom::Sym(s) => Expr::sym(s.clone()),
        Atom::Prime(p) => Expr::num(Q::from_integer(p.clone())),
        Atom::Exp(m) => Expr::exp(&mono_expr(m)),
        Atom::ExpOf(r) => Expr::exp(&rat_expr(r)),
        Atom::Log(r) => Expr::log(&rat_expr(r)),
        Atom::Sin(r) => Expr::sin(&rat_expr(r)),
        Atom::Cos(r) => Expr::cos(&rat_expr(r)),
        Atom::Apply(name, k, r) => Expr::apply(name, *k, &rat_expr(r)),
        Atom::Radical(r) => rat_expr(r),
        Atom::Undefined => Expr::wrap(Node::Pow(Expr::zero(), -Q::one())),
    }
}

fn mono_expr(m: &Mono) -> Expr {
    Expr::mul_all(m.0.iter().map(|(a, e)| power_of(a, e)))
}

fn power_of(a: &Atom, e: &Q) -> Expr {
    Expr::pow(&atom_expr(a), e.clone())
}

fn poly_expr(p: &Poly) -> Expr {
    Expr::add_all(p.0.iter().map(|(m, c)| Expr::mul_all([Expr::num(c.clone()), mono_expr(m)])))
}

fn rat_expr(r: &Rat) -> Expr {
    let den = r.den.iter().map(|(f, k)| Expr::pow(&poly_expr(f), -Q::from_integer((*k).into())));
    Expr::mul_all(std::iter::once(poly_expr(&r.num)).chain(den))
}

/// Rational normal form of `e`, rebuilt as an expression. Idempotent.
pub fn canonicalize(e: &Expr) -> Expr {
    rat_expr(&rat_of(e))
}
