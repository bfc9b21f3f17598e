//! Jet coordinates, multi-indices and total derivatives.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::expr::{derive_with, Expr, Symbol, SymbolKind};
use crate::oracle::{is_zero, OracleConfig, ZeroVerdict};

/// Derivative counts `(j_1, ..., j_p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(p: usize) -> Self {
        MultiIndex(vec![0; p])
    }

    pub fn unit(p: usize, i: usize) -> Self {
        let mut m = MultiIndex::zero(p);
        m.0[i] = 1;
        m
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        MultiIndex(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total order `|J|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `J + e_i`.
    pub fn plus(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }

    /// `J - e_i`, if `j_i > 0`.
    pub fn minus(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.0[i] -= 1;
        Some(m)
    }

    /// Smallest `i` with `j_i > 0`.
    pub fn first_index(&self) -> Option<usize> {
        self.0.iter().position(|&j| j > 0)
    }

    /// Derivative directions in ascending order, with repetition.
    pub fn directions(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &j)| std::iter::repeat_n(i, j as usize)).collect()
    }

    /// All multi-indices of exactly order `r` in `p` variables, in
    /// canonical order.
    pub fn of_order(p: usize, r: u32) -> Vec<MultiIndex> {
        fn rec(p: usize, r: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == p {
                prefix.push(r);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for j in (0..=r).rev() {
                prefix.push(j);
                rec(p, r - j, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(p, r, &mut Vec::new(), &mut out);
        out
    }

    /// All multi-indices with `|J| <= r`, by increasing order.
    pub fn up_to(p: usize, r: u32) -> Vec<MultiIndex> {
        (0..=r).flat_map(|k| MultiIndex::of_order(p, k)).collect()
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lower orders first; within an order, `xx` before `xy` before `yy`.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| other.0.cmp(&self.0))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, ")")
    }
}

/// Errors raised while declaring a context.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("at least one independent and one dependent variable are required")]
    Empty,
    #[error("name `{0}` is declared twice")]
    Duplicate(String),
    #[error("`{0}` is not a valid name")]
    InvalidName(String),
}

/// Why a name could not be resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum Resolve {
    Undeclared,
    BadSubscript(String),
}

const RESERVED: [&str; 6] = ["exp", "log", "sin", "cos", "sqrt", "D"];

/// Declared independent and dependent variables, parameters and
/// uninterpreted functions.
///
/// Jet order is open-ended: any `u^a_J` can be formed on demand, so the
/// context never needs to grow. With a single independent variable the
/// mechanical names `q`, `qd`, `qdd`, ... are used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetContext {
    independents: Vec<Arc<str>>,
    dependents: Vec<Arc<str>>,
    parameters: Vec<Arc<str>>,
    functions: Vec<Arc<str>>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
        && !RESERVED.contains(&s)
}

impl JetContext {
    pub fn new(independents: &[&str], dependents: &[&str]) -> Result<Self, JetError> {
        if independents.is_empty() || dependents.is_empty() {
            return Err(JetError::Empty);
        }
        let mut ctx = JetContext {
            independents: Vec::new(),
            dependents: Vec::new(),
            parameters: Vec::new(),
            functions: Vec::new(),
        };
        for n in independents {
            ctx.check_fresh(n)?;
            ctx.independents.push((*n).into());
        }
        for n in dependents {
            ctx.check_fresh(n)?;
            ctx.dependents.push((*n).into());
        }
        Ok(ctx)
    }

    pub fn with_parameters(mut self, names: &[&str]) -> Result<Self, JetError> {
        for n in names {
            self.check_fresh(n)?;
            self.parameters.push((*n).into());
        }
        Ok(self)
    }

    pub fn with_functions(mut self, names: &[&str]) -> Result<Self, JetError> {
        for n in names {
            self.check_fresh(n)?;
            self.functions.push((*n).into());
        }
        Ok(self)
    }

    fn check_fresh(&self, n: &str) -> Result<(), JetError> {
        if !valid_name(n) {
            return Err(JetError::InvalidName(n.to_string()));
        }
        let taken = self
            .independents
            .iter()
            .chain(&self.dependents)
            .chain(&self.parameters)
            .chain(&self.functions)
            .any(|m| &**m == n);
        if taken {
            Err(JetError::Duplicate(n.to_string()))
        } else {
            Ok(())
        }
    }

    /// Number of independent variables.
    pub fn p(&self) -> usize {
        self.independents.len()
    }

    /// Number of dependent variables.
    pub fn q(&self) -> usize {
        self.dependents.len()
    }

    pub fn independent_names(&self) -> &[Arc<str>] {
        &self.independents
    }

    pub fn dependent_names(&self) -> &[Arc<str>] {
        &self.dependents
    }

    pub fn parameter_names(&self) -> &[Arc<str>] {
        &self.parameters
    }

    pub fn function_names(&self) -> &[Arc<str>] {
        &self.functions
    }

    pub fn is_mechanical(&self) -> bool {
        self.p() == 1
    }

    pub fn is_function(&self, name: &str) -> bool {
        self.functions.iter().any(|f| &**f == name)
    }

    pub fn x_symbol(&self, i: usize) -> Symbol {
        Symbol::new(SymbolKind::Independent(i), self.independents[i].clone())
    }

    /// The independent variable `x^i`.
    pub fn x(&self, i: usize) -> Expr {
        Expr::sym(self.x_symbol(i))
    }

    /// The dependent variable `u^a`.
    pub fn u(&self, a: usize) -> Expr {
        self.jet(a, &MultiIndex::zero(self.p()))
    }

    /// First derivative `u^a_i`.
    pub fn du(&self, a: usize, i: usize) -> Expr {
        self.jet(a, &MultiIndex::unit(self.p(), i))
    }

    pub fn jet_symbol(&self, a: usize, index: &MultiIndex) -> Symbol {
        Symbol::new(SymbolKind::Jet { dep: a, index: index.clone() }, self.jet_name(a, index))
    }

    /// The jet coordinate `u^a_J`.
    pub fn jet(&self, a: usize, index: &MultiIndex) -> Expr {
        Expr::sym(self.jet_symbol(a, index))
    }

    pub fn parameter(&self, name: &str) -> Option<Expr> {
        self.parameters.iter().any(|p| &**p == name).then(|| Expr::parameter(name))
    }

    /// Printed name of `u^a_J`.
    pub fn jet_name(&self, a: usize, index: &MultiIndex) -> String {
        let base = &self.dependents[a];
        if index.order() == 0 {
            return base.to_string();
        }
        if self.is_mechanical() {
            return format!("{base}{}", "d".repeat(index.order() as usize));
        }
        let parts: Vec<&str> = index.directions().into_iter().map(|i| &*self.independents[i]).collect();
        if self.independents.iter().all(|n| n.len() == 1) {
            format!("{base}_{}", parts.concat())
        } else {
            format!("{base}_{}", parts.join("_"))
        }
    }

    /// Looks up a name: variables, parameters and jet coordinates such as
    /// `u_xy`, `u_x_y` or (one independent variable) `qdd`.
    pub fn resolve(&self, name: &str) -> Result<Expr, Resolve> {
        if let Some(i) = self.independents.iter().position(|n| &**n == name) {
            return Ok(self.x(i));
        }
        if let Some(a) = self.dependents.iter().position(|n| &**n == name) {
            return Ok(self.u(a));
        }
        if let Some(e) = self.parameter(name) {
            return Ok(e);
        }
        let mut order: Vec<usize> = (0..self.q()).collect();
        order.sort_by_key(|&a| std::cmp::Reverse(self.dependents[a].len()));
        let mut bad = None;
        for a in order {
            let Some(rest) = name.strip_prefix(&*self.dependents[a]) else { continue };
            if self.is_mechanical() && !rest.is_empty() && rest.chars().all(|c| c == 'd') {
                let index = MultiIndex::from_counts(vec![rest.len() as u32]);
                return Ok(self.jet(a, &index));
            }
            if let Some(sub) = rest.strip_prefix('_') {
                match self.parse_subscript(sub) {
                    Some(index) => return Ok(self.jet(a, &index)),
                    None => bad = Some(sub.to_string()),
                }
            }
        }
        match bad {
            Some(sub) => Err(Resolve::BadSubscript(sub)),
            None => Err(Resolve::Undeclared),
        }
    }

    fn parse_subscript(&self, sub: &str) -> Option<MultiIndex> {
        let mut counts = vec![0u32; self.p()];
        for seg in sub.split('_') {
            if seg.is_empty() {
                return None;
            }
            for i in self.segment(seg)? {
                counts[i] += 1;
            }
        }
        Some(MultiIndex::from_counts(counts))
    }

    /// Splits a run like `xyy` or `thetatheta` into independent-variable
    /// names, trying longer names first.
    fn segment(&self, s: &str) -> Option<Vec<usize>> {
        if s.is_empty() {
            return Some(Vec::new());
        }
        let mut cands: Vec<usize> = (0..self.p()).filter(|&i| s.starts_with(&*self.independents[i])).collect();
        cands.sort_by_key(|&i| std::cmp::Reverse(self.independents[i].len()));
        for i in cands {
            if let Some(mut rest) = self.segment(&s[self.independents[i].len()..]) {
                rest.insert(0, i);
                return Some(rest);
            }
        }
        None
    }

    /// Total derivative `D_i e`.
    pub fn total_derivative(&self, e: &Expr, i: usize) -> Expr {
        derive_with(e, &|s: &Symbol| match s.kind() {
            SymbolKind::Independent(j) if *j == i => Expr::one(),
            SymbolKind::Independent(_) | SymbolKind::Parameter(_) => Expr::zero(),
            SymbolKind::Jet { dep, index } => self.jet(*dep, &index.plus(i)),
        })
    }

    /// `D_J e = D_1^{j_1} ... D_p^{j_p} e`.
    pub fn total_derivative_multi(&self, e: &Expr, index: &MultiIndex) -> Expr {
        let mut out = e.clone();
        for i in index.directions().into_iter().rev() {
            out = self.total_derivative(&out, i);
        }
        out
    }

    /// Verdict on `D_i D_j e - D_j D_i e`.
    pub fn commute_check(&self, e: &Expr, i: usize, j: usize, cfg: &OracleConfig) -> ZeroVerdict {
        let a = self.total_derivative(&self.total_derivative(e, j), i);
        let b = self.total_derivative(&self.total_derivative(e, i), j);
        is_zero(&(a - b), cfg)
    }

    /// Symbols of `e` that are jet coordinates of order exactly `r`.
    pub fn jet_symbols_of_order(&self, e: &Expr, r: u32) -> Vec<Symbol> {
        e.symbols()
            .into_iter()
            .filter(|s| matches!(s.kind(), SymbolKind::Jet { index, .. } if index.order() == r))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> JetContext {
        JetContext::new(&["x", "y"], &["u", "v"]).unwrap()
    }

    #[test]
    fn multi_index_orders() {
        assert_eq!(MultiIndex::of_order(2, 2).len(), 3);
        assert_eq!(MultiIndex::up_to(2, 2).len(), 6);
        assert_eq!(MultiIndex::of_order(3, 2).len(), 6);
        let j = MultiIndex::from_counts(vec![1, 2]);
        assert_eq!(j.directions(), vec![0, 1, 1]);
        assert_eq!(j.first_index(), Some(0));
        assert_eq!(j.order(), 3);
    }

    #[test]
    fn names_round_trip() {
        let ctx = xy();
        let j = MultiIndex::from_counts(vec![1, 1]);
        assert_eq!(ctx.jet_name(0, &j), "u_xy");
        assert_eq!(ctx.resolve("u_yx").unwrap(), ctx.jet(0, &j));
        assert_eq!(ctx.resolve("u_x_y").unwrap(), ctx.jet(0, &j));
        assert!(matches!(ctx.resolve("u_z"), Err(Resolve::BadSubscript(_))));
        assert!(matches!(ctx.resolve("w"), Err(Resolve::Undeclared)));

        let polar = JetContext::new(&["r", "theta"], &["u"]).unwrap();
        let tt = MultiIndex::from_counts(vec![0, 2]);
        assert_eq!(polar.resolve("u_thetatheta").unwrap(), polar.jet(0, &tt));
        assert_eq!(polar.jet_name(0, &tt), "u_theta_theta");

        let mech = JetContext::new(&["t"], &["q1", "q2"]).unwrap();
        let two = MultiIndex::from_counts(vec![2]);
        assert_eq!(mech.resolve("q1dd").unwrap(), mech.jet(0, &two));
        assert_eq!(mech.resolve("q2_tt").unwrap(), mech.jet(1, &two));
        assert_eq!(mech.jet_name(1, &MultiIndex::from_counts(vec![1])), "q2d");
    }

    #[test]
    fn duplicate_names_rejected() {
        assert_eq!(JetContext::new(&["x"], &["x"]), Err(JetError::Duplicate("x".into())));
        assert!(JetContext::new(&["x"], &["exp"]).is_err());
        assert_eq!(JetContext::new(&[], &["u"]), Err(JetError::Empty));
    }

    #[test]
    fn total_derivative_examples() {
        let ctx = xy();
        let u = ctx.u(0);
        assert_eq!(ctx.total_derivative(&u, 0), ctx.du(0, 0));
        let uxy = ctx.total_derivative_multi(&u, &MultiIndex::from_counts(vec![1, 1]));
        assert_eq!(uxy, ctx.resolve("u_xy").unwrap());
        let e = ctx.x(0) * u.clone();
        let d = ctx.total_derivative_multi(&e, &MultiIndex::from_counts(vec![2, 0]));
        let expected = Expr::int(2) * ctx.du(0, 0) + ctx.x(0) * ctx.resolve("u_xx").unwrap();
        assert_eq!(crate::expr::canonicalize(&(d - expected)), Expr::zero());
    }

    #[test]
    fn mechanical_chain_rule() {
        let ctx = JetContext::new(&["t"], &["q1", "q2"]).unwrap();
        let r = |s| ctx.resolve(s).unwrap();
        let p = r("q1").powi(2) * (r("q2d") - r("q2"));
        let d = ctx.total_derivative(&p, 0);
        let expected = Expr::int(2) * r("q1") * r("q1d") * (r("q2d") - r("q2")) + r("q1").powi(2) * (r("q2dd") - r("q2d"));
        assert_eq!(crate::expr::canonicalize(&(d - expected)), Expr::zero());
    }

    #[test]
    fn commuting_total_derivatives() {
        let ctx = xy();
        let cfg = OracleConfig::default();
        let r = |s| ctx.resolve(s).unwrap();
        for e in [r("u"), r("u") * r("v_x"), Expr::exp(&r("u_x"))] {
            assert!(ctx.commute_check(&e, 0, 1, &cfg).is_zero());
        }
    }
}
