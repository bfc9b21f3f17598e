//! Reduction modulo a quasi-linear system of differential equations.
//!
//! The equations are solved for their highest-ranked derivatives (order
//! first, then `xx` before `xy`, then dependent index); any derivative of
//! such a principal coordinate is replaced by the matching derivative of
//! its solved form until only parametric coordinates remain.

use std::collections::BTreeMap;

use crate::expr::{canonicalize, partial_derivative, Expr, Symbol, SymbolKind};
use crate::jet::{JetContext, MultiIndex};
use crate::oracle::{is_zero, OracleConfig, ZeroVerdict};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ShellError {
    #[error("no differential equations to reduce by")]
    Empty,
    #[error("equation {0} is not linear in its highest derivatives")]
    NotQuasiLinear(usize),
    #[error("equation {0} has no usable highest derivative after elimination")]
    Degenerate(usize),
    #[error("reduction did not terminate")]
    Runaway,
}

#[derive(Clone, Debug)]
struct Rule {
    dep: usize,
    index: MultiIndex,
    rhs: Expr,
}

/// Solved form of a system `E_a = 0`.
#[derive(Clone, Debug)]
pub struct Shell {
    rules: Vec<Rule>,
}

fn jet_of(s: &Symbol) -> Option<(usize, &MultiIndex)> {
    match s.kind() {
        SymbolKind::Jet { dep, index } => Some((*dep, index)),
        _ => None,
    }
}

impl Shell {
    pub fn new(ctx: &JetContext, equations: &[Expr], cfg: &OracleConfig) -> Result<Shell, ShellError> {
        let eqs: Vec<(usize, Expr)> =
            equations.iter().map(canonicalize).enumerate().filter(|(_, e)| !e.is_zero_literal()).collect();
        let r = eqs.iter().map(|(_, e)| e.jet_order()).max().ok_or(ShellError::Empty)?;
        if r == 0 {
            return Err(ShellError::Empty);
        }
        let mut cols: Vec<(MultiIndex, usize, Symbol)> = eqs
            .iter()
            .flat_map(|(_, e)| ctx.jet_symbols_of_order(e, r))
            .filter_map(|s| jet_of(&s).map(|(d, i)| (i.clone(), d, s.clone())))
            .collect();
        cols.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
        cols.dedup_by(|a, b| a.2 == b.2);

        let mut rows: Vec<Vec<Expr>> = Vec::new();
        let mut rest: Vec<Expr> = Vec::new();
        for (k, e) in &eqs {
            let coeffs: Vec<Expr> = cols.iter().map(|c| canonicalize(&partial_derivative(e, &c.2))).collect();
            for m in &coeffs {
                if cols.iter().any(|c| m.contains(&c.2)) {
                    return Err(ShellError::NotQuasiLinear(*k));
                }
            }
            let lin = Expr::add_all(coeffs.iter().zip(&cols).map(|(m, c)| m * &Expr::sym(c.2.clone())));
            rest.push(canonicalize(&(e.clone() - lin)));
            rows.push(coeffs);
        }

        let mut pivots: Vec<Option<usize>> = vec![None; rows.len()];
        for c in 0..cols.len() {
            let Some(pr) = (0..rows.len()).find(|&k| {
                pivots[k].is_none() && !rows[k][c].is_zero_literal() && is_zero(&rows[k][c], cfg).is_nonzero()
            }) else {
                continue;
            };
            let inv = rows[pr][c].recip();
            rows[pr] = rows[pr].iter().map(|m| canonicalize(&(m * &inv))).collect();
            rest[pr] = canonicalize(&(&rest[pr] * &inv));
            for k in 0..rows.len() {
                if k == pr || rows[k][c].is_zero_literal() {
                    continue;
                }
                let f = rows[k][c].clone();
                rows[k] = rows[k].iter().zip(&rows[pr]).map(|(a, b)| canonicalize(&(a.clone() - f.clone() * b.clone()))).collect();
                rest[k] = canonicalize(&(rest[k].clone() - f * rest[pr].clone()));
            }
            pivots[pr] = Some(c);
        }

        let mut rules = Vec::new();
        for (k, pc) in pivots.iter().enumerate() {
            let Some(c) = *pc else {
                return Err(ShellError::Degenerate(eqs[k].0));
            };
            let others = Expr::add_all(
                (0..cols.len()).filter(|&d| d != c).map(|d| rows[k][d].clone() * Expr::sym(cols[d].2.clone())),
            );
            let rhs = canonicalize(&(rest[k].clone() + others).neg());
            rules.push(Rule { dep: cols[c].1, index: cols[c].0.clone(), rhs });
        }
        rules.sort_by(|a, b| (&a.index, a.dep).cmp(&(&b.index, b.dep)));
        Ok(Shell { rules })
    }

    /// Solved equations as `(coordinate name, right-hand side)`.
    pub fn rules(&self, ctx: &JetContext) -> Vec<(String, Expr)> {
        self.rules.iter().map(|r| (ctx.jet_name(r.dep, &r.index), r.rhs.clone())).collect()
    }

    fn principal(&self, dep: usize, index: &MultiIndex) -> Option<(&Rule, MultiIndex)> {
        self.rules.iter().find_map(|r| {
            if r.dep != dep {
                return None;
            }
            let diff: Option<Vec<u32>> =
                index.counts().iter().zip(r.index.counts()).map(|(a, b)| a.checked_sub(*b)).collect();
            diff.map(|d| (r, MultiIndex::from_counts(d)))
        })
    }

    /// Rewrites `e` in parametric coordinates.
    pub fn reduce(&self, ctx: &JetContext, e: &Expr) -> Result<Expr, ShellError> {
        let mut cache: BTreeMap<(usize, MultiIndex), Expr> = BTreeMap::new();
        let mut cur = canonicalize(e);
        for _ in 0..64 {
            let mut bindings = BTreeMap::new();
            for s in cur.symbols() {
                let Some((dep, index)) = jet_of(&s) else { continue };
                let Some((rule, rest)) = self.principal(dep, index) else { continue };
                let key = (dep, index.clone());
                let value = cache
                    .entry(key)
                    .or_insert_with(|| canonicalize(&ctx.total_derivative_multi(&rule.rhs, &rest)))
                    .clone();
                bindings.insert(s.clone(), value);
            }
            if bindings.is_empty() {
                return Ok(cur);
            }
            cur = cur.substitute(&bindings);
        }
        Err(ShellError::Runaway)
    }

    /// Verdict on `e = 0` modulo the equations.
    pub fn is_zero_on_shell(&self, ctx: &JetContext, e: &Expr, cfg: &OracleConfig) -> Result<ZeroVerdict, ShellError> {
        Ok(is_zero(&self.reduce(ctx, e)?, cfg))
    }
}
