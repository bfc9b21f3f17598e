use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::ToPrimitive;

use super::{Expr, Func, Node, Symbol, Q};

/// Numeric values for symbols.
pub type Point = BTreeMap<Symbol, f64>;

/// Concrete realizations of uninterpreted functions as polynomials,
/// stored by ascending coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FunctionTable {
    polys: BTreeMap<Arc<str>, Vec<f64>>,
}

impl FunctionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, coeffs: Vec<f64>) {
        self.polys.insert(name.into(), coeffs);
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.polys.get(name).map(Vec::as_slice)
    }

    /// Value of the `order`-th derivative of `name` at `x`.
    pub fn eval(&self, name: &str, order: u32, x: f64) -> Option<f64> {
        let c = self.polys.get(name)?;
        let mut value = 0.0;
        for (k, ck) in c.iter().enumerate() {
            if (k as u32) < order {
                continue;
            }
            let mut falling = 1.0;
            for j in 0..order {
                falling *= (k as u32 - j) as f64;
            }
            value += ck * falling * x.powi((k as u32 - order) as i32);
        }
        Some(value)
    }
}

/// Why a numeric evaluation failed.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("symbol `{0}` has no value")]
    Unbound(String),
    #[error("function `{0}` has no realization")]
    UnboundFunction(String),
    #[error("logarithm of non-positive value")]
    Log,
    #[error("division by zero")]
    DivisionByZero,
    #[error("fractional power of a negative value")]
    NegativeRoot,
    #[error("non-finite value")]
    NonFinite,
}

/// Evaluates `e` at a point in double precision.
pub fn evaluate_at(e: &Expr, point: &Point, funcs: &FunctionTable) -> Result<f64, DomainError> {
    let v = eval(e, point, funcs)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError::NonFinite)
    }
}

fn to_f64(n: &Q) -> f64 {
    n.to_f64().unwrap_or(f64::NAN)
}

fn eval(e: &Expr, point: &Point, funcs: &FunctionTable) -> Result<f64, DomainError> {
    Ok(match e.node() {
        Node::Num(n) => to_f64(n),
        Node::Sym(s) => *point.get(s).ok_or_else(|| DomainError::Unbound(s.name().to_string()))?,
        Node::Add(items) => {
            let mut acc = 0.0;
            for t in items {
                acc += eval(t, point, funcs)?;
            }
            acc
        }
        Node::Mul(items) => {
            let mut acc = 1.0;
            for t in items {
                acc *= eval(t, point, funcs)?;
            }
            acc
        }
        Node::Pow(b, n) => {
            let x = eval(b, point, funcs)?;
            if n.is_integer() {
                let k = n.to_integer().to_i32().ok_or(DomainError::NonFinite)?;
                if x == 0.0 && k < 0 {
                    return Err(DomainError::DivisionByZero);
                }
                x.powi(k)
            } else {
                let d = n.denom().to_u32().ok_or(DomainError::NonFinite)?;
                if x < 0.0 {
                    if d % 2 == 0 {
                        return Err(DomainError::NegativeRoot);
                    }
                    let odd = n.numer().to_i64().map(|m| m % 2 != 0).unwrap_or(false);
                    let r = (-x).powf(to_f64(n));
                    if odd {
                        -r
                    } else {
                        r
                    }
                } else {
                    if x == 0.0 && to_f64(n) < 0.0 {
                        return Err(DomainError::DivisionByZero);
                    }
                    x.powf(to_f64(n))
                }
            }
        }
        Node::Func(f, a) => {
            let x = eval(a, point, funcs)?;
            match f {
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(DomainError::Log);
                    }
                    x.ln()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
        Node::Apply { name, order, arg } => {
            let x = eval(arg, point, funcs)?;
            funcs.eval(name, *order, x).ok_or_else(|| DomainError::UnboundFunction(name.to_string()))?
        }
    })
}
