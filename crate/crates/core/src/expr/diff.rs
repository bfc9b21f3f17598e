use num_traits::One;

use super::{Expr, Func, Node, Symbol};

/// Applies the derivation determined by its values on symbols.
///
/// Sums, products, powers and the elementary functions follow the usual
/// rules; an uninterpreted `f^(k)(a)` maps to `f^(k+1)(a) * d(a)`.
pub fn derive_with(e: &Expr, on_symbol: &dyn Fn(&Symbol) -> Expr) -> Expr {
    match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => on_symbol(s),
        Node::Add(items) => Expr::add_all(items.iter().map(|t| derive_with(t, on_symbol))),
        Node::Mul(items) => {
            let mut terms = Vec::with_capacity(items.len());
            for (k, f) in items.iter().enumerate() {
                let df = derive_with(f, on_symbol);
                if df.is_zero_literal() {
                    continue;
                }
                let rest = items.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, g)| g.clone());
                terms.push(Expr::mul_all(rest.chain([df])));
            }
            Expr::add_all(terms)
        }
        Node::Pow(b, n) => {
            let db = derive_with(b, on_symbol);
            if db.is_zero_literal() {
                return Expr::zero();
            }
            Expr::mul_all([Expr::num(n.clone()), Expr::pow(b, n - super::Q::one()), db])
        }
        Node::Func(f, a) => {
            let da = derive_with(a, on_symbol);
            if da.is_zero_literal() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Log => a.recip(),
                Func::Sin => Expr::cos(a),
                Func::Cos => Expr::sin(a).neg(),
            };
            outer * da
        }
        Node::Apply { name, order, arg } => {
            let da = derive_with(arg, on_symbol);
            if da.is_zero_literal() {
                return Expr::zero();
            }
            Expr::apply(name, order + 1, arg) * da
        }
    }
}

/// Partial derivative with respect to `s`, all other symbols held fixed.
pub fn partial_derivative(e: &Expr, s: &Symbol) -> Expr {
    derive_with(e, &|t| if t == s { Expr::one() } else { Expr::zero() })
}
