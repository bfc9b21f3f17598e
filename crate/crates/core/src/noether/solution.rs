use std::collections::BTreeMap;

use crate::expr::{canonicalize, partial_derivative, Expr, Symbol, SymbolKind};
use crate::jet::JetContext;
use crate::oracle::{is_zero, OracleConfig, ZeroVerdict};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolutionError {
    #[error("no value given for `{0}`")]
    Unbound(String),
    #[error("the value of `{0}` must depend on independent variables and parameters only")]
    NotExplicit(String),
}

/// Replaces every `u^a_J` in `e` by `∂_J` of the value bound to `u^a`.
pub fn evaluate_along(ctx: &JetContext, e: &Expr, solution: &BTreeMap<usize, Expr>) -> Result<Expr, SolutionError> {
    for (a, v) in solution {
        if v.symbols().iter().any(|s| matches!(s.kind(), SymbolKind::Jet { .. })) {
            return Err(SolutionError::NotExplicit(ctx.dependent_names()[*a].to_string()));
        }
    }
    let mut bindings: BTreeMap<Symbol, Expr> = BTreeMap::new();
    for s in e.symbols() {
        let SymbolKind::Jet { dep, index } = s.kind() else { continue };
        let v = solution.get(dep).ok_or_else(|| SolutionError::Unbound(ctx.dependent_names()[*dep].to_string()))?;
        let mut d = v.clone();
        for i in index.directions() {
            d = partial_derivative(&d, &ctx.x_symbol(i));
        }
        bindings.insert(s.clone(), canonicalize(&d));
    }
    Ok(e.substitute(&bindings))
}

/// Verdict per equation after substituting the solution.
pub fn verify_solution(
    ctx: &JetContext,
    equations: &[Expr],
    solution: &BTreeMap<usize, Expr>,
    cfg: &OracleConfig,
) -> Result<Vec<(Expr, ZeroVerdict)>, SolutionError> {
    equations
        .iter()
        .map(|e| {
            let r = evaluate_along(ctx, e, solution)?;
            let v = is_zero(&r, cfg);
            Ok((r, v))
        })
        .collect()
}
