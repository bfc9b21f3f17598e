use crate::expr::{canonicalize, partial_derivative, Expr};
use crate::jet::JetContext;
use crate::matrix::ExprMatrix;
use crate::mu::{common_eigenvector_check, gamma_from_lambda, GammaSearch, MuForm};
use crate::oracle::{is_zero, OracleConfig, ZeroVerdict};
use crate::prolong::standard_prolong;

use super::{
    el_shell, momenta, mu_divergence, mu_euler_lagrange, mu_symmetry_residual, mvector_with, residual_with,
    ConservationReport, Identity, Lagrangian, MVector, NoetherError, Shell,
};
use crate::prolong::VectorField;

fn first_order(l: &Lagrangian, operation: &'static str) -> Result<(), NoetherError> {
    if l.order() > 1 {
        return Err(NoetherError::UnsupportedOrder { operation, order: l.order() });
    }
    Ok(())
}

/// `Q^a π^i_a` for each `i`.
fn noether_current(ctx: &JetContext, qv: &[Expr], l: &Lagrangian) -> Vec<Expr> {
    let pi = momenta(ctx, l);
    (0..ctx.p()).map(|i| canonicalize(&Expr::add_all(qv.iter().zip(&pi[i]).map(|(a, b)| a * b)))).collect()
}

fn divergence(ctx: &JetContext, current: &[Expr]) -> Expr {
    Expr::add_all(current.iter().enumerate().map(|(i, c)| ctx.total_derivative(c, i)))
}

/// `π^i_b (Λ_i)^b_a Q^a`.
fn twist(ctx: &JetContext, qv: &[Expr], l: &Lagrangian, mu: &MuForm) -> Expr {
    let pi = momenta(ctx, l);
    let mut terms = Vec::new();
    for (i, pii) in pi.iter().enumerate() {
        let lq = mu.lambda(i).mul_vec(qv).expect("q components");
        terms.extend(pii.iter().zip(lq).map(|(a, b)| a.clone() * b));
    }
    Expr::add_all(terms)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceSymmetry {
    /// `Y_Q[L] - Tr(∇_i B^i)`.
    pub residual: Expr,
    pub verdict: ZeroVerdict,
    /// `P - B`.
    pub current: MVector,
    pub conservation: ConservationReport,
}

/// Checks `Y[L] = Tr(∇_i B^i)` where `B^i` has trace `b^i` (plus the `ξ`
/// term for non-vertical fields), then classifies `P - B` on shell.
pub fn divergence_symmetry_check(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
    b: Option<&[Expr]>,
    cfg: &OracleConfig,
) -> Result<DivergenceSymmetry, NoetherError> {
    first_order(l, "the divergence-symmetry check")?;
    let extra = match b {
        Some(t) if t.len() != ctx.p() => {
            return Err(NoetherError::Shape(format!("B needs {} components, found {}", ctx.p(), t.len())))
        }
        Some(t) => Some(MVector::from_traces(t, ctx.q())),
        None => None,
    };
    let residual = residual_with(ctx, x, mu, l, extra.as_ref())?;
    let verdict = is_zero(&residual, cfg);
    let current = mvector_with(ctx, x, mu, l, extra.as_ref())?;
    let shell = el_shell(ctx, l, cfg)?;
    let conservation = mu_divergence(ctx, &current, mu, Some(&shell), cfg)?;
    Ok(DivergenceSymmetry { residual, verdict, current, conservation })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalReport {
    /// `Y[L] = Tr(A_i P^i)` on shell.
    pub invariance: ZeroVerdict,
    /// `D_i Tr P^i = Tr((A_i - Λ_i) P^i)` on shell.
    pub decay: ZeroVerdict,
    /// `α - λ` for one independent variable.
    pub factor: Option<Expr>,
    pub current: Vec<Expr>,
    pub divergence: Expr,
}

/// Conditional invariant relation with the matrices `A_i`.
pub fn conditional_invariant_check(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
    a: &[ExprMatrix],
    cfg: &OracleConfig,
) -> Result<ConditionalReport, NoetherError> {
    if a.len() != ctx.p() {
        return Err(NoetherError::Shape(format!("α needs {} components, found {}", ctx.p(), a.len())));
    }
    let m = mvector_with(ctx, x, mu, l, None)?;
    let r = mu_symmetry_residual(ctx, x, mu, l)?;
    let shell = el_shell(ctx, l, cfg)?;
    let ap = Expr::add_all(a.iter().zip(m.components()).map(|(ai, pi)| ai.mul(pi).expect("q×q").trace()));
    let invariance = shell.is_zero_on_shell(ctx, &(r - ap.clone()), cfg)?;
    let div = divergence(ctx, &m.traces());
    let decay = shell.is_zero_on_shell(ctx, &(div.clone() - ap + m.trace_lambda(mu)), cfg)?;
    let factor = if ctx.p() == 1 {
        let qv = x.characteristic(ctx);
        let lambda = common_eigenvector_check(ctx, mu, &qv, cfg)?.ok_or(NoetherError::EigenvectorFails)?;
        let alpha = a[0].get(0, 0).clone();
        Some(canonicalize(&(alpha - lambda[0].clone())))
    } else {
        None
    };
    Ok(ConditionalReport { invariance, decay, factor, current: m.traces(), divergence: shell.reduce(ctx, &div)? })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StandardReduction {
    pub gamma: Expr,
    pub lambda: Vec<Expr>,
    /// `γ Tr P^i`.
    pub current: Vec<Expr>,
    /// `D_i (γ Tr P^i)` reduced on shell.
    pub divergence: Expr,
    pub verdict: ZeroVerdict,
}

/// Trades the μ-conservation law for a standard one through a scalar gauge
/// `γ` with `λ_i = γ^{-1} D_i γ`, found automatically when `gamma` is `None`.
pub fn standard_reduction(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
    gamma: Option<&Expr>,
    cfg: &OracleConfig,
) -> Result<StandardReduction, NoetherError> {
    first_order(l, "the standard reduction")?;
    let qv = x.characteristic(ctx);
    let lambda = if ctx.q() == 1 {
        mu.lambdas().iter().map(|m| m.get(0, 0).clone()).collect()
    } else {
        common_eigenvector_check(ctx, mu, &qv, cfg)?.ok_or(NoetherError::EigenvectorFails)?
    };
    let gamma = match gamma {
        Some(g) => {
            let ok = lambda.iter().enumerate().all(|(i, li)| {
                is_zero(&(ctx.total_derivative(g, i) / g.clone() - li.clone()), cfg).is_zero()
            });
            if !ok {
                return Err(NoetherError::GammaNotFound(format!("{g} does not satisfy λ_i = γ^-1 D_i γ")));
            }
            canonicalize(g)
        }
        None => {
            let scalar = MuForm::scalar(ctx, lambda.clone(), cfg)?;
            match gamma_from_lambda(ctx, &scalar, cfg) {
                Ok(GammaSearch::Found(g)) => g,
                Ok(GammaSearch::NotFound(why)) => return Err(NoetherError::GammaNotFound(why)),
                Err(e) => return Err(NoetherError::GammaNotFound(e.to_string())),
            }
        }
    };
    let m = mvector_with(ctx, x, mu, l, None)?;
    let current: Vec<Expr> = m.traces().iter().map(|t| canonicalize(&(t * &gamma))).collect();
    let shell = el_shell(ctx, l, cfg)?;
    let div = shell.reduce(ctx, &divergence(ctx, &current))?;
    let verdict = is_zero(&div, cfg);
    Ok(StandardReduction { gamma, lambda, current, divergence: div, verdict })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem9Report {
    pub residual: Expr,
    pub residual_verdict: ZeroVerdict,
    pub mu_el: Vec<Expr>,
    /// `Y[L] - Q·μE(L) - D_i(Q^a π^i_a)`.
    pub identity: Identity,
    pub current: Vec<Expr>,
    /// `D_i(Q^a π^i_a)` modulo the μ-Euler–Lagrange equations.
    pub divergence: Expr,
    pub on_shell: ZeroVerdict,
}

/// Standard conservation of `Q^a π^i_a` modulo the μ-Euler–Lagrange equations.
pub fn theorem9_conservation(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
    cfg: &OracleConfig,
) -> Result<Theorem9Report, NoetherError> {
    first_order(l, "the μ-Euler–Lagrange conservation law")?;
    if !x.is_vertical() {
        return Err(NoetherError::NotVertical("the μ-Euler–Lagrange conservation law"));
    }
    let qv = x.characteristic(ctx);
    let residual = mu_symmetry_residual(ctx, x, mu, l)?;
    let residual_verdict = is_zero(&residual, cfg);
    let mu_el = mu_euler_lagrange(ctx, l, mu)?;
    let current = noether_current(ctx, &qv, l);
    let div = divergence(ctx, &current);
    let qe = Expr::add_all(qv.iter().zip(&mu_el).map(|(a, b)| a * b));
    let expression = canonicalize(&(residual.clone() - qe - div.clone()));
    let identity = Identity { verdict: is_zero(&expression, cfg), expression };
    let shell = Shell::new(ctx, &mu_el, cfg)?;
    let divergence = shell.reduce(ctx, &div)?;
    let on_shell = is_zero(&divergence, cfg);
    Ok(Theorem9Report { residual, residual_verdict, mu_el, identity, current, divergence, on_shell })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualReport {
    /// `X^{(1)}[L]` with the standard prolongation.
    pub standard_residual: Expr,
    pub standard_verdict: ZeroVerdict,
    /// `X^{(1)}[L] - Q·μE(L) - D_i(Q π^i) + π^i_b (Λ_i)^b_a Q^a`.
    pub identity: Identity,
    pub current: Vec<Expr>,
    /// `D_i(Q π^i) - π^i_b (Λ_i)^b_a Q^a` modulo the μ-Euler–Lagrange equations.
    pub residual: Expr,
    pub on_shell: ZeroVerdict,
}

/// A standard symmetry gives a `(-μ)`-conservation law along the
/// μ-Euler–Lagrange flow.
pub fn dual_mu_conservation(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
    cfg: &OracleConfig,
) -> Result<DualReport, NoetherError> {
    first_order(l, "the dual conservation law")?;
    if !x.is_vertical() {
        return Err(NoetherError::NotVertical("the dual conservation law"));
    }
    let qv = x.characteristic(ctx);
    let y = standard_prolong(ctx, x, 1)?;
    let standard_residual = canonicalize(&y.apply(ctx, l.density())?);
    let standard_verdict = is_zero(&standard_residual, cfg);
    let mu_el = mu_euler_lagrange(ctx, l, mu)?;
    let current = noether_current(ctx, &qv, l);
    let tw = twist(ctx, &qv, l, mu);
    let div = divergence(ctx, &current);
    let qe = Expr::add_all(qv.iter().zip(&mu_el).map(|(a, b)| a * b));
    let expression = canonicalize(&(standard_residual.clone() - qe - div.clone() + tw.clone()));
    let identity = Identity { verdict: is_zero(&expression, cfg), expression };
    let shell = Shell::new(ctx, &mu_el, cfg)?;
    let residual = shell.reduce(ctx, &(div - tw))?;
    let on_shell = is_zero(&residual, cfg);
    Ok(DualReport { standard_residual, standard_verdict, identity, current, residual, on_shell })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElForm {
    pub equations: Vec<Expr>,
    /// `E_a / F_a` where it could be formed.
    pub factors: Vec<Option<Expr>>,
    pub verdict: ZeroVerdict,
}

/// Checks that each Euler–Lagrange expression is a nonzero multiple of the
/// given form, the multiplier being free of the highest derivatives.
pub fn el_form_check(
    ctx: &JetContext,
    l: &Lagrangian,
    forms: &[Expr],
    cfg: &OracleConfig,
) -> Result<ElForm, NoetherError> {
    let equations = super::euler_lagrange(ctx, l);
    if forms.len() != equations.len() {
        return Err(NoetherError::Shape(format!("{} forms for {} equations", forms.len(), equations.len())));
    }
    let mut factors = Vec::new();
    let mut verdicts = Vec::new();
    for (e, f) in equations.iter().zip(forms) {
        let fz = is_zero(f, cfg);
        if fz.is_zero() {
            verdicts.push(is_zero(e, cfg));
            factors.push(None);
            continue;
        }
        let k = canonicalize(&(e.clone() / f.clone()));
        let top = e.jet_order().max(f.jet_order());
        for s in ctx.jet_symbols_of_order(e, top).into_iter().chain(ctx.jet_symbols_of_order(f, top)) {
            verdicts.push(is_zero(&partial_derivative(&k, &s), cfg));
        }
        if !is_zero(&k, cfg).is_nonzero() {
            verdicts.push(ZeroVerdict::Indeterminate);
        }
        factors.push(Some(k));
    }
    Ok(ElForm { equations, factors, verdict: ZeroVerdict::all(verdicts) })
}
