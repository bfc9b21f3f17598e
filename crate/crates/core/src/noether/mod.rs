//! Lagrangians, Euler–Lagrange operators, conserved M-vectors and the
//! theorem-level checks built on them.
//!
//! M-vectors use `(P^i)^b_a = Q^b π^i_a`: row `b`, column `a`. The trace is
//! the only observable, so the transposed convention gives the same results.

mod shell;
mod solution;
mod theorems;

pub use shell::{Shell, ShellError};
pub use solution::{evaluate_along, verify_solution, SolutionError};
pub use theorems::{
    conditional_invariant_check, divergence_symmetry_check, dual_mu_conservation, el_form_check,
    standard_reduction, theorem9_conservation, ConditionalReport, DivergenceSymmetry, DualReport, ElForm,
    StandardReduction, Theorem9Report,
};

use crate::expr::{canonicalize, partial_derivative, q, Expr};
use crate::jet::{JetContext, MultiIndex};
use crate::matrix::ExprMatrix;
use crate::mu::{MuError, MuForm};
use crate::oracle::{is_zero, OracleConfig, ZeroVerdict};
use crate::prolong::{mu_prolong, ProlongError, VectorField};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NoetherError {
    #[error("{operation} is not supported for Lagrangians of order {order}")]
    UnsupportedOrder { operation: &'static str, order: u32 },
    #[error("{0} requires a vertical field")]
    NotVertical(&'static str),
    #[error("Λ_i φ = λ_i φ has no solution for this field")]
    EigenvectorFails,
    #[error("no gauge function: {0}")]
    GammaNotFound(String),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
    #[error(transparent)]
    Mu(#[from] MuError),
    #[error(transparent)]
    Shell(#[from] ShellError),
}

/// A Lagrangian density; its order is the highest derivative it contains.
#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian {
    density: Expr,
    order: u32,
}

impl Lagrangian {
    pub fn new(density: Expr) -> Self {
        let order = density.jet_order();
        Lagrangian { density, order }
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    pub fn order(&self) -> u32 {
        self.order
    }
}

/// One q×q matrix per independent variable.
#[derive(Clone, Debug, PartialEq)]
pub struct MVector {
    comps: Vec<ExprMatrix>,
}

impl MVector {
    pub fn new(comps: Vec<ExprMatrix>) -> Self {
        MVector { comps }
    }

    /// `B^i = (b^i / q) I`, so that `Tr B^i = b^i`.
    pub fn from_traces(traces: &[Expr], q_dim: usize) -> Self {
        let k = Expr::rational(1, q_dim as i64);
        MVector { comps: traces.iter().map(|b| ExprMatrix::scalar(q_dim, &(b * &k))).collect() }
    }

    pub fn components(&self) -> &[ExprMatrix] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &ExprMatrix {
        &self.comps[i]
    }

    pub fn p(&self) -> usize {
        self.comps.len()
    }

    pub fn traces(&self) -> Vec<Expr> {
        self.comps.iter().map(|m| canonicalize(&m.trace())).collect()
    }

    pub fn canonical(&self) -> Self {
        MVector { comps: self.comps.iter().map(ExprMatrix::canonical).collect() }
    }

    pub fn sub(&self, o: &MVector) -> Result<MVector, NoetherError> {
        let comps = self
            .comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| a.sub(b).map_err(|e| NoetherError::Shape(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(MVector { comps })
    }

    /// `Tr(∇_i P^i) = D_i Tr P^i + Tr(Λ_i P^i)`.
    pub fn mu_divergence_expr(&self, ctx: &JetContext, mu: &MuForm) -> Expr {
        Expr::add_all(self.comps.iter().enumerate().map(|(i, m)| {
            let lp = mu.lambda(i).mul(m).expect("q×q");
            ctx.total_derivative(&m.trace(), i) + lp.trace()
        }))
    }

    /// `Σ_i Tr(Λ_i P^i)`.
    pub fn trace_lambda(&self, mu: &MuForm) -> Expr {
        Expr::add_all(self.comps.iter().enumerate().map(|(i, m)| mu.lambda(i).mul(m).expect("q×q").trace()))
    }
}

/// `π^i_a = ∂L/∂u^a_i`, indexed `[i][a]`.
pub fn momenta(ctx: &JetContext, l: &Lagrangian) -> Vec<Vec<Expr>> {
    (0..ctx.p())
        .map(|i| {
            (0..ctx.q())
                .map(|a| canonicalize(&partial_derivative(&l.density, ctx.du(a, i).as_symbol().expect("jet"))))
                .collect()
        })
        .collect()
}

/// `E_a = Σ_J (-1)^{|J|} D_J ∂L/∂u^a_J`.
pub fn euler_lagrange(ctx: &JetContext, l: &Lagrangian) -> Vec<Expr> {
    (0..ctx.q())
        .map(|a| {
            let terms = MultiIndex::up_to(ctx.p(), l.order).into_iter().filter_map(|j| {
                let d = partial_derivative(&l.density, ctx.jet(a, &j).as_symbol().expect("jet"));
                if d.is_zero_literal() {
                    return None;
                }
                let t = ctx.total_derivative_multi(&d, &j);
                Some(if j.order() % 2 == 1 { t.neg() } else { t })
            });
            canonicalize(&Expr::add_all(terms))
        })
        .collect()
}

/// `L_{u^a} - D_i π^i_a + π^i_b (Λ_i)^b_a`.
pub fn mu_euler_lagrange(ctx: &JetContext, l: &Lagrangian, mu: &MuForm) -> Result<Vec<Expr>, NoetherError> {
    if l.order > 1 {
        return Err(NoetherError::UnsupportedOrder { operation: "the μ-Euler–Lagrange operator", order: l.order });
    }
    let pi = momenta(ctx, l);
    Ok((0..ctx.q())
        .map(|a| {
            let lu = partial_derivative(&l.density, ctx.u(a).as_symbol().expect("jet"));
            let div = Expr::add_all((0..ctx.p()).map(|i| ctx.total_derivative(&pi[i][a], i)));
            let twist = Expr::add_all(
                (0..ctx.p()).flat_map(|i| (0..ctx.q()).map(move |b| (i, b))).map(|(i, b)| &pi[i][b] * mu.lambda(i).get(b, a)),
            );
            canonicalize(&(lu - div + twist))
        })
        .collect())
}

/// `B^i = -(L ξ^i / q) I`, the divergence term carried by a field with `ξ ≠ 0`.
fn xi_term(ctx: &JetContext, x: &VectorField, l: &Lagrangian) -> MVector {
    let traces: Vec<Expr> = x.xi().iter().map(|xi| (l.density.clone() * xi.clone()).neg()).collect();
    MVector::from_traces(&traces, ctx.q())
}

fn has_xi(x: &VectorField) -> bool {
    !x.is_vertical()
}

/// The total divergence term `B` used for `X`: the `ξ` part plus `extra`.
fn total_b(ctx: &JetContext, x: &VectorField, l: &Lagrangian, extra: Option<&MVector>) -> Option<MVector> {
    let xi = has_xi(x).then(|| xi_term(ctx, x, l));
    match (xi, extra) {
        (None, None) => None,
        (Some(b), None) => Some(b),
        (None, Some(e)) => Some(e.clone()),
        (Some(b), Some(e)) => {
            Some(MVector::new(b.comps.iter().zip(&e.comps).map(|(m, n)| m.add(n).expect("q×q")).collect()))
        }
    }
}

fn check_order(l: &Lagrangian, x: &VectorField, extra: bool, operation: &'static str) -> Result<(), NoetherError> {
    if l.order > 2 || (l.order == 2 && (has_xi(x) || extra)) {
        return Err(NoetherError::UnsupportedOrder { operation, order: l.order });
    }
    Ok(())
}

/// `Y_Q[L] - Tr(∇_i B^i)`, with `B` the divergence term of `X` plus `extra`.
pub(crate) fn residual_with(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
    extra: Option<&MVector>,
) -> Result<Expr, NoetherError> {
    check_order(l, x, extra.is_some(), "the μ-symmetry residual")?;
    let xq = if has_xi(x) { x.evolutionary(ctx) } else { x.clone() };
    let y = mu_prolong(ctx, &xq, mu, l.order.max(1))?;
    let mut r = y.apply(ctx, &l.density)?;
    if let Some(b) = total_b(ctx, x, l, extra) {
        r = r - b.mu_divergence_expr(ctx, mu);
    }
    Ok(canonicalize(&r))
}

/// `Y[L]` for vertical fields; for `ξ ≠ 0`, `Y_Q[L] - Tr(∇_i B^i)` with
/// `B^i = -(L ξ^i / q) I`.
pub fn mu_symmetry_residual(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
) -> Result<Expr, NoetherError> {
    residual_with(ctx, x, mu, l, None)
}

/// `(P^i)^b_a = Q^b π^i_a - B^i` at first order; the second-order form
/// adds `(∇_j Q)^b L^{ij}_a - Q^b D_j L^{ij}_a`.
pub(crate) fn mvector_with(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
    extra: Option<&MVector>,
) -> Result<MVector, NoetherError> {
    check_order(l, x, extra.is_some(), "the conserved M-vector")?;
    let (p, qd) = (ctx.p(), ctx.q());
    let qv = x.characteristic(ctx);
    let pi = momenta(ctx, l);
    let mut comps: Vec<ExprMatrix> =
        (0..p).map(|i| ExprMatrix::from_fn(qd, qd, |b, a| qv[b].clone() * pi[i][a].clone())).collect();
    if l.order == 2 {
        let second = second_momenta(ctx, l);
        let nq: Vec<Vec<Expr>> = (0..p).map(|j| mu.nabla(ctx, j, &qv)).collect::<Result<_, _>>()?;
        for (i, comp) in comps.iter_mut().enumerate() {
            let add = ExprMatrix::from_fn(qd, qd, |b, a| {
                Expr::add_all((0..p).map(|j| {
                    let lij = &second[i][j][a];
                    nq[j][b].clone() * lij.clone() - qv[b].clone() * ctx.total_derivative(lij, j)
                }))
            });
            *comp = comp.add(&add).expect("q×q");
        }
    }
    let mut m = MVector::new(comps);
    if let Some(b) = total_b(ctx, x, l, extra) {
        m = m.sub(&b)?;
    }
    Ok(m.canonical())
}

/// `L^{ij}_a = ∂L/∂u^a_{(ij)}`, halved off the diagonal, indexed `[i][j][a]`.
fn second_momenta(ctx: &JetContext, l: &Lagrangian) -> Vec<Vec<Vec<Expr>>> {
    let p = ctx.p();
    (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let idx = MultiIndex::unit(p, i).plus(j);
                    (0..ctx.q())
                        .map(|a| {
                            let d = partial_derivative(&l.density, ctx.jet(a, &idx).as_symbol().expect("jet"));
                            canonicalize(&if i == j { d } else { d * Expr::num(q(1, 2)) })
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// The M-vector whose μ-divergence is `Y[L] - Q·E(L)`; for `ξ ≠ 0` it is
/// `Q^b π^i_a + (L ξ^i / q) δ^b_a`.
pub fn conserved_mvector(ctx: &JetContext, x: &VectorField, mu: &MuForm, l: &Lagrangian) -> Result<MVector, NoetherError> {
    mvector_with(ctx, x, mu, l, None)
}

/// Expression and verdict of an identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct Identity {
    pub expression: Expr,
    pub verdict: ZeroVerdict,
}

/// `Tr(∇_i P^i) - R + Q·E(L)` where `R` is the μ-symmetry residual, with
/// `E` the Euler–Lagrange expression `L_u - D_i π^i + ...`.
pub fn verify_noether_identity(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    l: &Lagrangian,
    cfg: &OracleConfig,
) -> Result<Identity, NoetherError> {
    let m = conserved_mvector(ctx, x, mu, l)?;
    let r = mu_symmetry_residual(ctx, x, mu, l)?;
    let e = euler_lagrange(ctx, l);
    let qv = x.characteristic(ctx);
    let qe = Expr::add_all(qv.iter().zip(&e).map(|(a, b)| a * b));
    let expression = canonicalize(&(m.mu_divergence_expr(ctx, mu) - r + qe));
    let verdict = is_zero(&expression, cfg);
    Ok(Identity { expression, verdict })
}

/// How a current is conserved.
#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    StandardConserved,
    MuConserved,
    Conditional(Expr),
    None,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::StandardConserved => "standard-conserved",
            Classification::MuConserved => "mu-conserved",
            Classification::Conditional(_) => "conditional",
            Classification::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationReport {
    /// `D_i Tr P^i`, reduced on shell when `on_shell`.
    pub divergence: Expr,
    /// `Tr(∇_i P^i)`, reduced likewise.
    pub mu_residual: Expr,
    /// `Σ Tr(Λ_i P^i)`.
    pub trace_lambda: Expr,
    pub classification: Classification,
    pub on_shell: bool,
    /// Verdict of the residual that decided the classification.
    pub verdict: ZeroVerdict,
}

/// Classifies `P` as standard-conserved, μ-conserved or neither, reducing
/// modulo `shell` when given.
pub fn mu_divergence(
    ctx: &JetContext,
    p: &MVector,
    mu: &MuForm,
    shell: Option<&Shell>,
    cfg: &OracleConfig,
) -> Result<ConservationReport, NoetherError> {
    let reduce = |e: &Expr| -> Result<Expr, NoetherError> {
        Ok(match shell {
            Some(s) => s.reduce(ctx, e)?,
            None => canonicalize(e),
        })
    };
    let div = Expr::add_all(p.comps.iter().enumerate().map(|(i, m)| ctx.total_derivative(&m.trace(), i)));
    let tl = p.trace_lambda(mu);
    let divergence = reduce(&div)?;
    let trace_lambda = reduce(&tl)?;
    let mu_residual = reduce(&(div + tl))?;
    let std = is_zero(&divergence, cfg);
    let (classification, verdict) = if std.is_zero() {
        (Classification::StandardConserved, std)
    } else {
        let v = is_zero(&mu_residual, cfg);
        (if v.is_zero() { Classification::MuConserved } else { Classification::None }, v)
    };
    Ok(ConservationReport { divergence, mu_residual, trace_lambda, classification, on_shell: shell.is_some(), verdict })
}

/// Solved form of the ordinary Euler–Lagrange equations.
pub fn el_shell(ctx: &JetContext, l: &Lagrangian, cfg: &OracleConfig) -> Result<Shell, NoetherError> {
    Ok(Shell::new(ctx, &euler_lagrange(ctx, l), cfg)?)
}

#[cfg(test)]
mod tests;
