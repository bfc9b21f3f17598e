//! Vector fields on `(x, u)` and their standard and μ-prolongations.

use std::collections::BTreeMap;

use crate::expr::{canonicalize, partial_derivative, Expr, SymbolKind};
use crate::jet::{JetContext, MultiIndex};
use crate::mu::MuForm;
use crate::oracle::{is_zero, OracleConfig, ZeroVerdict};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ProlongError {
    #[error("{what} has {found} components, expected {expected}")]
    Length { what: &'static str, expected: usize, found: usize },
    #[error("the μ-form fails the compatibility condition")]
    Incompatible,
    #[error("generalized fields are only prolonged in evolutionary form to first order")]
    Generalized,
    #[error("`{symbol}` has order {order}, beyond the prolongation order {max}")]
    OrderOverflow { symbol: String, order: u32, max: u32 },
}

/// `X = ξ^i ∂_i + φ^a ∂_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    xi: Vec<Expr>,
    phi: Vec<Expr>,
}

impl VectorField {
    pub fn new(ctx: &JetContext, xi: Vec<Expr>, phi: Vec<Expr>) -> Result<Self, ProlongError> {
        if xi.len() != ctx.p() {
            return Err(ProlongError::Length { what: "xi", expected: ctx.p(), found: xi.len() });
        }
        if phi.len() != ctx.q() {
            return Err(ProlongError::Length { what: "phi", expected: ctx.q(), found: phi.len() });
        }
        Ok(VectorField { xi, phi })
    }

    pub fn vertical(ctx: &JetContext, phi: Vec<Expr>) -> Result<Self, ProlongError> {
        VectorField::new(ctx, vec![Expr::zero(); ctx.p()], phi)
    }

    pub fn xi(&self) -> &[Expr] {
        &self.xi
    }

    pub fn phi(&self) -> &[Expr] {
        &self.phi
    }

    pub fn is_vertical(&self) -> bool {
        self.xi.iter().all(Expr::is_zero_literal)
    }

    /// Components depend on derivatives.
    pub fn is_generalized(&self) -> bool {
        self.xi.iter().chain(&self.phi).any(|e| e.jet_order() > 0)
    }

    /// `Q^a = φ^a - ξ^i u^a_i`.
    pub fn characteristic(&self, ctx: &JetContext) -> Vec<Expr> {
        (0..ctx.q())
            .map(|a| {
                let flow = Expr::add_all(self.xi.iter().enumerate().map(|(i, x)| x * &ctx.du(a, i)));
                canonicalize(&(self.phi[a].clone() - flow))
            })
            .collect()
    }

    /// The vertical field `Q^a ∂_a`.
    pub fn evolutionary(&self, ctx: &JetContext) -> VectorField {
        VectorField { xi: vec![Expr::zero(); ctx.p()], phi: self.characteristic(ctx) }
    }

    /// Multiplies every component by `g`.
    pub fn scaled(&self, g: &Expr) -> VectorField {
        VectorField {
            xi: self.xi.iter().map(|e| canonicalize(&(e * g))).collect(),
            phi: self.phi.iter().map(|e| canonicalize(&(e * g))).collect(),
        }
    }
}

/// Which prolongation rule produced the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    Standard,
    Mu(MuForm),
}

/// A prolonged field with every coefficient `ψ^a_J`, `|J| ≤ r`, computed up front.
#[derive(Clone, Debug)]
pub struct ProlongedField {
    base: VectorField,
    order: u32,
    mode: Mode,
    coeffs: BTreeMap<(usize, MultiIndex), Expr>,
}

impl ProlongedField {
    pub fn base(&self) -> &VectorField {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    /// `ψ^a_J`.
    pub fn coefficient(&self, a: usize, index: &MultiIndex) -> Option<&Expr> {
        self.coeffs.get(&(a, index.clone()))
    }

    pub fn coefficients(&self) -> &BTreeMap<(usize, MultiIndex), Expr> {
        &self.coeffs
    }

    /// `ξ^i ∂e/∂x^i + ψ^a_J ∂e/∂u^a_J`.
    pub fn apply(&self, ctx: &JetContext, e: &Expr) -> Result<Expr, ProlongError> {
        let mut terms = Vec::new();
        for s in e.symbols() {
            match s.kind() {
                SymbolKind::Independent(i) => terms.push(self.base.xi[*i].clone() * partial_derivative(e, &s)),
                SymbolKind::Jet { dep, index } => {
                    if index.order() > self.order {
                        return Err(ProlongError::OrderOverflow {
                            symbol: ctx.jet_name(*dep, index),
                            order: index.order(),
                            max: self.order,
                        });
                    }
                    let c = &self.coeffs[&(*dep, index.clone())];
                    terms.push(c * &partial_derivative(e, &s));
                }
                SymbolKind::Parameter(_) => {}
            }
        }
        Ok(Expr::add_all(terms))
    }
}

fn prolong(ctx: &JetContext, x: &VectorField, mode: Mode, r: u32) -> Result<ProlongedField, ProlongError> {
    if x.is_generalized() && (r > 1 || !x.is_vertical()) {
        return Err(ProlongError::Generalized);
    }
    let mu = match &mode {
        Mode::Mu(m) if !m.is_valid() => return Err(ProlongError::Incompatible),
        Mode::Mu(m) if !m.is_zero_form() => Some(m),
        _ => None,
    };
    let (p, q) = (ctx.p(), ctx.q());
    let mut coeffs: BTreeMap<(usize, MultiIndex), Expr> = BTreeMap::new();
    for a in 0..q {
        coeffs.insert((a, MultiIndex::zero(p)), canonicalize(&x.phi[a]));
    }
    let dxi: Vec<Vec<Expr>> =
        (0..p).map(|k| x.xi.iter().map(|xi| ctx.total_derivative(xi, k)).collect()).collect();
    for order in 1..=r {
        for k_index in MultiIndex::of_order(p, order) {
            let k = k_index.first_index().expect("nonzero order");
            let j = k_index.minus(k).expect("positive count");
            // ψ_J - u_{J,i} ξ^i, needed for the μ-term
            let shifted: Vec<Expr> = (0..q)
                .map(|b| {
                    let flow = Expr::add_all((0..p).map(|i| ctx.jet(b, &j.plus(i)) * x.xi[i].clone()));
                    coeffs[&(b, j.clone())].clone() - flow
                })
                .collect();
            for a in 0..q {
                let mut c = ctx.total_derivative(&coeffs[&(a, j.clone())], k)
                    - Expr::add_all((0..p).map(|i| ctx.jet(a, &j.plus(i)) * dxi[k][i].clone()));
                if let Some(m) = mu {
                    let l = m.lambda(k);
                    c = c + Expr::add_all((0..q).map(|b| l.get(a, b) * &shifted[b]));
                }
                coeffs.insert((a, k_index.clone()), canonicalize(&c));
            }
        }
    }
    Ok(ProlongedField { base: x.clone(), order: r, mode, coeffs })
}

/// `φ_{J,k} = D_k φ_J - u_{J,i} D_k ξ^i`.
pub fn standard_prolong(ctx: &JetContext, x: &VectorField, r: u32) -> Result<ProlongedField, ProlongError> {
    prolong(ctx, x, Mode::Standard, r)
}

/// `ψ_{J,k} = D_k ψ_J - u_{J,i} D_k ξ^i + Λ_k (ψ_J - u_{J,i} ξ^i)`.
pub fn mu_prolong(ctx: &JetContext, x: &VectorField, mu: &MuForm, r: u32) -> Result<ProlongedField, ProlongError> {
    prolong(ctx, x, Mode::Mu(mu.clone()), r)
}

/// Either prolongation, `None` meaning standard.
pub fn prolong_with(
    ctx: &JetContext,
    x: &VectorField,
    mu: Option<&MuForm>,
    r: u32,
) -> Result<ProlongedField, ProlongError> {
    match mu {
        Some(m) => mu_prolong(ctx, x, m, r),
        None => standard_prolong(ctx, x, r),
    }
}

/// The μ-difference terms `F^a_J = ψ^a_J - φ^a_J`.
#[derive(Clone, Debug)]
pub struct MuDifference {
    pub terms: BTreeMap<(usize, MultiIndex), Expr>,
    /// Verdict on `F_{J,i} - ∇_i F_J - Λ_i D_J Q` over all `J`, `i` with `|J| < r`.
    pub recursion: ZeroVerdict,
}

pub fn mu_difference(
    ctx: &JetContext,
    x: &VectorField,
    mu: &MuForm,
    r: u32,
    cfg: &OracleConfig,
) -> Result<MuDifference, ProlongError> {
    let psi = mu_prolong(ctx, x, mu, r)?;
    let phi = standard_prolong(ctx, x, r)?;
    let terms: BTreeMap<(usize, MultiIndex), Expr> = psi
        .coeffs
        .iter()
        .map(|(key, v)| (key.clone(), canonicalize(&(v.clone() - phi.coeffs[key].clone()))))
        .collect();
    let qv = x.characteristic(ctx);
    let mut verdicts = Vec::new();
    for j in MultiIndex::up_to(ctx.p(), r.saturating_sub(1)) {
        let f: Vec<Expr> = (0..ctx.q()).map(|a| terms[&(a, j.clone())].clone()).collect();
        let dq: Vec<Expr> = qv.iter().map(|e| ctx.total_derivative_multi(e, &j)).collect();
        for i in 0..ctx.p() {
            let nf = mu.nabla(ctx, i, &f).map_err(|_| ProlongError::Incompatible)?;
            let ldq = mu.lambda(i).mul_vec(&dq).expect("q components");
            for a in 0..ctx.q() {
                let res = terms[&(a, j.plus(i))].clone() - nf[a].clone() - ldq[a].clone();
                verdicts.push(is_zero(&res, cfg));
            }
        }
    }
    Ok(MuDifference { terms, recursion: ZeroVerdict::all(verdicts) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::matrix::ExprMatrix;

    fn ex1() -> (JetContext, MuForm, VectorField) {
        let ctx = JetContext::new(&["x", "y"], &["u", "v"]).unwrap();
        let m = |s: &str| {
            let e = parse_expr(s, &ctx).unwrap();
            ExprMatrix::from_rows(vec![vec![Expr::zero(), Expr::zero()], vec![e, Expr::zero()]]).unwrap()
        };
        let mu = MuForm::new(&ctx, vec![m("u_x"), m("u_y")], &OracleConfig::default()).unwrap();
        let x = VectorField::vertical(&ctx, vec![ctx.u(0), Expr::one()]).unwrap();
        (ctx, mu, x)
    }

    #[test]
    fn ex1_first_prolongation() {
        let (ctx, mu, x) = ex1();
        let y = mu_prolong(&ctx, &x, &mu, 1).unwrap();
        let ex = MultiIndex::unit(2, 0);
        assert_eq!(y.coefficient(0, &ex), Some(&ctx.du(0, 0)));
        assert_eq!(y.coefficient(1, &ex), Some(&canonicalize(&(ctx.u(0) * ctx.du(0, 0)))));
        let s = standard_prolong(&ctx, &x, 1).unwrap();
        assert_eq!(s.coefficient(1, &ex), Some(&Expr::zero()));
        let d = mu_difference(&ctx, &x, &mu, 2, &OracleConfig::default()).unwrap();
        assert!(d.recursion.is_zero());
        assert_eq!(d.terms[&(1, ex)], canonicalize(&(ctx.u(0) * ctx.du(0, 0))));
    }

    #[test]
    fn vertical_coefficients_match_nabla() {
        let (ctx, mu, x) = ex1();
        let y = mu_prolong(&ctx, &x, &mu, 2).unwrap();
        for j in MultiIndex::up_to(2, 2) {
            let n = mu.nabla_multi(&ctx, &j, x.phi()).unwrap();
            for (a, na) in n.iter().enumerate() {
                assert_eq!(y.coefficient(a, &j).unwrap(), na, "{j}");
            }
        }
    }

    #[test]
    fn point_field_with_xi() {
        let ctx = JetContext::new(&["x", "y"], &["u", "v"]).unwrap();
        let x = VectorField::new(&ctx, vec![ctx.x(0), Expr::zero()], vec![Expr::zero(), Expr::one()]).unwrap();
        let q = x.characteristic(&ctx);
        assert_eq!(q[0], canonicalize(&(ctx.x(0) * ctx.du(0, 0)).neg()));
        let y = standard_prolong(&ctx, &x, 1).unwrap();
        assert_eq!(y.coefficient(0, &MultiIndex::unit(2, 0)), Some(&ctx.du(0, 0).neg()));
        let over = y.apply(&ctx, &parse_expr("u_xx", &ctx).unwrap());
        assert!(matches!(over, Err(ProlongError::OrderOverflow { order: 2, max: 1, .. })));
        assert_eq!(y.apply(&ctx, &Expr::int(7)), Ok(Expr::zero()));
    }

    #[test]
    fn invariants_of_ex3() {
        let ctx = JetContext::new(&["x", "y"], &["u", "v"]).unwrap();
        let n = ExprMatrix::from_rows(vec![vec![Expr::zero(), Expr::zero()], vec![Expr::one(), Expr::zero()]]).unwrap();
        let mu = MuForm::new(&ctx, vec![n.clone(), n], &OracleConfig::default()).unwrap();
        let x = VectorField::new(&ctx, vec![ctx.x(0), Expr::zero()], vec![Expr::zero(), Expr::one()]).unwrap();
        let y = mu_prolong(&ctx, &x, &mu, 1).unwrap();
        for inv in ["x*u_x", "x*v*u_x + v_y"] {
            let e = parse_expr(inv, &ctx).unwrap();
            assert!(is_zero(&y.apply(&ctx, &e).unwrap(), &OracleConfig::default()).is_zero(), "{inv}");
        }
    }

    #[test]
    fn generalized_fields_restricted() {
        let ctx = JetContext::new(&["x"], &["u"]).unwrap();
        let x = VectorField::vertical(&ctx, vec![ctx.du(0, 0)]).unwrap();
        assert!(standard_prolong(&ctx, &x, 1).is_ok());
        assert_eq!(standard_prolong(&ctx, &x, 2).unwrap_err(), ProlongError::Generalized);
        let xx = VectorField::new(&ctx, vec![Expr::one()], vec![ctx.du(0, 0)]).unwrap();
        assert_eq!(standard_prolong(&ctx, &xx, 1).unwrap_err(), ProlongError::Generalized);
    }
}
