//! Horizontal matrix forms `μ = Λ_i dx^i`, the covariant operators `∇_i`
//! and gauge functions.

use crate::expr::{canonicalize, partial_derivative, Expr, Symbol, SymbolKind};
use crate::jet::{JetContext, MultiIndex};
use crate::matrix::{ExprMatrix, ShapeError};
use crate::oracle::{is_zero, OracleConfig, ZeroVerdict};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MuError {
    #[error("expected {expected} matrices, one per independent variable, found {found}")]
    Count { expected: usize, found: usize },
    #[error("Λ_{index} must be {q}x{q}")]
    NotSquare { index: usize, q: usize },
    #[error("entry ({row},{col}) of Λ_{index} has jet order {order}; at most first derivatives are allowed")]
    OrderTooHigh { index: usize, row: usize, col: usize, order: u32 },
    #[error("the form fails the compatibility condition")]
    Incompatible,
    #[error("vector has {found} components, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("the gauge function is singular")]
    SingularGauge,
    #[error("the form is not scalar: {0}")]
    NotScalar(String),
    #[error("the potential system is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Residual of the compatibility condition for one pair `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairResidual {
    pub i: usize,
    pub j: usize,
    pub residual: ExprMatrix,
    pub verdict: ZeroVerdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Compatibility {
    pub pairs: Vec<PairResidual>,
    pub verdict: ZeroVerdict,
}

impl Compatibility {
    /// Pairs whose residual is not zero.
    pub fn failing(&self) -> impl Iterator<Item = &PairResidual> {
        self.pairs.iter().filter(|p| !p.verdict.is_zero())
    }
}

/// `μ = Λ_i dx^i` with `Λ_i` stored as q×q matrices, entry `(a, b)` being
/// `(Λ_i)^a_b`.
#[derive(Clone, Debug)]
pub struct MuForm {
    lambdas: Vec<ExprMatrix>,
    compatibility: Compatibility,
}

impl PartialEq for MuForm {
    fn eq(&self, other: &Self) -> bool {
        self.lambdas == other.lambdas
    }
}

impl MuForm {
    /// Checks shapes and orders, then records the compatibility verdict.
    pub fn new(ctx: &JetContext, lambdas: Vec<ExprMatrix>, cfg: &OracleConfig) -> Result<Self, MuError> {
        if lambdas.len() != ctx.p() {
            return Err(MuError::Count { expected: ctx.p(), found: lambdas.len() });
        }
        let q = ctx.q();
        for (index, m) in lambdas.iter().enumerate() {
            if m.rows() != q || m.cols() != q {
                return Err(MuError::NotSquare { index, q });
            }
            for row in 0..q {
                for col in 0..q {
                    let order = m.get(row, col).jet_order();
                    if order > 1 {
                        return Err(MuError::OrderTooHigh { index, row, col, order });
                    }
                }
            }
        }
        let lambdas: Vec<ExprMatrix> = lambdas.iter().map(ExprMatrix::canonical).collect();
        let compatibility = check_compatibility_of(ctx, &lambdas, cfg);
        Ok(MuForm { lambdas, compatibility })
    }

    /// `Λ_i = λ_i I`.
    pub fn scalar(ctx: &JetContext, lambdas: Vec<Expr>, cfg: &OracleConfig) -> Result<Self, MuError> {
        let q = ctx.q();
        MuForm::new(ctx, lambdas.iter().map(|l| ExprMatrix::scalar(q, l)).collect(), cfg)
    }

    pub fn zero(ctx: &JetContext) -> Self {
        let lambdas = vec![ExprMatrix::zeros(ctx.q(), ctx.q()); ctx.p()];
        let pairs = pairs(ctx.p())
            .map(|(i, j)| PairResidual {
                i,
                j,
                residual: ExprMatrix::zeros(ctx.q(), ctx.q()),
                verdict: ZeroVerdict::Zero(crate::oracle::ZeroKind::Symbolic),
            })
            .collect();
        MuForm {
            lambdas,
            compatibility: Compatibility { pairs, verdict: ZeroVerdict::Zero(crate::oracle::ZeroKind::Symbolic) },
        }
    }

    /// The form `-μ`, with its own compatibility verdict.
    pub fn negated(&self, ctx: &JetContext, cfg: &OracleConfig) -> Self {
        let lambdas: Vec<ExprMatrix> = self.lambdas.iter().map(|m| m.map(Expr::neg)).collect();
        let compatibility = check_compatibility_of(ctx, &lambdas, cfg);
        MuForm { lambdas, compatibility }
    }

    pub fn lambdas(&self) -> &[ExprMatrix] {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> &ExprMatrix {
        &self.lambdas[i]
    }

    pub fn q(&self) -> usize {
        self.lambdas.first().map_or(0, ExprMatrix::rows)
    }

    pub fn compatibility(&self) -> &Compatibility {
        &self.compatibility
    }

    /// Only a NonZero verdict disqualifies the form.
    pub fn is_valid(&self) -> bool {
        !self.compatibility.verdict.is_nonzero()
    }

    pub fn is_zero_form(&self) -> bool {
        self.lambdas.iter().all(|m| m.entries().all(Expr::is_zero_literal))
    }

    /// `Some(λ)` when every `Λ_i` is literally `λ_i I`.
    pub fn scalar_parts(&self) -> Option<Vec<Expr>> {
        let q = self.q();
        self.lambdas
            .iter()
            .map(|m| {
                let d = m.get(0, 0);
                let ok = (0..q).all(|r| {
                    (0..q).all(|c| if r == c { m.get(r, c) == d } else { m.get(r, c).is_zero_literal() })
                });
                ok.then(|| d.clone())
            })
            .collect()
    }

    /// `(∇_i v)^a = D_i v^a + (Λ_i)^a_b v^b`.
    pub fn nabla(&self, ctx: &JetContext, i: usize, v: &[Expr]) -> Result<Vec<Expr>, MuError> {
        if v.len() != self.q() {
            return Err(MuError::Length { expected: self.q(), found: v.len() });
        }
        let lv = self.lambdas[i].mul_vec(v)?;
        Ok(v.iter().zip(lv).map(|(c, l)| ctx.total_derivative(c, i) + l).collect())
    }

    /// `(∇_i P)^a_b = D_i P^a_b + (Λ_i)^a_c P^c_b`.
    pub fn nabla_matrix(&self, ctx: &JetContext, i: usize, m: &ExprMatrix) -> Result<ExprMatrix, MuError> {
        let lm = self.lambdas[i].mul(m)?;
        Ok(m.map(|e| ctx.total_derivative(e, i)).add(&lm)?)
    }

    /// `∇_1^{j_1} ... ∇_p^{j_p} v`, applying `∇_p` first.
    pub fn nabla_multi(&self, ctx: &JetContext, index: &MultiIndex, v: &[Expr]) -> Result<Vec<Expr>, MuError> {
        if !self.is_valid() {
            return Err(MuError::Incompatible);
        }
        let mut out: Vec<Expr> = v.to_vec();
        for i in index.directions().into_iter().rev() {
            out = self.nabla(ctx, i, &out)?.iter().map(canonicalize).collect();
        }
        Ok(out)
    }

    /// Verdicts on `[∇_i, ∇_j] v` for every pair.
    pub fn zero_curvature_check(
        &self,
        ctx: &JetContext,
        v: &[Expr],
        cfg: &OracleConfig,
    ) -> Result<ZeroVerdict, MuError> {
        let mut verdicts = Vec::new();
        for (i, j) in pairs(ctx.p()) {
            let a = self.nabla(ctx, i, &self.nabla(ctx, j, v)?)?;
            let b = self.nabla(ctx, j, &self.nabla(ctx, i, v)?)?;
            for (x, y) in a.into_iter().zip(b) {
                verdicts.push(is_zero(&(x - y), cfg));
            }
        }
        Ok(ZeroVerdict::all(verdicts))
    }
}

fn pairs(p: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..p).flat_map(move |i| (i + 1..p).map(move |j| (i, j)))
}

fn check_compatibility_of(ctx: &JetContext, lambdas: &[ExprMatrix], cfg: &OracleConfig) -> Compatibility {
    let mut out = Vec::new();
    for (i, j) in pairs(lambdas.len()) {
        let dl = lambdas[j].map(|e| ctx.total_derivative(e, i));
        let dr = lambdas[i].map(|e| ctx.total_derivative(e, j));
        let comm = lambdas[i].commutator(&lambdas[j]).expect("square");
        let residual = dl.sub(&dr).and_then(|m| m.add(&comm)).expect("same shape").canonical();
        let verdict = ZeroVerdict::all(residual.entries().map(|e| is_zero(e, cfg)));
        out.push(PairResidual { i, j, residual, verdict });
    }
    let verdict = ZeroVerdict::all(out.iter().map(|p| p.verdict.clone()));
    Compatibility { pairs: out, verdict }
}

/// `D_i Λ_j - D_j Λ_i + [Λ_i, Λ_j]` for every `i < j`.
pub fn check_compatibility(ctx: &JetContext, mu: &MuForm, cfg: &OracleConfig) -> Compatibility {
    check_compatibility_of(ctx, &mu.lambdas, cfg)
}

/// A gauge function `γ`, scalar or matrix valued.
#[derive(Clone, Debug, PartialEq)]
pub enum Gauge {
    Scalar(Expr),
    Matrix(ExprMatrix),
}

/// `Λ_i = γ^{-1} D_i γ`.
pub fn lambda_from_gamma(ctx: &JetContext, gamma: &Gauge, cfg: &OracleConfig) -> Result<MuForm, MuError> {
    match gamma {
        Gauge::Scalar(g) => {
            if is_zero(g, cfg).is_zero() {
                return Err(MuError::SingularGauge);
            }
            let ls = (0..ctx.p()).map(|i| canonicalize(&(ctx.total_derivative(g, i) / g.clone()))).collect();
            MuForm::scalar(ctx, ls, cfg)
        }
        Gauge::Matrix(m) => {
            if m.rows() != ctx.q() || !m.is_square() {
                return Err(MuError::NotSquare { index: 0, q: ctx.q() });
            }
            let det = m.det()?;
            if is_zero(&det, cfg).is_zero() {
                return Err(MuError::SingularGauge);
            }
            let inv = m.adjugate()?.scale(&det.recip());
            let ls = (0..ctx.p())
                .map(|i| inv.mul(&m.map(|e| ctx.total_derivative(e, i))).map(|x| x.canonical()))
                .collect::<Result<Vec<_>, _>>()?;
            MuForm::new(ctx, ls, cfg)
        }
    }
}

/// Outcome of the search for a scalar gauge.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaSearch {
    Found(Expr),
    NotFound(String),
}

/// Looks for `γ = exp(Φ)` with `λ_i = D_i Φ`, assuming each `λ_i` is affine
/// in the first derivatives: `λ_i = c_i(x,u) + d_a(x,u) u^a_i`.
pub fn gamma_from_lambda(ctx: &JetContext, mu: &MuForm, cfg: &OracleConfig) -> Result<GammaSearch, MuError> {
    let lambdas = match mu.scalar_parts() {
        Some(l) => l,
        None if mu.q() == 1 => mu.lambdas.iter().map(|m| m.get(0, 0).clone()).collect(),
        None => return Err(MuError::NotScalar("Λ_i is not a multiple of the identity".into())),
    };
    let (p, q) = (ctx.p(), ctx.q());
    let first: Vec<Vec<Symbol>> =
        (0..q).map(|a| (0..p).map(|i| ctx.du(a, i).as_symbol().expect("jet symbol").clone()).collect()).collect();
    let is_first = |s: &Symbol| matches!(s.kind(), SymbolKind::Jet { index, .. } if index.order() >= 1);
    let zero = |e: &Expr| is_zero(e, cfg).is_zero();

    // d_a from λ_0, then every λ_i must have the same coefficients
    let mut d: Vec<Expr> = Vec::with_capacity(q);
    for (a, fa) in first.iter().enumerate() {
        let da = canonicalize(&partial_derivative(&lambdas[0], &fa[0]));
        if da.symbols().iter().any(is_first) {
            return Ok(GammaSearch::NotFound(format!("λ_1 is not affine in the derivatives of {}", ctx.dependent_names()[a])));
        }
        d.push(da);
    }
    let mut c: Vec<Expr> = Vec::with_capacity(p);
    for (i, li) in lambdas.iter().enumerate() {
        let mut rest = li.clone();
        for (a, da) in d.iter().enumerate() {
            rest = rest - da.clone() * ctx.du(a, i);
        }
        let rest = canonicalize(&rest);
        if rest.symbols().iter().any(is_first) {
            let affine = li.symbols().iter().filter(|s| is_first(s)).all(|s| {
                !canonicalize(&partial_derivative(li, s)).symbols().iter().any(is_first)
            });
            return if affine {
                Err(MuError::Inconsistent(format!("λ_{} has first-derivative terms not of the form d_a u^a_i", i + 1)))
            } else {
                Ok(GammaSearch::NotFound(format!("λ_{} is not affine in first derivatives", i + 1)))
            };
        }
        c.push(rest);
    }

    // cross-derivative conditions
    let xs: Vec<Symbol> = (0..p).map(|i| ctx.x_symbol(i)).collect();
    let us: Vec<Symbol> = (0..q).map(|a| ctx.u(a).as_symbol().expect("jet symbol").clone()).collect();
    for i in 0..p {
        for j in i + 1..p {
            if !zero(&(partial_derivative(&c[i], &xs[j]) - partial_derivative(&c[j], &xs[i]))) {
                return Err(MuError::Inconsistent(format!("∂c_{}/∂x^{} differs from ∂c_{}/∂x^{}", i + 1, j + 1, j + 1, i + 1)));
            }
        }
        for a in 0..q {
            if !zero(&(partial_derivative(&c[i], &us[a]) - partial_derivative(&d[a], &xs[i]))) {
                return Err(MuError::Inconsistent(format!("∂c_{}/∂{} differs from ∂d/∂x^{}", i + 1, us[a], i + 1)));
            }
        }
    }
    for a in 0..q {
        for b in a + 1..q {
            if !zero(&(partial_derivative(&d[a], &us[b]) - partial_derivative(&d[b], &us[a]))) {
                return Err(MuError::Inconsistent(format!("d_{} and d_{} are not a gradient", a + 1, b + 1)));
            }
        }
    }

    // Φ by successive term-wise antidifferentiation
    let mut phi = Expr::zero();
    let targets = xs.iter().zip(&c).chain(us.iter().zip(&d));
    for (var, target) in targets {
        let rest = canonicalize(&(target.clone() - partial_derivative(&phi, var)));
        if rest.is_zero_literal() {
            continue;
        }
        match antiderivative(&rest, var) {
            Some(f) => phi = phi + f,
            None => return Ok(GammaSearch::NotFound(format!("no closed-form antiderivative of {rest} in {var}"))),
        }
    }
    let gamma = canonicalize(&Expr::exp(&phi));
    for (i, l) in lambdas.iter().enumerate() {
        if !zero(&(ctx.total_derivative(&gamma, i) / gamma.clone() - l.clone())) {
            return Ok(GammaSearch::NotFound(format!("candidate {gamma} fails verification")));
        }
    }
    Ok(GammaSearch::Found(gamma))
}

/// Term-wise antiderivative for sums of `k·s^n`, `k·exp(a s + b)`,
/// `k·sin(a s + b)` and `k·cos(a s + b)` with `k`, `a`, `b` free of `s`.
pub fn antiderivative(e: &Expr, s: &Symbol) -> Option<Expr> {
    use crate::expr::{Func, Node};
    let terms: Vec<Expr> = match e.node() {
        Node::Add(items) => items.clone(),
        _ => vec![e.clone()],
    };
    let linear_slope = |arg: &Expr| -> Option<Expr> {
        let a = canonicalize(&partial_derivative(arg, s));
        (!a.contains(s) && !a.is_zero_literal()).then_some(a)
    };
    let mut out = Vec::new();
    for t in terms {
        let factors: Vec<Expr> = match t.node() {
            Node::Mul(items) => items.clone(),
            _ => vec![t.clone()],
        };
        let (dep, free): (Vec<Expr>, Vec<Expr>) = factors.into_iter().partition(|f| f.contains(s));
        let k = Expr::mul_all(free);
        let piece = match dep.as_slice() {
            [] => k * Expr::sym(s.clone()),
            [f] => {
                let g = match f.node() {
                    Node::Sym(_) => Expr::pow(f, crate::expr::q(2, 1)) / Expr::int(2),
                    Node::Pow(b, n) if b.as_symbol() == Some(s) => {
                        if *n == crate::expr::q(-1, 1) {
                            Expr::log(b)
                        } else {
                            let m = n + crate::expr::Q::from_integer(1.into());
                            Expr::pow(b, m.clone()) / Expr::num(m)
                        }
                    }
                    Node::Func(Func::Exp, a) => f.clone() / linear_slope(a)?,
                    Node::Func(Func::Sin, a) => Expr::cos(a).neg() / linear_slope(a)?,
                    Node::Func(Func::Cos, a) => Expr::sin(a) / linear_slope(a)?,
                    _ => return None,
                };
                k * g
            }
            _ => return None,
        };
        out.push(piece);
    }
    Some(canonicalize(&Expr::add_all(out)))
}

/// Scalars `λ_i` with `Λ_i φ = λ_i φ` for all `i`, if they exist.
pub fn common_eigenvector_check(
    ctx: &JetContext,
    mu: &MuForm,
    phi: &[Expr],
    cfg: &OracleConfig,
) -> Result<Option<Vec<Expr>>, MuError> {
    if phi.len() != mu.q() {
        return Err(MuError::Length { expected: mu.q(), found: phi.len() });
    }
    let Some(pivot) = phi.iter().position(|c| !is_zero(c, cfg).is_zero()) else {
        return Ok(None);
    };
    let mut out = Vec::with_capacity(ctx.p());
    for m in &mu.lambdas {
        let w = m.mul_vec(phi)?;
        let l = canonicalize(&(w[pivot].clone() / phi[pivot].clone()));
        let ok = w.iter().zip(phi).all(|(wa, pa)| is_zero(&(wa.clone() - l.clone() * pa.clone()), cfg).is_zero());
        if !ok {
            return Ok(None);
        }
        out.push(l);
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn ex1() -> (JetContext, MuForm) {
        let ctx = JetContext::new(&["x", "y"], &["u", "v"]).unwrap();
        let m = |s: &str| {
            let e = parse_expr(s, &ctx).unwrap();
            ExprMatrix::from_rows(vec![vec![Expr::zero(), Expr::zero()], vec![e, Expr::zero()]]).unwrap()
        };
        let mu = MuForm::new(&ctx, vec![m("u_x"), m("u_y")], &OracleConfig::default()).unwrap();
        (ctx, mu)
    }

    #[test]
    fn ex1_is_compatible() {
        let (ctx, mu) = ex1();
        assert!(mu.compatibility().verdict.is_zero());
        let v = vec![ctx.u(0), Expr::one()];
        let nx = mu.nabla(&ctx, 0, &v).unwrap();
        assert_eq!(canonicalize(&nx[0]), ctx.du(0, 0));
        assert_eq!(canonicalize(&nx[1]), canonicalize(&(ctx.u(0) * ctx.du(0, 0))));
        assert!(mu.zero_curvature_check(&ctx, &v, &OracleConfig::default()).unwrap().is_zero());
        assert_eq!(common_eigenvector_check(&ctx, &mu, &v, &OracleConfig::default()), Ok(None));
    }

    #[test]
    fn perturbed_form_fails_with_residual() {
        let ctx = JetContext::new(&["x", "y"], &["u", "v"]).unwrap();
        let z = ExprMatrix::zeros(2, 2);
        let l1 = ExprMatrix::from_rows(vec![vec![Expr::zero(), Expr::zero()], vec![ctx.u(0), Expr::zero()]]).unwrap();
        let cfg = OracleConfig::default();
        let mu = MuForm::new(&ctx, vec![l1, z], &cfg).unwrap();
        let c = mu.compatibility();
        assert!(c.verdict.is_nonzero());
        assert_eq!(c.pairs[0].residual.get(1, 0), &ctx.du(0, 1).neg());
        assert!(!mu.is_valid());
        assert_eq!(mu.nabla_multi(&ctx, &MultiIndex::unit(2, 0), &[Expr::one(), Expr::zero()]), Err(MuError::Incompatible));
        assert!(mu.zero_curvature_check(&ctx, &[Expr::one(), Expr::zero()], &cfg).unwrap().is_nonzero());
    }

    #[test]
    fn second_order_entries_rejected() {
        let ctx = JetContext::new(&["x"], &["u"]).unwrap();
        let m = ExprMatrix::scalar(1, &parse_expr("u_xx", &ctx).unwrap());
        assert!(matches!(
            MuForm::new(&ctx, vec![m], &OracleConfig::default()),
            Err(MuError::OrderTooHigh { order: 2, .. })
        ));
    }

    #[test]
    fn gauges_of_ex6_and_ex7() {
        let cfg = OracleConfig::default();
        let polar = JetContext::new(&["r", "theta"], &["u"]).unwrap().with_parameters(&["eps"]).unwrap();
        let g = parse_expr("exp(eps*theta)", &polar).unwrap();
        let mu = lambda_from_gamma(&polar, &Gauge::Scalar(g.clone()), &cfg).unwrap();
        assert_eq!(mu.lambda(0).get(0, 0), &Expr::zero());
        assert_eq!(mu.lambda(1).get(0, 0), &Expr::parameter("eps"));
        assert_eq!(gamma_from_lambda(&polar, &mu, &cfg), Ok(GammaSearch::Found(g)));

        let xy = JetContext::new(&["x", "y"], &["u"]).unwrap();
        let g = parse_expr("exp(-u)", &xy).unwrap();
        let mu = lambda_from_gamma(&xy, &Gauge::Scalar(g.clone()), &cfg).unwrap();
        assert_eq!(mu.lambda(0).get(0, 0), &xy.du(0, 0).neg());
        assert_eq!(gamma_from_lambda(&xy, &mu, &cfg), Ok(GammaSearch::Found(g)));
        assert_eq!(gamma_from_lambda(&xy, &MuForm::zero(&xy), &cfg), Ok(GammaSearch::Found(Expr::one())));
    }

    #[test]
    fn inconsistent_and_nonaffine_lambda() {
        let cfg = OracleConfig::default();
        let xy = JetContext::new(&["x", "y"], &["u"]).unwrap();
        let s = |t: &str| parse_expr(t, &xy).unwrap();
        // λ = (y, 0) is compatible only if ∂_y y = ∂_x 0, which fails
        let mu = MuForm::scalar(&xy, vec![s("y"), s("0")], &cfg).unwrap();
        assert!(mu.compatibility().verdict.is_nonzero());
        assert!(matches!(gamma_from_lambda(&xy, &mu, &cfg), Err(MuError::Inconsistent(_))));
        let mu = MuForm::scalar(&xy, vec![s("u_x^2"), s("0")], &cfg).unwrap();
        assert!(matches!(gamma_from_lambda(&xy, &mu, &cfg), Ok(GammaSearch::NotFound(_))));
    }

    #[test]
    fn matrix_gauge_gives_compatible_form() {
        let cfg = OracleConfig::default();
        let ctx = JetContext::new(&["x", "y"], &["u", "v"]).unwrap();
        let s = |t: &str| parse_expr(t, &ctx).unwrap();
        let g = ExprMatrix::from_rows(vec![vec![s("1"), s("0")], vec![s("u*x"), s("exp(v)")]]).unwrap();
        let mu = lambda_from_gamma(&ctx, &Gauge::Matrix(g), &cfg).unwrap();
        assert!(mu.compatibility().verdict.is_zero());
        assert!(!mu.is_zero_form());
    }

    #[test]
    fn eigenvector_of_ex5() {
        let cfg = OracleConfig::default();
        let ctx = JetContext::new(&["t"], &["r", "theta"]).unwrap().with_parameters(&["eps"]).unwrap();
        let l = ExprMatrix::from_rows(vec![
            vec![Expr::zero(), Expr::zero()],
            vec![Expr::zero(), parse_expr("eps*cos(theta)", &ctx).unwrap()],
        ])
        .unwrap();
        let mu = MuForm::new(&ctx, vec![l], &cfg).unwrap();
        let got = common_eigenvector_check(&ctx, &mu, &[Expr::zero(), Expr::one()], &cfg).unwrap();
        assert_eq!(got, Some(vec![parse_expr("eps*cos(theta)", &ctx).unwrap()]));
    }

    #[test]
    fn antiderivatives() {
        let ctx = JetContext::new(&["x"], &["u"]).unwrap();
        let x = ctx.x_symbol(0);
        let s = |t: &str| parse_expr(t, &ctx).unwrap();
        for e in ["3*x^2 + 1/x", "exp(2*x + u)", "u*sin(x)", "cos(3*x)"] {
            let f = antiderivative(&s(e), &x).unwrap();
            assert!(is_zero(&(partial_derivative(&f, &x) - s(e)), &OracleConfig::default()).is_zero(), "{e}");
        }
        assert_eq!(antiderivative(&s("exp(x^2)"), &x), None);
    }
}
