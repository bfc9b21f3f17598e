use std::collections::BTreeMap;

use super::*;
use crate::expr::parse_expr;
use crate::mu::{lambda_from_gamma, Gauge};
use crate::oracle::ZeroKind;

fn cfg() -> OracleConfig {
    OracleConfig::default()
}

struct Case {
    ctx: JetContext,
}

impl Case {
    fn new(ctx: JetContext) -> Self {
        Case { ctx }
    }

    fn e(&self, s: &str) -> Expr {
        parse_expr(s, &self.ctx).unwrap()
    }

    fn m(&self, rows: &[&[&str]]) -> ExprMatrix {
        ExprMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| self.e(s)).collect()).collect()).unwrap()
    }

    fn mu(&self, ms: Vec<ExprMatrix>) -> MuForm {
        MuForm::new(&self.ctx, ms, &cfg()).unwrap()
    }

    fn field(&self, xi: &[&str], phi: &[&str]) -> VectorField {
        VectorField::new(&self.ctx, xi.iter().map(|s| self.e(s)).collect(), phi.iter().map(|s| self.e(s)).collect())
            .unwrap()
    }

    fn l(&self, s: &str) -> Lagrangian {
        Lagrangian::new(self.e(s))
    }

    fn zero(&self, e: &Expr) -> bool {
        is_zero(e, &cfg()).is_zero()
    }
}

fn ex1() -> (Case, MuForm, VectorField, Lagrangian) {
    let c = Case::new(JetContext::new(&["x", "y"], &["u", "v"]).unwrap());
    let mu = c.mu(vec![c.m(&[&["0", "0"], &["u_x", "0"]]), c.m(&[&["0", "0"], &["u_y", "0"]])]);
    let x = c.field(&["0", "0"], &["u", "1"]);
    let l = c.l("(1/2)*(u_x^2 + u_y^2) - (u_x*v_x + u_y*v_y)/u + u^2*exp(-2*v)");
    (c, mu, x, l)
}

#[test]
fn euler_lagrange_of_free_particle() {
    let c = Case::new(JetContext::new(&["t"], &["q"]).unwrap());
    assert_eq!(euler_lagrange(&c.ctx, &c.l("(1/2)*qd^2")), vec![c.e("-qdd")]);
}

#[test]
fn ex1_residuals_and_mvector() {
    let (c, mu, x, l) = ex1();
    let r = mu_symmetry_residual(&c.ctx, &x, &mu, &l).unwrap();
    assert_eq!(r, Expr::zero());
    let std = mu_symmetry_residual(&c.ctx, &x, &MuForm::zero(&c.ctx), &l).unwrap();
    assert_eq!(std, canonicalize(&c.e("u_x^2 + u_y^2")));

    let p = conserved_mvector(&c.ctx, &x, &mu, &l).unwrap();
    let want = c.m(&[&["u*u_x - v_x", "-u_x"], &["u_x - v_x/u", "-u_x/u"]]).canonical();
    for r in 0..2 {
        for k in 0..2 {
            assert!(c.zero(&(p.component(0).get(r, k).clone() - want.get(r, k).clone())), "({r},{k})");
        }
    }
    assert!(verify_noether_identity(&c.ctx, &x, &mu, &l, &cfg()).unwrap().verdict.is_zero());
}

#[test]
fn ex1_on_shell() {
    let (c, mu, x, l) = ex1();
    let p = conserved_mvector(&c.ctx, &x, &mu, &l).unwrap();
    let shell = el_shell(&c.ctx, &l, &cfg()).unwrap();
    let rep = mu_divergence(&c.ctx, &p, &mu, Some(&shell), &cfg()).unwrap();
    assert_eq!(rep.classification, Classification::MuConserved);
    assert!(c.zero(&(rep.divergence.clone() - c.e("u_x^2 + u_y^2"))), "{}", rep.divergence);
    assert!(c.zero(&(rep.trace_lambda.clone() + c.e("u_x^2 + u_y^2"))));
    assert!(rep.on_shell);
}

#[test]
fn ex2_mu_euler_lagrange_and_on_shell_law() {
    let (c, mu, x, l) = ex1();
    let el = mu_euler_lagrange(&c.ctx, &l, &mu).unwrap();
    let pi = momenta(&c.ctx, &l);
    let lu = partial_derivative(l.density(), c.ctx.u(0).as_symbol().unwrap());
    let lv = partial_derivative(l.density(), c.ctx.u(1).as_symbol().unwrap());
    let d = |e: &Expr, i| c.ctx.total_derivative(e, i);
    // D_x L_{u_x} + D_y L_{u_y} = L_u + u_x L_{v_x} + u_y L_{v_y}
    let first = lu + c.e("u_x") * pi[0][1].clone() + c.e("u_y") * pi[1][1].clone() - d(&pi[0][0], 0) - d(&pi[1][0], 1);
    let second = lv - d(&pi[0][1], 0) - d(&pi[1][1], 1);
    assert!(c.zero(&(el[0].clone() - first)));
    assert!(c.zero(&(el[1].clone() - second)));

    let t9 = theorem9_conservation(&c.ctx, &x, &mu, &l, &cfg()).unwrap();
    assert!(t9.identity.verdict.is_zero());
    assert!(t9.on_shell.is_zero(), "{}", t9.divergence);
}

#[test]
fn ex3_divergence_symmetry() {
    let c = Case::new(JetContext::new(&["x", "y"], &["u", "v"]).unwrap());
    let n = c.m(&[&["0", "0"], &["1", "0"]]);
    let mu = c.mu(vec![n.clone(), n]);
    let x = c.field(&["x", "0"], &["0", "1"]);
    let l = c.l("(1/x)*(u^2 + x^2*u_x^2 + u_y^2 + (x*v*u_x + v_y)^2)");
    assert_eq!(mu_symmetry_residual(&c.ctx, &x, &mu, &l).unwrap(), Expr::zero());
    let ds = divergence_symmetry_check(&c.ctx, &x, &mu, &l, None, &cfg()).unwrap();
    assert!(ds.verdict.is_zero());
    assert_eq!(ds.conservation.classification, Classification::MuConserved);
    assert!(c.zero(&(ds.conservation.divergence.clone() - c.e("2*(x*v*u_x^2 + u_x*v_y)"))));
    assert!(verify_noether_identity(&c.ctx, &x, &mu, &l, &cfg()).unwrap().verdict.is_zero());

    let sol: BTreeMap<usize, Expr> = [(0, c.e("log(x)*exp(y)")), (1, c.e("exp(-exp(y))"))].into();
    for (r, v) in verify_solution(&c.ctx, &euler_lagrange(&c.ctx, &l), &sol, &cfg()).unwrap() {
        assert!(v.is_zero(), "{r}");
    }
}

#[test]
fn ex4_conditional_invariant() {
    let c = Case::new(JetContext::new(&["t"], &["q1", "q2"]).unwrap());
    let mu = MuForm::scalar(&c.ctx, vec![c.e("q1")], &cfg()).unwrap();
    let x = c.field(&["0"], &["q1", "1"]);
    let l = c.l("(1/2)*(q1d/q1 - q1)^2 + (1/2)*(q2d - q1)^2");
    let p = conserved_mvector(&c.ctx, &x, &mu, &l).unwrap();
    assert!(c.zero(&(p.traces()[0].clone() - c.e("q1d/q1 + q2d - 2*q1"))));
    let shell = el_shell(&c.ctx, &l, &cfg()).unwrap();
    let rep = mu_divergence(&c.ctx, &p, &mu, Some(&shell), &cfg()).unwrap();
    assert_eq!(rep.classification, Classification::MuConserved);
    let cond = conditional_invariant_check(&c.ctx, &x, &mu, &l, &[ExprMatrix::zeros(2, 2)], &cfg()).unwrap();
    assert!(cond.invariance.is_zero() && cond.decay.is_zero());
    assert_eq!(cond.factor, Some(c.e("-q1")));
    assert!(c.zero(&(cond.divergence.clone() + c.e("q1*(q1d/q1 + q2d - 2*q1)"))));
    assert!(verify_noether_identity(&c.ctx, &x, &mu, &l, &cfg()).unwrap().verdict.is_zero());
}

#[test]
fn ex5_with_arbitrary_potential() {
    let ctx = JetContext::new(&["t"], &["r", "theta"]).unwrap().with_parameters(&["eps"]).unwrap();
    let c = Case::new(ctx.with_functions(&["V"]).unwrap());
    let mu = c.mu(vec![c.m(&[&["0", "0"], &["0", "eps*cos(theta)"]])]);
    let x = c.field(&["0"], &["0", "1"]);
    let l = c.l("(1/2)*(rd^2 + r^2*(thetad - eps*sin(theta))^2) - V(r)");
    assert_eq!(mu_symmetry_residual(&c.ctx, &x, &mu, &l).unwrap(), Expr::zero());
    let zero = ExprMatrix::zeros(2, 2);
    let cond = conditional_invariant_check(&c.ctx, &x, &mu, &l, &[zero], &cfg()).unwrap();
    assert!(cond.decay.is_zero());
    assert_eq!(cond.factor, Some(c.e("-eps*cos(theta)")));
    assert!(c.zero(&(cond.current[0].clone() - c.e("r^2*(thetad - eps*sin(theta))"))));
}

#[test]
fn ex6_and_ex7_reduce_to_standard_laws() {
    let c = Case::new(JetContext::new(&["r", "theta"], &["u"]).unwrap().with_parameters(&["eps"]).unwrap());
    let mu = MuForm::scalar(&c.ctx, vec![c.e("0"), c.e("eps")], &cfg()).unwrap();
    let x = c.field(&["0", "1"], &["0"]);
    let l = c.l("(1/2)*r^2*exp(-eps*theta)*u_r^2 + (1/2)*exp(eps*theta)*u_theta^2");
    assert_eq!(mu_symmetry_residual(&c.ctx, &x, &mu, &l).unwrap(), Expr::zero());
    let ds = divergence_symmetry_check(&c.ctx, &x, &mu, &l, None, &cfg()).unwrap();
    let tr = ds.current.traces();
    assert!(c.zero(&(tr[0].clone() - c.e("-r^2*exp(-eps*theta)*u_r*u_theta"))));
    assert!(c.zero(&(tr[1].clone() - c.e("(1/2)*r^2*exp(-eps*theta)*u_r^2 - (1/2)*exp(eps*theta)*u_theta^2"))));
    assert!(c.zero(&(ds.conservation.divergence.clone() + c.e("eps") * tr[1].clone())));
    let red = standard_reduction(&c.ctx, &x, &mu, &l, None, &cfg()).unwrap();
    assert_eq!(red.gamma, c.e("exp(eps*theta)"));
    assert!(red.verdict.is_zero());
    assert!(c.zero(&(red.current[0].clone() - c.e("-r^2*u_r*u_theta"))));
    assert!(c.zero(&(red.current[1].clone() - c.e("(1/2)*r^2*u_r^2 - (1/2)*exp(2*eps*theta)*u_theta^2"))));
    let el = el_form_check(&c.ctx, &l, &[c.e("r^2*u_rr + 2*r*u_r + exp(2*eps*theta)*(u_thetatheta + eps*u_theta)")], &cfg())
        .unwrap();
    assert!(el.verdict.is_zero());

    let c = Case::new(JetContext::new(&["x", "y"], &["u"]).unwrap());
    let mu = MuForm::scalar(&c.ctx, vec![c.e("-u_x"), c.e("-u_y")], &cfg()).unwrap();
    let x = c.field(&["0", "0"], &["1"]);
    let l = c.l("(1/2)*exp(2*u)*(u_x^2 + u_y^2) + (1/3)*exp(3*u)*u_y^3");
    assert_eq!(mu_symmetry_residual(&c.ctx, &x, &mu, &l).unwrap(), Expr::zero());
    let red = standard_reduction(&c.ctx, &x, &mu, &l, None, &cfg()).unwrap();
    assert_eq!(red.gamma, c.e("exp(-u)"));
    assert!(red.verdict.is_zero());
    let printed = c.e("u_xx + u_yy + u_x^2 + u_y^2 + 2*exp(u)*u_y*(u_y^2 + u_yy)");
    assert!(el_form_check(&c.ctx, &l, &[printed], &cfg()).unwrap().verdict.is_zero());
    let (a, b) = (c.e("u_x*exp(u)"), c.e("u_y*exp(u)"));
    let d = |e: &Expr, i| c.ctx.total_derivative(e, i);
    let form = d(&a, 0) + d(&b, 1) + Expr::int(2) * b.clone() * d(&b, 1);
    assert!(el_form_check(&c.ctx, &l, &[form], &cfg()).unwrap().verdict.is_zero());
    assert!(!el_form_check(&c.ctx, &l, &[c.e("u_xx - u_yy")], &cfg()).unwrap().verdict.is_zero());
}

#[test]
fn ex8_solution_and_quantity() {
    let c = Case::new(JetContext::new(&["t"], &["q1", "q2"]).unwrap().with_parameters(&["c1", "c2"]).unwrap());
    let mu = c.mu(vec![c.m(&[&["0", "0"], &["0", "1"]])]);
    let x = c.field(&["0"], &["0", "1"]);
    let l = c.l("(1/2)*q1d^2 + (1/2)*q1^2*(q2d - q2)^2");
    let p = conserved_mvector(&c.ctx, &x, &mu, &l).unwrap();
    assert!(c.zero(&(p.traces()[0].clone() - c.e("q1^2*(q2d - q2)"))));
    let shell = el_shell(&c.ctx, &l, &cfg()).unwrap();
    let rep = mu_divergence(&c.ctx, &p, &mu, Some(&shell), &cfg()).unwrap();
    assert_eq!(rep.classification, Classification::MuConserved);
    assert!(c.zero(&(rep.divergence.clone() + p.traces()[0].clone())));
    let sol: BTreeMap<usize, Expr> = [(0, c.e("sqrt(2*c1)*exp(-t/2)")), (1, c.e("c2*exp(t) - 1/2"))].into();
    let checks = verify_solution(&c.ctx, &euler_lagrange(&c.ctx, &l), &sol, &cfg()).unwrap();
    assert!(checks.iter().all(|(_, v)| v.is_zero()));
    let along = evaluate_along(&c.ctx, &p.traces()[0], &sol).unwrap();
    assert!(c.zero(&(along - c.e("c1*exp(-t)"))));
    assert_eq!(
        evaluate_along(&c.ctx, &c.e("q1"), &BTreeMap::new()),
        Err(SolutionError::Unbound("q1".into()))
    );
}

#[test]
fn ex9() {
    let c = Case::new(JetContext::new(&["x", "y"], &["u", "v"]).unwrap().with_parameters(&["c1", "c2"]).unwrap());
    let mu = c.mu(vec![ExprMatrix::identity(2), ExprMatrix::identity(2)]);
    let x = c.field(&["0", "0"], &["1", "0"]);
    let l = c.l("(1/2)*v^2*(u_x - u)^2 + (1/2)*(u_y - u)^2 + v_x*v_y");
    assert_eq!(mu_symmetry_residual(&c.ctx, &x, &mu, &l).unwrap(), Expr::zero());
    let p = conserved_mvector(&c.ctx, &x, &mu, &l).unwrap();
    let tr = p.traces();
    assert!(c.zero(&(tr[0].clone() - c.e("v^2*(u_x - u)"))));
    let shell = el_shell(&c.ctx, &l, &cfg()).unwrap();
    let rep = mu_divergence(&c.ctx, &p, &mu, Some(&shell), &cfg()).unwrap();
    assert!(c.zero(&(rep.divergence.clone() + tr[0].clone() + tr[1].clone())));
    let sol: BTreeMap<usize, Expr> = [(0, c.e("exp(x)*(c1*exp(y) + c2*exp(-y))")), (1, c.e("x + y + 1"))].into();
    let checks = verify_solution(&c.ctx, &euler_lagrange(&c.ctx, &l), &sol, &cfg()).unwrap();
    assert!(checks.iter().all(|(_, v)| v.is_zero()));
    let sol: BTreeMap<usize, Expr> = [(0, c.e("-exp(y)")), (1, c.e("exp(-x/2)*exp(-exp(2*y)/2)"))].into();
    let checks = verify_solution(&c.ctx, &euler_lagrange(&c.ctx, &l), &sol, &cfg()).unwrap();
    assert!(checks.iter().all(|(_, v)| v.is_zero()));
    assert!(verify_noether_identity(&c.ctx, &x, &mu, &l, &cfg()).unwrap().verdict.is_zero());
}

#[test]
fn second_order_identity() {
    let c = Case::new(JetContext::new(&["x", "y"], &["u"]).unwrap());
    let mu = lambda_from_gamma(&c.ctx, &Gauge::Scalar(c.e("exp(x*u)")), &cfg()).unwrap();
    let x = c.field(&["0", "0"], &["u + x"]);
    let l = c.l("u_xx^2/2 + u_xy*u_x + x*u_yy*u + u_y^2");
    assert_eq!(l.order(), 2);
    assert_eq!(verify_noether_identity(&c.ctx, &x, &mu, &l, &cfg()).unwrap().verdict, ZeroVerdict::Zero(ZeroKind::Symbolic));
    let xi = c.field(&["1", "0"], &["0"]);
    assert!(matches!(conserved_mvector(&c.ctx, &xi, &mu, &l), Err(NoetherError::UnsupportedOrder { order: 2, .. })));
    assert!(matches!(mu_euler_lagrange(&c.ctx, &l, &mu), Err(NoetherError::UnsupportedOrder { .. })));
}

#[test]
fn dual_law_for_free_field() {
    let c = Case::new(JetContext::new(&["x", "y"], &["u"]).unwrap());
    let mu = MuForm::scalar(&c.ctx, vec![c.e("x"), c.e("y^2")], &cfg()).unwrap();
    let x = c.field(&["0", "0"], &["1"]);
    let l = c.l("(1/2)*(u_x^2 + u_y^2)");
    let rep = dual_mu_conservation(&c.ctx, &x, &mu, &l, &cfg()).unwrap();
    assert!(rep.standard_verdict.is_zero());
    assert!(rep.identity.verdict.is_zero());
    assert!(rep.on_shell.is_zero(), "{}", rep.residual);
}
