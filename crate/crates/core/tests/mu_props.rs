mod common;

use common::*;
use musym::expr::{canonicalize, Expr};
use musym::jet::{JetContext, MultiIndex};
use musym::matrix::ExprMatrix;
use musym::mu::{check_compatibility, gamma_from_lambda, lambda_from_gamma, GammaSearch, Gauge, MuForm};
use musym::prolong::{mu_difference, mu_prolong, standard_prolong};
use proptest::prelude::*;

fn random_form(seed: u64, ctx: &JetContext) -> MuForm {
    let mut r = rng(seed);
    let atoms = jet1_atoms(ctx);
    let q = ctx.q();
    let lambdas = (0..ctx.p())
        .map(|_| ExprMatrix::from_rows((0..q).map(|_| (0..q).map(|_| poly(&mut r, &atoms, 2, 1)).collect()).collect()).unwrap())
        .collect();
    MuForm::new(ctx, lambdas, &cfg()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gauges_give_compatible_forms(seed in any::<u64>(), q in 1usize..=2) {
        let ctx = plane(q);
        let mu = gauge_form(&mut rng(seed), &ctx);
        prop_assert!(mu.is_valid());
        prop_assert!(check_compatibility(&ctx, &mu, &cfg()).verdict.is_zero());
    }

    #[test]
    fn gamma_round_trip_preserves_lambda(seed in any::<u64>()) {
        let ctx = plane(1);
        let g = scalar_gamma(&mut rng(seed), &ctx);
        let mu = lambda_from_gamma(&ctx, &Gauge::Scalar(g), &cfg()).unwrap();
        let GammaSearch::Found(back) = gamma_from_lambda(&ctx, &mu, &cfg()).unwrap() else {
            return Err(TestCaseError::fail("no gauge found"));
        };
        let again = lambda_from_gamma(&ctx, &Gauge::Scalar(back), &cfg()).unwrap();
        for i in 0..ctx.p() {
            prop_assert!(zero(&(again.lambda(i).get(0, 0).clone() - mu.lambda(i).get(0, 0).clone())));
        }
    }

    #[test]
    fn zero_curvature_agrees_with_compatibility(seed in any::<u64>(), q in 1usize..=2, gauge in any::<bool>()) {
        let ctx = plane(q);
        let mu = if gauge { gauge_form(&mut rng(seed), &ctx) } else { random_form(seed, &ctx) };
        let compatible = check_compatibility(&ctx, &mu, &cfg()).verdict.is_zero();
        // a generic test vector: [∇_x, ∇_y] v is the curvature applied to v
        let v: Vec<Expr> = (0..q).map(|a| Expr::exp(&(ctx.u(a) * Expr::rational(1, 3))) + ctx.x(0) * ctx.x(1).powi(a as i64 + 2)).collect();
        let flat = mu.zero_curvature_check(&ctx, &v, &cfg()).unwrap().is_zero();
        prop_assert_eq!(compatible, flat);
        prop_assert_eq!(compatible, mu.is_valid());
    }

    #[test]
    fn nabla_is_covariant_derivative(seed in any::<u64>(), q in 1usize..=2, i in 0usize..2) {
        let ctx = plane(q);
        let mut r = rng(seed);
        let mu = gauge_form(&mut r, &ctx);
        let v: Vec<Expr> = (0..q).map(|_| poly(&mut r, &jet1_atoms(&ctx), 3, 2)).collect();
        let got = mu.nabla(&ctx, i, &v).unwrap();
        for a in 0..q {
            let want = ctx.total_derivative(&v[a], i)
                + Expr::add_all((0..q).map(|b| mu.lambda(i).get(a, b) * &v[b]));
            prop_assert!(zero(&(got[a].clone() - want)));
        }
    }

    #[test]
    fn zero_form_prolongs_classically(seed in any::<u64>(), q in 1usize..=2) {
        let ctx = plane(q);
        let x = point_field(&mut rng(seed), &ctx);
        let mu = mu_prolong(&ctx, &x, &MuForm::zero(&ctx), 2).unwrap();
        let st = standard_prolong(&ctx, &x, 2).unwrap();
        for ((a, j), c) in st.coefficients() {
            prop_assert!(zero(&(mu.coefficient(*a, j).unwrap().clone() - c.clone())));
            prop_assert!(zero(&(c.clone() - classical_coefficient(&ctx, &x, *a, j))));
        }
    }

    #[test]
    fn scalar_gauge_covariance(seed in any::<u64>()) {
        let ctx = plane(1);
        let mut r = rng(seed);
        let g = scalar_gamma(&mut r, &ctx);
        let x = point_field(&mut r, &ctx);
        let mu = lambda_from_gamma(&ctx, &Gauge::Scalar(g.clone()), &cfg()).unwrap();
        let a = mu_prolong(&ctx, &x, &mu, 2).unwrap();
        let b = standard_prolong(&ctx, &x.scaled(&g), 2).unwrap();
        for ((k, j), c) in b.coefficients() {
            prop_assert!(zero(&(a.coefficient(*k, j).unwrap().clone() - c.clone() / g.clone())));
        }
    }

    #[test]
    fn mu_difference_satisfies_its_recursion(seed in any::<u64>(), q in 1usize..=2) {
        let ctx = plane(q);
        let mut r = rng(seed);
        let mu = gauge_form(&mut r, &ctx);
        let x = vertical_field(&mut r, &ctx);
        let d = mu_difference(&ctx, &x, &mu, 2, &cfg()).unwrap();
        prop_assert!(d.recursion.is_zero());
        for a in 0..q {
            prop_assert!(d.terms[&(a, MultiIndex::zero(ctx.p()))].is_zero_literal());
        }
    }

    #[test]
    fn prolongation_acts_linearly(seed in any::<u64>(), q in 1usize..=2) {
        let ctx = plane(q);
        let mut r = rng(seed);
        let mu = gauge_form(&mut r, &ctx);
        let x = point_field(&mut r, &ctx);
        let atoms = jet1_atoms(&ctx);
        let (f, g) = (random_expr(&mut r, &atoms, 2), random_expr(&mut r, &atoms, 2));
        let pr = mu_prolong(&ctx, &x, &mu, 1).unwrap();
        let sum = pr.apply(&ctx, &(&f + &g)).unwrap();
        let parts = pr.apply(&ctx, &f).unwrap() + pr.apply(&ctx, &g).unwrap();
        prop_assert!(zero(&canonicalize(&(sum - parts))));
    }
}
