#![allow(dead_code)]

use std::collections::BTreeMap;

use musym::dsl::{run, Entry, ProblemFile, Report, RunOptions};
use musym::corpus::load_corpus;
use musym::expr::{canonicalize, Expr};
use musym::jet::{JetContext, MultiIndex};
use musym::mu::{lambda_from_gamma, Gauge, MuForm};
use musym::oracle::{is_zero, OracleConfig};
use musym::prolong::VectorField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn cfg() -> OracleConfig {
    OracleConfig::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn plane(q: usize) -> JetContext {
    let deps: &[&str] = if q == 1 { &["u"] } else { &["u", "v"] };
    JetContext::new(&["x", "y"], deps).unwrap()
}

/// Sum of `terms` monomials of degree at most `deg` in `atoms`, with small
/// nonzero integer coefficients.
pub fn poly(r: &mut ChaCha8Rng, atoms: &[Expr], terms: usize, deg: u32) -> Expr {
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut c = r.gen_range(-3i64..=2);
        if c >= 0 {
            c += 1;
        }
        let d = r.gen_range(0..=deg);
        let mut f = vec![Expr::int(c)];
        for _ in 0..d {
            f.push(atoms[r.gen_range(0..atoms.len())].clone());
        }
        out.push(Expr::mul_all(f));
    }
    canonicalize(&Expr::add_all(out))
}

pub fn base_atoms(ctx: &JetContext) -> Vec<Expr> {
    (0..ctx.p()).map(|i| ctx.x(i)).chain((0..ctx.q()).map(|a| ctx.u(a))).collect()
}

pub fn first_atoms(ctx: &JetContext) -> Vec<Expr> {
    let mut v = Vec::new();
    for a in 0..ctx.q() {
        for i in 0..ctx.p() {
            v.push(ctx.du(a, i));
        }
    }
    v
}

/// A first-order polynomial Lagrangian with a nondegenerate quadratic part.
pub fn random_lagrangian(r: &mut ChaCha8Rng, ctx: &JetContext) -> Expr {
    let firsts = first_atoms(ctx);
    let quad = Expr::add_all(firsts.iter().map(|d| d * d)) * Expr::rational(1, 2);
    let all: Vec<Expr> = base_atoms(ctx).into_iter().chain(firsts).collect();
    canonicalize(&(quad + poly(r, &all, 3, 3)))
}

pub fn vertical_field(r: &mut ChaCha8Rng, ctx: &JetContext) -> VectorField {
    let atoms = base_atoms(ctx);
    VectorField::vertical(ctx, (0..ctx.q()).map(|_| poly(r, &atoms, 2, 2)).collect()).unwrap()
}

pub fn point_field(r: &mut ChaCha8Rng, ctx: &JetContext) -> VectorField {
    let atoms = base_atoms(ctx);
    let xi = (0..ctx.p()).map(|_| poly(r, &atoms, 2, 1)).collect();
    let phi = (0..ctx.q()).map(|_| poly(r, &atoms, 2, 2)).collect();
    VectorField::new(ctx, xi, phi).unwrap()
}

/// `exp` of a random nonconstant polynomial in the base coordinates.
pub fn scalar_gamma(r: &mut ChaCha8Rng, ctx: &JetContext) -> Expr {
    let atoms = base_atoms(ctx);
    let lead = atoms[r.gen_range(0..atoms.len())].clone();
    Expr::exp(&canonicalize(&(lead + poly(r, &atoms, 2, 2))))
}

/// A pure-gauge μ-form: scalar for `q = 1`, upper triangular otherwise.
pub fn gauge_form(r: &mut ChaCha8Rng, ctx: &JetContext) -> MuForm {
    let g = if ctx.q() == 1 {
        Gauge::Scalar(scalar_gamma(r, ctx))
    } else {
        let atoms = base_atoms(ctx);
        let q = ctx.q();
        let mut rows = Vec::new();
        for i in 0..q {
            let mut row = Vec::new();
            for j in 0..q {
                row.push(match i.cmp(&j) {
                    std::cmp::Ordering::Equal => scalar_gamma(r, ctx),
                    std::cmp::Ordering::Less => poly(r, &atoms, 2, 1),
                    std::cmp::Ordering::Greater => Expr::zero(),
                });
            }
            rows.push(row);
        }
        let m = musym::matrix::ExprMatrix::from_rows(rows).unwrap();
        Gauge::Matrix(m)
    };
    lambda_from_gamma(ctx, &g, &cfg()).unwrap()
}

/// Classical prolongation coefficient `D_J(φ - ξ^i u_i) + ξ^i u_{J,i}`.
pub fn classical_coefficient(ctx: &JetContext, x: &VectorField, a: usize, j: &MultiIndex) -> Expr {
    let q = &x.phi()[a] - &Expr::add_all((0..ctx.p()).map(|i| &x.xi()[i] * &ctx.du(a, i)));
    let tail = Expr::add_all((0..ctx.p()).map(|i| &x.xi()[i] * &ctx.jet(a, &j.plus(i))));
    canonicalize(&(ctx.total_derivative_multi(&q, j) + tail))
}

/// `L_{u^a} - D_i L_{u^a_i}` for first-order `L`.
pub fn classical_euler_lagrange(ctx: &JetContext, l: &Expr) -> Vec<Expr> {
    use musym::expr::partial_derivative;
    (0..ctx.q())
        .map(|a| {
            let lu = partial_derivative(l, ctx.u(a).as_symbol().unwrap());
            let div = Expr::add_all(
                (0..ctx.p()).map(|i| ctx.total_derivative(&partial_derivative(l, ctx.du(a, i).as_symbol().unwrap()), i)),
            );
            canonicalize(&(lu - div))
        })
        .collect()
}

pub fn zero(e: &Expr) -> bool {
    is_zero(e, &cfg()).is_zero()
}

pub fn corpus_reports(opts: &RunOptions) -> BTreeMap<String, (ProblemFile, Report)> {
    load_corpus()
        .into_iter()
        .map(|c| {
            let p = c.problem().unwrap();
            let r = run(&p, opts);
            (c.id, (p, r))
        })
        .collect()
}

/// Entries of a report whose directive starts with `prefix`.
pub fn entries<'a>(report: &'a Report, prefix: &str) -> Vec<&'a Entry> {
    report.entries.iter().filter(|e| e.directive.starts_with(prefix)).collect()
}

/// A random expression tree over `atoms` with `exp`, `sin`, `cos` and
/// quotients by `1 + atom^2`, so it is defined everywhere.
pub fn random_expr(r: &mut ChaCha8Rng, atoms: &[Expr], depth: u32) -> Expr {
    if depth == 0 {
        return poly(r, atoms, 2, 2);
    }
    let a = random_expr(r, atoms, depth - 1);
    match r.gen_range(0..6) {
        0 => a + random_expr(r, atoms, depth - 1),
        1 => a * random_expr(r, atoms, depth - 1),
        2 => Expr::exp(&(a * Expr::rational(1, 4))),
        3 => Expr::sin(&a),
        4 => Expr::cos(&a),
        _ => {
            let t = &atoms[r.gen_range(0..atoms.len())];
            a / (Expr::one() + t * t)
        }
    }
}

/// Every jet variable of order at most one.
pub fn jet1_atoms(ctx: &JetContext) -> Vec<Expr> {
    base_atoms(ctx).into_iter().chain(first_atoms(ctx)).collect()
}
