use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

use super::report::{Entry, Report, Status, Verdict};
use super::{Decl, Directive, DirectiveKind, ProblemFile};
use crate::expr::{canonicalize, Expr, Symbol};
use crate::jet::JetContext;
use crate::matrix::ExprMatrix;
use crate::mu::{lambda_from_gamma, Gauge, MuForm};
use crate::noether::{
    conditional_invariant_check, conserved_mvector, divergence_symmetry_check, dual_mu_conservation, el_form_check,
    el_shell, evaluate_along, euler_lagrange, mu_divergence, mu_euler_lagrange, mu_symmetry_residual,
    standard_reduction, theorem9_conservation, verify_noether_identity, verify_solution, Classification, Lagrangian,
    NoetherError,
};
use crate::oracle::{is_zero, OracleConfig, ZeroVerdict};
use crate::prolong::{prolong_with, VectorField};

/// Which prolongation the symmetry checks use, overriding the file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeChoice {
    Standard,
    Mu,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub cfg: OracleConfig,
    pub mode: Option<ModeChoice>,
    pub timing: bool,
    pub parallel: bool,
}

enum Primary {
    Check(ZeroVerdict),
    Derived,
    NotFound(String),
}

struct Outcome {
    primary: Primary,
    residual: Option<String>,
    classification: Option<String>,
    details: BTreeMap<String, Value>,
    claims: Vec<(String, ZeroVerdict)>,
}

impl Outcome {
    fn new(primary: Primary) -> Self {
        Outcome { primary, residual: None, classification: None, details: BTreeMap::new(), claims: Vec::new() }
    }

    fn detail(&mut self, k: &str, v: impl Into<Value>) {
        self.details.insert(k.to_string(), v.into());
    }
}

fn list(es: &[Expr]) -> Value {
    Value::Array(es.iter().map(|e| Value::String(e.to_string())).collect())
}

struct Env<'a> {
    file: &'a ProblemFile,
    ctx: &'a JetContext,
    cfg: &'a OracleConfig,
    mode: Option<ModeChoice>,
    mu: Result<MuForm, String>,
    gamma: Option<Gauge>,
}

fn build_mu(file: &ProblemFile, cfg: &OracleConfig) -> (Result<MuForm, String>, Option<Gauge>) {
    let ctx = &file.ctx;
    let mut lambdas: Vec<Option<ExprMatrix>> = vec![None; ctx.p()];
    let mut scalar = None;
    let mut gamma = None;
    for d in &file.decls {
        match &d.value {
            Decl::Lambda { var, matrix } => {
                let i = ctx.independent_names().iter().position(|n| **n == **var).expect("checked by the parser");
                lambdas[i] = Some(matrix.clone());
            }
            Decl::ScalarLambda(l) => scalar = Some(l.clone()),
            Decl::Gamma(g) => gamma = Some(g.clone()),
            _ => {}
        }
    }
    let mu = if lambdas.iter().any(Option::is_some) {
        if scalar.is_some() {
            Err("both `lambda[..]` and `scalar-lambda` declared".to_string())
        } else {
            let q = ctx.q();
            let full = lambdas.into_iter().map(|m| m.unwrap_or_else(|| ExprMatrix::zeros(q, q))).collect();
            MuForm::new(ctx, full, cfg).map_err(|e| e.to_string())
        }
    } else if let Some(s) = scalar {
        MuForm::scalar(ctx, s, cfg).map_err(|e| e.to_string())
    } else if let Some(g) = &gamma {
        lambda_from_gamma(ctx, g, cfg).map_err(|e| e.to_string())
    } else {
        Ok(MuForm::zero(ctx))
    };
    (mu, gamma)
}

impl Env<'_> {
    fn mu(&self) -> Result<&MuForm, String> {
        let mu = self.mu.as_ref().map_err(|e| format!("invalid μ-form: {e}"))?;
        if !mu.is_valid() {
            return Err("invalid μ-form: the compatibility condition fails".into());
        }
        Ok(mu)
    }

    fn field(&self, name: &str) -> Result<VectorField, String> {
        let (_, xi, phi) = self
            .file
            .fields()
            .find(|(n, _, _)| *n == name)
            .ok_or_else(|| format!("undeclared vector field `{name}`"))?;
        VectorField::new(self.ctx, xi.to_vec(), phi.to_vec()).map_err(|e| e.to_string())
    }

    fn lagrangian(&self, name: &str) -> Result<Lagrangian, String> {
        self.file.lagrangian(name).map(|d| Lagrangian::new(d.clone())).ok_or_else(|| format!("undeclared Lagrangian `{name}`"))
    }

    fn invariant(&self, name: &str) -> Result<Expr, String> {
        self.file
            .decls
            .iter()
            .find_map(|d| match &d.value {
                Decl::Invariant { name: n, expr } if n == name => Some(expr.clone()),
                _ => None,
            })
            .ok_or_else(|| format!("undeclared invariant `{name}`"))
    }

    fn solution(&self, name: &str) -> Result<BTreeMap<usize, Expr>, String> {
        let bindings = self
            .file
            .decls
            .iter()
            .find_map(|d| match &d.value {
                Decl::Solution { name: n, bindings } if n == name => Some(bindings),
                _ => None,
            })
            .ok_or_else(|| format!("undeclared solution `{name}`"))?;
        let deps = self.ctx.dependent_names();
        Ok(bindings
            .iter()
            .map(|(v, e)| (deps.iter().position(|n| **n == **v).expect("checked by the parser"), e.clone()))
            .collect())
    }

    /// The μ-form used by symmetry checks under `mode`.
    fn mode_mu(&self, d: &Directive) -> Result<(MuForm, &'static str), String> {
        let choice = self.mode.or(match d.word("mode") {
            Some("standard") => Some(ModeChoice::Standard),
            Some(_) => Some(ModeChoice::Mu),
            None => None,
        });
        match choice {
            Some(ModeChoice::Standard) => Ok((MuForm::zero(self.ctx), "standard")),
            _ => Ok((self.mu()?.clone(), "mu")),
        }
    }

    /// Replaces `P1..Pp` (and `P`) by the traces of the current.
    fn with_current(&self, e: &Expr, traces: &[Expr]) -> Expr {
        let mut b: BTreeMap<Symbol, Expr> = BTreeMap::new();
        for (k, t) in traces.iter().enumerate() {
            b.insert(Symbol::parameter(&format!("P{}", k + 1)), t.clone());
        }
        if traces.len() == 1 {
            b.insert(Symbol::parameter("P"), traces[0].clone());
        }
        canonicalize(&e.substitute(&b))
    }

    fn run_one(&self, d: &Directive) -> Result<Outcome, String> {
        let cfg = self.cfg;
        let ctx = self.ctx;
        let ne = |e: NoetherError| e.to_string();
        use DirectiveKind as K;
        Ok(match &d.kind {
            K::Compatibility => {
                let mu = self.mu.as_ref().map_err(|e| format!("invalid μ-form: {e}"))?;
                let c = mu.compatibility();
                let mut o = Outcome::new(Primary::Check(c.verdict.clone()));
                let names = ctx.independent_names();
                for pr in c.failing() {
                    o.detail(&format!("residual[{},{}]", names[pr.i], names[pr.j]), pr.residual.to_string());
                }
                o.residual = Some(c.failing().next().map_or("0".to_string(), |pr| pr.residual.to_string()));
                o
            }
            K::MuSymmetry { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let (mu, mode) = self.mode_mu(d)?;
                let r = mu_symmetry_residual(ctx, &x, &mu, &l).map_err(ne)?;
                let mut o = Outcome::new(Primary::Check(is_zero(&r, cfg)));
                o.detail("mode", mode);
                if let Some(want) = d.expr("residual") {
                    o.claims.push(("residual".into(), is_zero(&(r.clone() - want.clone()), cfg)));
                }
                o.residual = Some(r.to_string());
                o
            }
            K::NoetherIdentity { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let id = verify_noether_identity(ctx, &x, self.mu()?, &l, cfg).map_err(ne)?;
                let mut o = Outcome::new(Primary::Check(id.verdict));
                o.residual = Some(id.expression.to_string());
                o
            }
            K::ConservedVector { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let m = conserved_mvector(ctx, &x, self.mu()?, &l).map_err(ne)?;
                let mut o = Outcome::new(Primary::Derived);
                for (i, c) in m.components().iter().enumerate() {
                    o.detail(&format!("P[{}]", ctx.independent_names()[i]), c.to_string());
                }
                let traces = m.traces();
                if let Some(want) = d.tuple("current") {
                    o.claims.push(("current".into(), tuple_claim(&traces, want, cfg)?));
                }
                o.detail("traces", list(&traces));
                o
            }
            K::Conservation { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let mu = self.mu()?;
                let m = conserved_mvector(ctx, &x, mu, &l).map_err(ne)?;
                let shell = el_shell(ctx, &l, cfg).map_err(ne)?;
                let rep = mu_divergence(ctx, &m, mu, Some(&shell), cfg).map_err(ne)?;
                let traces = m.traces();
                let mut o = Outcome::new(Primary::Check(rep.verdict.clone()));
                o.classification = Some(rep.classification.label().into());
                o.detail("current", list(&traces));
                o.detail("divergence", rep.divergence.to_string());
                o.detail("trace_lambda", rep.trace_lambda.to_string());
                o.residual = Some(rep.divergence.to_string());
                if let Some(rhs) = d.expr("rhs") {
                    let rhs_j = self.with_current(rhs, &traces);
                    let v = shell.is_zero_on_shell(ctx, &(rep.divergence.clone() - rhs_j), cfg).map_err(|e| e.to_string())?;
                    if v.is_zero() {
                        o.residual = Some(rhs.to_string());
                    }
                    o.claims.push(("rhs".into(), v));
                }
                o
            }
            K::DivergenceSymmetry { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let rep = divergence_symmetry_check(ctx, &x, self.mu()?, &l, d.tuple("B"), cfg).map_err(ne)?;
                let mut o = Outcome::new(Primary::Check(rep.verdict.clone()));
                let traces = rep.current.traces();
                o.classification = Some(rep.conservation.classification.label().into());
                o.detail("current", list(&traces));
                o.detail("divergence", rep.conservation.divergence.to_string());
                o.residual = Some(rep.residual.to_string());
                if let Some(rhs) = d.expr("rhs") {
                    let rhs_j = self.with_current(rhs, &traces);
                    let shell = el_shell(ctx, &l, cfg).map_err(ne)?;
                    let diff = rep.conservation.divergence.clone() - rhs_j;
                    o.claims.push(("rhs".into(), shell.is_zero_on_shell(ctx, &diff, cfg).map_err(|e| e.to_string())?));
                }
                o
            }
            K::Conditional { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let alpha = d.tuple("alpha").ok_or("`check conditional` needs `alpha = (...)`")?;
                let q = ctx.q();
                let a: Vec<ExprMatrix> = alpha.iter().map(|e| ExprMatrix::scalar(q, e)).collect();
                let rep = conditional_invariant_check(ctx, &x, self.mu()?, &l, &a, cfg).map_err(ne)?;
                let mut o = Outcome::new(Primary::Check(rep.invariance.clone().and(rep.decay.clone())));
                o.classification = Some(Classification::Conditional(rep.factor.clone().unwrap_or_else(Expr::zero)).label().into());
                if let Some(f) = &rep.factor {
                    o.detail("factor", f.to_string());
                }
                o.detail("current", list(&rep.current));
                o.residual = Some(rep.divergence.to_string());
                if let Some(rhs) = d.expr("rhs") {
                    let rhs_j = self.with_current(rhs, &rep.current);
                    let shell = el_shell(ctx, &l, cfg).map_err(ne)?;
                    let v = shell.is_zero_on_shell(ctx, &(rep.divergence.clone() - rhs_j), cfg).map_err(|e| e.to_string())?;
                    if v.is_zero() {
                        o.residual = Some(rhs.to_string());
                    }
                    o.claims.push(("rhs".into(), v));
                }
                o
            }
            K::StandardReduction { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let given = d.expr("gamma").cloned().or(match &self.gamma {
                    Some(Gauge::Scalar(g)) => Some(g.clone()),
                    _ => None,
                });
                match standard_reduction(ctx, &x, self.mu()?, &l, given.as_ref(), cfg) {
                    Err(NoetherError::GammaNotFound(why)) => Outcome::new(Primary::NotFound(why)),
                    Err(e) => return Err(e.to_string()),
                    Ok(rep) => {
                        let mut o = Outcome::new(Primary::Check(rep.verdict.clone()));
                        o.classification = Some(Classification::StandardConserved.label().into());
                        o.detail("gamma", rep.gamma.to_string());
                        o.detail("lambda", list(&rep.lambda));
                        o.detail("current", list(&rep.current));
                        o.residual = Some(rep.divergence.to_string());
                        if let Some(want) = d.expr("gauge") {
                            o.claims.push(("gauge".into(), is_zero(&(rep.gamma.clone() - want.clone()), cfg)));
                        }
                        if let Some(want) = d.tuple("current") {
                            o.claims.push(("current".into(), tuple_claim(&rep.current, want, cfg)?));
                        }
                        o
                    }
                }
            }
            K::Theorem9 { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let rep = theorem9_conservation(ctx, &x, self.mu()?, &l, cfg).map_err(ne)?;
                let v = rep.residual_verdict.clone().and(rep.identity.verdict.clone()).and(rep.on_shell.clone());
                let mut o = Outcome::new(Primary::Check(v));
                o.classification = Some(Classification::StandardConserved.label().into());
                o.detail("mu_euler_lagrange", list(&rep.mu_el));
                o.detail("current", list(&rep.current));
                o.detail("identity", Verdict::from(&rep.identity.verdict).as_str());
                o.residual = Some(rep.divergence.to_string());
                o
            }
            K::Dual { field, lagrangian } => {
                let (x, l) = (self.field(field)?, self.lagrangian(lagrangian)?);
                let rep = dual_mu_conservation(ctx, &x, self.mu()?, &l, cfg).map_err(ne)?;
                let v = rep.standard_verdict.clone().and(rep.identity.verdict.clone()).and(rep.on_shell.clone());
                let mut o = Outcome::new(Primary::Check(v));
                o.detail("standard_residual", rep.standard_residual.to_string());
                o.detail("current", list(&rep.current));
                o.detail("identity", Verdict::from(&rep.identity.verdict).as_str());
                o.residual = Some(rep.residual.to_string());
                o
            }
            K::Invariants { field, names } => {
                let x = self.field(field)?;
                let (mu, mode) = self.mode_mu(d)?;
                let exprs: Vec<Expr> = names.iter().map(|n| self.invariant(n)).collect::<Result<_, _>>()?;
                let r = exprs.iter().map(Expr::jet_order).max().unwrap_or(0).max(1);
                let pr = prolong_with(ctx, &x, (!mu.is_zero_form()).then_some(&mu), r).map_err(|e| e.to_string())?;
                let mut verdicts = Vec::new();
                let mut o = Outcome::new(Primary::Derived);
                for (n, e) in names.iter().zip(&exprs) {
                    let v = canonicalize(&pr.apply(ctx, e).map_err(|e| e.to_string())?);
                    verdicts.push(is_zero(&v, cfg));
                    o.detail(&format!("X[{n}]"), v.to_string());
                }
                o.primary = Primary::Check(ZeroVerdict::all(verdicts));
                o.detail("mode", mode);
                o
            }
            K::ElForm { lagrangian } => {
                let l = self.lagrangian(lagrangian)?;
                let forms = d.tuple("form").ok_or("`check el-form` needs `form = (...)`")?;
                let rep = el_form_check(ctx, &l, forms, cfg).map_err(ne)?;
                let mut o = Outcome::new(Primary::Check(rep.verdict.clone()));
                o.detail("equations", list(&rep.equations));
                let factors: Vec<Value> =
                    rep.factors.iter().map(|f| f.as_ref().map_or(Value::Null, |e| Value::String(e.to_string()))).collect();
                o.detail("factors", Value::Array(factors));
                o
            }
            K::MuEulerLagrange { lagrangian } => {
                let l = self.lagrangian(lagrangian)?;
                let eqs = mu_euler_lagrange(ctx, &l, self.mu()?).map_err(ne)?;
                let mut o = Outcome::new(Primary::Derived);
                if let Some(want) = d.tuple("form") {
                    o.claims.push(("form".into(), tuple_claim(&eqs, want, cfg)?));
                }
                o.detail("equations", list(&eqs));
                o
            }
            K::VerifySolution { solution, lagrangian } => {
                let (s, l) = (self.solution(solution)?, self.lagrangian(lagrangian)?);
                let eqs = euler_lagrange(ctx, &l);
                let res = verify_solution(ctx, &eqs, &s, cfg).map_err(|e| e.to_string())?;
                let mut o = Outcome::new(Primary::Check(ZeroVerdict::all(res.iter().map(|(_, v)| v.clone()))));
                o.detail("residuals", list(&res.iter().map(|(e, _)| canonicalize(e)).collect::<Vec<_>>()));
                match (d.expr("quantity"), d.expr("value")) {
                    (Some(qe), Some(ve)) => {
                        let along = canonicalize(&evaluate_along(ctx, qe, &s).map_err(|e| e.to_string())?);
                        o.claims.push(("value".into(), is_zero(&(along.clone() - ve.clone()), cfg)));
                        o.detail("quantity", along.to_string());
                    }
                    (None, None) => {}
                    _ => return Err("`quantity` and `value` must be given together".into()),
                }
                o
            }
        })
    }

    fn entry(&self, line: usize, d: &Directive, timing: bool) -> Entry {
        let start = Instant::now();
        let outcome = self.run_one(d);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let mut e = match outcome {
            Err(message) => Entry::error(line, d.to_string(), message),
            Ok(o) => finish(line, d, o),
        };
        if timing {
            e.timing_ms = Some(elapsed);
        }
        e
    }
}

fn tuple_claim(got: &[Expr], want: &[Expr], cfg: &OracleConfig) -> Result<ZeroVerdict, String> {
    if got.len() != want.len() {
        return Err(format!("expected {} components, found {}", got.len(), want.len()));
    }
    Ok(ZeroVerdict::all(got.iter().zip(want).map(|(a, b)| is_zero(&(a.clone() - b.clone()), cfg))))
}

fn witness(v: &ZeroVerdict) -> Option<Value> {
    match v {
        ZeroVerdict::NonZero(w) => Some(json!({ "point": w.point, "value": w.value })),
        _ => None,
    }
}

fn finish(line: usize, d: &Directive, mut o: Outcome) -> Entry {
    let want_nonzero = d.word("expect") == Some("nonzero");
    let (verdict, mut ok) = match &o.primary {
        Primary::Check(v) => {
            if let Some(w) = witness(v) {
                o.details.insert("witness".into(), w);
            }
            (Verdict::from(v), if want_nonzero { v.is_nonzero() } else { v.is_zero() })
        }
        Primary::Derived => (Verdict::Derived, !want_nonzero),
        Primary::NotFound(why) => {
            o.details.insert("reason".into(), Value::String(why.clone()));
            (Verdict::NotFound, false)
        }
    };
    for (k, v) in &o.claims {
        o.details.insert(format!("claim.{k}"), Value::String(Verdict::from(v).as_str().into()));
        if let Some(w) = witness(v) {
            o.details.insert(format!("claim.{k}.witness"), w);
        }
        ok &= v.is_zero();
    }
    Entry {
        line,
        directive: d.to_string(),
        verdict,
        status: if ok { Status::Pass } else { Status::Fail },
        classification: o.classification,
        residual: o.residual,
        details: o.details,
        message: None,
        timing_ms: None,
    }
}

/// Runs every directive in order. A failing check is reported and the run
/// continues; structural problems become error entries.
pub fn run(file: &ProblemFile, opts: &RunOptions) -> Report {
    let (mu, gamma) = build_mu(file, &opts.cfg);
    let env = Env { file, ctx: &file.ctx, cfg: &opts.cfg, mode: opts.mode, mu, gamma };
    let entries = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = file
                .directives
                .iter()
                .map(|d| {
                    let env = &env;
                    s.spawn(move || env.entry(d.line, &d.value, opts.timing))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("directive thread panicked")).collect()
        })
    } else {
        file.directives.iter().map(|d| env.entry(d.line, &d.value, opts.timing)).collect()
    };
    Report { seed: opts.cfg.seed, points: opts.cfg.points, tolerance: opts.cfg.rel_tol, entries }
}
