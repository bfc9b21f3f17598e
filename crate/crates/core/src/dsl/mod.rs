//! The `.mun` problem language: declarations, then directives.
//!
//! ```text
//! independent x y
//! dependent u v
//! lambda[x] = [[0, 0], [u_x, 0]]
//! lambda[y] = [[0, 0], [u_y, 0]]
//! vectorfield X: phi = (u, 1)
//! lagrangian L = (1/2)*(u_x^2 + u_y^2) - (u_x*v_x + u_y*v_y)/u + u^2*exp(-2*v)
//! check mu-symmetry X L
//! check mu-symmetry X L ; mode = standard ; expect = nonzero ; residual = u_x^2 + u_y^2
//! ```

mod parse;
mod report;
mod run;

use std::fmt;

pub use parse::{parse_problem, DslError};
pub use report::{Entry, Report, Status, Verdict};
pub use run::{run, ModeChoice, RunOptions};

use crate::expr::Expr;
use crate::jet::JetContext;
use crate::matrix::ExprMatrix;
use crate::mu::Gauge;

/// A value tagged with its 1-based source line. Equality ignores the line.
#[derive(Clone, Debug)]
pub struct Spanned<T> {
    pub line: usize,
    pub value: T,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Independent(Vec<String>),
    Dependent(Vec<String>),
    Parameter(Vec<String>),
    Function(Vec<String>),
    Lambda { var: String, matrix: ExprMatrix },
    ScalarLambda(Vec<Expr>),
    Gamma(Gauge),
    Field { name: String, xi: Vec<Expr>, phi: Vec<Expr> },
    Lagrangian { name: String, density: Expr },
    Solution { name: String, bindings: Vec<(String, Expr)> },
    Invariant { name: String, expr: Expr },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DirectiveKind {
    Compatibility,
    MuSymmetry { field: String, lagrangian: String },
    NoetherIdentity { field: String, lagrangian: String },
    ConservedVector { field: String, lagrangian: String },
    Conservation { field: String, lagrangian: String },
    DivergenceSymmetry { field: String, lagrangian: String },
    Conditional { field: String, lagrangian: String },
    StandardReduction { field: String, lagrangian: String },
    Theorem9 { field: String, lagrangian: String },
    Dual { field: String, lagrangian: String },
    Invariants { field: String, names: Vec<String> },
    ElForm { lagrangian: String },
    MuEulerLagrange { lagrangian: String },
    VerifySolution { solution: String, lagrangian: String },
}

impl DirectiveKind {
    /// The words following `check`, `derive` or `verify`.
    pub fn words(&self) -> (&'static str, &'static str, Vec<&str>) {
        use DirectiveKind::*;
        match self {
            Compatibility => ("check", "compatibility", vec![]),
            MuSymmetry { field, lagrangian } => ("check", "mu-symmetry", vec![field, lagrangian]),
            NoetherIdentity { field, lagrangian } => ("check", "noether-identity", vec![field, lagrangian]),
            ConservedVector { field, lagrangian } => ("derive", "conserved-vector", vec![field, lagrangian]),
            Conservation { field, lagrangian } => ("check", "conservation", vec![field, lagrangian]),
            DivergenceSymmetry { field, lagrangian } => ("check", "divergence-symmetry", vec![field, lagrangian]),
            Conditional { field, lagrangian } => ("check", "conditional", vec![field, lagrangian]),
            StandardReduction { field, lagrangian } => ("derive", "standard-reduction", vec![field, lagrangian]),
            Theorem9 { field, lagrangian } => ("check", "theorem9", vec![field, lagrangian]),
            Dual { field, lagrangian } => ("check", "dual", vec![field, lagrangian]),
            Invariants { field, names } => {
                ("check", "invariants", std::iter::once(field.as_str()).chain(names.iter().map(String::as_str)).collect())
            }
            ElForm { lagrangian } => ("check", "el-form", vec![lagrangian]),
            MuEulerLagrange { lagrangian } => ("derive", "mu-euler-lagrange", vec![lagrangian]),
            VerifySolution { solution, lagrangian } => ("verify", "solution", vec![solution, lagrangian]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OptValue {
    Word(String),
    Expr(Expr),
    Tuple(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Directive {
    pub kind: DirectiveKind,
    pub options: Vec<(String, OptValue)>,
}

impl Directive {
    pub fn option(&self, key: &str) -> Option<&OptValue> {
        self.options.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn word(&self, key: &str) -> Option<&str> {
        match self.option(key) {
            Some(OptValue::Word(w)) => Some(w),
            _ => None,
        }
    }

    pub fn expr(&self, key: &str) -> Option<&Expr> {
        match self.option(key) {
            Some(OptValue::Expr(e)) => Some(e),
            _ => None,
        }
    }

    pub fn tuple(&self, key: &str) -> Option<&[Expr]> {
        match self.option(key) {
            Some(OptValue::Tuple(t)) => Some(t),
            _ => None,
        }
    }
}

/// A parsed problem: its context, declarations and directives.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub ctx: JetContext,
    pub decls: Vec<Spanned<Decl>>,
    pub directives: Vec<Spanned<Directive>>,
}

impl PartialEq for ProblemFile {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls && self.directives == other.directives
    }
}

impl ProblemFile {
    pub fn fields(&self) -> impl Iterator<Item = (&str, &[Expr], &[Expr])> {
        self.decls.iter().filter_map(|d| match &d.value {
            Decl::Field { name, xi, phi } => Some((name.as_str(), xi.as_slice(), phi.as_slice())),
            _ => None,
        })
    }

    pub fn lagrangian(&self, name: &str) -> Option<&Expr> {
        self.decls.iter().find_map(|d| match &d.value {
            Decl::Lagrangian { name: n, density } if n == name => Some(density),
            _ => None,
        })
    }

    pub fn lagrangian_count(&self) -> usize {
        self.decls.iter().filter(|d| matches!(d.value, Decl::Lagrangian { .. })).count()
    }

    pub fn lambda_count(&self) -> usize {
        self.decls.iter().filter(|d| matches!(d.value, Decl::Lambda { .. })).count()
    }
}

fn tuple(f: &mut fmt::Formatter<'_>, items: &[Expr]) -> fmt::Result {
    write!(f, "(")?;
    for (k, e) in items.iter().enumerate() {
        if k > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{e}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Independent(n) => write!(f, "independent {}", n.join(" ")),
            Decl::Dependent(n) => write!(f, "dependent {}", n.join(" ")),
            Decl::Parameter(n) => write!(f, "parameter {}", n.join(" ")),
            Decl::Function(n) => write!(f, "function {}", n.join(" ")),
            Decl::Lambda { var, matrix } => write!(f, "lambda[{var}] = {matrix}"),
            Decl::ScalarLambda(l) => {
                write!(f, "scalar-lambda = ")?;
                tuple(f, l)
            }
            Decl::Gamma(Gauge::Scalar(e)) => write!(f, "gamma = {e}"),
            Decl::Gamma(Gauge::Matrix(m)) => write!(f, "gamma = {m}"),
            Decl::Field { name, xi, phi } => {
                write!(f, "vectorfield {name}: xi = ")?;
                tuple(f, xi)?;
                write!(f, ", phi = ")?;
                tuple(f, phi)
            }
            Decl::Lagrangian { name, density } => write!(f, "lagrangian {name} = {density}"),
            Decl::Solution { name, bindings } => {
                write!(f, "solution {name}: ")?;
                for (k, (v, e)) in bindings.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v} = {e}")?;
                }
                Ok(())
            }
            Decl::Invariant { name, expr } => write!(f, "invariant {name} = {expr}"),
        }
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (verb, what, args) = self.kind.words();
        write!(f, "{verb} {what}")?;
        for a in args {
            write!(f, " {a}")?;
        }
        for (k, v) in &self.options {
            write!(f, " ; {k} = ")?;
            match v {
                OptValue::Word(w) => write!(f, "{w}")?,
                OptValue::Expr(e) => write!(f, "{e}")?,
                OptValue::Tuple(t) => tuple(f, t)?,
            }
        }
        Ok(())
    }
}

/// Canonical text of the problem; parsing it gives back an equal problem.
impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{}", d.value)?;
        }
        for d in &self.directives {
            writeln!(f, "{}", d.value)?;
        }
        Ok(())
    }
}
