//! Bundled problem files with the verdicts they are expected to produce.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::dsl::{parse_problem, DslError, ProblemFile, Report};
use crate::expr::{Expr, ExprParser};
use crate::oracle::{is_zero, OracleConfig};

const MANIFEST: &str = include_str!("../corpus/manifest.toml");

const FILES: &[(&str, &str)] = &[
    ("ex1.mun", include_str!("../corpus/ex1.mun")),
    ("ex1-perturbed.mun", include_str!("../corpus/ex1-perturbed.mun")),
    ("ex1-zero.mun", include_str!("../corpus/ex1-zero.mun")),
    ("ex2.mun", include_str!("../corpus/ex2.mun")),
    ("ex3.mun", include_str!("../corpus/ex3.mun")),
    ("ex4.mun", include_str!("../corpus/ex4.mun")),
    ("ex5.mun", include_str!("../corpus/ex5.mun")),
    ("ex6.mun", include_str!("../corpus/ex6.mun")),
    ("ex7.mun", include_str!("../corpus/ex7.mun")),
    ("ex8.mun", include_str!("../corpus/ex8.mun")),
    ("ex8-zero.mun", include_str!("../corpus/ex8-zero.mun")),
    ("ex9.mun", include_str!("../corpus/ex9.mun")),
    ("dual.mun", include_str!("../corpus/dual.mun")),
];

/// Expected outcome of one directive, in file order.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct Expected {
    pub verdict: String,
    #[serde(default = "pass")]
    pub status: String,
    pub classification: Option<String>,
    /// Compared with the reported residual by a zero test, not textually.
    pub residual: Option<String>,
}

fn pass() -> String {
    "pass".into()
}

#[derive(Deserialize)]
struct Manifest {
    case: Vec<CaseSpec>,
}

#[derive(Deserialize)]
struct CaseSpec {
    id: String,
    file: String,
    summary: String,
    #[serde(default)]
    notes: Vec<String>,
    expect: Vec<Expected>,
}

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub id: String,
    pub file: String,
    pub summary: String,
    pub notes: Vec<String>,
    pub source: &'static str,
    pub expected: Vec<Expected>,
}

impl CorpusCase {
    pub fn problem(&self) -> Result<ProblemFile, DslError> {
        parse_problem(self.source)
    }
}

pub fn load_corpus() -> Vec<CorpusCase> {
    let m: Manifest = toml::from_str(MANIFEST).expect("bundled manifest is valid");
    m.case
        .into_iter()
        .map(|c| {
            let source = FILES.iter().find(|(f, _)| *f == c.file).map(|(_, s)| *s).expect("manifest names a bundled file");
            CorpusCase { id: c.id, file: c.file, summary: c.summary, notes: c.notes, source, expected: c.expect }
        })
        .collect()
}

fn read(problem: &ProblemFile, text: &str) -> Option<Expr> {
    let mut names = BTreeMap::new();
    for n in std::iter::once("P".to_string()).chain((1..=problem.ctx.p()).map(|k| format!("P{k}"))) {
        names.insert(n.clone(), Expr::parameter(&n));
    }
    ExprParser::new(&problem.ctx).with_names(&names).parse(text).ok()
}

/// Differences between a report and the case's expectations.
pub fn check_case(case: &CorpusCase, problem: &ProblemFile, report: &Report) -> Vec<String> {
    let mut out = Vec::new();
    if case.expected.len() != report.entries.len() {
        out.push(format!("{} directives, {} expectations", report.entries.len(), case.expected.len()));
    }
    let cfg = OracleConfig::default();
    for (k, (want, got)) in case.expected.iter().zip(&report.entries).enumerate() {
        let at = format!("directive {} (line {})", k + 1, got.line);
        if want.verdict != got.verdict.as_str() {
            out.push(format!("{at}: verdict {} instead of {}", got.verdict.as_str(), want.verdict));
        }
        if want.status != got.status.as_str() {
            out.push(format!("{at}: status {} instead of {}", got.status.as_str(), want.status));
        }
        if want.classification.is_some() && want.classification != got.classification {
            out.push(format!("{at}: classification {:?} instead of {:?}", got.classification, want.classification));
        }
        if let Some(r) = &want.residual {
            let same = match (read(problem, r), got.residual.as_deref().and_then(|g| read(problem, g))) {
                (Some(a), Some(b)) => is_zero(&(a - b), &cfg).is_zero(),
                _ => false,
            };
            if !same {
                out.push(format!("{at}: residual {:?} instead of {r}", got.residual));
            }
        }
    }
    out
}
