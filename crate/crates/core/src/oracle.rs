//! Numeric zero testing at random points.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{canonicalize, evaluate_at, Expr, FunctionTable, Node, Point, Symbol};

/// Sampling and tolerance settings. Results are a pure function of the
/// configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub points: usize,
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_resamples: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { points: 20, rel_tol: 1e-9, abs_floor: 1e-12, max_resamples: 50, seed: 0x6d75_7379_6d00_0001 }
    }
}

/// Errors in an oracle configuration.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("at least one sample point is required")]
    NoPoints,
    #[error("tolerance must be positive and finite")]
    BadTolerance,
}

impl OracleConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.points == 0 {
            return Err(ConfigError::NoPoints);
        }
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if !ok(self.rel_tol) || !ok(self.abs_floor) {
            return Err(ConfigError::BadTolerance);
        }
        Ok(())
    }
}

/// How a zero was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroKind {
    Symbolic,
    Probabilistic,
}

/// A sample where an expression failed to vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: BTreeMap<String, f64>,
    pub value: f64,
}

/// Outcome of a zero test.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroVerdict {
    Zero(ZeroKind),
    NonZero(Witness),
    Indeterminate,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero(_))
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, ZeroVerdict::NonZero(_))
    }

    /// Combines verdicts: any `NonZero` wins, then `Indeterminate`;
    /// `Zero` is symbolic only when all parts are.
    pub fn and(self, other: ZeroVerdict) -> ZeroVerdict {
        use ZeroVerdict::*;
        match (self, other) {
            (NonZero(w), _) | (_, NonZero(w)) => NonZero(w),
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Zero(ZeroKind::Symbolic), Zero(ZeroKind::Symbolic)) => Zero(ZeroKind::Symbolic),
            _ => Zero(ZeroKind::Probabilistic),
        }
    }

    pub fn all<I: IntoIterator<Item = ZeroVerdict>>(it: I) -> ZeroVerdict {
        it.into_iter().fold(ZeroVerdict::Zero(ZeroKind::Symbolic), ZeroVerdict::and)
    }
}

impl fmt::Display for ZeroVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroVerdict::Zero(ZeroKind::Symbolic) => write!(f, "zero (symbolic)"),
            ZeroVerdict::Zero(ZeroKind::Probabilistic) => write!(f, "zero (probabilistic)"),
            ZeroVerdict::NonZero(w) => write!(f, "nonzero (value {:.6e})", w.value),
            ZeroVerdict::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// A sampled point together with realizations of uninterpreted functions.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub point: Point,
    pub functions: FunctionTable,
}

fn draw(rng: &mut ChaCha8Rng) -> f64 {
    let mag = rng.gen_range(0.1..=2.0);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

fn mix(seed: u64, attempt: u64) -> u64 {
    // splitmix64 step so that neighbouring attempts give unrelated streams
    let mut z = seed ^ attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws values for `symbols` (in sorted order) and cubic realizations of
/// `functions`. Deterministic in `(cfg.seed, attempt)`.
pub fn sample_point<'a, S, F>(symbols: S, functions: F, cfg: &OracleConfig, attempt: u64) -> Sample
where
    S: IntoIterator<Item = &'a Symbol>,
    F: IntoIterator<Item = &'a str>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, attempt));
    let mut syms: Vec<&Symbol> = symbols.into_iter().collect();
    syms.sort();
    syms.dedup();
    let point = syms.into_iter().map(|s| (s.clone(), draw(&mut rng))).collect();
    let mut names: Vec<&str> = functions.into_iter().collect();
    names.sort();
    names.dedup();
    let mut table = FunctionTable::new();
    for n in names {
        table.insert(n, (0..4).map(|_| draw(&mut rng)).collect());
    }
    Sample { point, functions: table }
}

fn magnitude(e: &Expr, s: &Sample) -> f64 {
    match e.node() {
        Node::Add(items) => items
            .iter()
            .filter_map(|t| evaluate_at(t, &s.point, &s.functions).ok())
            .fold(0.0, |m, v| m.max(v.abs())),
        _ => 0.0,
    }
}

fn names_of(e: &Expr) -> Vec<String> {
    e.function_names().iter().map(|n| n.to_string()).collect()
}

/// Evaluates `value` at `cfg.points` valid samples. `scale` gives the
/// magnitude the tolerance is relative to.
fn numeric_zero(value: &Expr, scale: &dyn Fn(&Sample) -> f64, cfg: &OracleConfig) -> ZeroVerdict {
    let symbols = value.symbols();
    let names = names_of(value);
    let per_point = cfg.max_resamples as u64 + 1;
    for k in 0..cfg.points as u64 {
        let mut evaluated = None;
        for r in 0..per_point {
            let sample = sample_point(&symbols, names.iter().map(String::as_str), cfg, k * per_point + r);
            if let Ok(v) = evaluate_at(value, &sample.point, &sample.functions) {
                evaluated = Some((v, sample));
                break;
            }
        }
        let Some((v, sample)) = evaluated else {
            return ZeroVerdict::Indeterminate;
        };
        let tol = cfg.abs_floor.max(cfg.rel_tol * (1.0 + scale(&sample)));
        if v.abs() > tol {
            let point = sample.point.iter().map(|(s, x)| (s.name().to_string(), *x)).collect();
            return ZeroVerdict::NonZero(Witness { point, value: v });
        }
    }
    ZeroVerdict::Zero(ZeroKind::Probabilistic)
}

/// Zero test: symbolic normal form first, then the numeric oracle.
pub fn is_zero(e: &Expr, cfg: &OracleConfig) -> ZeroVerdict {
    let c = canonicalize(e);
    if c.is_zero_literal() {
        return ZeroVerdict::Zero(ZeroKind::Symbolic);
    }
    // the canonical form is usually shorter and better conditioned; fall back
    // to the original tree where it is undefined
    let target = if c.size() <= e.size() { c } else { e.clone() };
    numeric_zero(&target, &|s| magnitude(&target, s), cfg)
}

/// Numeric equality test of `e1` and `e2`, tolerance relative to the
/// larger of the two values.
pub fn prob_equal(e1: &Expr, e2: &Expr, cfg: &OracleConfig) -> ZeroVerdict {
    let diff = e1.clone() - e2.clone();
    if diff.is_zero_literal() {
        return ZeroVerdict::Zero(ZeroKind::Symbolic);
    }
    let scale = |s: &Sample| {
        let a = evaluate_at(e1, &s.point, &s.functions).map(f64::abs).unwrap_or(0.0);
        let b = evaluate_at(e2, &s.point, &s.functions).map(f64::abs).unwrap_or(0.0);
        a.max(b)
    };
    let symbols: std::collections::BTreeSet<Symbol> = e1.symbols().into_iter().chain(e2.symbols()).collect();
    let names: Vec<String> = names_of(e1).into_iter().chain(names_of(e2)).collect();
    let per_point = cfg.max_resamples as u64 + 1;
    for k in 0..cfg.points as u64 {
        let mut evaluated = None;
        for r in 0..per_point {
            let sample = sample_point(&symbols, names.iter().map(String::as_str), cfg, k * per_point + r);
            let a = evaluate_at(e1, &sample.point, &sample.functions);
            let b = evaluate_at(e2, &sample.point, &sample.functions);
            if let (Ok(a), Ok(b)) = (a, b) {
                evaluated = Some((a - b, sample));
                break;
            }
        }
        let Some((v, sample)) = evaluated else {
            return ZeroVerdict::Indeterminate;
        };
        let tol = cfg.abs_floor.max(cfg.rel_tol * (1.0 + scale(&sample)));
        if v.abs() > tol {
            let point = sample.point.iter().map(|(s, x)| (s.name().to_string(), *x)).collect();
            return ZeroVerdict::NonZero(Witness { point, value: v });
        }
    }
    ZeroVerdict::Zero(ZeroKind::Probabilistic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetContext;

    #[test]
    fn sampled_values_avoid_zero() {
        let ctx = JetContext::new(&["x", "y"], &["u"]).unwrap();
        let syms = [ctx.x_symbol(0), ctx.x_symbol(1)];
        let cfg = OracleConfig::default();
        for attempt in 0..200 {
            let s = sample_point(&syms, std::iter::empty(), &cfg, attempt);
            assert!(s.point.values().all(|v| (0.1..=2.0).contains(&v.abs())));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let syms = [Symbol::parameter("a"), Symbol::parameter("b")];
        let cfg = OracleConfig::default();
        let a = sample_point(&syms, ["V"], &cfg, 7);
        let b = sample_point(&syms, ["V"], &cfg, 7);
        assert_eq!(a, b);
        let c = sample_point(&syms, ["V"], &cfg, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn cubic_derivative_matches_difference_quotient() {
        let cfg = OracleConfig::default();
        let s = sample_point(std::iter::empty(), ["V"], &cfg, 3);
        let h = 1e-6;
        for x in [-1.5, -0.3, 0.4, 1.7] {
            let fd = (s.functions.eval("V", 0, x + h).unwrap() - s.functions.eval("V", 0, x - h).unwrap()) / (2.0 * h);
            assert!((fd - s.functions.eval("V", 1, x).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn simple_verdicts() {
        let cfg = OracleConfig::default();
        let ctx = JetContext::new(&["x", "y"], &["u"]).unwrap();
        let (ux, uy) = (ctx.du(0, 0), ctx.du(0, 1));
        let x = ctx.x(0);
        assert!(prob_equal(&ux, &ux, &cfg).is_zero());
        assert!(prob_equal(&x.powi(2), &(x.clone() * x.clone()), &cfg).is_zero());
        assert!(prob_equal(&ux, &uy, &cfg).is_nonzero());
        assert!(is_zero(&(ux.powi(2) + uy.powi(2)), &cfg).is_nonzero());
        let pyth = Expr::sin(&x).powi(2) + Expr::cos(&x).powi(2) - Expr::one();
        assert_eq!(is_zero(&pyth, &cfg), ZeroVerdict::Zero(ZeroKind::Symbolic));
    }

    #[test]
    fn singular_everywhere_is_indeterminate() {
        let cfg = OracleConfig::default();
        let x = Expr::parameter("a");
        let bad = Expr::log(&(Expr::int(-1) - x.powi(2))) + x;
        assert_eq!(is_zero(&bad, &cfg), ZeroVerdict::Indeterminate);
    }
}
