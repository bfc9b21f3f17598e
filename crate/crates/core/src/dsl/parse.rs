use std::collections::{BTreeMap, BTreeSet};

use super::{Decl, Directive, DirectiveKind, OptValue, ProblemFile, Spanned};
use crate::expr::{Expr, ExprParser, ParseError};
use crate::jet::JetContext;
use crate::matrix::{ExprMatrix, ShapeError};
use crate::mu::Gauge;

/// A problem-file error at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct DslError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> DslError {
    DslError { line, column, message: message.into() }
}

/// Option keys whose value is a word, a tuple, or a single expression.
const WORD_KEYS: &[&str] = &["mode", "expect"];
const TUPLE_KEYS: &[&str] = &["form", "B", "current", "alpha"];
const EXPR_KEYS: &[&str] = &["rhs", "residual", "quantity", "value", "gamma", "gauge"];

/// One source line with its number and the byte column where `text` starts.
#[derive(Clone, Copy)]
struct Piece<'a> {
    line: usize,
    col: usize,
    text: &'a str,
}

impl<'a> Piece<'a> {
    fn trim(self) -> Piece<'a> {
        let lead = self.text.len() - self.text.trim_start().len();
        Piece { line: self.line, col: self.col + lead, text: self.text.trim() }
    }

    fn at(self, from: usize, to: usize) -> Piece<'a> {
        Piece { line: self.line, col: self.col + from, text: &self.text[from..to] }
    }

    fn error(self, message: impl Into<String>) -> DslError {
        err(self.line, self.col + 1, message)
    }

    /// Splits at `sep` outside brackets and parentheses.
    fn split_top(self, sep: char) -> Vec<Piece<'a>> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (k, c) in self.text.char_indices() {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                c if c == sep && depth == 0 => {
                    out.push(self.at(start, k).trim());
                    start = k + c.len_utf8();
                }
                _ => {}
            }
        }
        out.push(self.at(start, self.text.len()).trim());
        out
    }

    /// `key = value` split at the first top-level `=`.
    fn key_value(self) -> Result<(Piece<'a>, Piece<'a>), DslError> {
        match self.text.find('=') {
            Some(k) => Ok((self.at(0, k).trim(), self.at(k + 1, self.text.len()).trim())),
            None => Err(self.error(format!("expected `=` in `{}`", self.text))),
        }
    }

    /// Contents of `open ... close` when the piece is wrapped in that pair.
    fn unwrap(self, open: char, close: char) -> Option<Piece<'a>> {
        let t = self.text;
        if !(t.starts_with(open) && t.ends_with(close)) || t.len() < 2 {
            return None;
        }
        let mut depth = 0i32;
        for (k, c) in t.char_indices() {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => {
                    depth -= 1;
                    if depth == 0 && k + 1 < t.len() {
                        return None;
                    }
                }
                _ => {}
            }
        }
        Some(self.at(open.len_utf8(), t.len() - close.len_utf8()).trim())
    }
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Reader<'a> {
    ctx: &'a JetContext,
    names: BTreeMap<String, Expr>,
}

impl Reader<'_> {
    fn expr(&self, piece: Piece<'_>) -> Result<Expr, DslError> {
        self.expr_with(piece, &self.names)
    }

    fn expr_with(&self, piece: Piece<'_>, names: &BTreeMap<String, Expr>) -> Result<Expr, DslError> {
        if piece.text.is_empty() {
            return Err(piece.error("missing expression"));
        }
        ExprParser::new(self.ctx).with_names(names).parse(piece.text).map_err(|e: ParseError| {
            let off = e.offset();
            let message = match e {
                ParseError::Syntax { message, .. } => format!("syntax error: {message}"),
                ParseError::Undeclared { name, .. } => format!("undeclared name `{name}`"),
                ParseError::BadSubscript { subscript, .. } => {
                    format!("subscript `{subscript}` does not name declared independent variables")
                }
            };
            err(piece.line, piece.col + off + 1, message)
        })
    }

    /// `(e, e, ...)`, or a bare expression read as a 1-tuple.
    fn tuple_with(&self, piece: Piece<'_>, names: &BTreeMap<String, Expr>) -> Result<Vec<Expr>, DslError> {
        match piece.unwrap('(', ')') {
            Some(inner) => inner.split_top(',').into_iter().map(|p| self.expr_with(p, names)).collect(),
            None => Ok(vec![self.expr_with(piece, names)?]),
        }
    }

    fn tuple(&self, piece: Piece<'_>) -> Result<Vec<Expr>, DslError> {
        self.tuple_with(piece, &self.names)
    }

    fn matrix(&self, piece: Piece<'_>) -> Result<ExprMatrix, DslError> {
        let inner = piece.unwrap('[', ']').ok_or_else(|| piece.error("expected a matrix `[[..], ..]`"))?;
        let mut rows = Vec::new();
        for r in inner.split_top(',') {
            let ri = r.unwrap('[', ']').ok_or_else(|| r.error("expected a matrix row `[..]`"))?;
            rows.push(ri.split_top(',').into_iter().map(|p| self.expr(p)).collect::<Result<Vec<_>, _>>()?);
        }
        ExprMatrix::from_rows(rows).map_err(|e| match e {
            ShapeError::Ragged { row, found, expected } => {
                piece.error(format!("ragged matrix: row {} has {found} entries, expected {expected}", row + 1))
            }
            other => piece.error(other.to_string()),
        })
    }
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn names_list(rest: Piece<'_>, what: &str) -> Result<Vec<String>, DslError> {
    let names: Vec<String> = rest.text.split_whitespace().map(str::to_string).collect();
    if names.is_empty() {
        return Err(rest.error(format!("`{what}` needs at least one name")));
    }
    for n in &names {
        if !is_name(n) {
            return Err(rest.error(format!("`{n}` is not a valid name")));
        }
    }
    Ok(names)
}

fn head(piece: Piece<'_>) -> (&str, Piece<'_>) {
    let t = piece.text;
    let end = t.find(|c: char| c.is_whitespace() || c == '[' || c == '=' || c == ':').unwrap_or(t.len());
    (&t[..end], piece.at(end, t.len()).trim())
}

const DECL_WORDS: &[&str] = &[
    "independent",
    "dependent",
    "parameter",
    "function",
    "lambda",
    "scalar-lambda",
    "gamma",
    "vectorfield",
    "lagrangian",
    "solution",
    "invariant",
];

/// Parses a problem file. Expressions may use earlier `invariant` and
/// `lagrangian` names; directive options may also use `P1..Pp` (and `P`
/// when there is one independent variable) for the traces of the current.
pub fn parse_problem(text: &str) -> Result<ProblemFile, DslError> {
    let mut lines = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let piece = Piece { line: k + 1, col: 0, text: body }.trim();
        if !piece.text.is_empty() {
            lines.push(piece);
        }
    }

    // Variable declarations first: every expression needs the full context.
    let mut independent = None;
    let mut dependent = None;
    let mut parameters: Vec<String> = Vec::new();
    let mut functions: Vec<String> = Vec::new();
    for &piece in &lines {
        let (word, rest) = head(piece);
        match word {
            "independent" | "dependent" => {
                let names = names_list(rest, word)?;
                let slot = if word == "independent" { &mut independent } else { &mut dependent };
                if slot.is_some() {
                    return Err(piece.error(format!("duplicate declaration: `{word}` appears twice")));
                }
                *slot = Some(names);
            }
            "parameter" => parameters.extend(names_list(rest, word)?),
            "function" => functions.extend(names_list(rest, word)?),
            _ => {}
        }
    }
    if !lines.iter().any(|p| matches!(head(*p).0, "check" | "derive" | "verify")) {
        return Err(err(lines.last().map_or(1, |p| p.line), 1, "no directives"));
    }
    let first = lines[0];
    let independent = independent.ok_or_else(|| first.error("missing `independent` declaration"))?;
    let dependent = dependent.ok_or_else(|| first.error("missing `dependent` declaration"))?;
    let mut seen = BTreeSet::new();
    for n in independent.iter().chain(&dependent).chain(&parameters).chain(&functions) {
        if !seen.insert(n.as_str()) {
            return Err(first.error(format!("duplicate declaration of `{n}`")));
        }
    }
    let ctx = JetContext::new(&strs(&independent), &strs(&dependent))
        .and_then(|c| c.with_parameters(&strs(&parameters)))
        .and_then(|c| c.with_functions(&strs(&functions)))
        .map_err(|e| first.error(e.to_string()))?;

    let mut reader = Reader { ctx: &ctx, names: BTreeMap::new() };
    let mut decls = Vec::new();
    let mut directives = Vec::new();
    let mut used: BTreeSet<(String, String)> = BTreeSet::new();
    let mut claim = |piece: Piece<'_>, kind: &str, name: &str| -> Result<(), DslError> {
        if used.insert((kind.to_string(), name.to_string())) {
            Ok(())
        } else {
            Err(piece.error(format!("duplicate declaration of {kind} `{name}`")))
        }
    };

    for &piece in &lines {
        let (word, rest) = head(piece);
        if DECL_WORDS.contains(&word) && !directives.is_empty() {
            return Err(piece.error("declarations must precede directives"));
        }
        let decl = match word {
            "independent" => Decl::Independent(names_list(rest, word)?),
            "dependent" => Decl::Dependent(names_list(rest, word)?),
            "parameter" => Decl::Parameter(names_list(rest, word)?),
            "function" => Decl::Function(names_list(rest, word)?),
            "lambda" => {
                let (lhs, rhs) = rest.key_value()?;
                let var = lhs.unwrap('[', ']').ok_or_else(|| lhs.error("expected `lambda[x] = ...`"))?;
                if !ctx.independent_names().iter().any(|n| &**n == var.text) {
                    return Err(var.error(format!("`{}` is not an independent variable", var.text)));
                }
                claim(piece, "lambda", var.text)?;
                Decl::Lambda { var: var.text.to_string(), matrix: reader.matrix(rhs)? }
            }
            "scalar-lambda" => {
                let (_, rhs) = rest.key_value()?;
                claim(piece, "lambda", "scalar")?;
                Decl::ScalarLambda(reader.tuple(rhs)?)
            }
            "gamma" => {
                let (_, rhs) = rest.key_value()?;
                claim(piece, "gamma", "gamma")?;
                if rhs.text.starts_with("[[") {
                    Decl::Gamma(Gauge::Matrix(reader.matrix(rhs)?))
                } else {
                    Decl::Gamma(Gauge::Scalar(reader.expr(rhs)?))
                }
            }
            "vectorfield" => {
                let (name, body) = named_body(rest, ':')?;
                claim(piece, "vectorfield", name)?;
                let mut xi = None;
                let mut phi = None;
                for item in body.split_top(',') {
                    let (k, v) = item.key_value()?;
                    let slot = match k.text {
                        "xi" => &mut xi,
                        "phi" => &mut phi,
                        other => return Err(k.error(format!("unknown vector field part `{other}`"))),
                    };
                    if slot.is_some() {
                        return Err(k.error(format!("`{}` given twice", k.text)));
                    }
                    *slot = Some(reader.tuple(v)?);
                }
                let xi = xi.unwrap_or_else(|| vec![Expr::zero(); ctx.p()]);
                let phi = phi.ok_or_else(|| piece.error("vector field needs `phi = (...)`"))?;
                if xi.len() != ctx.p() {
                    return Err(piece.error(format!("xi needs {} components, found {}", ctx.p(), xi.len())));
                }
                if phi.len() != ctx.q() {
                    return Err(piece.error(format!("phi needs {} components, found {}", ctx.q(), phi.len())));
                }
                Decl::Field { name: name.to_string(), xi, phi }
            }
            "lagrangian" | "invariant" => {
                let (lhs, rhs) = rest.key_value()?;
                if !is_name(lhs.text) {
                    return Err(lhs.error(format!("`{}` is not a valid name", lhs.text)));
                }
                if ctx.resolve(lhs.text).is_ok() {
                    return Err(lhs.error(format!("`{}` shadows a declared symbol", lhs.text)));
                }
                claim(piece, "name", lhs.text)?;
                let e = reader.expr(rhs)?;
                reader.names.insert(lhs.text.to_string(), e.clone());
                if word == "lagrangian" {
                    Decl::Lagrangian { name: lhs.text.to_string(), density: e }
                } else {
                    Decl::Invariant { name: lhs.text.to_string(), expr: e }
                }
            }
            "solution" => {
                let (name, body) = named_body(rest, ':')?;
                claim(piece, "solution", name)?;
                let mut bindings: Vec<(String, Expr)> = Vec::new();
                for item in body.split_top(',') {
                    let (k, v) = item.key_value()?;
                    if !ctx.dependent_names().iter().any(|n| &**n == k.text) {
                        return Err(k.error(format!("`{}` is not a dependent variable", k.text)));
                    }
                    if bindings.iter().any(|(n, _)| n == k.text) {
                        return Err(k.error(format!("`{}` bound twice", k.text)));
                    }
                    bindings.push((k.text.to_string(), reader.expr(v)?));
                }
                Decl::Solution { name: name.to_string(), bindings }
            }
            "check" | "derive" | "verify" => {
                directives.push(Spanned { line: piece.line, value: directive(&reader, piece)? });
                continue;
            }
            other => return Err(piece.error(format!("unknown statement `{other}`"))),
        };
        decls.push(Spanned { line: piece.line, value: decl });
    }
    Ok(ProblemFile { ctx, decls, directives })
}

fn named_body(rest: Piece<'_>, sep: char) -> Result<(&str, Piece<'_>), DslError> {
    let k = rest.text.find(sep).ok_or_else(|| rest.error(format!("expected `name{sep} ...`")))?;
    let name = rest.at(0, k).trim();
    if !is_name(name.text) {
        return Err(name.error(format!("`{}` is not a valid name", name.text)));
    }
    Ok((name.text, rest.at(k + 1, rest.text.len()).trim()))
}

fn directive(reader: &Reader<'_>, piece: Piece<'_>) -> Result<Directive, DslError> {
    let parts = piece.split_top(';');
    let words: Vec<&str> = parts[0].text.split_whitespace().collect();
    let args: Vec<String> = words.iter().skip(2).map(|s| s.to_string()).collect();
    let arity = |n: usize| -> Result<(), DslError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(parts[0].error(format!("`{} {}` takes {n} names, found {}", words[0], words[1], args.len())))
        }
    };
    let fl = |args: &[String]| (args[0].clone(), args[1].clone());
    let what = words.get(1).copied().unwrap_or("");
    let kind = match (words[0], what) {
        ("check", "compatibility") => {
            arity(0)?;
            DirectiveKind::Compatibility
        }
        ("check", "invariants") => {
            if args.len() < 2 {
                return Err(parts[0].error("`check invariants` takes a field and at least one invariant"));
            }
            DirectiveKind::Invariants { field: args[0].clone(), names: args[1..].to_vec() }
        }
        ("check", "el-form") => {
            arity(1)?;
            DirectiveKind::ElForm { lagrangian: args[0].clone() }
        }
        ("derive", "mu-euler-lagrange") => {
            arity(1)?;
            DirectiveKind::MuEulerLagrange { lagrangian: args[0].clone() }
        }
        ("verify", "solution") => {
            arity(2)?;
            DirectiveKind::VerifySolution { solution: args[0].clone(), lagrangian: args[1].clone() }
        }
        (verb, w) => {
            let make: fn(String, String) -> DirectiveKind = match (verb, w) {
                ("check", "mu-symmetry") => |field, lagrangian| DirectiveKind::MuSymmetry { field, lagrangian },
                ("check", "noether-identity") => {
                    |field, lagrangian| DirectiveKind::NoetherIdentity { field, lagrangian }
                }
                ("derive", "conserved-vector") => {
                    |field, lagrangian| DirectiveKind::ConservedVector { field, lagrangian }
                }
                ("check", "conservation") => |field, lagrangian| DirectiveKind::Conservation { field, lagrangian },
                ("check", "divergence-symmetry") => {
                    |field, lagrangian| DirectiveKind::DivergenceSymmetry { field, lagrangian }
                }
                ("check", "conditional") => |field, lagrangian| DirectiveKind::Conditional { field, lagrangian },
                ("derive", "standard-reduction") => {
                    |field, lagrangian| DirectiveKind::StandardReduction { field, lagrangian }
                }
                ("check", "theorem9") => |field, lagrangian| DirectiveKind::Theorem9 { field, lagrangian },
                ("check", "dual") => |field, lagrangian| DirectiveKind::Dual { field, lagrangian },
                _ => return Err(parts[0].error(format!("unknown directive `{verb} {w}`"))),
            };
            arity(2)?;
            let (f, l) = fl(&args);
            make(f, l)
        }
    };

    let mut names = reader.names.clone();
    let p = reader.ctx.p();
    let mut current: Vec<String> = (1..=p).map(|k| format!("P{k}")).collect();
    if p == 1 {
        current.push("P".into());
    }
    for n in current {
        if reader.ctx.resolve(&n).is_err() && !names.contains_key(&n) {
            names.insert(n.clone(), Expr::parameter(&n));
        }
    }

    let mut options: Vec<(String, OptValue)> = Vec::new();
    for opt in &parts[1..] {
        let (k, v) = opt.key_value()?;
        if options.iter().any(|(o, _)| o == k.text) {
            return Err(k.error(format!("option `{}` given twice", k.text)));
        }
        let value = if WORD_KEYS.contains(&k.text) {
            let allowed: &[&str] = if k.text == "mode" { &["standard", "mu"] } else { &["zero", "nonzero"] };
            if !allowed.contains(&v.text) {
                return Err(v.error(format!("`{}` must be one of {}", k.text, allowed.join(", "))));
            }
            OptValue::Word(v.text.to_string())
        } else if TUPLE_KEYS.contains(&k.text) {
            OptValue::Tuple(reader.tuple_with(v, &names)?)
        } else if EXPR_KEYS.contains(&k.text) {
            OptValue::Expr(reader.expr_with(v, &names)?)
        } else {
            return Err(k.error(format!("unknown option `{}`", k.text)));
        };
        options.push((k.text.to_string(), value));
    }
    Ok(Directive { kind, options })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "\
independent x y
dependent u v
lambda[x] = [[0, 0], [u_x, 0]]
lambda[y] = [[0, 0], [u_y, 0]]
vectorfield X: phi = (u, 1)
lagrangian L = (1/2)*(u_x^2 + u_y^2) - (u_x*v_x + u_y*v_y)/u + u^2*exp(-2*v)
check mu-symmetry X L
";

    #[test]
    fn counts() {
        let p = parse_problem(EX1).unwrap();
        assert_eq!((p.ctx.p(), p.ctx.q()), (2, 2));
        assert_eq!(p.lambda_count(), 2);
        assert_eq!(p.fields().count(), 1);
        assert_eq!(p.lagrangian_count(), 1);
        assert_eq!(p.directives.len(), 1);
    }

    #[test]
    fn empty_file() {
        assert_eq!(parse_problem("").unwrap_err().message, "no directives");
        assert_eq!(parse_problem("# nothing\nindependent x\n").unwrap_err().message, "no directives");
    }

    #[test]
    fn ragged() {
        let text = "independent x\ndependent u v\nlambda[x] = [[0],[u_x,0]]\ncheck compatibility\n";
        let e = parse_problem(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("ragged"), "{e}");
    }

    #[test]
    fn positioned() {
        let text = "independent x\ndependent u\nlagrangian L = u_x^2 + w\ncheck el-form L ; form = (u_xx)\n";
        let e = parse_problem(text).unwrap_err();
        assert_eq!((e.line, e.column), (3, 24));
        assert!(e.message.contains("`w`"));
    }

    #[test]
    fn duplicates() {
        let text = "independent x\ndependent u\nlagrangian L = u\nlagrangian L = u_x\ncheck el-form L ; form = (1)\n";
        assert!(parse_problem(text).unwrap_err().message.contains("duplicate"));
        let text = "independent x\nindependent y\ndependent u\ncheck compatibility\n";
        assert!(parse_problem(text).unwrap_err().message.contains("duplicate"));
    }

    #[test]
    fn order() {
        let text = "independent x\ndependent u\ncheck compatibility\nlagrangian L = u\n";
        assert!(parse_problem(text).unwrap_err().message.contains("precede"));
    }

    #[test]
    fn round_trip() {
        let p = parse_problem(EX1).unwrap();
        let printed = p.to_string();
        let q = parse_problem(&printed).unwrap();
        assert_eq!(p, q);
        assert_eq!(printed, q.to_string());
    }

    #[test]
    fn current_names() {
        let text = "independent t\ndependent q1 q2\nvectorfield X: phi = (q1, 1)\nlagrangian L = q1d^2\n\
                    check conservation X L ; rhs = -q1*P\n";
        let p = parse_problem(text).unwrap();
        let rhs = p.directives[0].value.expr("rhs").unwrap();
        let ctx = &p.ctx;
        assert_eq!(*rhs, -(ctx.u(0) * Expr::parameter("P")));
    }
}
