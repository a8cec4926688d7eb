//! Scenario files: a line-oriented text format with sections [params],
//! [group], [sections], [poisson], [sra] and [checks].

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use orbifold_core::poisson::Route;
use orbifold_core::sra::{HbarExponent, SRAContext};
use orbifold_core::{CrossedElement, Cyc, GroupActionContext, Mat, Multivector, MultivectorSection, Poly};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{file}:{line}:{column}: syntax error: {message}")]
    Syntax { file: String, line: usize, column: usize, message: String },
    #[error("{file}: {object}: {message}")]
    Semantic { file: String, object: String, message: String },
    #[error("{file}: {message}")]
    Io { file: String, message: String },
}

#[derive(Clone, Debug)]
pub struct Checks {
    pub degree: u32,
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    pub route: Option<Route>,
    pub exponent: HbarExponent,
    pub expect_h2: Option<usize>,
}

impl Default for Checks {
    fn default() -> Self {
        Checks { degree: 4, order: 2, samples: 20, seed: 0, route: None, exponent: HbarExponent::Halved, expect_h2: None }
    }
}

pub struct Scenario {
    pub name: String,
    pub ctx: Arc<GroupActionContext>,
    pub vars: Vec<String>,
    pub generator_names: Vec<String>,
    pub params: BTreeMap<String, Cyc>,
    pub sections: Vec<(String, MultivectorSection)>,
    pub poisson: Vec<(String, MultivectorSection)>,
    pub sra: Option<Arc<SRAContext>>,
    pub checks: Checks,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    /// Element label written with the scenario's generator names.
    pub fn label(&self, g: usize) -> String {
        let raw = self.ctx.label(g);
        if raw == "e" {
            return raw.to_string();
        }
        raw.split('*')
            .map(|f| {
                let (base, pow) = match f.split_once('^') {
                    Some((b, p)) => (b, Some(p)),
                    None => (f, None),
                };
                let name = base[1..]
                    .parse::<usize>()
                    .ok()
                    .and_then(|i| self.generator_names.get(i - 1))
                    .cloned()
                    .unwrap_or_else(|| base.to_string());
                match pow {
                    Some(p) => format!("{}^{}", name, p),
                    None => name,
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn format_poly(&self, p: &Poly) -> String {
        p.format_with(&self.vars)
    }

    pub fn format_mv(&self, m: &Multivector) -> String {
        m.format_with(&self.vars)
    }

    pub fn format_section(&self, s: &MultivectorSection) -> String {
        if s.is_zero() {
            return "0".into();
        }
        s.components()
            .iter()
            .map(|(g, m)| format!("[{}] {}", self.label(*g), self.format_mv(m)))
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn format_crossed(&self, a: &CrossedElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        a.components()
            .iter()
            .map(|(g, f)| {
                if *g == self.ctx.identity() {
                    format!("({})", self.format_poly(f))
                } else {
                    format!("({}) U[{}]", self.format_poly(f), self.label(*g))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn section(&self, name: &str) -> Option<&MultivectorSection> {
        self.sections.iter().chain(&self.poisson).find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    parse_scenario_with(path, &BTreeMap::new())
}

/// Parses a scenario file, replacing the listed [params] by the given
/// expressions.
pub fn parse_scenario_with(path: &Path, overrides: &BTreeMap<String, String>) -> Result<Scenario, ScenarioError> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io { file: file.clone(), message: e.to_string() })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| file.clone());
    parse_scenario_str(&text, &name, &file, overrides)
}

pub fn parse_scenario_str(
    text: &str,
    name: &str,
    file: &str,
    overrides: &BTreeMap<String, String>,
) -> Result<Scenario, ScenarioError> {
    Parser { file: file.to_string() }.run(text, name, overrides)
}

// ---------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Sym(char),
    DotDot,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

#[derive(Clone, Debug)]
struct Line {
    no: usize,
    /// Column of the first token (1-based).
    start: usize,
    tokens: Vec<Token>,
    end_col: usize,
}

type PResult<T> = Result<T, (usize, String)>;

fn lex(text: &str, offset: usize) -> PResult<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = offset + i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let v: String = chars[s..i].iter().collect();
            let v = v.parse::<i64>().map_err(|_| (col, format!("integer literal {} is too large", v)))?;
            out.push(Token { tok: Tok::Num(v), col });
        } else if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[s..i].iter().collect()), col });
        } else if c == '.' {
            if chars.get(i + 1) == Some(&'.') {
                out.push(Token { tok: Tok::DotDot, col });
                i += 2;
            } else {
                return Err((col, "unexpected '.'; decimals are not supported, write p/q".into()));
            }
        } else if "+-*/^()[],;:|=".contains(c) {
            out.push(Token { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err((col, format!("unexpected character '{}'", c)));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- values

#[derive(Clone, Debug)]
enum Val {
    S(Cyc),
    P(Poly),
    M(Multivector),
}

struct Env<'a> {
    n: usize,
    vars: &'a [String],
    params: &'a BTreeMap<String, Cyc>,
    locals: Vec<(String, i64)>,
}

impl Env<'_> {
    fn poly(&self, v: Val) -> Option<Poly> {
        match v {
            Val::S(c) => Some(Poly::constant(self.n, c)),
            Val::P(p) => Some(p),
            Val::M(_) => None,
        }
    }

    fn add(&self, a: Val, b: Val, col: usize) -> PResult<Val> {
        Ok(match (a, b) {
            (Val::S(x), Val::S(y)) => Val::S(&x + &y),
            (Val::M(x), Val::M(y)) => Val::M(x.add(&y)),
            (Val::M(x), Val::S(y)) | (Val::S(y), Val::M(x)) if y.is_zero() => Val::M(x),
            (Val::M(_), _) | (_, Val::M(_)) => return Err((col, "cannot add a function and a multivector".into())),
            (x, y) => Val::P(self.poly(x).unwrap().add(&self.poly(y).unwrap())),
        })
    }

    fn neg(&self, a: Val) -> Val {
        match a {
            Val::S(x) => Val::S(-x),
            Val::P(p) => Val::P(p.neg()),
            Val::M(m) => Val::M(m.neg()),
        }
    }

    fn mul(&self, a: Val, b: Val) -> Val {
        match (a, b) {
            (Val::S(x), Val::S(y)) => Val::S(&x * &y),
            (Val::S(c), Val::P(p)) | (Val::P(p), Val::S(c)) => Val::P(p.scale(&c)),
            (Val::P(p), Val::P(q)) => Val::P(p.mul(&q)),
            (Val::S(c), Val::M(m)) | (Val::M(m), Val::S(c)) => Val::M(m.scale(&c)),
            (Val::P(p), Val::M(m)) | (Val::M(m), Val::P(p)) => Val::M(m.scale_poly(&p)),
            (Val::M(x), Val::M(y)) => Val::M(x.wedge(&y)),
        }
    }

    fn div(&self, a: Val, b: Val, col: usize) -> PResult<Val> {
        let d = match b {
            Val::S(d) => d,
            _ => return Err((col, "only division by a constant is supported".into())),
        };
        let inv = d.inv().map_err(|_| (col, "division by zero".to_string()))?;
        Ok(self.mul(a, Val::S(inv)))
    }

    fn pow(&self, a: Val, e: i64, col: usize) -> PResult<Val> {
        match a {
            Val::S(x) => x.powi(e).map(Val::S).map_err(|_| (col, "zero raised to a negative power".into())),
            Val::P(p) if e >= 0 => Ok(Val::P(p.pow(e as u32))),
            Val::P(_) => Err((col, "negative power of a polynomial".into())),
            Val::M(_) => Err((col, "powers of multivectors are not defined; use products".into())),
        }
    }
}

// ---------------------------------------------------------------- expressions

struct Expr<'a, 'e> {
    toks: &'a [Token],
    pos: usize,
    end_col: usize,
    env: &'e Env<'e>,
}

impl<'a, 'e> Expr<'a, 'e> {
    fn new(toks: &'a [Token], end_col: usize, env: &'e Env<'e>) -> Self {
        Expr { toks, pos: 0, end_col, env }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.is_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err((self.col(), format!("expected '{}'", c)))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err((self.col(), "unexpected trailing input".into()))
        }
    }

    fn expr(&mut self) -> PResult<Val> {
        let mut acc = self.term()?;
        loop {
            let col = self.col();
            if self.is_sym('+') {
                self.pos += 1;
                let b = self.term()?;
                acc = self.env.add(acc, b, col)?;
            } else if self.is_sym('-') {
                self.pos += 1;
                let b = self.term()?;
                let b = self.env.neg(b);
                acc = self.env.add(acc, b, col)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> PResult<Val> {
        let mut acc = self.unary()?;
        loop {
            let col = self.col();
            if self.is_sym('*') {
                self.pos += 1;
                let b = self.unary()?;
                acc = self.env.mul(acc, b);
            } else if self.is_sym('/') {
                self.pos += 1;
                let b = self.unary()?;
                acc = self.env.div(acc, b, col)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> PResult<Val> {
        if self.is_sym('-') {
            self.pos += 1;
            let v = self.unary()?;
            return Ok(self.env.neg(v));
        }
        if self.is_sym('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Val> {
        let base = self.primary()?;
        if self.is_sym('^') {
            self.pos += 1;
            let col = self.col();
            let neg = if self.is_sym('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self.primary()?;
            let e = integer(&e).ok_or((col, "exponent must be an integer constant".to_string()))?;
            return self.env.pow(base, if neg { -e } else { e }, col);
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Val> {
        let col = self.col();
        let tok = self.peek().cloned().ok_or((col, "expected an expression".to_string()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Val::S(Cyc::from_int(v))),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Ident(id) => self.ident(&id, col),
            _ => Err((col, "expected an expression".into())),
        }
    }

    fn ident(&mut self, id: &str, col: usize) -> PResult<Val> {
        let env = self.env;
        if let Some((_, v)) = env.locals.iter().rev().find(|(n, _)| n == id) {
            return Ok(Val::S(Cyc::from_int(*v)));
        }
        if let Some(v) = env.params.get(id) {
            return Ok(Val::S(v.clone()));
        }
        if let Some(i) = env.vars.iter().position(|v| v == id) {
            return Ok(Val::P(Poly::var(env.n, i)));
        }
        match id {
            "zeta" if self.is_sym('(') => {
                self.pos += 1;
                let c = self.col();
                let v = self.expr()?;
                self.expect_sym(')')?;
                match integer(&v) {
                    Some(k) if k > 0 => Ok(Val::S(Cyc::root_of_unity(k as u32, 1))),
                    _ => Err((c, "zeta(N) needs a positive integer N".into())),
                }
            }
            "d" if self.is_sym('[') => {
                self.pos += 1;
                let mut idx = Vec::new();
                loop {
                    let c = self.col();
                    match self.peek().cloned() {
                        Some(Tok::Ident(v)) => match env.vars.iter().position(|x| *x == v) {
                            Some(i) => idx.push(i),
                            None => return Err((c, format!("unknown coordinate '{}'", v))),
                        },
                        _ => return Err((c, "expected a coordinate name".into())),
                    }
                    self.pos += 1;
                    if self.is_sym(',') {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.expect_sym(']')?;
                if env.n == 0 {
                    return Err((col, "multivectors need the [group] dimension".into()));
                }
                Ok(Val::M(Multivector::term(Poly::one(env.n), &idx)))
            }
            "i" => Ok(Val::S(Cyc::root_of_unity(4, 1))),
            _ => Err((col, format!("unknown name '{}'", id))),
        }
    }
}

fn integer(v: &Val) -> Option<i64> {
    match v {
        Val::S(c) => c.as_integer(),
        Val::P(p) if p.is_constant() => p.constant_term().as_integer(),
        _ => None,
    }
}

// ---------------------------------------------------------------- file parser

const SECTIONS: [&str; 6] = ["params", "group", "sections", "poisson", "sra", "checks"];

struct Parser {
    file: String,
}

struct Comp<'a> {
    word: &'a [Token],
    value: &'a [Token],
    loops: Vec<(String, &'a [Token], usize)>,
    col: usize,
}

impl Parser {
    fn syntax(&self, line: usize, (column, message): (usize, String)) -> ScenarioError {
        ScenarioError::Syntax { file: self.file.clone(), line, column, message }
    }

    fn semantic(&self, object: impl Into<String>, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Semantic { file: self.file.clone(), object: object.into(), message: message.into() }
    }

    fn run(&self, text: &str, name: &str, overrides: &BTreeMap<String, String>) -> Result<Scenario, ScenarioError> {
        let mut by_section: BTreeMap<&'static str, Vec<Line>> = BTreeMap::new();
        let mut current: Option<&'static str> = None;
        let mut seen = false;
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim();
            if trimmed.is_empty() {
                continue;
            }
            seen = true;
            let start = body.len() - body.trim_start().len() + 1;
            if trimmed.starts_with('[') {
                if !trimmed.ends_with(']') {
                    return Err(self.syntax(no, (start, "unterminated section header".into())));
                }
                let s = trimmed[1..trimmed.len() - 1].trim();
                current = Some(
                    *SECTIONS
                        .iter()
                        .find(|x| **x == s)
                        .ok_or_else(|| self.syntax(no, (start + 1, format!("unknown section [{}]", s))))?,
                );
                if by_section.contains_key(current.unwrap()) {
                    return Err(self.syntax(no, (start, format!("section [{}] appears twice", s))));
                }
                by_section.insert(current.unwrap(), Vec::new());
                continue;
            }
            let sec = current.ok_or_else(|| self.syntax(no, (start, "content before the first section header".into())))?;
            let tokens = lex(body, 0).map_err(|e| self.syntax(no, e))?;
            by_section.get_mut(sec).unwrap().push(Line { no, start, tokens, end_col: body.len() + 1 });
        }
        if !seen {
            return Err(self.syntax(1, (1, "empty scenario".into())));
        }
        let empty = Vec::new();
        let lines = |s: &str| by_section.get(s).unwrap_or(&empty);

        let params = self.params(lines("params"), overrides)?;
        if !by_section.contains_key("group") {
            return Err(self.semantic("group", "missing [group] section"));
        }
        let (ctx, vars, generator_names) = self.group(lines("group"), &params)?;
        let env = Env { n: ctx.dim(), vars: &vars, params: &params, locals: Vec::new() };
        let sections = self.named_sections(lines("sections"), &ctx, &env, &generator_names)?;
        let poisson = self.named_sections(lines("poisson"), &ctx, &env, &generator_names)?;
        let sra = if by_section.contains_key("sra") {
            Some(Arc::new(self.sra(lines("sra"), &ctx, &env, &generator_names)?))
        } else {
            None
        };
        let checks = self.checks(lines("checks"), &env)?;
        Ok(Scenario { name: name.to_string(), ctx, vars, generator_names, params, sections, poisson, sra, checks })
    }

    /// Splits `key = rest` (also `key += rest`, `gen name = rest`).
    fn key_value<'l>(&self, line: &'l Line) -> Result<(Vec<String>, bool, &'l [Token], usize), ScenarioError> {
        let mut keys = Vec::new();
        let mut i = 0;
        while let Some(Token { tok: Tok::Ident(k), .. }) = line.tokens.get(i) {
            keys.push(k.clone());
            i += 1;
        }
        if keys.is_empty() {
            let col = line.tokens.first().map(|t| t.col).unwrap_or(line.start);
            return Err(self.syntax(line.no, (col, "expected a name".into())));
        }
        let append = matches!(line.tokens.get(i), Some(Token { tok: Tok::Sym('+'), .. }));
        if append {
            i += 1;
        }
        match line.tokens.get(i) {
            Some(Token { tok: Tok::Sym('='), col }) => Ok((keys, append, &line.tokens[i + 1..], *col + 1)),
            Some(t) => Err(self.syntax(line.no, (t.col, "expected '='".into()))),
            None => Err(self.syntax(line.no, (line.end_col, "expected '='".into()))),
        }
    }

    fn scalar(&self, line: &Line, toks: &[Token], env: &Env) -> Result<Cyc, ScenarioError> {
        let mut p = Expr::new(toks, line.end_col, env);
        let v = p.expr().and_then(|v| p.finish().map(|_| v)).map_err(|e| self.syntax(line.no, e))?;
        match v {
            Val::S(c) => Ok(c),
            Val::P(q) if q.is_constant() => Ok(q.constant_term()),
            _ => Err(self.syntax(line.no, (toks.first().map(|t| t.col).unwrap_or(line.end_col), "expected a constant".into()))),
        }
    }

    fn int(&self, line: &Line, toks: &[Token], env: &Env) -> Result<i64, ScenarioError> {
        let c = self.scalar(line, toks, env)?;
        c.as_integer()
            .ok_or_else(|| self.syntax(line.no, (toks.first().map(|t| t.col).unwrap_or(line.end_col), "expected an integer".into())))
    }

    fn params(&self, lines: &[Line], overrides: &BTreeMap<String, String>) -> Result<BTreeMap<String, Cyc>, ScenarioError> {
        let mut params = BTreeMap::new();
        for line in lines {
            let (keys, _, rest, _) = self.key_value(line)?;
            if keys.len() != 1 {
                return Err(self.syntax(line.no, (line.start, "expected 'name = value'".into())));
            }
            let env = Env { n: 0, vars: &[], params: &params, locals: Vec::new() };
            let v = match overrides.get(&keys[0]) {
                Some(text) => {
                    let toks = lex(text, 0).map_err(|(c, m)| self.semantic(&keys[0], format!("override, column {}: {}", c, m)))?;
                    let l = Line { no: line.no, start: 1, end_col: text.len() + 1, tokens: toks.clone() };
                    self.scalar(&l, &toks, &env).map_err(|e| self.semantic(&keys[0], format!("override: {}", e)))?
                }
                None => self.scalar(line, rest, &env)?,
            };
            params.insert(keys[0].clone(), v);
        }
        for k in overrides.keys() {
            if !params.contains_key(k) {
                return Err(self.semantic(k, "override names no [params] entry"));
            }
        }
        Ok(params)
    }

    fn matrix(&self, line: &Line, toks: &[Token], env: &Env) -> Result<Mat, ScenarioError> {
        let err = |c: usize, m: &str| self.syntax(line.no, (c, m.to_string()));
        let first = toks.first().ok_or_else(|| err(line.end_col, "expected a matrix"))?;
        // Entries are split at top-level commas inside the brackets.
        let split = |inner: &[Token]| -> Vec<(usize, usize)> {
            let mut parts = Vec::new();
            let (mut depth, mut s) = (0i32, 0);
            for (i, t) in inner.iter().enumerate() {
                match t.tok {
                    Tok::Sym('(') | Tok::Sym('[') => depth += 1,
                    Tok::Sym(')') | Tok::Sym(']') => depth -= 1,
                    Tok::Sym(',') if depth == 0 => {
                        parts.push((s, i));
                        s = i + 1;
                    }
                    _ => {}
                }
            }
            parts.push((s, inner.len()));
            parts
        };
        let closing = |open: usize| -> Option<usize> {
            let mut depth = 0i32;
            for (i, t) in toks.iter().enumerate().skip(open) {
                match t.tok {
                    Tok::Sym('(') | Tok::Sym('[') => depth += 1,
                    Tok::Sym(')') | Tok::Sym(']') => {
                        depth -= 1;
                        if depth == 0 {
                            return Some(i);
                        }
                    }
                    _ => {}
                }
            }
            None
        };
        match &first.tok {
            Tok::Ident(f) if f == "diag" => {
                if toks.get(1).map(|t| &t.tok) != Some(&Tok::Sym('(')) {
                    return Err(err(toks.get(1).map(|t| t.col).unwrap_or(line.end_col), "expected '(' after diag"));
                }
                let close = closing(1).ok_or_else(|| err(line.end_col, "unbalanced parentheses"))?;
                if close + 1 != toks.len() {
                    return Err(err(toks[close + 1].col, "unexpected trailing input"));
                }
                let inner = &toks[2..close];
                let mut d = Vec::new();
                for (s, e) in split(inner) {
                    d.push(self.scalar(line, &inner[s..e], env)?);
                }
                Ok(Mat::diag(&d))
            }
            Tok::Sym('[') => {
                let close = closing(0).ok_or_else(|| err(line.end_col, "unbalanced brackets"))?;
                if close + 1 != toks.len() {
                    return Err(err(toks[close + 1].col, "unexpected trailing input"));
                }
                let inner = &toks[1..close];
                let mut rows = Vec::new();
                for (s, e) in split(inner) {
                    let row = &inner[s..e];
                    if row.first().map(|t| &t.tok) != Some(&Tok::Sym('[')) || row.last().map(|t| &t.tok) != Some(&Tok::Sym(']')) {
                        return Err(err(row.first().map(|t| t.col).unwrap_or(line.end_col), "expected a row [a, b, ...]"));
                    }
                    let entries = &row[1..row.len() - 1];
                    let mut r = Vec::new();
                    for (a, b) in split(entries) {
                        r.push(self.scalar(line, &entries[a..b], env)?);
                    }
                    rows.push(r);
                }
                let n = rows.len();
                if let Some(r) = rows.iter().find(|r| r.len() != n) {
                    return Err(err(first.col, &format!("matrix is not square: {} rows, a row of length {}", n, r.len())));
                }
                Mat::from_rows(rows).map_err(|e| err(first.col, &e.to_string()))
            }
            _ => Err(err(first.col, "expected diag(...) or [[...], ...]")),
        }
    }

    fn group(
        &self,
        lines: &[Line],
        params: &BTreeMap<String, Cyc>,
    ) -> Result<(Arc<GroupActionContext>, Vec<String>, Vec<String>), ScenarioError> {
        let env = Env { n: 0, vars: &[], params, locals: Vec::new() };
        let mut vars: Option<Vec<String>> = None;
        let mut dim: Option<usize> = None;
        let mut gens: Vec<(String, Mat)> = Vec::new();
        let mut orders: Option<Vec<u32>> = None;
        for line in lines {
            let (keys, _, rest, _) = self.key_value(line)?;
            match (keys[0].as_str(), keys.len()) {
                ("dim", 1) => dim = Some(self.int(line, rest, &env)?.max(0) as usize),
                ("vars", 1) => {
                    let mut v = Vec::new();
                    for t in rest {
                        match &t.tok {
                            Tok::Ident(x) if x == "d" || x == "i" || x == "zeta" || x == "e" => {
                                return Err(self.syntax(line.no, (t.col, format!("'{}' is reserved", x))))
                            }
                            Tok::Ident(x) if params.contains_key(x) => {
                                return Err(self.syntax(line.no, (t.col, format!("'{}' is already a parameter", x))))
                            }
                            Tok::Ident(x) => v.push(x.clone()),
                            _ => return Err(self.syntax(line.no, (t.col, "expected a coordinate name".into()))),
                        }
                    }
                    vars = Some(v);
                }
                ("gen", 2) => {
                    let m = self.matrix(line, rest, &env)?;
                    if gens.iter().any(|(n, _)| *n == keys[1]) {
                        return Err(self.semantic(format!("generator {}", keys[1]), "declared twice"));
                    }
                    gens.push((keys[1].clone(), m));
                }
                ("abelian", 1) => {
                    let mut o = Vec::new();
                    let mut s = 0;
                    for i in 0..=rest.len() {
                        if i == rest.len() || rest[i].tok == Tok::Sym(',') {
                            let k = self.int(line, &rest[s..i], &env)?;
                            if k < 1 {
                                return Err(self.syntax(line.no, (rest[s].col, "orders must be positive".into())));
                            }
                            o.push(k as u32);
                            s = i + 1;
                        }
                    }
                    orders = Some(o);
                }
                _ => return Err(self.syntax(line.no, (line.start, format!("unknown [group] entry '{}'", keys.join(" "))))),
            }
        }
        if gens.is_empty() {
            return Err(self.semantic("group", "no generators"));
        }
        let n = gens[0].1.dim();
        for (name, m) in &gens {
            if m.dim() != n {
                return Err(self.semantic(format!("generator {}", name), format!("dimension {} differs from {}", m.dim(), n)));
            }
            if m.det().is_zero() {
                return Err(self.semantic(format!("generator {}", name), "matrix is not invertible"));
            }
        }
        if let Some(d) = dim {
            if d != n {
                return Err(self.semantic("group", format!("dim = {} but generators are {}x{}", d, n, n)));
            }
        }
        let vars = vars.unwrap_or_else(|| (1..=n).map(|i| format!("x{}", i)).collect());
        if vars.len() != n {
            return Err(self.semantic("vars", format!("{} names for dimension {}", vars.len(), n)));
        }
        let mats: Vec<Mat> = gens.iter().map(|(_, m)| m.clone()).collect();
        let ctx = match orders {
            Some(o) => {
                if o.len() != gens.len() {
                    return Err(self.semantic("abelian", format!("{} orders for {} generators", o.len(), gens.len())));
                }
                GroupActionContext::build_abelian(&o, &mats)
            }
            None => GroupActionContext::build(&mats),
        }
        .map_err(|e| self.semantic("group", e.to_string()))?;
        Ok((Arc::new(ctx), vars, gens.into_iter().map(|(n, _)| n).collect()))
    }

    /// `word: value | k = a..b, l = c..d ; ...`
    fn components<'l>(&self, line: &Line, toks: &'l [Token]) -> Result<Vec<Comp<'l>>, ScenarioError> {
        let mut out = Vec::new();
        for part in toks.split(|t| t.tok == Tok::Sym(';')) {
            let col = part.first().map(|t| t.col).unwrap_or(line.end_col);
            if part.is_empty() {
                return Err(self.syntax(line.no, (col, "empty component".into())));
            }
            let colon = part
                .iter()
                .position(|t| t.tok == Tok::Sym(':'))
                .ok_or_else(|| self.syntax(line.no, (col, "expected 'element: value'".into())))?;
            let bar = part.iter().position(|t| t.tok == Tok::Sym('|')).unwrap_or(part.len());
            if bar < colon {
                return Err(self.syntax(line.no, (part[bar].col, "'|' before ':'".into())));
            }
            let mut loops = Vec::new();
            if bar < part.len() {
                for range in part[bar + 1..].split(|t| t.tok == Tok::Sym(',')) {
                    let c = range.first().map(|t| t.col).unwrap_or(line.end_col);
                    match (range.first().map(|t| &t.tok), range.get(1).map(|t| &t.tok)) {
                        (Some(Tok::Ident(v)), Some(Tok::Sym('='))) => loops.push((v.clone(), &range[2..], c)),
                        _ => return Err(self.syntax(line.no, (c, "expected 'name = lo..hi'".into()))),
                    }
                }
            }
            out.push(Comp { word: &part[..colon], value: &part[colon + 1..bar], loops, col });
        }
        Ok(out)
    }

    /// Every assignment of the loop variables, in order.
    fn expand(&self, line: &Line, comp: &Comp, env: &Env) -> Result<Vec<Vec<(String, i64)>>, ScenarioError> {
        let mut acc: Vec<Vec<(String, i64)>> = vec![Vec::new()];
        for (var, range, col) in &comp.loops {
            let dd = range
                .iter()
                .position(|t| t.tok == Tok::DotDot)
                .ok_or_else(|| self.syntax(line.no, (*col, "expected a range lo..hi".into())))?;
            let mut next = Vec::new();
            for a in acc {
                let e = Env { n: env.n, vars: env.vars, params: env.params, locals: a.clone() };
                let lo = self.int(line, &range[..dd], &e)?;
                let hi = self.int(line, &range[dd + 1..], &e)?;
                for k in lo..=hi {
                    let mut b = a.clone();
                    b.push((var.clone(), k));
                    next.push(b);
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    fn word(&self, line: &Line, toks: &[Token], env: &Env, gens: &[String], ctx: &GroupActionContext) -> Result<usize, ScenarioError> {
        let col0 = toks.first().map(|t| t.col).unwrap_or(line.end_col);
        if toks.is_empty() {
            return Err(self.syntax(line.no, (col0, "expected a group element".into())));
        }
        if toks.len() == 1 && matches!(&toks[0].tok, Tok::Ident(x) if x == "e") {
            return Ok(ctx.identity());
        }
        let mut word = Vec::new();
        for factor in toks.split(|t| t.tok == Tok::Sym('*')) {
            let c = factor.first().map(|t| t.col).unwrap_or(line.end_col);
            let gi = match factor.first().map(|t| &t.tok) {
                Some(Tok::Ident(g)) => gens
                    .iter()
                    .position(|x| x == g)
                    .ok_or_else(|| self.syntax(line.no, (c, format!("unknown generator '{}'", g))))?,
                _ => return Err(self.syntax(line.no, (c, "expected a generator name".into()))),
            };
            let p = match factor.get(1).map(|t| &t.tok) {
                None => 1,
                Some(Tok::Sym('^')) => self.int(line, &factor[2..], env)?,
                Some(_) => return Err(self.syntax(line.no, (factor[1].col, "expected '^' or '*'".into()))),
            };
            word.push((gi, p));
        }
        ctx.element_from_word(&word).map_err(|e| self.syntax(line.no, (col0, e.to_string())))
    }

    fn value(&self, line: &Line, toks: &[Token], env: &Env, col: usize) -> Result<Val, ScenarioError> {
        if toks.is_empty() {
            return Err(self.syntax(line.no, (col, "expected a value".into())));
        }
        let mut p = Expr::new(toks, line.end_col, env);
        p.expr().and_then(|v| p.finish().map(|_| v)).map_err(|e| self.syntax(line.no, e))
    }

    fn named_sections(
        &self,
        lines: &[Line],
        ctx: &Arc<GroupActionContext>,
        env: &Env,
        gens: &[String],
    ) -> Result<Vec<(String, MultivectorSection)>, ScenarioError> {
        let n = ctx.dim();
        let mut out: Vec<(String, MultivectorSection)> = Vec::new();
        for line in lines {
            let (keys, append, rest, _) = self.key_value(line)?;
            if keys.len() != 1 {
                return Err(self.syntax(line.no, (line.start, "expected 'name = components'".into())));
            }
            let name = keys[0].clone();
            let mut s = MultivectorSection::zero(n);
            for comp in self.components(line, rest)? {
                for locals in self.expand(line, &comp, env)? {
                    let e = Env { n, vars: env.vars, params: env.params, locals };
                    let g = self.word(line, comp.word, &e, gens, ctx)?;
                    let m = match self.value(line, comp.value, &e, comp.col)? {
                        Val::M(m) => m,
                        v => Multivector::term(e.poly(v).expect("not a multivector"), &[]),
                    };
                    s.add_component(g, &m);
                }
            }
            match out.iter_mut().find(|(k, _)| *k == name) {
                Some((_, prev)) if append => *prev = prev.add(&s),
                Some(_) => return Err(self.semantic(&name, format!("declared twice (line {}); use += to extend", line.no))),
                None if append => return Err(self.semantic(&name, format!("'+=' before any '=' (line {})", line.no))),
                None => out.push((name, s)),
            }
        }
        for (name, s) in &out {
            s.check_model(ctx).map_err(|e| self.semantic(name, e.to_string()))?;
        }
        Ok(out)
    }

    fn sra(&self, lines: &[Line], ctx: &Arc<GroupActionContext>, env: &Env, gens: &[String]) -> Result<SRAContext, ScenarioError> {
        let mut omega = None;
        let mut t = Cyc::one();
        let mut c: BTreeMap<usize, Cyc> = BTreeMap::new();
        for line in lines {
            let (keys, _, rest, col) = self.key_value(line)?;
            match (keys[0].as_str(), keys.len()) {
                ("omega", 1) => omega = Some(self.matrix(line, rest, env)?),
                ("t", 1) => t = self.scalar(line, rest, env)?,
                ("c", 1) => {
                    for comp in self.components(line, rest)? {
                        for locals in self.expand(line, &comp, env)? {
                            let e = Env { n: env.n, vars: env.vars, params: env.params, locals };
                            let g = self.word(line, comp.word, &e, gens, ctx)?;
                            let v = self.scalar(line, comp.value, &e)?;
                            c.insert(g, v);
                        }
                    }
                }
                _ => return Err(self.syntax(line.no, (col, format!("unknown [sra] entry '{}'", keys.join(" "))))),
            }
        }
        let omega = omega.ok_or_else(|| self.semantic("sra", "omega is missing"))?;
        if omega.dim() != ctx.dim() {
            return Err(self.semantic("omega", format!("dimension {} differs from {}", omega.dim(), ctx.dim())));
        }
        SRAContext::with_class_parameters(ctx, omega, t, &c).map_err(|e| self.semantic("sra", e.to_string()))
    }

    fn checks(&self, lines: &[Line], env: &Env) -> Result<Checks, ScenarioError> {
        let mut ch = Checks::default();
        for line in lines {
            let (keys, _, rest, col) = self.key_value(line)?;
            let nonneg = |v: i64| -> Result<i64, ScenarioError> {
                if v < 0 {
                    Err(self.syntax(line.no, (col, "expected a non-negative integer".into())))
                } else {
                    Ok(v)
                }
            };
            let word = || match rest {
                [Token { tok: Tok::Ident(w), .. }] => Ok(w.as_str()),
                _ => Err(self.syntax(line.no, (col, "expected a single word".into()))),
            };
            match keys[0].as_str() {
                "degree" => ch.degree = nonneg(self.int(line, rest, env)?)? as u32,
                "order" => ch.order = nonneg(self.int(line, rest, env)?)? as usize,
                "samples" => ch.samples = nonneg(self.int(line, rest, env)?)? as usize,
                "seed" => ch.seed = nonneg(self.int(line, rest, env)?)? as u64,
                "expect_h2" => ch.expect_h2 = Some(nonneg(self.int(line, rest, env)?)? as usize),
                "route" => {
                    ch.route = Some(match word()? {
                        "evaluator" => Route::Evaluator,
                        "closed" => Route::ClosedForm,
                        w => return Err(self.syntax(line.no, (col, format!("unknown route '{}'", w)))),
                    })
                }
                "exponent" => {
                    ch.exponent = match word()? {
                        "halved" => HbarExponent::Halved,
                        "printed" => HbarExponent::Printed,
                        w => return Err(self.syntax(line.no, (col, format!("unknown exponent convention '{}'", w)))),
                    }
                }
                k => return Err(self.syntax(line.no, (line.start, format!("unknown [checks] entry '{}'", k)))),
            }
        }
        Ok(ch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        parse_scenario_str(text, "t", "t.scn", &BTreeMap::new())
    }

    #[test]
    fn empty_file_is_a_syntax_error() {
        assert!(matches!(parse(""), Err(ScenarioError::Syntax { line: 1, column: 1, .. })));
        assert!(matches!(parse("# only a comment\n\n"), Err(ScenarioError::Syntax { .. })));
    }

    #[test]
    fn reports_line_and_column() {
        let text = "[group]\ngen s = diag(-1)\n[sections]\nxi = e: x1 * d[x1] ; s: 3 $ 4\n";
        match parse(text) {
            Err(ScenarioError::Syntax { line, column, .. }) => assert_eq!((line, column), (4, 27)),
            other => panic!("{:?}", other.err()),
        }
    }

    #[test]
    fn literals_and_ranges() {
        let text = "[params]\nn = 3\nc0 = 2/3\n[group]\nvars = x y\ngen g = diag(zeta(n), zeta(n)^-1)\n\
                    [sections]\npi = e: d[x, y] ; g^k: c0 * k * d[x, y] | k = 1..n-1\n";
        let s = parse(text).unwrap();
        assert_eq!(s.ctx.size(), 3);
        let pi = s.section("pi").unwrap();
        let g2 = s.ctx.element_from_word(&[(0, 2)]).unwrap();
        assert_eq!(pi.component(g2).coeff(0b11).constant_term(), Cyc::frac(4, 3));
        assert_eq!(s.label(g2), "g^2");
    }

    #[test]
    fn semantic_errors_name_the_object() {
        let text = "[group]\ngen a = [[1, 0], [0, 0]]\n";
        match parse(text) {
            Err(ScenarioError::Semantic { object, .. }) => assert_eq!(object, "generator a"),
            other => panic!("{:?}", other.err()),
        }
        let text = "[group]\ngen a = diag(-1, 1)\ngen b = diag(1, -1, 1)\n";
        assert!(matches!(parse(text), Err(ScenarioError::Semantic { .. })));
    }

    #[test]
    fn overrides_replace_params() {
        let text = "[params]\nn = 2\n[group]\ngen g = diag(zeta(n), zeta(n)^-1)\n";
        let mut o = BTreeMap::new();
        o.insert("n".to_string(), "5".to_string());
        let s = parse_scenario_str(text, "t", "t", &o).unwrap();
        assert_eq!(s.ctx.size(), 5);
    }
}
