//! Text input: JSON documents for polynomials, certified series and built-in
//! families, and plain infix expressions such as `x^3 + x*y + y^2`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;
use serde_json::json;

use crate::error::{Result, ZetaError};
use crate::padic::PrimeContext;
use crate::series::{geometric_tail, Certificate, Exponent, PolySeries, SeriesSpec};
use crate::truncation::family;

/// A parsed input.
#[derive(Debug, Clone)]
pub enum Input {
    Poly(PolySeries),
    Series(SeriesSpec),
}

impl Input {
    pub fn n(&self) -> usize {
        match self {
            Input::Poly(f) => f.n(),
            Input::Series(s) => s.n(),
        }
    }

    /// The prime fixed by the input itself, if any.
    pub fn p(&self) -> Option<u64> {
        match self {
            Input::Poly(_) => None,
            Input::Series(s) => Some(s.p()),
        }
    }

    /// The input as a polynomial, when it is one.
    pub fn as_polynomial(&self) -> Option<PolySeries> {
        match self {
            Input::Poly(f) => Some(f.clone()),
            Input::Series(s) if s.is_polynomial() => Some(s.truncate(s.explicit_degree())),
            Input::Series(_) => None,
        }
    }

    /// The input as a series over `p`.
    pub fn into_series(self, p: u64) -> Result<SeriesSpec> {
        match self {
            Input::Poly(f) => SeriesSpec::from_polynomial(f.render(), f, p),
            Input::Series(s) if s.p() == p => Ok(s),
            Input::Series(s) => Err(ZetaError::Validation(format!(
                "series is defined for p = {}, asked for p = {p}",
                s.p()
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Int(i64),
    Text(String),
}

impl CoeffJson {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            CoeffJson::Int(i) => Ok(BigRational::from_integer((*i).into())),
            CoeffJson::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    #[serde(alias = "exponent")]
    exp: Vec<u32>,
    coeff: CoeffJson,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailJson {
    kind: String,
    #[serde(alias = "multiple_of")]
    base: Vec<u32>,
    from_degree: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputJson {
    name: Option<String>,
    family: Option<String>,
    p: Option<u64>,
    n: Option<usize>,
    terms: Option<Vec<TermJson>>,
    expr: Option<String>,
    tail: Option<TailJson>,
    rho: Option<CoeffJson>,
    c: Option<CoeffJson>,
    support_bound: Option<u32>,
}

/// Parses `"3"`, `"-1/2"` and similar.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let r = BigRational::from_str(t)
        .map_err(|_| ZetaError::Validation(format!("'{s}' is not a rational number")))?;
    Ok(r)
}

/// Parses an input document. `p` is the prime from the command line, if any;
/// it must agree with a prime stated in the document.
pub fn parse_input(text: &str, p: Option<u64>) -> Result<Input> {
    let trimmed = text.trim_start();
    let input = if trimmed.starts_with('{') {
        let doc: InputJson = serde_json::from_str(text).map_err(|e| ZetaError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        from_json(doc, p)?
    } else {
        Input::Poly(parse_expression(text, None)?)
    };
    if let Some(p) = p {
        PrimeContext::new(p)?;
        if let Some(q) = input.p() {
            if q != p {
                return Err(ZetaError::Validation(format!(
                    "input is defined for p = {q}, asked for p = {p}"
                )));
            }
        }
        if let Input::Poly(f) = &input {
            f.check_p_integral(p)?;
        }
    }
    Ok(input)
}

fn from_json(doc: InputJson, cli_p: Option<u64>) -> Result<Input> {
    let p = match (doc.p, cli_p) {
        (Some(a), Some(b)) if a != b => {
            return Err(ZetaError::Validation(format!(
                "document says p = {a}, command line says p = {b}"
            )))
        }
        (a, b) => a.or(b),
    };
    if let Some(name) = &doc.family {
        let p = p.ok_or_else(|| ZetaError::Validation("a family needs a prime p".into()))?;
        return Ok(Input::Series(family(name, p)?));
    }
    let explicit = match (&doc.terms, &doc.expr) {
        (Some(_), Some(_)) => {
            return Err(ZetaError::Validation(
                "give either 'terms' or 'expr', not both".into(),
            ))
        }
        (Some(terms), None) => {
            let n = doc
                .n
                .or_else(|| terms.first().map(|t| t.exp.len()))
                .ok_or_else(|| {
                    ZetaError::Validation("cannot infer n from an empty term list".into())
                })?;
            if n == 0 {
                return Err(ZetaError::Validation("n must be at least 1".into()));
            }
            let parsed = terms
                .iter()
                .map(|t| Ok((Exponent(t.exp.clone()), t.coeff.to_rational()?)))
                .collect::<Result<Vec<_>>>()?;
            PolySeries::from_terms(n, parsed)?
        }
        (None, Some(expr)) => parse_expression(expr, doc.n)?,
        (None, None) => {
            return Err(ZetaError::Validation(
                "input needs 'terms', 'expr' or 'family'".into(),
            ))
        }
    };
    let Some(tail) = doc.tail else {
        if doc.rho.is_some() || doc.c.is_some() {
            return Err(ZetaError::Validation(
                "certificate given without a tail".into(),
            ));
        }
        return match p {
            Some(p) if doc.p.is_some() => {
                let name = doc.name.unwrap_or_else(|| explicit.render());
                Ok(Input::Series(SeriesSpec::from_polynomial(
                    name, explicit, p,
                )?))
            }
            _ => Ok(Input::Poly(explicit)),
        };
    };
    let p = p.ok_or_else(|| ZetaError::Validation("a series needs a prime p".into()))?;
    PrimeContext::new(p)?;
    if tail.kind != "geometric" {
        return Err(ZetaError::Validation(format!(
            "unknown tail kind '{}'",
            tail.kind
        )));
    }
    if tail.base.len() != explicit.n() {
        return Err(ZetaError::Validation(
            "tail base has the wrong arity".into(),
        ));
    }
    let base = Exponent(tail.base);
    let start = tail.from_degree.unwrap_or(base.degree()).max(1);
    let explicit_degree = (start - 1).max(explicit.degree().unwrap_or(0));
    let certificate = match (doc.rho, doc.c) {
        (Some(rho), Some(c)) => Some(Certificate::new(rho.to_rational()?, c.to_rational()?)?),
        (None, None) => None,
        _ => {
            return Err(ZetaError::Validation(
                "certificate needs both rho and c".into(),
            ))
        }
    };
    let name = doc.name.unwrap_or_else(|| "series".into());
    Ok(Input::Series(SeriesSpec::with_tail(
        name,
        p,
        explicit,
        explicit_degree,
        geometric_tail(p, base),
        certificate,
        doc.support_bound,
    )?))
}

/// The JSON term-list form of a polynomial.
pub fn poly_to_json(f: &PolySeries) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = f
        .terms()
        .map(|(w, c)| json!({"exp": w.0, "coeff": c.to_string()}))
        .collect();
    json!({"n": f.n(), "terms": terms})
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize, VarStyle),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarStyle {
    Letter,
    Indexed,
}

fn parse_error(text: &str, offset: usize, message: impl Into<String>) -> ZetaError {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.chars().count(), |i| before[i + 1..].chars().count())
        + 1;
    ZetaError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        let start = i;
        match ch {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = BigInt::from_str(&text[start..i]).expect("digits");
                out.push((Tok::Num(n), start));
                continue;
            }
            'x' | 'y' | 'z' | 'w' => {
                i += 1;
                if ch == 'x' && i < bytes.len() && bytes[i].is_ascii_digit() {
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let k: usize = text[start + 1..i]
                        .parse()
                        .map_err(|_| parse_error(text, start, "variable index too large"))?;
                    if k == 0 {
                        return Err(parse_error(text, start, "variables are numbered from x1"));
                    }
                    out.push((Tok::Var(k - 1, VarStyle::Indexed), start));
                } else {
                    let k = "xyzw".find(ch).unwrap();
                    out.push((Tok::Var(k, VarStyle::Letter), start));
                }
                continue;
            }
            '+' => out.push((Tok::Plus, start)),
            '-' => out.push((Tok::Minus, start)),
            '*' => out.push((Tok::Star, start)),
            '/' => out.push((Tok::Slash, start)),
            '^' => out.push((Tok::Caret, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            other => {
                return Err(parse_error(
                    text,
                    start,
                    format!("unexpected character '{other}'"),
                ))
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Expression tree; evaluated once the number of variables is known.
#[derive(Debug, Clone)]
enum Ast {
    Num(BigInt),
    Var(usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, usize),
    Pow(Box<Ast>, u32),
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text.len(), |(_, o)| *o)
    }

    fn err(&self, message: impl Into<String>) -> ZetaError {
        parse_error(self.text, self.offset(), message)
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?), at);
                }
                // juxtaposition: 3x, 2(x+1), x y
                Some(Tok::Num(_)) | Some(Tok::Var(..)) | Some(Tok::LParen) => {
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    let e = u32::try_from(&n).map_err(|_| self.err("exponent too large"))?;
                    self.pos += 1;
                    return Ok(Ast::Pow(Box::new(base), e));
                }
                _ => return Err(self.err("expected a non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Ast::Num(n))
            }
            Some(Tok::Var(k, _)) => {
                self.pos += 1;
                Ok(Ast::Var(k))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => Err(self.err("expected a number, variable or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn eval(ast: &Ast, n: usize, text: &str) -> Result<PolySeries> {
    Ok(match ast {
        Ast::Num(c) => constant(n, BigRational::from_integer(c.clone())),
        Ast::Var(k) => {
            let mut e = vec![0; n];
            e[*k] = 1;
            PolySeries::from_terms(n, [(Exponent(e), BigRational::one())])?
        }
        Ast::Neg(a) => eval(a, n, text)?.scale(&-BigRational::one()),
        Ast::Add(a, b) => eval(a, n, text)?.add(&eval(b, n, text)?),
        Ast::Sub(a, b) => eval(a, n, text)?.add(&eval(b, n, text)?.scale(&-BigRational::one())),
        Ast::Mul(a, b) => eval(a, n, text)?.mul(&eval(b, n, text)?),
        Ast::Div(a, b, at) => {
            let d = eval(b, n, text)?;
            let is_constant = d.terms().all(|(w, _)| w.degree() == 0);
            let c = d.constant_term();
            if !is_constant || c.is_zero() {
                return Err(parse_error(
                    text,
                    *at,
                    "can only divide by a nonzero constant",
                ));
            }
            eval(a, n, text)?.scale(&(BigRational::one() / c))
        }
        Ast::Pow(a, e) => {
            let base = eval(a, n, text)?;
            let mut acc = constant(n, BigRational::one());
            for _ in 0..*e {
                acc = acc.mul(&base);
            }
            acc
        }
    })
}

fn constant(n: usize, c: BigRational) -> PolySeries {
    PolySeries::from_terms(n, [(Exponent::zero(n), c)]).expect("arity matches")
}

/// Parses an infix polynomial. Variables are `x, y, z, w` or `x1, x2, ...`
/// (not mixed); the number of variables is the largest index used, or
/// `n` when that is given and larger.
pub fn parse_expression(text: &str, n: Option<usize>) -> Result<PolySeries> {
    let toks = tokenize(text)?;
    let mut styles = toks.iter().filter_map(|(t, _)| match t {
        Tok::Var(_, s) => Some(*s),
        _ => None,
    });
    if let Some(first) = styles.next() {
        if styles.any(|s| s != first) {
            return Err(parse_error(
                text,
                0,
                "do not mix x, y, z, w with x1, x2, ...",
            ));
        }
    }
    let used = toks
        .iter()
        .filter_map(|(t, _)| match t {
            Tok::Var(k, _) => Some(k + 1),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    let n = n.unwrap_or(0).max(used);
    let mut parser = Parser { text, toks, pos: 0 };
    let ast = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.err("unexpected token"));
    }
    eval(&ast, n, text)
}
