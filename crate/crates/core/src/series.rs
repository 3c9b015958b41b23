//! Polynomials and restricted power series over Z_p.
//!
//! A [`PolySeries`] is a finite polynomial with exact rational coefficients.
//! A [`SeriesSpec`] is a program for an infinite series: explicit terms up to
//! some degree, a pure coefficient oracle beyond it, and a valuation-growth
//! certificate `v_p(a_w) >= rho*|w| - c` that makes truncation and reduction
//! mod p^M finite computations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::padic::{rational_residue, valuation_rational, PAdicApprox, UniPoly};

/// A multi-index `w` in N^n.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Total degree |w|.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Coordinatewise `self >= other`.
    pub fn dominates(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn dot(&self, a: &[i64]) -> i64 {
        self.0.iter().zip(a).map(|(&w, &x)| w as i64 * x).sum()
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&w| w as i64).collect()
    }
}

/// All exponents in N^n of total degree exactly `d`, in lexicographic order.
pub fn exponents_of_degree(n: usize, d: u32) -> Vec<Exponent> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(Exponent(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in 0..=d {
            prefix.push(first);
            rec(n, d - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Exponent(Vec::new()));
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// A single term `a_w x^w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub exponent: Exponent,
    pub coefficient: BigRational,
}

/// A finite polynomial in `n` variables with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolySeries {
    n: usize,
    terms: BTreeMap<Exponent, BigRational>,
}

impl PolySeries {
    pub fn zero(n: usize) -> Self {
        PolySeries {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial, summing coefficients of repeated exponents and
    /// dropping zeros.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        let mut out = PolySeries::zero(n);
        for (w, c) in terms {
            if w.n() != n {
                return Err(ZetaError::Validation(format!(
                    "exponent {:?} has {} entries, expected {n}",
                    w.0,
                    w.n()
                )));
            }
            out.add_term(w, c);
        }
        Ok(out)
    }

    /// Convenience constructor with integer coefficients; panics on arity mismatch.
    pub fn from_int_terms(n: usize, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(
            n,
            terms
                .iter()
                .map(|(w, c)| (Exponent(w.to_vec()), BigRational::from_integer((*c).into()))),
        )
        .expect("arity matches")
    }

    /// `self + other`; both must have the same number of variables.
    pub fn add(&self, other: &PolySeries) -> PolySeries {
        assert_eq!(self.n, other.n, "arity mismatch");
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> PolySeries {
        let mut out = PolySeries::zero(self.n);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &PolySeries) -> PolySeries {
        assert_eq!(self.n, other.n, "arity mismatch");
        let mut out = PolySeries::zero(self.n);
        for (w, a) in &self.terms {
            for (u, b) in &other.terms {
                let e = Exponent(w.0.iter().zip(&u.0).map(|(x, y)| x + y).collect());
                out.add_term(e, a * b);
            }
        }
        out
    }

    pub fn add_term(&mut self, w: Exponent, c: BigRational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(slot) => {
                if !c.is_zero() {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Exponent) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponent::degree).max()
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&Exponent::zero(self.n))
    }

    /// Every coefficient must be a p-adic integer.
    pub fn check_p_integral(&self, p: u64) -> Result<()> {
        for (w, c) in &self.terms {
            if valuation_rational(c, p).is_some_and(|v| v < 0) {
                return Err(ZetaError::Validation(format!(
                    "coefficient {c} of x^{:?} has negative {p}-adic valuation",
                    w.0
                )));
            }
        }
        Ok(())
    }

    /// `f_D`: all terms of total degree at most `d`.
    pub fn truncate(&self, d: u32) -> PolySeries {
        PolySeries {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.degree() <= d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms with `v_p(a_w) < precision`, coefficients reduced into `[0, p^precision)`.
    pub fn reduce_mod(&self, p: u64, precision: u32) -> PolySeries {
        let modulus = num_traits::pow(BigInt::from(p), precision as usize);
        let terms = self.terms.iter().filter_map(|(w, c)| {
            let r = rational_residue(c, &modulus)?;
            (!r.is_zero()).then(|| (w.clone(), BigRational::from_integer(r)))
        });
        PolySeries {
            n: self.n,
            terms: terms.collect(),
        }
    }

    /// Formal partial derivative with respect to variable `var` (0-based).
    pub fn derivative(&self, var: usize) -> PolySeries {
        assert!(var < self.n, "variable index out of range");
        let mut out = PolySeries::zero(self.n);
        for (w, c) in &self.terms {
            let e = w.0[var];
            if e == 0 {
                continue;
            }
            let mut w2 = w.clone();
            w2.0[var] -= 1;
            out.add_term(w2, c * BigRational::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.n);
        self.terms
            .iter()
            .map(|(w, c)| {
                w.0.iter().zip(x).fold(c.clone(), |acc, (&e, xi)| {
                    acc * num_traits::pow(xi.clone(), e as usize)
                })
            })
            .sum()
    }

    /// Reorders variables: variable `i` of the result is variable `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> PolySeries {
        assert_eq!(perm.len(), self.n);
        PolySeries {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (Exponent(perm.iter().map(|&j| w.0[j]).collect()), c.clone()))
                .collect(),
        }
    }

    /// Dense coefficient list of a one-variable polynomial.
    pub fn univariate_coeffs(&self) -> Vec<BigRational> {
        assert_eq!(self.n, 1, "expected a one-variable polynomial");
        let deg = self.degree().unwrap_or(0) as usize;
        let mut out = vec![BigRational::zero(); deg + 1];
        for (w, c) in &self.terms {
            out[w.0[0] as usize] = c.clone();
        }
        out
    }

    /// The polynomial as a [`UniPoly`] when it has one variable and integer coefficients.
    pub fn to_unipoly(&self) -> Option<UniPoly> {
        if self.n != 1 || self.terms.values().any(|c| !c.is_integer()) {
            return None;
        }
        Some(UniPoly::new(
            self.univariate_coeffs()
                .into_iter()
                .map(|c| c.to_integer())
                .collect(),
        ))
    }

    /// Exact coefficients of `f(alpha + p^m x)` for a one-variable `f`.
    pub fn taylor_shift_exact(&self, alpha: &BigInt, p: u64, m: u32) -> Vec<BigRational> {
        self.taylor_shift_rational(&BigRational::from_integer(alpha.clone()), p, m)
    }

    /// [`Self::taylor_shift_exact`] at a rational center.
    pub fn taylor_shift_rational(&self, alpha: &BigRational, p: u64, m: u32) -> Vec<BigRational> {
        let scale = BigRational::from_integer(num_traits::pow(BigInt::from(p), m as usize));
        let mut acc: Vec<BigRational> = Vec::new();
        for c in self.univariate_coeffs().iter().rev() {
            let mut next = vec![BigRational::zero(); acc.len() + 1];
            for (j, v) in acc.iter().enumerate() {
                next[j] += v * alpha;
                next[j + 1] += v * &scale;
            }
            next[0] += c;
            acc = next;
        }
        while acc.len() > 1 && acc.last().is_some_and(|c| c.is_zero()) {
            acc.pop();
        }
        acc
    }

    /// Coefficients `(c_0, ..., c_deg)` of `f(alpha + p^m x) mod p^precision`.
    ///
    /// The shift is done over exact rationals and reduced at the end, so no
    /// factorials are ever inverted modulo p.
    pub fn taylor_shift(&self, alpha: &PAdicApprox, m: u32, precision: u32) -> Result<Vec<BigInt>> {
        if alpha.precision() < precision {
            return Err(ZetaError::PreconditionViolated(format!(
                "center precision {} is below the requested precision {precision}",
                alpha.precision()
            )));
        }
        let p = alpha.context().p();
        let modulus = alpha.context().pow(precision);
        self.taylor_shift_exact(alpha.value(), p, m)
            .iter()
            .map(|c| {
                rational_residue(c, &modulus).ok_or_else(|| {
                    ZetaError::Validation(format!("coefficient {c} is not {p}-integral"))
                })
            })
            .collect()
    }

    /// Renders as an expression such as `x^3 + x*y + y^2`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut order: Vec<(&Exponent, &BigRational)> = self.terms.iter().collect();
        order.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        let mut out = String::new();
        for (w, c) in order {
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_monomial(w);
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else if a.is_integer() {
                out.push_str(&format!("{a}*{mono}"));
            } else {
                out.push_str(&format!("({a})*{mono}"));
            }
        }
        out
    }
}

/// Name of variable `i` among `n`: `x, y, z, w` for n <= 4, else `x1, x2, ...`.
pub fn variable_name(i: usize, n: usize) -> String {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if n <= 4 {
        SHORT[i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

fn render_monomial(w: &Exponent) -> String {
    let n = w.n();
    w.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            let v = variable_name(i, n);
            if e == 1 {
                v
            } else {
                format!("{v}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for PolySeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Valuation-growth certificate: `v_p(a_w) >= rho*|w| - c` on every tail exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub rho: BigRational,
    pub c: BigRational,
}

impl Certificate {
    pub fn new(rho: BigRational, c: BigRational) -> Result<Self> {
        if !rho.is_positive() || c.is_negative() {
            return Err(ZetaError::Validation(format!(
                "certificate needs rho > 0 and c >= 0, got rho = {rho}, c = {c}"
            )));
        }
        Ok(Certificate { rho, c })
    }

    pub fn from_ints(rho: i64, c: i64) -> Self {
        Self::new(
            BigRational::from_integer(rho.into()),
            BigRational::from_integer(c.into()),
        )
        .expect("valid certificate")
    }

    /// Largest degree `d` at which the certified lower bound `rho*d - c` is
    /// still below `precision`; `None` when no degree qualifies.
    pub fn max_degree_below(&self, precision: u32) -> Option<u32> {
        let x = (BigRational::from_integer(precision.into()) + &self.c) / &self.rho;
        let d = x.ceil().to_integer() - BigInt::one();
        if d.is_negative() {
            None
        } else {
            Some(d.to_u32().unwrap_or(u32::MAX))
        }
    }

    pub fn lower_bound(&self, degree: u32) -> BigRational {
        &self.rho * BigRational::from_integer(degree.into()) - &self.c
    }
}

/// Pure coefficient oracle for the tail of a series.
pub type CoefficientOracle = Arc<dyn Fn(&Exponent) -> BigRational + Send + Sync>;

/// A restricted power series presented as explicit terms plus a certified tail.
#[derive(Clone)]
pub struct SeriesSpec {
    name: String,
    p: u64,
    explicit: PolySeries,
    explicit_degree: u32,
    tail: Option<CoefficientOracle>,
    certificate: Option<Certificate>,
    support_bound: Option<u32>,
}

impl fmt::Debug for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeriesSpec")
            .field("name", &self.name)
            .field("p", &self.p)
            .field("explicit", &self.explicit.render())
            .field("explicit_degree", &self.explicit_degree)
            .field("has_tail", &self.tail.is_some())
            .field("certificate", &self.certificate)
            .field("support_bound", &self.support_bound)
            .finish()
    }
}

/// How many tail degrees past the explicit part are spot-checked on construction.
const CERTIFICATE_SAMPLE_DEGREES: u32 = 6;

impl SeriesSpec {
    /// A polynomial viewed as a series with an empty tail.
    pub fn from_polynomial(name: impl Into<String>, poly: PolySeries, p: u64) -> Result<Self> {
        poly.check_p_integral(p)?;
        let deg = poly.degree().unwrap_or(0);
        Ok(SeriesSpec {
            name: name.into(),
            p,
            explicit: poly,
            explicit_degree: deg,
            tail: None,
            certificate: None,
            support_bound: Some(deg),
        })
    }

    /// Explicit terms authoritative up to `explicit_degree`, oracle beyond it.
    ///
    /// The certificate and p-integrality are spot-checked on the first few
    /// tail degrees; the support bound is checked where that is decidable
    /// within the sampled range.
    pub fn with_tail(
        name: impl Into<String>,
        p: u64,
        explicit: PolySeries,
        explicit_degree: u32,
        tail: CoefficientOracle,
        certificate: Option<Certificate>,
        support_bound: Option<u32>,
    ) -> Result<Self> {
        explicit.check_p_integral(p)?;
        if explicit.degree().is_some_and(|d| d > explicit_degree) {
            return Err(ZetaError::Validation(
                "explicit terms exceed the declared explicit degree".into(),
            ));
        }
        let spec = SeriesSpec {
            name: name.into(),
            p,
            explicit,
            explicit_degree,
            tail: Some(tail),
            certificate,
            support_bound,
        };
        spec.spot_check()?;
        Ok(spec)
    }

    fn spot_check(&self) -> Result<()> {
        let n = self.n();
        let last = self.explicit_degree + CERTIFICATE_SAMPLE_DEGREES;
        for d in self.explicit_degree + 1..=last {
            for w in exponents_of_degree(n, d) {
                let a = self.coefficient(&w);
                let Some(v) = valuation_rational(&a, self.p) else {
                    continue;
                };
                if v < 0 {
                    return Err(ZetaError::Validation(format!(
                        "tail coefficient of x^{:?} is not {}-integral",
                        w.0, self.p
                    )));
                }
                if let Some(cert) = &self.certificate {
                    if BigRational::from_integer(v.into()) < cert.lower_bound(d) {
                        return Err(ZetaError::Validation(format!(
                            "tail coefficient of x^{:?} has valuation {v}, below the certified bound {}",
                            w.0,
                            cert.lower_bound(d)
                        )));
                    }
                }
            }
        }
        if let Some(b) = self.support_bound {
            let low = self.truncate(b).support();
            if low.is_empty() && !self.truncate(last.max(b)).is_zero() {
                return Err(ZetaError::Validation(format!(
                    "support bound {b} leaves no support exponent"
                )));
            }
            for w in self.truncate(last.max(b)).support() {
                if w.degree() > b && !low.iter().any(|m| w.dominates(m)) {
                    return Err(ZetaError::Validation(format!(
                        "exponent {:?} is not dominated by any exponent of degree <= {b}",
                        w.0
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.explicit.n()
    }

    pub fn explicit(&self) -> &PolySeries {
        &self.explicit
    }

    pub fn explicit_degree(&self) -> u32 {
        self.explicit_degree
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    pub fn support_bound(&self) -> Option<u32> {
        self.support_bound
    }

    /// True when the series has no tail, i.e. it is a polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.tail.is_none()
    }

    pub fn coefficient(&self, w: &Exponent) -> BigRational {
        if w.degree() <= self.explicit_degree {
            return self.explicit.coefficient(w);
        }
        match &self.tail {
            Some(oracle) => oracle(w),
            None => BigRational::zero(),
        }
    }

    /// `f_D = sum_{|w| <= D} a_w x^w` with exact coefficients.
    pub fn truncate(&self, d: u32) -> PolySeries {
        let mut out = self.explicit.truncate(d);
        if self.tail.is_some() {
            for deg in self.explicit_degree + 1..=d {
                for w in exponents_of_degree(self.n(), deg) {
                    let c = self.coefficient(&w);
                    if !c.is_zero() {
                        out.add_term(w, c);
                    }
                }
            }
        }
        out
    }

    /// Largest degree that can carry a term with `v_p(a_w) < precision`.
    pub fn degree_bound_below(&self, precision: u32) -> Result<u32> {
        if self.tail.is_none() {
            return Ok(self.explicit.degree().unwrap_or(0));
        }
        let cert = self
            .certificate
            .as_ref()
            .ok_or(ZetaError::CertificateMissing)?;
        let tail = cert.max_degree_below(precision).unwrap_or(0);
        Ok(tail.max(self.explicit_degree))
    }

    /// The finite polynomial of all terms with `v_p(a_w) < precision`,
    /// coefficients reduced mod p^precision.
    pub fn reduce_mod(&self, precision: u32) -> Result<PolySeries> {
        let bound = self.degree_bound_below(precision)?;
        Ok(self.truncate(bound).reduce_mod(self.p, precision))
    }

    /// Smallest `D` with `f_D = f mod p^precision`: the degree of
    /// `reduce_mod(precision)`, or 0 when that is the zero polynomial.
    pub fn congruence_threshold(&self, precision: u32) -> Result<u32> {
        Ok(self.reduce_mod(precision)?.degree().unwrap_or(0))
    }
}

/// Tail oracle `a_w = p^{|w|}` on exponents dominating `base`, zero elsewhere.
pub fn geometric_tail(p: u64, base: Exponent) -> CoefficientOracle {
    Arc::new(move |w: &Exponent| {
        if w.dominates(&base) {
            BigRational::from_integer(num_traits::pow(BigInt::from(p), w.degree() as usize))
        } else {
            BigRational::zero()
        }
    })
}

/// The coefficient residue of a p-integral rational mod p, as a small integer.
pub fn residue_mod_p(c: &BigRational, p: u64) -> Option<u64> {
    let r = rational_residue(c, &BigInt::from(p))?;
    Some(r.mod_floor(&BigInt::from(p)).to_u64().unwrap())
}
