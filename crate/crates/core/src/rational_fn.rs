//! Exact rational functions in one formal variable `t = p^{-s}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Dense univariate polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `p^{-k}` as an exact rational.
pub fn inv_pow(p: u64, k: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), k as usize))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &lead;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&(BigRational::one() / l)),
            None => QPoly::zero(),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// First `order` coefficients of the power series `self / den`.
    /// Requires `den(0) != 0`.
    pub fn series_div(&self, den: &QPoly, order: usize) -> Vec<BigRational> {
        let d0 = den.coeff(0);
        assert!(!d0.is_zero(), "denominator vanishes at t = 0");
        let mut out: Vec<BigRational> = Vec::with_capacity(order);
        for k in 0..order {
            let mut acc = self.coeff(k);
            for j in 1..=k.min(den.coeffs.len().saturating_sub(1)) {
                acc -= den.coeff(j) * &out[k - j];
            }
            out.push(acc / &d0);
        }
        out
    }

    /// Plain-text rendering in the variable `var`, e.g. `1 - 1/3*t^2`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// An exact rational function of `t = p^{-s}`, always held in canonical form.
///
/// Canonical form: `gcd(num, den) = 1`, and the denominator has constant term
/// 1 (every zeta function is a power series in `t`, so `den(0) != 0` after
/// reduction). Should the constant term vanish the denominator is made monic
/// instead. Zero is `0 / 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZetaRational {
    num: QPoly,
    den: QPoly,
    p: u64,
}

impl ZetaRational {
    pub fn new(num: QPoly, den: QPoly, p: u64) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut z = ZetaRational { num, den, p };
        z.canonicalize();
        z
    }

    pub fn zero(p: u64) -> Self {
        ZetaRational {
            num: QPoly::zero(),
            den: QPoly::one(),
            p,
        }
    }

    pub fn constant(c: BigRational, p: u64) -> Self {
        Self::from_poly(QPoly::constant(c), p)
    }

    pub fn from_poly(num: QPoly, p: u64) -> Self {
        ZetaRational {
            num,
            den: QPoly::one(),
            p,
        }
    }

    /// `c * t^k`.
    pub fn monomial(c: BigRational, k: usize, p: u64) -> Self {
        Self::from_poly(QPoly::monomial(c, k), p)
    }

    /// `1 / (1 - c t^k)`.
    pub fn geometric(c: BigRational, k: usize, p: u64) -> Self {
        let den = &QPoly::one() - &QPoly::monomial(c, k);
        Self::new(QPoly::one(), den, p)
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = QPoly::one();
            return;
        }
        let g = QPoly::gcd(&self.num, &self.den);
        if g.degree().unwrap_or(0) > 0 {
            self.num = self.num.div_rem(&g).0;
            self.den = self.den.div_rem(&g).0;
        }
        let d0 = self.den.coeff(0);
        let norm = if d0.is_zero() {
            self.den.leading().unwrap().clone()
        } else {
            d0
        };
        if !norm.is_one() {
            let inv = BigRational::one() / norm;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn numerator(&self) -> &QPoly {
        &self.num
    }

    pub fn denominator(&self) -> &QPoly {
        &self.den
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Equality by cross-multiplication, independent of normal form.
    pub fn cross_equal(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    /// Power-series coefficients of degree `< order`.
    pub fn series(&self, order: usize) -> Vec<BigRational> {
        self.num.series_div(&self.den, order)
    }

    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(t);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(t) / d)
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.num.scale(c), self.den.clone(), self.p)
    }

    /// Sum of many terms with a single canonicalization at the end.
    pub fn sum<'a, I>(terms: I, p: u64) -> Self
    where
        I: IntoIterator<Item = &'a ZetaRational>,
    {
        let mut num = QPoly::zero();
        let mut den = QPoly::one();
        for z in terms {
            assert_eq!(z.p, p, "mixed primes");
            if z.is_zero() {
                continue;
            }
            if z.den == den {
                num = &num + &z.num;
                continue;
            }
            let g = QPoly::gcd(&den, &z.den);
            let (den_q, _) = den.div_rem(&g);
            let (z_q, _) = z.den.div_rem(&g);
            num = &(&num * &z_q) + &(&z.num * &den_q);
            den = &den * &z_q;
        }
        Self::new(num, den, p)
    }

    /// LaTeX for Z(s) with `t` written as `p^{-s}`.
    pub fn latex(&self) -> String {
        let num = latex_poly(&self.num, self.p);
        if self.den == QPoly::one() {
            return num;
        }
        format!("\\frac{{{}}}{{{}}}", num, latex_poly(&self.den, self.p))
    }
}

fn latex_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn latex_poly(q: &QPoly, p: u64) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, c) in q.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let power = match k {
            0 => String::new(),
            1 => format!("{p}^{{-s}}"),
            _ => format!("{p}^{{-{k}s}}"),
        };
        if k == 0 {
            out.push_str(&latex_rational(&a));
        } else if a.is_one() {
            out.push_str(&power);
        } else {
            out.push_str(&format!("{} \\cdot {}", latex_rational(&a), power));
        }
    }
    out
}

impl Add for &ZetaRational {
    type Output = ZetaRational;
    fn add(self, rhs: &ZetaRational) -> ZetaRational {
        ZetaRational::sum([self, rhs], self.p)
    }
}

impl Sub for &ZetaRational {
    type Output = ZetaRational;
    fn sub(self, rhs: &ZetaRational) -> ZetaRational {
        self + &(-rhs)
    }
}

impl Neg for &ZetaRational {
    type Output = ZetaRational;
    fn neg(self) -> ZetaRational {
        ZetaRational {
            num: -&self.num,
            den: self.den.clone(),
            p: self.p,
        }
    }
}

impl Mul for &ZetaRational {
    type Output = ZetaRational;
    fn mul(self, rhs: &ZetaRational) -> ZetaRational {
        assert_eq!(self.p, rhs.p, "mixed primes");
        ZetaRational::new(&self.num * &rhs.num, &self.den * &rhs.den, self.p)
    }
}

impl fmt::Display for ZetaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == QPoly::one() {
            write!(f, "{}", self.num.render("t"))
        } else {
            write!(f, "({}) / ({})", self.num.render("t"), self.den.render("t"))
        }
    }
}

impl Serialize for ZetaRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strings = |q: &QPoly| q.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>();
        let mut s = serializer.serialize_struct("ZetaRational", 5)?;
        s.serialize_field("p", &self.p)?;
        s.serialize_field("numerator", &self.num.render("t"))?;
        s.serialize_field("denominator", &self.den.render("t"))?;
        s.serialize_field("numerator_coeffs", &strings(&self.num))?;
        s.serialize_field("denominator_coeffs", &strings(&self.den))?;
        s.end()
    }
}
