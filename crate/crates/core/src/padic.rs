//! Arithmetic in Z/p^M with valuation bookkeeping, and Hensel lifting.
//!
//! Elements of Z_p are only ever held to a finite precision `M`. A residue
//! that is zero at precision `M` reports [`Valuation::AtLeast`], never a
//! finite valuation equal to `M`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Result, ZetaError};

/// Default ceiling on the number of points brute-force routines may visit.
pub const DEFAULT_ENUM_LIMIT: u64 = 100_000_000;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The global prime together with the enumeration ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeContext {
    p: u64,
    enum_limit: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_enum_limit(p, DEFAULT_ENUM_LIMIT)
    }

    pub fn with_enum_limit(p: u64, enum_limit: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(ZetaError::NotPrime(p));
        }
        if enum_limit == 0 {
            return Err(ZetaError::Validation("enum_limit must be positive".into()));
        }
        Ok(PrimeContext { p, enum_limit })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn enum_limit(&self) -> u64 {
        self.enum_limit
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// p^k as a big integer.
    pub fn pow(&self, k: u32) -> BigInt {
        num_traits::pow(self.p_big(), k as usize)
    }

    /// Fails with `EnumLimitExceeded` unless `p^exponent <= enum_limit`.
    pub fn check_enumeration(&self, exponent: u32) -> Result<()> {
        let requested = (self.p as u128).checked_pow(exponent).unwrap_or(u128::MAX);
        if requested > self.enum_limit as u128 {
            return Err(ZetaError::EnumLimitExceeded {
                requested,
                limit: self.enum_limit,
            });
        }
        Ok(())
    }
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation_int(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        y = q;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn valuation_rational(x: &BigRational, p: u64) -> Option<i64> {
    let num = valuation_int(x.numer(), p)?;
    let den = valuation_int(x.denom(), p).unwrap_or(0);
    Some(num as i64 - den as i64)
}

/// Modular inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let egcd = a.extended_gcd(m);
    if !egcd.gcd.is_one() {
        return None;
    }
    Some(egcd.x.mod_floor(m))
}

/// Residue of a p-integral rational modulo `modulus` (a power of p).
/// Returns `None` when the denominator is not invertible.
pub fn rational_residue(x: &BigRational, modulus: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(x.denom(), modulus)?;
    Some((x.numer() * inv).mod_floor(modulus))
}

/// Valuation of a residue at finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Valuation {
    Exact(u32),
    /// The residue is zero at precision `M`: the true valuation is at least `M`.
    AtLeast(u32),
}

impl Valuation {
    pub fn exact(self) -> Option<u32> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(m) => write!(f, "at-least-{m}"),
        }
    }
}

/// An element of Z/p^M: the finite-precision stand-in for a p-adic integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdicApprox {
    value: BigInt,
    precision: u32,
    ctx: PrimeContext,
}

impl PAdicApprox {
    /// Reduces `value` into `[0, p^precision)`.
    pub fn new(ctx: PrimeContext, value: BigInt, precision: u32) -> Self {
        let modulus = ctx.pow(precision);
        PAdicApprox {
            value: value.mod_floor(&modulus),
            precision,
            ctx,
        }
    }

    pub fn from_u64(ctx: PrimeContext, value: u64, precision: u32) -> Self {
        Self::new(ctx, BigInt::from(value), precision)
    }

    pub fn from_rational(ctx: PrimeContext, x: &BigRational, precision: u32) -> Result<Self> {
        let modulus = ctx.pow(precision);
        let value = rational_residue(x, &modulus).ok_or_else(|| {
            ZetaError::Validation(format!("{x} is not a {}-adic integer", ctx.p()))
        })?;
        Ok(PAdicApprox {
            value,
            precision,
            ctx,
        })
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    pub fn modulus(&self) -> BigInt {
        self.ctx.pow(self.precision)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn valuation(&self) -> Valuation {
        match valuation_int(&self.value, self.ctx.p()) {
            // value < p^M so the valuation is automatically below M
            Some(v) => Valuation::Exact(v),
            None => Valuation::AtLeast(self.precision),
        }
    }

    /// |x|_p = p^{-v}; zero at this precision reports the upper bound p^{-M}.
    pub fn norm(&self) -> BigRational {
        let v = match self.valuation() {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        };
        BigRational::new(BigInt::one(), self.ctx.pow(v))
    }

    /// The same element known to a lower precision.
    pub fn reduce_to(&self, precision: u32) -> Self {
        assert!(precision <= self.precision, "cannot raise precision");
        Self::new(self.ctx, self.value.clone(), precision)
    }

    pub fn congruent_mod(&self, other: &Self, k: u32) -> bool {
        assert!(k <= self.precision.min(other.precision));
        let m = self.ctx.pow(k);
        self.value.mod_floor(&m) == other.value.mod_floor(&m)
    }

    fn binary(&self, other: &Self, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        assert_eq!(self.ctx.p(), other.ctx.p(), "mixed primes");
        let precision = self.precision.min(other.precision);
        Self::new(self.ctx, op(&self.value, &other.value), precision)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a * b)
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.ctx.p(), self.precision)
    }
}

/// The ball `center + p^m Z_p`.
#[derive(Debug, Clone, Eq)]
pub struct Ball {
    center: PAdicApprox,
    radius_exponent: u32,
}

impl Ball {
    pub fn new(center: PAdicApprox, radius_exponent: u32) -> Result<Self> {
        if center.precision() < radius_exponent {
            return Err(ZetaError::PreconditionViolated(format!(
                "ball center precision {} is below radius exponent {radius_exponent}",
                center.precision()
            )));
        }
        Ok(Ball {
            center,
            radius_exponent,
        })
    }

    /// The whole of Z_p.
    pub fn unit(ctx: PrimeContext) -> Self {
        Ball {
            center: PAdicApprox::from_u64(ctx, 0, 0),
            radius_exponent: 0,
        }
    }

    pub fn center(&self) -> &PAdicApprox {
        &self.center
    }

    pub fn radius_exponent(&self) -> u32 {
        self.radius_exponent
    }

    /// Haar measure p^{-m}.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.center.ctx.pow(self.radius_exponent))
    }

    /// Canonical integer representative of the center in `[0, p^m)`.
    pub fn center_residue(&self) -> BigInt {
        self.center
            .value()
            .mod_floor(&self.center.ctx.pow(self.radius_exponent))
    }

    pub fn contains(&self, x: &PAdicApprox) -> bool {
        x.precision() >= self.radius_exponent && self.center.congruent_mod(x, self.radius_exponent)
    }

    /// The p sub-balls of radius p^{-(m+1)}, in increasing digit order.
    pub fn children(&self) -> Vec<Ball> {
        let ctx = self.center.ctx;
        let m = self.radius_exponent;
        let base = self.center_residue();
        let step = ctx.pow(m);
        (0..ctx.p())
            .map(|d| Ball {
                center: PAdicApprox::new(ctx, &base + &step * BigInt::from(d), m + 1),
                radius_exponent: m + 1,
            })
            .collect()
    }
}

impl PartialEq for Ball {
    fn eq(&self, other: &Self) -> bool {
        self.radius_exponent == other.radius_exponent
            && self.center.ctx.p() == other.center.ctx.p()
            && self.center_residue() == other.center_residue()
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}^{} Z_{}",
            self.center_residue(),
            self.center.ctx.p(),
            self.radius_exponent,
            self.center.ctx.p()
        )
    }
}

/// A one-variable polynomial with integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Coefficients of `f(a + scale * y)`, computed exactly.
    pub fn shift_scale(&self, a: &BigInt, scale: &BigInt) -> UniPoly {
        // Horner in the polynomial ring: acc = acc * (a + scale*y) + c
        let mut acc: Vec<BigInt> = Vec::new();
        for c in self.coeffs.iter().rev() {
            let mut next = vec![BigInt::zero(); acc.len() + 1];
            for (j, v) in acc.iter().enumerate() {
                next[j] += v * a;
                next[j + 1] += v * scale;
            }
            next[0] += c;
            acc = next;
        }
        UniPoly::new(acc)
    }
}

/// Lifts a simple root `a` of `f` mod p to `xi` mod p^M with `f(xi) = 0 mod p^M`.
///
/// Newton iteration, doubling the known precision each step.
pub fn hensel_lift(
    f: &UniPoly,
    a: &BigInt,
    ctx: PrimeContext,
    target_precision: u32,
) -> Result<PAdicApprox> {
    if target_precision == 0 {
        return Err(ZetaError::PreconditionViolated(
            "target precision must be positive".into(),
        ));
    }
    let p = ctx.p_big();
    let df = f.derivative();
    if !f.eval(a).mod_floor(&p).is_zero() {
        return Err(ZetaError::PreconditionViolated(format!(
            "f({a}) is not 0 mod {p}"
        )));
    }
    if df.eval(a).mod_floor(&p).is_zero() {
        return Err(ZetaError::PreconditionViolated(format!(
            "f'({a}) is 0 mod {p}"
        )));
    }

    let mut x = a.mod_floor(&p);
    let mut known = 1u32;
    while known < target_precision {
        known = (known * 2).min(target_precision);
        let modulus = ctx.pow(known);
        let inv =
            mod_inverse(&df.eval(&x), &modulus).expect("derivative stays a unit along the lift");
        x = (&x - f.eval(&x) * inv).mod_floor(&modulus);
    }
    Ok(PAdicApprox::new(ctx, x, target_precision))
}

/// Lifts `a` with `f(a) = 0 mod p^{2e+k}` and `v_p(f'(a)) = e` to the unique root
/// `xi = a mod p^{e+k}`, returned mod p^M.
///
/// Works through `g(y) = p^{-2e-(k-1)} f(a + p^{e+k-1} y)`, which has integer
/// coefficients, `g(0) = 0 mod p` and `g'(0) = p^{-e} f'(a)` a unit.
pub fn hensel_lift_general(
    f: &UniPoly,
    a: &BigInt,
    e: u32,
    k: u32,
    ctx: PrimeContext,
    target_precision: u32,
) -> Result<PAdicApprox> {
    if k == 0 {
        return Err(ZetaError::PreconditionViolated("k must be positive".into()));
    }
    if target_precision == 0 {
        return Err(ZetaError::PreconditionViolated(
            "target precision must be positive".into(),
        ));
    }
    let fa = f.eval(a);
    if !fa.mod_floor(&ctx.pow(2 * e + k)).is_zero() {
        return Err(ZetaError::PreconditionViolated(format!(
            "f({a}) is not 0 mod {}^{}",
            ctx.p(),
            2 * e + k
        )));
    }
    let dfa = f.derivative().eval(a);
    if valuation_int(&dfa, ctx.p()) != Some(e) {
        return Err(ZetaError::PreconditionViolated(format!(
            "v_{}(f'({a})) is not {e}",
            ctx.p()
        )));
    }

    let shift = e + k - 1;
    let scale_down = ctx.pow(2 * e + k - 1);
    let shifted = f.shift_scale(a, &ctx.pow(shift));
    let g = UniPoly::new(
        shifted
            .coeffs()
            .iter()
            .map(|c| {
                let (q, r) = c.div_rem(&scale_down);
                debug_assert!(r.is_zero(), "g has integer coefficients");
                q
            })
            .collect(),
    );

    // xi mod p^M only depends on eta mod p^{M - shift}
    let eta_precision = target_precision.saturating_sub(shift).max(1);
    let eta = hensel_lift(&g, &BigInt::zero(), ctx, eta_precision)?;
    let xi = a + ctx.pow(shift) * eta.value();
    Ok(PAdicApprox::new(ctx, xi, target_precision))
}
