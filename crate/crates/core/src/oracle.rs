//! Brute-force ground truth: solution counts of `f = 0 mod p^m`, the
//! truncated power series they determine, and exact comparison against a
//! computed `Z`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::exec::Exec;
use crate::padic::{rational_residue, PrimeContext};
use crate::rational_fn::{inv_pow, ZetaRational};
use crate::series::{PolySeries, SeriesSpec};

/// `N_m = #{x mod p^m : f(x) = 0 mod p^m}` for `m = 0..=M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceCount {
    pub p: u64,
    pub n: usize,
    pub counts: Vec<u64>,
}

impl CongruenceCount {
    pub fn precision(&self) -> u32 {
        (self.counts.len() - 1) as u32
    }

    /// `mu_m = N_m p^{-nm}`, the measure of `{x : v(f(x)) >= m}`.
    pub fn mu(&self, m: usize) -> BigRational {
        BigRational::from_integer(self.counts[m].into()) * inv_pow(self.p, (self.n * m) as u32)
    }

    pub fn mus(&self) -> Vec<BigRational> {
        (0..self.counts.len()).map(|m| self.mu(m)).collect()
    }
}

/// `f` with coefficients reduced into `[0, p^M)`, ready for word arithmetic.
struct ResiduePoly {
    modulus: u128,
    terms: Vec<(Vec<u32>, u128)>,
}

impl ResiduePoly {
    fn new(f: &PolySeries, p: u64, precision: u32) -> Result<Self> {
        let modulus_big = num_traits::pow(BigInt::from(p), precision as usize);
        let modulus = modulus_big
            .to_u128()
            .filter(|&m| m < 1 << 63)
            .ok_or_else(|| {
                ZetaError::Validation(format!("p^{precision} too large for the oracle"))
            })?;
        let mut terms = Vec::new();
        for (w, c) in f.terms() {
            let r = rational_residue(c, &modulus_big).ok_or_else(|| {
                ZetaError::Validation(format!("coefficient {c} is not p-integral for p = {p}"))
            })?;
            let r = r.mod_floor(&modulus_big).to_u128().unwrap();
            if r != 0 {
                terms.push((w.0.clone(), r));
            }
        }
        Ok(ResiduePoly { modulus, terms })
    }

    fn eval(&self, x: &[u128]) -> u128 {
        let m = self.modulus;
        let mut acc = 0u128;
        for (w, c) in &self.terms {
            let mut v = *c;
            for (xi, &e) in x.iter().zip(w) {
                for _ in 0..e {
                    v = v * xi % m;
                }
            }
            acc = (acc + v) % m;
        }
        acc
    }
}

fn lift(
    f: &ResiduePoly,
    x: &mut Vec<u128>,
    level: u32,
    p: u128,
    scale: u128,
    max: u32,
    counts: &mut [u64],
) {
    counts[level as usize] += 1;
    if level == max {
        return;
    }
    let n = x.len();
    let next = scale * p;
    let total = (p as usize).pow(n as u32);
    for idx in 0..total {
        let mut k = idx;
        for xi in x.iter_mut() {
            *xi += (k as u128 % p) * scale;
            k /= p as usize;
        }
        if f.eval(x).is_multiple_of(next) {
            lift(f, x, level + 1, p, next, max, counts);
        }
        let mut k = idx;
        for xi in x.iter_mut() {
            *xi -= (k as u128 % p) * scale;
            k /= p as usize;
        }
    }
}

/// Counts by recursive lifting: only children of solutions mod `p^m` are
/// examined mod `p^{m+1}`. Top-level residues are split across `exec`.
pub fn count_solutions(
    f: &PolySeries,
    ctx: &PrimeContext,
    precision: u32,
    exec: Exec,
) -> Result<CongruenceCount> {
    let n = f.n();
    ctx.check_enumeration(n as u32 * precision)?;
    let p = ctx.p();
    let mut counts = vec![0u64; precision as usize + 1];
    counts[0] = 1;
    if precision == 0 {
        return Ok(CongruenceCount { p, n, counts });
    }
    let rp = ResiduePoly::new(f, p, precision)?;
    let branches = (p as usize).pow(n as u32);
    let partial = exec.map_range(0..branches, |idx| {
        let mut x = vec![0u128; n];
        let mut k = idx;
        for xi in x.iter_mut() {
            *xi = (k % p as usize) as u128;
            k /= p as usize;
        }
        let mut local = vec![0u64; precision as usize + 1];
        if rp.eval(&x) % p as u128 == 0 {
            lift(&rp, &mut x, 1, p as u128, p as u128, precision, &mut local);
        }
        local
    });
    for local in partial {
        for (c, l) in counts.iter_mut().zip(local).skip(1) {
            *c += l;
        }
    }
    Ok(CongruenceCount { p, n, counts })
}

/// Counts from full enumeration of `(Z/p^M)^n`; a cross-check for
/// [`count_solutions`] on small cases.
pub fn count_solutions_naive(
    f: &PolySeries,
    ctx: &PrimeContext,
    precision: u32,
) -> Result<CongruenceCount> {
    let n = f.n();
    ctx.check_enumeration(n as u32 * precision)?;
    let p = ctx.p();
    let rp = ResiduePoly::new(f, p, precision)?;
    let modulus = rp.modulus;
    let total = modulus.pow(n as u32);
    // hits[m] = #{x mod p^M : f(x) = 0 mod p^m}
    let mut hits = vec![0u128; precision as usize + 1];
    let mut x = vec![0u128; n];
    for idx in 0..total {
        let mut k = idx;
        for xi in x.iter_mut() {
            *xi = k % modulus;
            k /= modulus;
        }
        let v = rp.eval(&x);
        let mut pm = 1u128;
        for h in hits.iter_mut() {
            if v % pm != 0 {
                break;
            }
            *h += 1;
            pm *= p as u128;
        }
    }
    let counts = hits
        .iter()
        .enumerate()
        .map(|(m, &h)| {
            let excess = (p as u128).pow(n as u32 * (precision - m as u32));
            (h / excess) as u64
        })
        .collect();
    Ok(CongruenceCount { p, n, counts })
}

/// Counts for a certified series through its reduction mod `p^M`, which
/// fixes `N_m` for every `m <= M`.
pub fn count_solutions_series(
    f: &SeriesSpec,
    ctx: &PrimeContext,
    precision: u32,
    exec: Exec,
) -> Result<CongruenceCount> {
    let reduced = f.reduce_mod(precision.max(1))?;
    count_solutions(&reduced, ctx, precision, exec)
}

/// `sum_{m<M} (mu_m - mu_{m+1}) t^m`: the degree `< M` part of `Z(t)`.
pub fn zeta_series_from_counts(c: &CongruenceCount) -> Vec<BigRational> {
    let mu = c.mus();
    mu.windows(2).map(|w| &w[0] - &w[1]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub order: usize,
    pub first_mismatch: Option<usize>,
    #[serde(serialize_with = "serialize_coeffs")]
    pub expected: Vec<BigRational>,
    #[serde(serialize_with = "serialize_coeffs")]
    pub actual: Vec<BigRational>,
}

fn serialize_coeffs<S: serde::Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Exact coefficient comparison of `Z(t)` against the counted series.
pub fn verify_zeta(z: &ZetaRational, c: &CongruenceCount) -> VerifyReport {
    let expected = zeta_series_from_counts(c);
    let actual = z.series(expected.len());
    let first_mismatch = expected.iter().zip(&actual).position(|(a, b)| a != b);
    VerifyReport {
        pass: first_mismatch.is_none() && c.p == z.p(),
        order: expected.len(),
        first_mismatch,
        expected,
        actual,
    }
}

/// Bracket `[lower, upper]` for the real value `Z(s)`.
pub fn numeric_zeta(c: &CongruenceCount, s: f64) -> Result<(f64, f64)> {
    if s.is_nan() || s <= 0.0 {
        return Err(ZetaError::PreconditionViolated(format!(
            "need s > 0, got {s}"
        )));
    }
    let t = (c.p as f64).powf(-s);
    let mut lower = 0.0;
    let mut tm = 1.0;
    for coeff in zeta_series_from_counts(c) {
        lower += coeff.to_f64().unwrap_or(0.0) * tm;
        tm *= t;
    }
    let tail = c.mu(c.counts.len() - 1).to_f64().unwrap_or(0.0) * tm;
    Ok((lower, lower + tail))
}

/// Sum of series coefficients; `1 - mu_M` for an oracle series.
pub fn total_mass(series: &[BigRational]) -> BigRational {
    series.iter().fold(BigRational::zero(), |a, b| a + b)
}

/// True when every coefficient lies in `[0, 1]`.
pub fn is_measure_sequence(series: &[BigRational]) -> bool {
    series
        .iter()
        .all(|c| *c >= BigRational::zero() && *c <= BigRational::one())
}
