//! One-variable zeta functions by ball decomposition.
//!
//! `Z_p` is split recursively into balls `alpha + p^m Z_p`. A ball is
//! resolved when the Taylor expansion `f(alpha + p^m x) = sum c_j x^j` has
//! a single dominant term (constant norm) or a dominant linear/monomial part;
//! otherwise it is split into its p children.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::exec::Exec;
use crate::padic::{rational_residue, valuation_rational, Ball, PrimeContext};
use crate::rational_fn::{inv_pow, QPoly, ZetaRational};
use crate::series::{PolySeries, SeriesSpec};

pub const DEFAULT_DEPTH_LIMIT: u32 = 24;

/// Outcome of inspecting one ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BallStatus {
    /// `v(f) = v` on the whole ball.
    ConstantNorm {
        v: u32,
    },
    /// `|f(alpha + p^m x)| = p^{-v} |x - xi|^{n0}` type behaviour, with
    /// `v = m*n0 + v_b` the valuation of the dominant Taylor coefficient.
    Dominant {
        n0: u32,
        v_b: u32,
        v: u32,
    },
    Undecided,
}

impl BallStatus {
    /// The valuation that decided the ball.
    pub fn deciding_valuation(&self) -> Option<u32> {
        match *self {
            BallStatus::ConstantNorm { v } => Some(v),
            BallStatus::Dominant { v, .. } => Some(v),
            BallStatus::Undecided => None,
        }
    }
}

fn val(c: &BigRational, p: u64) -> Option<i64> {
    valuation_rational(c, p)
}

/// Classifies the Taylor coefficients `c_j` of `f(alpha + p^m x)`.
fn classify(c: &[BigRational], p: u64, m: u32) -> Result<BallStatus> {
    let v: Vec<Option<i64>> = c.iter().map(|x| val(x, p)).collect();
    if v.iter().flatten().any(|&x| x < 0) {
        return Err(ZetaError::Validation("f is not p-integral".into()));
    }
    let below = |k: usize, bound: i64| v.iter().skip(k).flatten().all(|&x| x > bound);
    if let Some(v0) = v[0] {
        if below(1, v0) {
            return Ok(BallStatus::ConstantNorm { v: v0 as u32 });
        }
    }
    if let Some(Some(v1)) = v.get(1).copied() {
        if below(2, v1) && v[0].is_none_or(|v0| v0 >= v1) {
            return Ok(BallStatus::Dominant {
                n0: 1,
                v_b: (v1 - m as i64) as u32,
                v: v1 as u32,
            });
        }
    }
    if let Some(n0) = v.iter().position(Option::is_some) {
        if n0 >= 2 {
            let vn = v[n0].unwrap();
            if below(n0 + 1, vn) {
                return Ok(BallStatus::Dominant {
                    n0: n0 as u32,
                    v_b: (vn - (m as i64) * n0 as i64) as u32,
                    v: vn as u32,
                });
            }
        }
    }
    Ok(BallStatus::Undecided)
}

/// Status of `f` on a ball, expanding around the ball's integer center.
pub fn ball_status(f: &PolySeries, ball: &Ball) -> Result<BallStatus> {
    let center = BigRational::from_integer(ball.center_residue());
    ball_status_at(f, ball, &center)
}

/// Status of `f` on a ball, expanding around a chosen point `alpha` of it.
pub fn ball_status_at(f: &PolySeries, ball: &Ball, alpha: &BigRational) -> Result<BallStatus> {
    if f.n() != 1 {
        return Err(ZetaError::PreconditionViolated(
            "one variable expected".into(),
        ));
    }
    if f.is_zero() {
        return Err(ZetaError::PreconditionViolated("f is zero".into()));
    }
    let p = ball.center().context().p();
    let m = ball.radius_exponent();
    classify(&f.taylor_shift_rational(alpha, p, m), p, m)
}

/// Integer coefficients of `f`, lowest degree first, reduced mod `modulus`
/// when one is given; `None` when some coefficient is not an integer and no
/// modulus is available.
fn integer_coeffs(f: &PolySeries, modulus: Option<&BigInt>) -> Option<Vec<BigInt>> {
    f.univariate_coeffs()
        .iter()
        .map(|c| match modulus {
            Some(md) => rational_residue(c, md),
            None => c.is_integer().then(|| c.to_integer()),
        })
        .collect()
}

/// Taylor coefficients of `f(alpha + p^m x)` over the integers, optionally
/// mod `modulus`. A coefficient that vanishes mod `modulus` reads as zero.
fn shift_integer(
    coeffs: &[BigInt],
    alpha: &BigInt,
    p: u64,
    m: u32,
    modulus: Option<&BigInt>,
) -> Vec<BigRational> {
    let scale = num_traits::pow(BigInt::from(p), m as usize);
    let mut acc: Vec<BigInt> = Vec::with_capacity(coeffs.len());
    for c in coeffs.iter().rev() {
        let mut next = vec![BigInt::zero(); acc.len() + 1];
        for (j, v) in acc.iter().enumerate() {
            next[j] += v * alpha;
            next[j + 1] += v * &scale;
        }
        next[0] += c;
        if let Some(md) = modulus {
            for x in next.iter_mut() {
                *x = x.mod_floor(md);
            }
        }
        acc = next;
    }
    acc.into_iter().map(BigRational::from_integer).collect()
}

/// The integral of `|f|^s` over one resolved ball.
#[derive(Debug, Clone, Serialize)]
pub struct LocalContribution {
    pub center: String,
    pub radius_exponent: u32,
    pub status: BallStatus,
    pub value: ZetaRational,
}

/// Constant norm: `p^{-m} t^v`. Dominant: `p^{-m}(1 - 1/p) t^v / (1 - t^{n0}/p)`.
pub fn local_contribution(status: BallStatus, ball: &Ball) -> Result<LocalContribution> {
    let p = ball.center().context().p();
    let m = ball.radius_exponent();
    let measure = inv_pow(p, m);
    let value = match status {
        BallStatus::ConstantNorm { v } => ZetaRational::monomial(measure, v as usize, p),
        BallStatus::Dominant { n0, v, .. } => {
            let c = measure * (BigRational::one() - inv_pow(p, 1));
            let den = &QPoly::one() - &QPoly::monomial(inv_pow(p, 1), n0 as usize);
            ZetaRational::new(QPoly::monomial(c, v as usize), den, p)
        }
        BallStatus::Undecided => {
            return Err(ZetaError::PreconditionViolated("ball is undecided".into()))
        }
    };
    Ok(LocalContribution {
        center: ball.center_residue().to_string(),
        radius_exponent: m,
        status,
        value,
    })
}

/// A node of the ball-decomposition tree.
#[derive(Debug, Clone, Serialize)]
pub struct BallNode {
    pub center: String,
    pub radius_exponent: u32,
    pub status: BallStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion_point: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<ZetaRational>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<BallNode>,
}

impl BallNode {
    /// Resolved leaves in canonical (digit) order.
    pub fn leaves(&self) -> Vec<&BallNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children.iter().flat_map(|c| c.leaves()).collect()
        }
    }

    pub fn count(&self) -> usize {
        1 + self.children.iter().map(BallNode::count).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneVarOptions {
    pub depth_limit: u32,
    pub exec: Exec,
}

impl Default for OneVarOptions {
    fn default() -> Self {
        OneVarOptions {
            depth_limit: DEFAULT_DEPTH_LIMIT,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OneVarResult {
    pub zeta: ZetaRational,
    pub trace: BallNode,
}

/// Decisions accepted during a run.
#[derive(Debug, Clone, Copy)]
enum Mode {
    /// Exact answer for this very polynomial.
    Exact,
    /// Only decisions that survive any perturbation by `p^floor` times an
    /// integral series: deciding valuation below `floor`, no exact zeros.
    Robust { floor: u32 },
}

struct Run<'a> {
    f: &'a PolySeries,
    /// Integer coefficients of `f` (reduced mod `modulus` if set), for the
    /// fast shift at integer expansion points.
    int_coeffs: Option<Vec<BigInt>>,
    modulus: Option<BigInt>,
    /// p-integral rational multiple roots of `f`, used as expansion points.
    specials: Vec<BigRational>,
    mode: Mode,
    opts: OneVarOptions,
}

impl Run<'_> {
    fn expansion_point(&self, ball: &Ball) -> BigRational {
        let p = ball.center().context().p();
        let center = BigRational::from_integer(ball.center_residue());
        self.specials
            .iter()
            .find(|r| match val(&(*r - &center), p) {
                None => true,
                Some(v) => v >= ball.radius_exponent() as i64,
            })
            .cloned()
            .unwrap_or(center)
    }

    fn resolve(&self, ball: Ball) -> Result<BallNode> {
        let alpha = self.expansion_point(&ball);
        let p = ball.center().context().p();
        let m = ball.radius_exponent();
        let mut status = match (&self.int_coeffs, alpha.is_integer()) {
            (Some(coeffs), true) => classify(
                &shift_integer(coeffs, &alpha.to_integer(), p, m, self.modulus.as_ref()),
                p,
                m,
            )?,
            _ => ball_status_at(self.f, &ball, &alpha)?,
        };
        if let Mode::Robust { floor } = self.mode {
            let exact_zero_below = |n0: u32| {
                let c = self.f.univariate_coeffs();
                (0..n0 as usize).all(|j| c.get(j).is_none_or(Zero::is_zero))
            };
            status = match status {
                BallStatus::ConstantNorm { v } if v < floor => status,
                BallStatus::Dominant { n0: 1, v, .. } if v < floor => status,
                // at 0, perturbations of degree >= n0 leave c_0..c_{n0-1} zero
                BallStatus::Dominant { n0, v, .. }
                    if v < floor && alpha.is_zero() && exact_zero_below(n0) =>
                {
                    status
                }
                _ => BallStatus::Undecided,
            };
        }
        let center = ball.center_residue().to_string();
        let expansion_point = (!alpha.is_integer() || alpha.to_integer() != ball.center_residue())
            .then(|| alpha.to_string());
        if status != BallStatus::Undecided {
            let value = local_contribution(status, &ball)?.value;
            return Ok(BallNode {
                center,
                radius_exponent: m,
                status,
                expansion_point,
                value: Some(value),
                children: Vec::new(),
            });
        }
        if m >= self.opts.depth_limit {
            return Err(ZetaError::DepthLimitExceeded(self.opts.depth_limit));
        }
        let children: Vec<Ball> = ball.children();
        let children = self
            .opts
            .exec
            .map(&children, |b| self.resolve(b.clone()))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(BallNode {
            center,
            radius_exponent: m,
            status,
            expansion_point: None,
            value: None,
            children,
        })
    }
}

/// Integer divisors of `|n|` for `n != 0`, or `None` when `n` is too large
/// to factor by trial division.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64().filter(|&x| x <= 1 << 40)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// p-integral rational roots of `gcd(f, f')`, i.e. the rational multiple
/// roots of `f` that can lie in `Z_p`.
fn multiple_rational_roots(f: &PolySeries, p: u64) -> Vec<BigRational> {
    let q = QPoly::new(f.univariate_coeffs());
    let dq = QPoly::new(
        q.coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(i.into()))
            .collect(),
    );
    let g = QPoly::gcd(&q, &dq);
    if g.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    let mut coeffs = g.coeffs().to_vec();
    if coeffs[0].is_zero() {
        roots.push(BigRational::zero());
        while coeffs.len() > 1 && coeffs[0].is_zero() {
            coeffs.remove(0);
        }
    }
    // clear denominators
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| {
        num_integer::lcm(acc, c.denom().clone())
    });
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let reduced = QPoly::new(coeffs);
    if reduced.degree().unwrap_or(0) > 0 {
        if let (Some(num), Some(den)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) {
            for a in &num {
                for b in den.iter().filter(|b| !(*b % p).is_zero()) {
                    for sign in [1, -1] {
                        let r = BigRational::new(a * sign, b.clone());
                        if reduced.eval(&r).is_zero() && !roots.contains(&r) {
                            roots.push(r);
                        }
                    }
                }
            }
        }
    }
    roots.sort();
    roots
}

fn check_input(f: &PolySeries, p: u64) -> Result<()> {
    if f.n() != 1 {
        return Err(ZetaError::PreconditionViolated(format!(
            "one-variable engine called with n = {}",
            f.n()
        )));
    }
    if f.is_zero() {
        return Err(ZetaError::PreconditionViolated("f is zero".into()));
    }
    f.check_p_integral(p)
}

/// `Z_f` for a one-variable polynomial by recursive ball decomposition.
///
/// Terminates whenever `f` and `f'` have no common zero in `Z_p` other than
/// p-integral rational roots. Otherwise the recursion hits the depth limit.
pub fn one_var_zeta(
    f: &PolySeries,
    ctx: &PrimeContext,
    opts: OneVarOptions,
) -> Result<OneVarResult> {
    check_input(f, ctx.p())?;
    let run = Run {
        f,
        int_coeffs: integer_coeffs(f, None),
        modulus: None,
        specials: multiple_rational_roots(f, ctx.p()),
        mode: Mode::Exact,
        opts,
    };
    let trace = run.resolve(Ball::unit(*ctx))?;
    let zeta = sum_leaves(&trace, ctx.p());
    Ok(OneVarResult { zeta, trace })
}

fn sum_leaves(trace: &BallNode, p: u64) -> ZetaRational {
    let leaves = trace.leaves();
    ZetaRational::sum(leaves.iter().filter_map(|l| l.value.as_ref()), p)
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizationReport {
    /// Every truncation `f_D` with `D >= threshold` has the same `Z`.
    pub threshold: u32,
    /// Largest valuation that decided a ball.
    pub max_valuation: u32,
    /// Precision below which decisions were accepted.
    pub floor: u32,
    /// The common value of `Z_{f_D}` for `D >= threshold`.
    pub zeta: ZetaRational,
    pub balls: usize,
}

/// A degree beyond which truncations of `f` all share one zeta function.
///
/// The decomposition is run on a high-degree truncation keeping only the
/// decisions made by a valuation `v` below a floor. Each such decision, and
/// the contribution it yields, depends only on `f mod p^{v+1}`, so any `D`
/// with `f_D = f mod p^{V+1}` (`V` the largest deciding valuation) gives the
/// same `Z`. A multiple root is only accepted at 0, where every dropped term
/// of degree at least its multiplicity keeps it; elsewhere a series whose
/// `f` and `f'` share a zero ends in `DepthLimitExceeded`.
pub fn stabilization_threshold_simple(
    f: &SeriesSpec,
    ctx: &PrimeContext,
    opts: OneVarOptions,
) -> Result<StabilizationReport> {
    if f.p() != ctx.p() {
        return Err(ZetaError::Validation(format!(
            "series is defined for p = {}, asked for p = {}",
            f.p(),
            ctx.p()
        )));
    }
    let floor = 2 * opts.depth_limit + 2;
    let robust = robust_run(f, ctx, opts, floor);
    if f.is_polynomial() {
        let poly = f.truncate(f.explicit_degree());
        let degree = poly.degree().unwrap_or(0);
        if let Ok(r) = robust {
            if r.threshold <= degree {
                return Ok(r);
            }
        }
        let exact = one_var_zeta(&poly, ctx, opts)?;
        let max_valuation = exact
            .trace
            .leaves()
            .iter()
            .filter_map(|l| l.status.deciding_valuation())
            .max()
            .unwrap_or(0);
        return Ok(StabilizationReport {
            threshold: degree,
            max_valuation,
            floor,
            zeta: exact.zeta,
            balls: exact.trace.count(),
        });
    }
    robust
}

fn robust_run(
    f: &SeriesSpec,
    ctx: &PrimeContext,
    opts: OneVarOptions,
    floor: u32,
) -> Result<StabilizationReport> {
    let g = f.truncate(f.degree_bound_below(floor)?);
    check_input(&g, ctx.p())?;
    // valuations at or above the floor never decide a ball
    let modulus = ctx.pow(floor);
    let run = Run {
        f: &g,
        int_coeffs: integer_coeffs(&g, Some(&modulus)),
        modulus: Some(modulus),
        specials: Vec::new(),
        mode: Mode::Robust { floor },
        opts,
    };
    let trace = run.resolve(Ball::unit(*ctx))?;
    let max_valuation = trace
        .leaves()
        .iter()
        .filter_map(|l| l.status.deciding_valuation())
        .max()
        .unwrap_or(0);
    let multiplicity = trace
        .leaves()
        .iter()
        .filter_map(|l| match l.status {
            BallStatus::Dominant { n0, .. } => Some(n0.saturating_sub(1)),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let threshold = f.congruence_threshold(max_valuation + 1)?.max(multiplicity);
    Ok(StabilizationReport {
        threshold,
        max_valuation,
        floor,
        zeta: sum_leaves(&trace, ctx.p()),
        balls: trace.count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PAdicApprox;
    use crate::rational_fn::rat;
    use crate::series::Certificate;
    use crate::zeta::monomial_zeta;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn ball(p: u64, center: u64, m: u32) -> Ball {
        Ball::new(PAdicApprox::from_u64(ctx(p), center, m), m).unwrap()
    }

    #[test]
    fn statuses() {
        let x2 = PolySeries::from_int_terms(1, &[(&[2], 1)]);
        assert_eq!(
            ball_status(&x2, &ball(3, 1, 1)).unwrap(),
            BallStatus::ConstantNorm { v: 0 }
        );
        assert_eq!(
            ball_status(&x2, &ball(3, 0, 1)).unwrap(),
            BallStatus::Dominant {
                n0: 2,
                v_b: 0,
                v: 2
            }
        );
        let xm1 = PolySeries::from_int_terms(1, &[(&[2], 1), (&[1], -2), (&[0], 1)]);
        assert_eq!(
            ball_status(&xm1, &ball(3, 1, 1)).unwrap(),
            BallStatus::Dominant {
                n0: 2,
                v_b: 0,
                v: 2
            }
        );
    }

    #[test]
    fn contributions() {
        let c = local_contribution(BallStatus::ConstantNorm { v: 0 }, &ball(3, 1, 1)).unwrap();
        assert_eq!(c.value, ZetaRational::constant(rat(1, 3), 3));
        let c = local_contribution(
            BallStatus::Dominant {
                n0: 2,
                v_b: 0,
                v: 2,
            },
            &ball(3, 1, 1),
        )
        .unwrap();
        let want = ZetaRational::new(
            QPoly::monomial(rat(2, 9), 2),
            &QPoly::one() - &QPoly::monomial(rat(1, 3), 2),
            3,
        );
        assert_eq!(c.value, want);
        for n in 1..=3 {
            let whole = Ball::unit(ctx(5));
            let c = local_contribution(
                BallStatus::Dominant {
                    n0: n,
                    v_b: 0,
                    v: 0,
                },
                &whole,
            )
            .unwrap();
            assert_eq!(c.value, monomial_zeta(n, 5).unwrap());
        }
        assert!(local_contribution(BallStatus::Undecided, &ball(3, 0, 1)).is_err());
    }

    #[test]
    fn square() {
        let f = PolySeries::from_int_terms(1, &[(&[2], 1)]);
        let r = one_var_zeta(&f, &ctx(3), OneVarOptions::default()).unwrap();
        assert_eq!(r.zeta, monomial_zeta(2, 3).unwrap());
    }

    #[test]
    fn truncated_family_d1() {
        // 4x^2 + x + 1 at p = 3
        let f = PolySeries::from_int_terms(1, &[(&[2], 4), (&[1], 1), (&[0], 1)]);
        let r = one_var_zeta(&f, &ctx(3), OneVarOptions::default()).unwrap();
        let want = ZetaRational::from_poly(QPoly::new(vec![rat(2, 3), rat(1, 3)]), 3);
        assert_eq!(r.zeta, want);
    }

    #[test]
    fn negative_double_root() {
        // (x + 1)^2 needs the expansion point -1
        let f = PolySeries::from_int_terms(1, &[(&[2], 1), (&[1], 2), (&[0], 1)]);
        let r = one_var_zeta(&f, &ctx(3), OneVarOptions::default()).unwrap();
        assert_eq!(r.zeta, monomial_zeta(2, 3).unwrap());
        // a double root at 1/2 for p = 3
        let f = PolySeries::from_int_terms(1, &[(&[2], 4), (&[1], -4), (&[0], 1)]);
        let r = one_var_zeta(&f, &ctx(3), OneVarOptions::default()).unwrap();
        assert_eq!(r.zeta, monomial_zeta(2, 3).unwrap());
    }

    #[test]
    fn measures_sum_to_one() {
        let f = PolySeries::from_int_terms(1, &[(&[3], 1), (&[1], -1)]);
        for p in [2, 3, 5] {
            let r = one_var_zeta(&f, &ctx(p), OneVarOptions::default()).unwrap();
            let total: BigRational = r
                .trace
                .leaves()
                .iter()
                .map(|l| inv_pow(p, l.radius_exponent))
                .sum();
            assert_eq!(total, BigRational::one());
        }
    }

    #[test]
    fn irrational_double_root_hits_depth_limit() {
        // (x^2 - 2)^2 at p = 7: sqrt 2 is in Z_7 but is not rational
        let f = PolySeries::from_int_terms(1, &[(&[4], 1), (&[2], -4), (&[0], 4)]);
        let opts = OneVarOptions {
            depth_limit: 6,
            exec: Exec::Sequential,
        };
        assert_eq!(
            one_var_zeta(&f, &ctx(7), opts).unwrap_err(),
            ZetaError::DepthLimitExceeded(6)
        );
    }

    #[test]
    fn threshold_for_geometric_linear_series() {
        // x + sum_{i>=2} 3^i x^i
        let p = 3;
        let f = SeriesSpec::with_tail(
            "linear-tail",
            p,
            PolySeries::from_int_terms(1, &[(&[1], 1)]),
            1,
            crate::series::geometric_tail(p, crate::series::Exponent(vec![2])),
            Some(Certificate::from_ints(1, 0)),
            Some(1),
        )
        .unwrap();
        let r = stabilization_threshold_simple(&f, &ctx(p), OneVarOptions::default()).unwrap();
        assert_eq!(r.threshold, 1);
        assert_eq!(r.zeta, monomial_zeta(1, 3).unwrap());
    }

    #[test]
    fn threshold_for_polynomials() {
        let f = PolySeries::from_int_terms(1, &[(&[2], 1)]);
        let s = SeriesSpec::from_polynomial("x^2", f, 3).unwrap();
        let r = stabilization_threshold_simple(&s, &ctx(3), OneVarOptions::default()).unwrap();
        assert!(r.threshold <= 2);
        assert_eq!(r.zeta, monomial_zeta(2, 3).unwrap());
    }
}
