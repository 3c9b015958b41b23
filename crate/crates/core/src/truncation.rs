//! Zeta functions of truncations `f_D` across a range of `D`, with a verdict
//! on whether they settle on a single value.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::exec::Exec;
use crate::newton::{minimal_support_series, DEFAULT_MAX_N};
use crate::onevar::{one_var_zeta, stabilization_threshold_simple, OneVarOptions};
use crate::padic::PrimeContext;
use crate::rational_fn::{inv_pow, QPoly, ZetaRational};
use crate::series::{geometric_tail, Certificate, Exponent, PolySeries, SeriesSpec};
use crate::zeta::{igusa_zeta_newton, ZetaOptions};

/// Consecutive agreeing values required before a stabilization verdict.
pub const WINDOW: usize = 3;

pub const COUNTEREXAMPLE_NAME: &str = "counterexample";
pub const SQUARE_TAIL_NAME: &str = "square-tail";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Newton,
    Onevar,
}

impl std::str::FromStr for Engine {
    type Err = ZetaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "newton" => Ok(Engine::Newton),
            "onevar" => Ok(Engine::Onevar),
            other => Err(ZetaError::Validation(format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    StabilizedAt { n: u32 },
    NonStabilizing { proof: String },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryError {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanEntry {
    pub d: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaRational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<EntryError>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationScan {
    pub series: String,
    pub p: u64,
    pub engine: Engine,
    /// Analytic bound beyond which every truncation has the same `Z`, when known.
    pub threshold: Option<u32>,
    pub results: Vec<ScanEntry>,
    pub verdict: Verdict,
}

impl TruncationScan {
    pub fn value_at(&self, d: u32) -> Option<&ZetaRational> {
        self.results
            .iter()
            .find(|e| e.d == d)
            .and_then(|e| e.zeta.as_ref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub depth_limit: u32,
    pub max_n: usize,
    pub exec: Exec,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            depth_limit: OneVarOptions::default().depth_limit,
            max_n: DEFAULT_MAX_N,
            exec: Exec::default(),
        }
    }
}

/// Threshold for the Newton engine: the truncation must contain every
/// minimal support point and every unit coefficient.
pub fn newton_threshold(f: &SeriesSpec) -> Result<u32> {
    let support = minimal_support_series(f)?;
    let polyhedral = support.iter().map(Exponent::degree).max().unwrap_or(0);
    let mod_p = f.congruence_threshold(1)?;
    Ok(polyhedral.max(mod_p))
}

fn zeta_of(
    f: &PolySeries,
    engine: Engine,
    ctx: &PrimeContext,
    opts: ScanOptions,
) -> Result<ZetaRational> {
    match engine {
        Engine::Newton => igusa_zeta_newton(
            f,
            ctx,
            ZetaOptions {
                max_n: opts.max_n,
                exec: Exec::Sequential,
            },
        ),
        Engine::Onevar => Ok(one_var_zeta(
            f,
            ctx,
            OneVarOptions {
                depth_limit: opts.depth_limit,
                exec: Exec::Sequential,
            },
        )?
        .zeta),
    }
}

/// Computes `Z_{f_D}` for every `D` in `d_min..=d_max` and issues a verdict.
pub fn scan(
    f: &SeriesSpec,
    ctx: &PrimeContext,
    d_min: u32,
    d_max: u32,
    engine: Engine,
    opts: ScanOptions,
) -> Result<TruncationScan> {
    if d_min > d_max {
        return Err(ZetaError::Validation(format!(
            "empty range {d_min}..={d_max}"
        )));
    }
    if f.p() != ctx.p() {
        return Err(ZetaError::Validation(format!(
            "series is defined for p = {}, asked for p = {}",
            f.p(),
            ctx.p()
        )));
    }
    if engine == Engine::Onevar && f.n() != 1 {
        return Err(ZetaError::PreconditionViolated(
            "the onevar engine needs a one-variable series".into(),
        ));
    }
    let ds: Vec<u32> = (d_min..=d_max).collect();
    let results: Vec<ScanEntry> =
        opts.exec
            .map(&ds, |&d| match zeta_of(&f.truncate(d), engine, ctx, opts) {
                Ok(z) => ScanEntry {
                    d,
                    zeta: Some(z),
                    error: None,
                },
                Err(e) => ScanEntry {
                    d,
                    zeta: None,
                    error: Some(EntryError {
                        kind: e.kind().into(),
                        message: e.to_string(),
                    }),
                },
            });

    let threshold = match engine {
        Engine::Newton => newton_threshold(f).ok(),
        Engine::Onevar => stabilization_threshold_simple(
            f,
            ctx,
            OneVarOptions {
                depth_limit: opts.depth_limit,
                exec: opts.exec,
            },
        )
        .ok()
        .map(|r| r.threshold),
    };
    let verdict = decide(f, ctx.p(), &results, threshold);
    Ok(TruncationScan {
        series: f.name().to_string(),
        p: ctx.p(),
        engine,
        threshold,
        results,
        verdict,
    })
}

fn decide(f: &SeriesSpec, p: u64, results: &[ScanEntry], threshold: Option<u32>) -> Verdict {
    if f.name() == COUNTEREXAMPLE_NAME && !f.is_polynomial() {
        return counterexample_verdict(p, results);
    }
    let Some(n) = threshold else {
        return Verdict::Inconclusive {
            reason: "no analytic stabilization threshold".into(),
        };
    };
    let tail: Vec<&ScanEntry> = results.iter().filter(|e| e.d >= n).collect();
    if tail.len() < WINDOW {
        return Verdict::Inconclusive {
            reason: format!("fewer than {WINDOW} scanned truncations at or beyond {n}"),
        };
    }
    let Some(first) = tail[0].zeta.as_ref() else {
        return Verdict::Inconclusive {
            reason: format!("engine failed at D = {}", tail[0].d),
        };
    };
    for e in &tail {
        match &e.zeta {
            Some(z) if z == first => {}
            Some(_) => {
                return Verdict::Inconclusive {
                    reason: format!("value changes at D = {}", e.d),
                }
            }
            None => {
                return Verdict::Inconclusive {
                    reason: format!("engine failed at D = {}", e.d),
                }
            }
        }
    }
    Verdict::StabilizedAt { n }
}

/// The family's closed forms show `Z_{f_{2D}} != Z_f` for every `D`; the
/// verdict is only issued when the scanned even truncations match them.
fn counterexample_verdict(p: u64, results: &[ScanEntry]) -> Verdict {
    for e in results.iter().filter(|e| e.d >= 2 && e.d % 2 == 0) {
        let forms = counterexample_closed_forms(p, e.d / 2).expect("d >= 2");
        match &e.zeta {
            Some(z) if *z == forms.z_f2d => {}
            _ => {
                return Verdict::Inconclusive {
                    reason: format!("D = {} disagrees with the closed form", e.d),
                }
            }
        }
    }
    Verdict::NonStabilizing {
        proof: "counterexample-closed-form".into(),
    }
}

/// `f = (x - 1)^2 sum_{i>=0} p^i x^i`: `a_0 = 1`, `a_1 = p - 2`,
/// `a_i = p^i - 2p^{i-1} + p^{i-2}` for `i >= 2`.
pub fn counterexample_family(p: u64) -> Result<SeriesSpec> {
    let ctx = PrimeContext::new(p)?;
    let coeff = move |i: u32| -> BigRational {
        let pw = |k: u32| BigRational::from_integer(num_traits::pow(BigInt::from(p), k as usize));
        match i {
            0 => BigRational::one(),
            1 => BigRational::from_integer(BigInt::from(p) - 2),
            _ => pw(i) - pw(i - 1) * BigRational::from_integer(2.into()) + pw(i - 2),
        }
    };
    let explicit = PolySeries::from_terms(1, (0..=1).map(|i| (Exponent(vec![i]), coeff(i))))?;
    let tail = Arc::new(move |w: &Exponent| coeff(w.0[0]));
    SeriesSpec::with_tail(
        COUNTEREXAMPLE_NAME,
        ctx.p(),
        explicit,
        1,
        tail,
        Some(Certificate::from_ints(1, 2)),
        Some(0),
    )
}

/// `x^2 + sum_{i>=3} p^i x^i`: non-degenerate with a tail that never reaches
/// the polyhedron or the reduction mod p.
pub fn square_tail_family(p: u64) -> Result<SeriesSpec> {
    let ctx = PrimeContext::new(p)?;
    SeriesSpec::with_tail(
        SQUARE_TAIL_NAME,
        ctx.p(),
        PolySeries::from_int_terms(1, &[(&[2], 1)]),
        2,
        geometric_tail(p, Exponent(vec![3])),
        Some(Certificate::from_ints(1, 0)),
        Some(2),
    )
}

/// Builds a built-in family by name.
pub fn family(name: &str, p: u64) -> Result<SeriesSpec> {
    match name {
        COUNTEREXAMPLE_NAME => counterexample_family(p),
        SQUARE_TAIL_NAME => square_tail_family(p),
        other => Err(ZetaError::Validation(format!("unknown family '{other}'"))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleForms {
    pub z_f: ZetaRational,
    pub z_f2d: ZetaRational,
}

/// `Z_f = (1 - 1/p)/(1 - t^2/p)` and
/// `Z_{f_{2D}} = (1 - 1/p) sum_{l<D} p^{-l} t^{2l} + p^{-D} t^{2D-1}`.
///
/// On the ball of points with `v(x - 1) >= D` the truncation has constant
/// valuation `2D - 1`, which gives the last term.
pub fn counterexample_closed_forms(p: u64, d: u32) -> Result<CounterexampleForms> {
    counterexample_forms_with_exponent(p, d, 2 * d as i64 - 1)
}

/// The same forms with `t^{2D+1}` in the last term. Kept to show that the
/// oracle rejects it.
pub fn counterexample_shifted_form(p: u64, d: u32) -> Result<CounterexampleForms> {
    counterexample_forms_with_exponent(p, d, 2 * d as i64 + 1)
}

fn counterexample_forms_with_exponent(p: u64, d: u32, last: i64) -> Result<CounterexampleForms> {
    if d == 0 {
        return Err(ZetaError::PreconditionViolated(
            "D must be at least 1".into(),
        ));
    }
    PrimeContext::new(p)?;
    let unit = BigRational::one() - inv_pow(p, 1);
    let z_f = ZetaRational::geometric(inv_pow(p, 1), 2, p).scale(&unit);
    let mut num = QPoly::monomial(inv_pow(p, d), last as usize);
    for l in 0..d {
        num = &num + &QPoly::monomial(&unit * inv_pow(p, l), 2 * l as usize);
    }
    let z_f2d = ZetaRational::from_poly(num, p);
    debug_assert!(z_f != z_f2d);
    Ok(CounterexampleForms { z_f, z_f2d })
}

/// True when the degree-`2D` or `2D+1` coefficients of the two forms differ.
pub fn forms_differ_near_2d(forms: &CounterexampleForms, d: u32) -> bool {
    let order = 2 * d as usize + 2;
    let a = forms.z_f.series(order);
    let b = forms.z_f2d.series(order);
    a[2 * d as usize] != b[2 * d as usize] || a[2 * d as usize + 1] != b[2 * d as usize + 1]
}

/// Zero check helper used by reports.
pub fn is_zero_series(s: &[BigRational]) -> bool {
    s.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational_fn::rat;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn family_coefficients() {
        let f = counterexample_family(3).unwrap();
        let c = |i: u32| f.coefficient(&Exponent(vec![i]));
        assert_eq!(c(0), rat(1, 1));
        assert_eq!(c(1), rat(1, 1));
        for i in 2..8 {
            assert_eq!(
                c(i),
                rat(4, 9) * BigRational::from_integer(BigInt::from(3).pow(i))
            );
        }
        // f_2 = 4x^2 + x + 1
        assert_eq!(f.truncate(2).render(), "4*x^2 + x + 1");
    }

    #[test]
    fn closed_forms() {
        let f = counterexample_closed_forms(3, 1).unwrap();
        assert_eq!(f.z_f2d.to_string(), "2/3 + 1/3*t");
        let f = counterexample_closed_forms(3, 2).unwrap();
        let want = ZetaRational::from_poly(
            QPoly::new(vec![rat(2, 3), rat(0, 1), rat(2, 9), rat(1, 9)]),
            3,
        );
        assert_eq!(f.z_f2d, want);
        for p in [3, 5, 7] {
            for d in 1..6 {
                let forms = counterexample_closed_forms(p, d).unwrap();
                assert_ne!(forms.z_f, forms.z_f2d);
                assert!(forms_differ_near_2d(&forms, d));
            }
        }
    }

    #[test]
    fn engine_reproduces_closed_forms() {
        for p in [3, 5] {
            let f = counterexample_family(p).unwrap();
            for d in 1..=3 {
                let z = one_var_zeta(&f.truncate(2 * d), &ctx(p), OneVarOptions::default())
                    .unwrap()
                    .zeta;
                assert_eq!(
                    z,
                    counterexample_closed_forms(p, d).unwrap().z_f2d,
                    "p={p} D={d}"
                );
            }
        }
    }

    #[test]
    fn counterexample_scan() {
        let f = counterexample_family(3).unwrap();
        let s = scan(&f, &ctx(3), 2, 8, Engine::Onevar, ScanOptions::default()).unwrap();
        assert_eq!(
            s.verdict,
            Verdict::NonStabilizing {
                proof: "counterexample-closed-form".into()
            }
        );
        let evens: Vec<&ZetaRational> = [2, 4, 6, 8]
            .iter()
            .map(|&d| s.value_at(d).unwrap())
            .collect();
        for i in 0..evens.len() {
            for j in i + 1..evens.len() {
                assert_ne!(evens[i], evens[j]);
            }
        }
        assert_eq!(s.threshold, None);
    }

    #[test]
    fn square_tail_scan() {
        let f = square_tail_family(3).unwrap();
        assert_eq!(newton_threshold(&f).unwrap(), 2);
        let s = scan(&f, &ctx(3), 0, 7, Engine::Newton, ScanOptions::default()).unwrap();
        assert_eq!(s.verdict, Verdict::StabilizedAt { n: 2 });
        let stable = crate::zeta::monomial_zeta(2, 3).unwrap();
        for d in 2..=7 {
            assert_eq!(s.value_at(d), Some(&stable));
        }
        assert!(s.results[0].error.is_some());

        let s = scan(&f, &ctx(3), 0, 7, Engine::Onevar, ScanOptions::default()).unwrap();
        assert_eq!(s.verdict, Verdict::StabilizedAt { n: 2 });
    }

    #[test]
    fn polynomial_scan() {
        let poly = PolySeries::from_int_terms(1, &[(&[3], 1), (&[2], 1)]);
        let f = SeriesSpec::from_polynomial("x^3 + x^2", poly, 3).unwrap();
        let s = scan(&f, &ctx(3), 1, 6, Engine::Newton, ScanOptions::default()).unwrap();
        assert_eq!(s.verdict, Verdict::StabilizedAt { n: 3 });
    }

    #[test]
    fn short_window_is_inconclusive() {
        let f = square_tail_family(3).unwrap();
        let s = scan(&f, &ctx(3), 0, 3, Engine::Newton, ScanOptions::default()).unwrap();
        assert!(matches!(s.verdict, Verdict::Inconclusive { .. }));
    }
}
