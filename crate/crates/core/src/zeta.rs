//! `Z_f` for non-degenerate `f` as an exact rational function of `t = p^{-s}`:
//! a unit-box factor per face times a lattice-point generating function
//! over the face's cone.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::exec::Exec;
use crate::newton::{
    all_cones, polyhedron_of, polyhedron_of_series, Cone, NewtonPolyhedron, DEFAULT_MAX_N,
};
use crate::nondegen::{is_nondegenerate, is_nondegenerate_series, NondegeneracyReport};
use crate::padic::PrimeContext;
use crate::rational_fn::{inv_pow, QPoly, ZetaRational};
use crate::series::{PolySeries, SeriesSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZetaOptions {
    pub max_n: usize,
    pub exec: Exec,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions {
            max_n: DEFAULT_MAX_N,
            exec: Exec::default(),
        }
    }
}

fn q(x: u64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// `L = p^{-n}((p-1)^n - p N (1-t)/(p-t))`.
pub fn unit_box_factor(n_tau: u64, n: usize, p: u64) -> ZetaRational {
    let pn = inv_pow(p, n as u32);
    let units = q((p - 1).pow(n as u32));
    // ((p-1)^n (p - t) - pN (1 - t)) / (p - t)
    let p_minus_t = QPoly::new(vec![q(p), -BigRational::one()]);
    let one_minus_t = QPoly::new(vec![BigRational::one(), -BigRational::one()]);
    let num = &p_minus_t.scale(&units) - &one_minus_t.scale(&(q(p) * q(n_tau)));
    ZetaRational::new(num.scale(&pn), p_minus_t, p)
}

/// `sum_{k in Delta_tau, k integral} p^{-|k|} t^{m(k)}`.
pub fn cone_sum(cone: &Cone, poly: &NewtonPolyhedron, p: u64) -> ZetaRational {
    let sigma = |v: &[i64]| v.iter().sum::<i64>() as u32;
    let mut total = ZetaRational::zero(p);
    for piece in &cone.simplicial_pieces {
        let mut num = QPoly::zero();
        for h in &piece.points {
            let m = poly.m_value(h) as usize;
            num = &num + &QPoly::monomial(inv_pow(p, sigma(h)), m);
        }
        let mut den = QPoly::one();
        for g in &piece.rays {
            let m = poly.m_value(g) as usize;
            den = &den * &(&QPoly::one() - &QPoly::monomial(inv_pow(p, sigma(g)), m));
        }
        total = &total + &ZetaRational::new(num, den, p);
    }
    total
}

/// One summand `L_tau * S_tau` (or `L_Gamma` alone for face 0).
#[derive(Debug, Clone, Serialize)]
pub struct FaceTerm {
    pub face_id: usize,
    pub n_tau: u64,
    pub unit_box: ZetaRational,
    pub cone_sum: Option<ZetaRational>,
    pub contribution: ZetaRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonZeta {
    pub zeta: ZetaRational,
    pub terms: Vec<FaceTerm>,
}

fn assemble(
    poly: &NewtonPolyhedron,
    report: &NondegeneracyReport,
    p: u64,
    exec: Exec,
) -> Result<NewtonZeta> {
    report.require()?;
    let n = poly.n();
    let cones = all_cones(poly, exec)?;
    let whole = report.n_tau(0).expect("face 0 scanned");
    let l_gamma = unit_box_factor(whole, n, p);
    let mut terms = vec![FaceTerm {
        face_id: 0,
        n_tau: whole,
        unit_box: l_gamma.clone(),
        cone_sum: None,
        contribution: l_gamma,
    }];
    let proper: Vec<FaceTerm> = exec.map(&cones, |cone| {
        let n_tau = report.n_tau(cone.face_id).expect("every face scanned");
        let l = unit_box_factor(n_tau, n, p);
        let s = cone_sum(cone, poly, p);
        let contribution = &l * &s;
        FaceTerm {
            face_id: cone.face_id,
            n_tau,
            unit_box: l,
            cone_sum: Some(s),
            contribution,
        }
    });
    terms.extend(proper);
    let zeta = ZetaRational::sum(terms.iter().map(|t| &t.contribution), p);
    Ok(NewtonZeta { zeta, terms })
}

fn check_hypotheses(f: &PolySeries, p: u64) -> Result<()> {
    if f.is_zero() {
        return Err(ZetaError::HypothesisViolated(
            "f is the zero polynomial".into(),
        ));
    }
    if !f.constant_term().is_zero() {
        return Err(ZetaError::HypothesisViolated(format!(
            "f(0) = {} is nonzero",
            f.constant_term()
        )));
    }
    f.check_p_integral(p)
}

/// `Z_f` via the Newton polyhedron, with the per-face breakdown.
pub fn igusa_zeta_newton_detailed(
    f: &PolySeries,
    ctx: &PrimeContext,
    opts: ZetaOptions,
) -> Result<NewtonZeta> {
    check_hypotheses(f, ctx.p())?;
    let poly = polyhedron_of(f, opts.max_n)?;
    let report = is_nondegenerate(f, &poly, ctx, opts.exec)?;
    assemble(&poly, &report, ctx.p(), opts.exec)
}

/// `Z_f` for a polynomial that is non-degenerate with respect to its Newton
/// polyhedron, with `f(0) = 0` and `f != 0`.
pub fn igusa_zeta_newton(
    f: &PolySeries,
    ctx: &PrimeContext,
    opts: ZetaOptions,
) -> Result<ZetaRational> {
    Ok(igusa_zeta_newton_detailed(f, ctx, opts)?.zeta)
}

/// [`igusa_zeta_newton`] for a certified series. The answer depends only on
/// the polyhedron and the face counts, both of which are finite data.
pub fn igusa_zeta_newton_series(
    f: &SeriesSpec,
    ctx: &PrimeContext,
    opts: ZetaOptions,
) -> Result<NewtonZeta> {
    if f.p() != ctx.p() {
        return Err(ZetaError::Validation(format!(
            "series is defined for p = {}, asked for p = {}",
            f.p(),
            ctx.p()
        )));
    }
    if f.is_polynomial() {
        return igusa_zeta_newton_detailed(&f.truncate(f.explicit_degree()), ctx, opts);
    }
    let bound = f.support_bound().ok_or(ZetaError::SupportBoundMissing)?;
    check_hypotheses(&f.truncate(bound), ctx.p())?;
    let poly = polyhedron_of_series(f, opts.max_n)?;
    let report = is_nondegenerate_series(f, &poly, ctx, opts.exec)?;
    assemble(&poly, &report, ctx.p(), opts.exec)
}

/// `Z_{x^{n0}} = (1 - 1/p) / (1 - p^{-1} t^{n0})`.
pub fn monomial_zeta(n0: u32, p: u64) -> Result<ZetaRational> {
    if n0 == 0 {
        return Err(ZetaError::PreconditionViolated(
            "exponent must be at least 1".into(),
        ));
    }
    let c = BigRational::one() - inv_pow(p, 1);
    Ok(ZetaRational::geometric(inv_pow(p, 1), n0 as usize, p).scale(&c))
}
