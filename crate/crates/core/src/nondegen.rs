//! Face polynomials, their reductions mod p, and the non-degeneracy scan
//! over `(F_p^x)^n`.

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::exec::Exec;
use crate::newton::{Face, NewtonPolyhedron};
use crate::padic::PrimeContext;
use crate::series::{residue_mod_p, Exponent, PolySeries, SeriesSpec};

/// Terms of `f` whose exponents lie on a face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacePolynomial {
    pub face_id: usize,
    #[serde(serialize_with = "serialize_poly")]
    pub poly: PolySeries,
    /// For a series on an unbounded face: every term of degree at least this
    /// value has positive valuation and was left out. `f_tau` mod p is exact.
    pub dropped_from_degree: Option<u32>,
}

fn serialize_poly<S: serde::Serializer>(
    p: &PolySeries,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.render())
}

/// A polynomial over `F_p` in sparse form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    n: usize,
    p: u64,
    terms: Vec<(Vec<u32>, u64)>,
}

fn pow_mod(b: u64, mut e: u32, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (b % p) as u128;
    let m = p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

impl ModPoly {
    /// Reduces the coefficients of a p-integral polynomial mod p.
    pub fn reduce(f: &PolySeries, p: u64) -> Result<Self> {
        let mut terms = Vec::new();
        for (w, c) in f.terms() {
            let r = residue_mod_p(c, p).ok_or_else(|| {
                ZetaError::Validation(format!("coefficient {c} is not p-integral for p = {p}"))
            })?;
            if r != 0 {
                terms.push((w.0.clone(), r));
            }
        }
        Ok(ModPoly { n: f.n(), p, terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn eval(&self, x: &[u64]) -> u64 {
        let m = self.p as u128;
        let mut acc = 0u128;
        for (w, c) in &self.terms {
            let mut v = *c as u128;
            for (xi, &e) in x.iter().zip(w) {
                if e > 0 {
                    v = v * pow_mod(*xi, e, self.p) as u128 % m;
                }
            }
            acc = (acc + v) % m;
        }
        acc as u64
    }

    pub fn derivative(&self, var: usize) -> ModPoly {
        let mut terms = Vec::new();
        for (w, c) in &self.terms {
            let e = w[var] as u64;
            let c = (*c as u128 * (e % self.p) as u128 % self.p as u128) as u64;
            if c != 0 {
                let mut w2 = w.clone();
                w2[var] -= 1;
                terms.push((w2, c));
            }
        }
        ModPoly {
            n: self.n,
            p: self.p,
            terms,
        }
    }

    pub fn render(&self) -> String {
        let mut poly = PolySeries::zero(self.n);
        for (w, c) in &self.terms {
            poly.add_term(Exponent(w.clone()), BigRational::from_integer((*c).into()));
        }
        poly.render()
    }
}

/// Decodes an index in `0..(p-1)^n` into a point of `(F_p^x)^n`.
fn unit_point(mut idx: u64, n: usize, p: u64) -> Vec<u64> {
    let mut x = vec![0; n];
    for xi in x.iter_mut() {
        *xi = idx % (p - 1) + 1;
        idx /= p - 1;
    }
    x
}

fn torus_size(n: usize, ctx: &PrimeContext) -> Result<u64> {
    ctx.check_enumeration(n as u32)?;
    Ok((ctx.p() - 1).pow(n as u32))
}

fn on_face(poly: &NewtonPolyhedron, face: &Face, w: &Exponent) -> bool {
    face.contains_point(poly, w)
}

/// `f_tau` for a polynomial.
pub fn face_polynomial(f: &PolySeries, poly: &NewtonPolyhedron, face: &Face) -> FacePolynomial {
    let mut out = PolySeries::zero(f.n());
    for (w, c) in f.terms() {
        if on_face(poly, face, w) {
            out.add_term(w.clone(), c.clone());
        }
    }
    FacePolynomial {
        face_id: face.id,
        poly: out,
        dropped_from_degree: None,
    }
}

/// `f_tau` for a certified series.
///
/// Compact faces only carry exponents of degree at most the largest generator
/// degree, so they are exact. On unbounded faces the terms beyond the
/// certificate's unit-valuation degree are dropped and reported.
pub fn face_polynomial_series(
    f: &SeriesSpec,
    poly: &NewtonPolyhedron,
    face: &Face,
) -> Result<FacePolynomial> {
    if f.is_polynomial() {
        return Ok(face_polynomial(
            &f.truncate(f.explicit_degree()),
            poly,
            face,
        ));
    }
    let bound = f.support_bound().ok_or(ZetaError::SupportBoundMissing)?;
    let max_gen = poly
        .generators()
        .iter()
        .map(Exponent::degree)
        .max()
        .unwrap_or(0);
    let (degree, dropped) = if face.compact {
        (bound.max(max_gen), None)
    } else {
        let d = f.degree_bound_below(1)?.max(bound).max(max_gen);
        (d, Some(d + 1))
    };
    let mut fp = face_polynomial(&f.truncate(degree), poly, face);
    fp.dropped_from_degree = dropped;
    Ok(fp)
}

/// `N_tau` for one face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FaceCount {
    pub face_id: usize,
    pub n_tau: u64,
}

/// Counts the zeros of `\bar f_tau` on `(F_p^x)^n`.
pub fn count_face_zeros(fp: &FacePolynomial, ctx: &PrimeContext) -> Result<FaceCount> {
    let n = fp.poly.n();
    let size = torus_size(n, ctx)?;
    let red = ModPoly::reduce(&fp.poly, ctx.p())?;
    let n_tau = if red.is_zero() {
        size
    } else if red.is_monomial() {
        0
    } else {
        (0..size)
            .filter(|&i| red.eval(&unit_point(i, n, ctx.p())) == 0)
            .count() as u64
    };
    Ok(FaceCount {
        face_id: fp.face_id,
        n_tau,
    })
}

/// Verdict and zero count for one face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceVerdict {
    pub face_id: usize,
    pub dimension: usize,
    pub compact: bool,
    pub face_polynomial: String,
    pub reduced: String,
    pub nondegenerate: bool,
    /// A singular zero of `\bar f_tau` in `(F_p^x)^n`, when one exists.
    pub witness: Option<Vec<u64>>,
    pub n_tau: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropped_from_degree: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub face_id: usize,
    pub point: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    pub p: u64,
    pub nondegenerate: bool,
    /// First failing face (lowest id) and its singular point.
    pub witness: Option<Witness>,
    pub faces: Vec<FaceVerdict>,
}

impl NondegeneracyReport {
    pub fn counts(&self) -> Vec<FaceCount> {
        self.faces
            .iter()
            .map(|f| FaceCount {
                face_id: f.face_id,
                n_tau: f.n_tau,
            })
            .collect()
    }

    pub fn n_tau(&self, face_id: usize) -> Option<u64> {
        self.faces
            .iter()
            .find(|f| f.face_id == face_id)
            .map(|f| f.n_tau)
    }

    /// `DegenerateInput` for the witness, if any.
    pub fn require(&self) -> Result<()> {
        match &self.witness {
            None => Ok(()),
            Some(w) => Err(ZetaError::DegenerateInput {
                face: w.face_id,
                point: w.point.clone(),
            }),
        }
    }
}

fn scan_face(fp: &FacePolynomial, face: &Face, ctx: &PrimeContext) -> Result<FaceVerdict> {
    let n = fp.poly.n();
    let p = ctx.p();
    let size = torus_size(n, ctx)?;
    let red = ModPoly::reduce(&fp.poly, p)?;
    let partials: Vec<ModPoly> = (0..n).map(|i| red.derivative(i)).collect();
    let mut n_tau = 0u64;
    let mut witness = None;
    if red.is_zero() {
        // every point is a singular zero
        n_tau = size;
        witness = Some(vec![1; n]);
    } else {
        for i in 0..size {
            let x = unit_point(i, n, p);
            if red.eval(&x) != 0 {
                continue;
            }
            n_tau += 1;
            if witness.is_none() && partials.iter().all(|d| d.eval(&x) == 0) {
                witness = Some(x);
            }
        }
    }
    Ok(FaceVerdict {
        face_id: face.id,
        dimension: face.dimension,
        compact: face.compact,
        face_polynomial: fp.poly.render(),
        reduced: red.render(),
        nondegenerate: witness.is_none(),
        witness,
        n_tau,
        dropped_from_degree: fp.dropped_from_degree,
    })
}

fn assemble(
    faces: Vec<(FacePolynomial, &Face)>,
    ctx: &PrimeContext,
    exec: Exec,
) -> Result<NondegeneracyReport> {
    let verdicts: Vec<FaceVerdict> = exec
        .map(&faces, |(fp, face)| scan_face(fp, face, ctx))
        .into_iter()
        .collect::<Result<_>>()?;
    let witness = verdicts.iter().find_map(|v| {
        v.witness.as_ref().map(|pt| Witness {
            face_id: v.face_id,
            point: pt.clone(),
        })
    });
    Ok(NondegeneracyReport {
        p: ctx.p(),
        nondegenerate: witness.is_none(),
        witness,
        faces: verdicts,
    })
}

/// Tests every face of `Gamma(f)`, including `Gamma(f)` itself and the
/// unbounded faces.
pub fn is_nondegenerate(
    f: &PolySeries,
    poly: &NewtonPolyhedron,
    ctx: &PrimeContext,
    exec: Exec,
) -> Result<NondegeneracyReport> {
    torus_size(f.n(), ctx)?;
    let faces = poly
        .faces()
        .iter()
        .map(|face| (face_polynomial(f, poly, face), face))
        .collect();
    assemble(faces, ctx, exec)
}

/// [`is_nondegenerate`] for a certified series.
pub fn is_nondegenerate_series(
    f: &SeriesSpec,
    poly: &NewtonPolyhedron,
    ctx: &PrimeContext,
    exec: Exec,
) -> Result<NondegeneracyReport> {
    torus_size(f.n(), ctx)?;
    let faces = poly
        .faces()
        .iter()
        .map(|face| Ok((face_polynomial_series(f, poly, face)?, face)))
        .collect::<Result<Vec<_>>>()?;
    assemble(faces, ctx, exec)
}

/// True when every coefficient of `f` is zero mod p.
pub fn vanishes_mod_p(f: &PolySeries, p: u64) -> bool {
    f.terms().all(|(_, c)| residue_mod_p(c, p) == Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::polyhedron_of;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn face_polynomial_of_edge() {
        // x^3 + xy + y^2 + 3 x^5 y^5
        let f = PolySeries::from_int_terms(
            2,
            &[(&[3, 0], 1), (&[1, 1], 1), (&[0, 2], 1), (&[5, 5], 3)],
        );
        let poly = polyhedron_of(&f, 4).unwrap();
        let edge = poly.first_meet_locus(&[1, 1]);
        assert_eq!(face_polynomial(&f, &poly, edge).poly.render(), "x*y + y^2");
        assert_eq!(face_polynomial(&f, &poly, poly.face(0)).poly, f);
    }

    #[test]
    fn sum_of_squares_is_nondegenerate_mod_3() {
        let f = PolySeries::from_int_terms(2, &[(&[2, 0], 1), (&[0, 2], 1)]);
        let poly = polyhedron_of(&f, 4).unwrap();
        let r = is_nondegenerate(&f, &poly, &ctx(3), Exec::Sequential).unwrap();
        assert!(r.nondegenerate);
        assert!(r.witness.is_none());
    }

    #[test]
    fn square_of_linear_form_is_degenerate() {
        let f = PolySeries::from_int_terms(2, &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]);
        let poly = polyhedron_of(&f, 4).unwrap();
        let r = is_nondegenerate(&f, &poly, &ctx(3), Exec::Parallel).unwrap();
        assert!(!r.nondegenerate);
        let w = r.witness.clone().unwrap();
        let face = poly.face(w.face_id);
        assert_eq!(
            r.faces[w.face_id].face_polynomial, "x^2 + 2*x*y + y^2",
            "{face:?}"
        );
        assert!(w.point == vec![1, 2] || w.point == vec![2, 1]);
        assert!(matches!(
            r.require(),
            Err(ZetaError::DegenerateInput { .. })
        ));
    }

    #[test]
    fn linear_is_nondegenerate() {
        for p in [2, 3, 5, 7] {
            let f = PolySeries::from_int_terms(1, &[(&[1], 1)]);
            let poly = polyhedron_of(&f, 4).unwrap();
            assert!(
                is_nondegenerate(&f, &poly, &ctx(p), Exec::Sequential)
                    .unwrap()
                    .nondegenerate
            );
        }
    }

    #[test]
    fn zero_counts() {
        let fp = |f: PolySeries| FacePolynomial {
            face_id: 0,
            poly: f,
            dropped_from_degree: None,
        };
        let xy_sum = fp(PolySeries::from_int_terms(2, &[(&[1, 0], 1), (&[0, 1], 1)]));
        assert_eq!(count_face_zeros(&xy_sum, &ctx(3)).unwrap().n_tau, 2);
        let sq = fp(PolySeries::from_int_terms(1, &[(&[2], 1)]));
        assert_eq!(count_face_zeros(&sq, &ctx(7)).unwrap().n_tau, 0);
        let xy = fp(PolySeries::from_int_terms(2, &[(&[1, 1], 1)]));
        assert_eq!(count_face_zeros(&xy, &ctx(5)).unwrap().n_tau, 0);
    }

    #[test]
    fn enumeration_ceiling() {
        let f = PolySeries::from_int_terms(3, &[(&[1, 0, 0], 1)]);
        let poly = polyhedron_of(&f, 4).unwrap();
        let small = PrimeContext::with_enum_limit(5, 100).unwrap();
        assert!(matches!(
            is_nondegenerate(&f, &poly, &small, Exec::Sequential),
            Err(ZetaError::EnumLimitExceeded {
                requested: 125,
                limit: 100
            })
        ));
    }

    #[test]
    fn p_multiple_face_is_degenerate() {
        // 3x^2: the reduction vanishes identically
        let f = PolySeries::from_int_terms(1, &[(&[2], 3)]);
        let poly = polyhedron_of(&f, 4).unwrap();
        let r = is_nondegenerate(&f, &poly, &ctx(3), Exec::Sequential).unwrap();
        assert!(!r.nondegenerate);
        assert!(vanishes_mod_p(&f, 3));
    }
}
