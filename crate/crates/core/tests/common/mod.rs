#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use igusa_core::padic::{hensel_lift_general, valuation_int, PrimeContext, UniPoly};
use igusa_core::PolySeries;

/// `f(x) = p^{2e+k} r + p^e u (x - a) + sum_j c_j (x - a)^j`: a polynomial with
/// `f(a) = 0 mod p^{2e+k}` and `v_p(f'(a)) = e` whenever `p` does not divide `u`.
pub fn planted(p: u64, a: i64, e: u32, k: u32, u: i64, r: i64, higher: &[i64]) -> UniPoly {
    let pb = BigInt::from(p);
    let mut g = vec![
        num_traits::pow(pb.clone(), (2 * e + k) as usize) * r,
        num_traits::pow(pb, e as usize) * u,
    ];
    g.extend(higher.iter().map(|&c| BigInt::from(c)));
    UniPoly::new(g).shift_scale(&BigInt::from(-a), &BigInt::one())
}

/// Lifts and checks the contract: `f(xi) = 0 mod p^M`, `xi = a mod p^{e+k}`,
/// and `v_p(f'(xi)) = e`.
pub fn check_lift(f: &UniPoly, a: i64, e: u32, k: u32, p: u64, m: u32) -> Result<(), String> {
    let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
    let a = BigInt::from(a);
    let xi = hensel_lift_general(f, &a, e, k, ctx, m).map_err(|e| e.to_string())?;
    let x = xi.value();
    if !f.eval(x).mod_floor(&ctx.pow(m)).is_zero() {
        return Err(format!("f({x}) != 0 mod {p}^{m}"));
    }
    if !(x - &a).mod_floor(&ctx.pow(e + k)).is_zero() {
        return Err(format!("{x} != {a} mod {p}^{}", e + k));
    }
    if valuation_int(&f.derivative().eval(x), p) != Some(e) {
        return Err(format!("v(f'({x})) != {e}"));
    }
    Ok(())
}

pub fn poly(text: &str) -> PolySeries {
    igusa_core::parse_expression(text, None).unwrap()
}

/// The small corpus shared by the oracle and geometry checks.
pub const CORPUS: [&str; 6] = [
    "x",
    "x^2",
    "x*(x - 1)",
    "x*y",
    "x^2 + y^2",
    "x^3 + x*y + y^2",
];
