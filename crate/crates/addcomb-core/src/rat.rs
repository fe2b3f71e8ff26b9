//! Exact rational helpers: parsing, powers with rational exponents, and
//! direction-conservative approximations.
//!
//! All lemma and certification checks work on `BigRational`; floating point
//! only appears when rendering reports.

use std::cmp::Ordering;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn ratio_u(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_u64(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn from_u128(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p`, `p/q` or a plain decimal like `0.75` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |msg: &str| Error::InvalidParameter(format!("rational `{s}`: {msg}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().map_err(|_| bad("bad decimal"))?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad("expected `p`, `p/q` or a decimal"))?;
    Ok(BigRational::from_integer(n))
}

/// Destructures a positive rational into small `(num, den)`, rejecting inputs
/// too large for exponent arithmetic.
pub fn as_small_ratio(r: &BigRational, cap: u64) -> Result<(u64, u64)> {
    if !r.is_positive() {
        return Err(Error::InvalidParameter(format!("expected a positive rational, got {r}")));
    }
    let num = r.numer().to_u64().filter(|&v| v <= cap);
    let den = r.denom().to_u64().filter(|&v| v <= cap);
    match (num, den) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(Error::InvalidParameter(format!(
            "rational {r} too large for exponent arithmetic (cap {cap})"
        ))),
    }
}

/// Exact comparison of `base^(p/q)` against `rhs`; both sides positive.
///
/// Works by cross-multiplying: `base^(p/q) <=> rhs` iff `a^p d^q <=> c^q b^p`
/// for `base = a/b`, `rhs = c/d`.
pub fn cmp_pow(base: &BigRational, p: u32, q: u32, rhs: &BigRational) -> Ordering {
    debug_assert!(base.is_positive() && rhs.is_positive() && q > 0);
    let a = base.numer().magnitude().pow(p);
    let b = base.denom().magnitude().pow(p);
    let c = rhs.numer().magnitude().pow(q);
    let d = rhs.denom().magnitude().pow(q);
    (a * d).cmp(&(c * b))
}

/// Exact integer-power helper for rationals.
pub fn pow(base: &BigRational, exp: u32) -> BigRational {
    BigRational::new(base.numer().pow(exp), base.denom().pow(exp))
}

/// `base^(-p/q)` rounded up to a multiple of `2^-prec`, for `base > 1`.
///
/// The result `r` satisfies `base^(-p/q) <= r < base^(-p/q) + 2^-prec`, so
/// thresholds derived from it only widen in the documented direction.
pub fn upper_inverse_power(base: &BigRational, p: u32, q: u32, prec: u32) -> Result<BigRational> {
    if cmp_pow(base, 1, 1, &BigRational::one()) != Ordering::Greater {
        return Err(Error::InvalidParameter(format!(
            "upper_inverse_power requires base > 1, got {base}"
        )));
    }
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameter("zero exponent component".into()));
    }
    let a = base.numer().magnitude().pow(p);
    let b = base.denom().magnitude().pow(p);
    let m = BigUint::one() << prec;
    // smallest u with (u/m)^q >= b^p / a^p
    let target = &b * m.pow(q);
    let mut u = (&target / &a).nth_root(q);
    while u.pow(q) * &a < target {
        u += 1u32;
    }
    Ok(BigRational::new(BigInt::from(u), BigInt::from(m)))
}

/// `⌈x^(p/q)⌉` for an integer `x >= 1`, or `None` when the result would need
/// more than `max_bits` bits (the caller treats that as a vacuously huge bound).
pub fn ceil_root_pow(x: &BigUint, p: u32, q: u32, max_bits: u64) -> Option<BigUint> {
    debug_assert!(!x.is_zero() && q > 0);
    let approx_bits = x.bits().saturating_mul(p as u64) / q as u64;
    if approx_bits > max_bits {
        return None;
    }
    let xp = x.pow(p);
    let mut m = xp.nth_root(q);
    while m.pow(q) < xp {
        m += 1u32;
    }
    Some(m)
}

/// Ceiling of a positive rational as an unsigned big integer.
pub fn ceil_to_uint(r: &BigRational) -> BigUint {
    debug_assert!(r.is_positive());
    let c = r.ceil();
    c.numer().magnitude().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio_u(3, 4));
        assert_eq!(parse_rational("2").unwrap(), from_u64(2));
        assert_eq!(parse_rational("0.75").unwrap(), ratio_u(3, 4));
        assert_eq!(parse_rational("-1/2").unwrap(), -ratio_u(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn cmp_pow_exact() {
        // 2^(3/2) vs 3: 8 vs 9
        assert_eq!(cmp_pow(&from_u64(2), 3, 2, &from_u64(3)), Ordering::Less);
        // 4^(1/2) == 2
        assert_eq!(cmp_pow(&from_u64(4), 1, 2, &from_u64(2)), Ordering::Equal);
        // (9/4)^(1/2) > 7/5
        assert_eq!(cmp_pow(&ratio_u(9, 4), 1, 2, &ratio_u(7, 5)), Ordering::Greater);
    }

    #[test]
    fn upper_inverse_power_brackets() {
        // 2^(-1) exactly representable
        let r = upper_inverse_power(&from_u64(2), 1, 1, 16).unwrap();
        assert_eq!(r, ratio_u(1, 2));
        // 2^(-1/2): between 0.70710 and 0.70712 at 32 bits
        let r = upper_inverse_power(&from_u64(2), 1, 2, 32).unwrap();
        assert_eq!(cmp_pow(&from_u64(2), 1, 2, &(BigRational::one() / &r)), Ordering::Greater);
        let slack = &r - ratio_u(1, 1 << 20);
        assert_eq!(cmp_pow(&from_u64(2), 1, 2, &(BigRational::one() / slack)), Ordering::Less);
    }

    #[test]
    fn ceil_root_pow_values() {
        // 4^(3/2) = 8
        assert_eq!(ceil_root_pow(&BigUint::from(4u32), 3, 2, 64), Some(BigUint::from(8u32)));
        // 2^(3/2) = 2.82.. -> 3
        assert_eq!(ceil_root_pow(&BigUint::from(2u32), 3, 2, 64), Some(BigUint::from(3u32)));
        assert_eq!(ceil_root_pow(&BigUint::from(2u32), 1 << 20, 1, 64), None);
    }
}
