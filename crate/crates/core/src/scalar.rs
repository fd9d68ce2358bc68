//! Exact rational scalars.
//!
//! Every quantity in this crate is an element of Q represented in lowest
//! terms with a positive denominator; there is no floating point anywhere.
//! The representation is `num::BigRational`, which maintains both invariants
//! on construction.

use crate::error::{CoreError, Result};
use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` in lowest terms. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse an exact rational: `p`, `p/q`, or a finite decimal such as `-0.25`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    if t.is_empty() {
        return Err(CoreError::Parse { pos: 0, msg: "empty rational literal".into() });
    }
    if let Some(dot) = t.find('.') {
        let (int_part, frac_part) = (&t[..dot], &t[dot + 1..]);
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(CoreError::Parse { pos: dot, msg: format!("bad decimal literal `{t}`") });
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(CoreError::Parse { pos: 0, msg: format!("bad decimal literal `{t}`") });
        }
        let whole: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().map_err(|_| CoreError::Parse {
                pos: 0,
                msg: format!("bad integer part in `{t}`"),
            })?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| CoreError::Parse {
            pos: dot + 1,
            msg: format!("bad fractional part in `{t}`"),
        })?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = Rat::new(whole * &denom + frac, denom);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    t.parse::<Rat>().map_err(|_| CoreError::Parse {
        pos: 0,
        msg: format!("bad rational literal `{t}`"),
    })
}

/// Exact integer power with negative exponents allowed; `0^e` for `e < 0`
/// and `0^0` are rejected.
pub fn pow_rat(base: &Rat, exp: i64) -> Result<Rat> {
    if base.is_zero() {
        if exp > 0 {
            return Ok(Rat::zero());
        }
        return Err(CoreError::ZeroInput(format!("0^{exp}")));
    }
    if exp == 0 {
        return Ok(Rat::one());
    }
    let e = i32::try_from(exp.unsigned_abs())
        .map_err(|_| CoreError::Invalid(format!("exponent {exp} out of range")))?;
    let p = base.pow(e);
    if exp < 0 {
        Ok(p.recip())
    } else {
        Ok(p)
    }
}

/// (-1)^e as a rational, for signed exponents.
pub fn sign_pow(exp: i64) -> Rat {
    if exp.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Render in the canonical `p/q` form used across the CLI and model files
/// (integers print without the `/1`).
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

/// All positive divisors of `n` (absolute value taken). Sizes beyond u64 are
/// refused; the polynomial constructor only meets small coefficients.
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let abs = n.abs();
    if abs.is_zero() {
        return Err(CoreError::ZeroInput("divisors of 0".into()));
    }
    let small: u64 = (&abs).try_into().map_err(|_| {
        CoreError::Unsupported("coefficient too large for rational root search".into())
    })?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d != small / d {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    out.sort();
    Ok(out)
}
