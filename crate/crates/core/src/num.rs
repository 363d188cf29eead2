//! Exact rational helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `a/b` or an integer. Decimal literals are rejected so every run stays exact.
pub fn parse_fraction(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidFraction(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let parse = |s: &str| -> Result<BigInt> {
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    let n = parse(num)?;
    let d = parse(den)?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Canonical `a/b` rendering; integers print without a denominator.
pub fn format_fraction(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn pow2(exp: i64) -> Rational {
    let p = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Largest `i` with `2^i <= r`. Requires `r > 0`.
pub fn floor_log2(r: &Rational) -> i64 {
    assert!(r.is_positive(), "floor_log2 of a non-positive value");
    let (n, d) = (r.numer(), r.denom());
    let mut i = n.bits() as i64 - d.bits() as i64;
    while pow2(i) > *r {
        i -= 1;
    }
    while pow2(i + 1) <= *r {
        i += 1;
    }
    i
}

/// Smallest `i` with `2^i >= r`. Requires `r > 0`.
pub fn ceil_log2(r: &Rational) -> i64 {
    let f = floor_log2(r);
    if pow2(f) == *r {
        f
    } else {
        f + 1
    }
}

/// Smallest `t >= 0` with `base^t >= target`. Requires `base > 1`.
pub fn min_power_at_least(base: &Rational, target: &Rational) -> u32 {
    assert!(*base > Rational::one());
    let mut t = 0;
    let mut acc = Rational::one();
    while acc < *target {
        acc *= base;
        t += 1;
    }
    t
}

pub fn ceil(r: &Rational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    if rem.is_zero() {
        q
    } else {
        q + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_literals() {
        assert_eq!(parse_fraction("1/20").unwrap(), frac(1, 20));
        assert_eq!(parse_fraction(" 3 ").unwrap(), int(3));
        assert_eq!(parse_fraction("-2/4").unwrap(), frac(-1, 2));
        assert!(parse_fraction("0.05").is_err());
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("1e3").is_err());
        assert!(parse_fraction("").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for s in ["1/20", "7", "-3/8", "0"] {
            assert_eq!(format_fraction(&parse_fraction(s).unwrap()), s);
        }
    }

    #[test]
    fn log2_bounds() {
        assert_eq!(floor_log2(&int(1)), 0);
        assert_eq!(ceil_log2(&int(1)), 0);
        assert_eq!(floor_log2(&int(5)), 2);
        assert_eq!(ceil_log2(&int(5)), 3);
        assert_eq!(floor_log2(&frac(1, 3)), -2);
        assert_eq!(ceil_log2(&frac(1, 3)), -1);
        assert_eq!(ceil_log2(&frac(1, 4)), -2);
        assert_eq!(floor_log2(&int(1024)), 10);
    }

    #[test]
    fn powers() {
        assert_eq!(min_power_at_least(&frac(5, 4), &int(1)), 0);
        assert_eq!(min_power_at_least(&frac(5, 4), &int(2)), 4);
        assert_eq!(min_power_at_least(&int(2), &int(16)), 4);
        assert_eq!(ceil(&frac(7, 2)), BigInt::from(4));
        assert_eq!(ceil(&int(3)), BigInt::from(3));
    }
}
