//! Exact integer and rational scalars.
//!
//! Both types are the `num` bignum types; rationals are kept in lowest terms
//! with a positive denominator by `num-rational` on every operation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `num / den` in lowest terms. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn pow2(exp: u32) -> Integer {
    Integer::one() << exp
}

/// `n choose k` by the running product `prod (n-i)/(i+1)`; every partial
/// product is itself a binomial, so the division is exact.
pub fn binomial(n: u64, k: u64) -> Result<Integer> {
    if k > n {
        return Err(Error::Binomial { n, k });
    }
    let k = k.min(n - k);
    let mut acc = Integer::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    Ok(acc)
}

pub fn checked_div(num: &Rational, den: &Rational) -> Result<Rational> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(num / den)
}

/// Parses `[+-]digits[/digits]`. No whitespace is accepted anywhere.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let fail = |position, reason| Error::Parse {
        input: text.to_string(),
        position,
        reason,
    };
    let bytes = text.as_bytes();
    let mut pos = 0;
    let negative = match bytes.first() {
        Some(b'-') => {
            pos = 1;
            true
        }
        Some(b'+') => {
            pos = 1;
            false
        }
        Some(_) => false,
        None => return Err(fail(0, "empty input")),
    };

    let numer_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == numer_start {
        return Err(fail(pos, "expected a digit"));
    }
    let numer: Integer = text[numer_start..pos].parse().expect("ascii digits");

    let denom = if pos == bytes.len() {
        Integer::one()
    } else if bytes[pos] == b'/' {
        pos += 1;
        let denom_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == denom_start {
            return Err(fail(pos, "expected a digit after '/'"));
        }
        if pos != bytes.len() {
            return Err(fail(pos, "unexpected trailing character"));
        }
        let denom: Integer = text[denom_start..pos].parse().expect("ascii digits");
        if denom.is_zero() {
            return Err(fail(denom_start, "zero denominator"));
        }
        denom
    } else {
        return Err(fail(pos, "expected '/' or end of input"));
    };

    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Canonical text: `p/q` in lowest terms, `p` when `q == 1`, ASCII `-`.
pub fn render_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
