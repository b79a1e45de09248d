//! Exact rational scalars.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// `(-1)^e` as a scalar.
pub fn sign(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

pub fn factorial(n: usize) -> Scalar {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Scalar::from_integer(acc)
}

pub fn binomial(n: usize, k: usize) -> Scalar {
    if k > n {
        return zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc = acc.div_floor(&BigInt::from(i + 1));
    }
    Scalar::from_integer(acc)
}

/// Formats as `p` or `p/q` in lowest terms with a leading `-` for negatives.
pub fn fmt_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Parses `p`, `-p`, `p/q`; the denominator must be positive and nonzero.
pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let text = text.trim();
    if text.is_empty() || text.len() > 4096 {
        return None;
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let valid_int = |s: &str, allow_sign: bool| {
        let digits = if allow_sign {
            s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid_int(num, true) {
        return None;
    }
    let n: BigInt = num.trim_start_matches('+').parse().ok()?;
    let d: BigInt = match den {
        Some(d) => {
            if !valid_int(d, false) {
                return None;
            }
            d.parse().ok()?
        }
        None => BigInt::one(),
    };
    if d.is_zero() || d.is_negative() {
        return None;
    }
    Some(Scalar::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_scalar("-2/4"), Some(frac(-1, 2)));
        assert_eq!(parse_scalar("+3"), Some(int(3)));
        assert_eq!(parse_scalar("1/0"), None);
        assert_eq!(parse_scalar("1/-2"), None);
        assert_eq!(parse_scalar("abc"), None);
        assert_eq!(fmt_scalar(&frac(6, -4)), "-3/2");
        assert_eq!(fmt_scalar(&int(0)), "0");
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(5), int(120));
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(2, 3), int(0));
        assert_eq!(sign(-3), int(-1));
    }
}
