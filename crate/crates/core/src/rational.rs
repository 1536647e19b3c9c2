//! Exact rational numbers.
//!
//! Every mass, value and price in the crate is an arbitrary-precision
//! rational; equality and ordering are exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type Rational = num_rational::BigRational;

/// `numer / denom` as an exact rational. Panics if `denom` is zero.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Largest rational `g` such that both `a / g` and `b / g` are integers.
///
/// `gcd(0, b) = |b|`.
pub fn gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let numer = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Rational::new(numer, a.denom() * b.denom())
}

/// Least common multiple of the denominators of `xs` (1 for an empty input).
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_fractions() {
        assert_eq!(gcd(&rat(1, 4), &rat(1, 6)), rat(1, 12));
        assert_eq!(gcd(&rat(2, 3), &rat(4, 9)), rat(2, 9));
        assert_eq!(gcd(&Rational::zero(), &rat(-3, 5)), rat(3, 5));
    }

    #[test]
    fn rationals_are_reduced() {
        let r = rat(6, -8);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(4));
    }

    #[test]
    fn common_denominator_is_lcm() {
        let xs = [rat(1, 4), rat(5, 6), int(3)];
        assert_eq!(common_denominator(&xs), BigInt::from(12));
    }
}
