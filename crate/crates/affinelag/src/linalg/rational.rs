//! Exact rational scalars.
//!
//! The engine represents the paper-level real coefficients by exact rationals;
//! every quantity in scope is rational, so nothing is lost and coboundary
//! membership stays decidable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational with positive denominator and reduced form.
/// `num_rational` maintains both invariants after every operation.
pub type Rational = BigRational;

/// Parse `"p/q"` or `"p"` into a rational. Rejects zero denominators.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator `{num}`"))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| format!("invalid rational denominator `{d}`"))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational::new(n, d))
}

/// Render a rational as `"p"` when integral and `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of the denominators, always positive.
pub fn denominator_lcm(v: &[Rational]) -> BigInt {
    let mut l = BigInt::one();
    for x in v {
        l = num_integer::lcm(l, x.denom().abs());
    }
    l
}
