//! Exact scalar arithmetic: rationals, quadratic field elements, intervals.
//!
//! Every decision made by this crate (signs, comparisons, floors) reduces to
//! integer arithmetic; no floating point is consulted anywhere.  Three value
//! kinds cover all scalars that occur:
//!
//! * [`Rational`] - arbitrary-precision rationals (re-exported from
//!   `num-rational`, always in lowest terms with positive denominator);
//! * [`QuadExt`] - exact elements `a + b*sqrt(m)` of a real quadratic field
//!   `Q(sqrt(m))` with a squarefree index `m >= 2`; signs are decided by
//!   exact squaring, floors by integer square roots plus one exact
//!   comparison;
//! * [`CertifiedInterval`] / [`SqrtExpr`] - rational enclosures of values
//!   like `u + c*sqrt(t)` that need not lie in the working field (support
//!   values of balls and ellipses).  Floors of enclosures either succeed or
//!   fail loudly with [`NumericError::AmbiguousFloor`]; nothing is ever
//!   rounded silently.

mod interval;
mod quad;

pub use interval::{floor_interval, CertifiedInterval, SqrtExpr};
pub(crate) use interval::quad_enclosure;
pub use quad::QuadExt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision integer used throughout.
pub type Int = BigInt;

/// Arbitrary-precision rational, kept in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Errors raised by exact scalar arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericError {
    /// An interval floor could not be decided within the refinement budget.
    #[error("floor undecidable on interval [{lo}, {hi}]")]
    AmbiguousFloor { lo: Rational, hi: Rational },
    /// Two operands with non-zero irrational parts live in different fields.
    #[error("mixed quadratic fields: sqrt({a}) vs sqrt({b})")]
    FieldMismatch { a: u64, b: u64 },
    /// A field index that is not a squarefree integer >= 2.
    #[error("field index {m} is not a squarefree integer >= 2")]
    NotSquarefree { m: u64 },
    /// A string that does not parse as `p/q`.
    #[error("malformed rational literal {text:?}")]
    BadRational { text: String },
}

/// Returns true if `m` is squarefree and at least 2.
pub fn is_squarefree(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut rest = m;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Floor of a rational as a big integer.
pub fn floor_rat(x: &Rational) -> Int {
    x.floor().to_integer()
}

/// Ceiling of a rational as a big integer.
pub fn ceil_rat(x: &Rational) -> Int {
    x.ceil().to_integer()
}

/// Nearest integer to `x`; halves round up, matching `floor(x + 1/2)`.
pub fn round_rat(x: &Rational) -> Int {
    floor_rat(&(x + Rational::new(BigInt::one(), BigInt::from(2))))
}

/// Formats a rational as `p/q` with an explicit denominator.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` (or a bare integer `p`) into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, NumericError> {
    let bad = || NumericError::BadRational { text: text.to_string() };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Exact square root of a non-negative integer, if it is a perfect square.
pub fn perfect_square_root(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact square root of a non-negative rational, if it is a rational square.
pub fn rational_square_root(t: &Rational) -> Option<Rational> {
    let n = perfect_square_root(t.numer())?;
    let d = perfect_square_root(t.denom())?;
    Some(Rational::new(n, d))
}

/// Rational enclosure `lo <= sqrt(t) <= hi` of width at most `2^-bits`.
///
/// Exact squares collapse to a point interval.
pub fn sqrt_enclosure(t: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!t.is_negative(), "sqrt of negative rational");
    if let Some(r) = rational_square_root(t) {
        return (r.clone(), r);
    }
    let scale = BigInt::one() << bits;
    let scaled = t * Rational::from_integer(&scale * &scale);
    let n = floor_rat(&scaled);
    let r = n.sqrt();
    let lo = Rational::new(r.clone(), scale.clone());
    let hi = Rational::new(r + 1, scale);
    (lo, hi)
}

/// Floor division helper on big integers.
pub(crate) fn div_floor_int(a: &Int, b: &Int) -> Int {
    a.div_floor(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn squarefree_classification() {
        assert!(is_squarefree(2));
        assert!(is_squarefree(3));
        assert!(is_squarefree(5));
        assert!(is_squarefree(6));
        assert!(is_squarefree(10));
        assert!(!is_squarefree(1));
        assert!(!is_squarefree(4));
        assert!(!is_squarefree(8));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(0));
    }

    #[test]
    fn rational_parse_and_format_round_trip() {
        let x = parse_rational("3/2").unwrap();
        assert_eq!(x, rat(3, 2));
        assert_eq!(format_rational(&x), "3/2");
        // Normalisation: sign moves to the numerator, terms cancel.
        assert_eq!(format_rational(&parse_rational("4/-6").unwrap()), "-2/3");
        assert_eq!(format_rational(&parse_rational("7").unwrap()), "7/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn floors_and_rounding() {
        assert_eq!(floor_rat(&rat(3, 2)), BigInt::from(1));
        assert_eq!(floor_rat(&rat(-3, 2)), BigInt::from(-2));
        assert_eq!(ceil_rat(&rat(-3, 2)), BigInt::from(-1));
        assert_eq!(round_rat(&rat(1, 2)), BigInt::from(1));
        assert_eq!(round_rat(&rat(-1, 2)), BigInt::from(0));
        assert_eq!(round_rat(&rat(2, 3)), BigInt::from(1));
    }

    #[test]
    fn sqrt_enclosures_bracket_the_root() {
        let (lo, hi) = sqrt_enclosure(&rat(2, 1), 40);
        assert!(&lo * &lo < rat(2, 1));
        assert!(&hi * &hi > rat(2, 1));
        assert!(&hi - &lo <= Rational::new(BigInt::one(), BigInt::one() << 40));
        // A perfect square collapses.
        let (lo, hi) = sqrt_enclosure(&rat(9, 4), 10);
        assert_eq!(lo, rat(3, 2));
        assert_eq!(hi, rat(3, 2));
    }
}
