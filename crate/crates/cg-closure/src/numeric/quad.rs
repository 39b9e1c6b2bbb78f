//! Elements `a + b*sqrt(m)` of a real quadratic field.
//!
//! The index `m` is a squarefree integer `>= 2`, fixed per computation; a
//! value with zero irrational part is a plain rational and is compatible
//! with every field.  Signs are decided by comparing exact squares, floors
//! by an integer square root followed by at most one exact comparison, so
//! no decision ever consults floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::{
    div_floor_int, floor_rat, format_rational, is_squarefree, parse_rational, Int, NumericError,
    Rational,
};

/// An exact element `rat + irr * sqrt(m)` of `Q(sqrt(m))`.
#[derive(Clone, Debug)]
pub struct QuadExt {
    rat: Rational,
    irr: Rational,
    m: u64,
}

impl QuadExt {
    /// Creates `rat + irr*sqrt(m)`, validating that `m` is squarefree and `>= 2`.
    pub fn new(rat: Rational, irr: Rational, m: u64) -> Result<Self, NumericError> {
        if !is_squarefree(m) {
            return Err(NumericError::NotSquarefree { m });
        }
        Ok(QuadExt { rat, irr, m })
    }

    /// A plain rational viewed as an element of `Q(sqrt(m))`.
    pub fn rational(rat: Rational, m: u64) -> Self {
        QuadExt { rat, irr: Rational::zero(), m }
    }

    /// An integer viewed as an element of `Q(sqrt(m))`.
    pub fn integer(n: impl Into<Int>, m: u64) -> Self {
        Self::rational(Rational::from_integer(n.into()), m)
    }

    /// Zero in `Q(sqrt(m))`.
    pub fn zero(m: u64) -> Self {
        Self::integer(0, m)
    }

    /// One in `Q(sqrt(m))`.
    pub fn one(m: u64) -> Self {
        Self::integer(1, m)
    }

    /// The generator `sqrt(m)` itself.
    pub fn sqrt_m(m: u64) -> Result<Self, NumericError> {
        Self::new(Rational::zero(), Rational::from_integer(Int::from(1)), m)
    }

    /// Rational part `a` of `a + b*sqrt(m)`.
    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    /// Irrational coefficient `b` of `a + b*sqrt(m)`.
    pub fn irr_part(&self) -> &Rational {
        &self.irr
    }

    /// Field index `m`.
    pub fn field_index(&self) -> u64 {
        self.m
    }

    /// True if the value lies in `Q` (zero irrational part).
    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    /// True if the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.rat.is_integer()
    }

    /// True if the value is zero.
    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    /// The value as a rational, if its irrational part vanishes.
    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rat.clone())
    }

    fn m_rational(&self) -> Rational {
        Rational::from_integer(Int::from(self.m))
    }

    /// Exact sign: -1, 0 or +1, decided by comparing squares.
    pub fn sign(&self) -> i32 {
        let sr = rational_sign(&self.rat);
        let si = rational_sign(&self.irr);
        if si == 0 {
            return sr;
        }
        if sr == 0 || sr == si {
            return si;
        }
        // Opposite signs: |a| vs |b|*sqrt(m) is decided by a^2 vs b^2*m.
        // Equality would force sqrt(m) rational, impossible for squarefree m.
        let lhs = &self.rat * &self.rat;
        let rhs = &self.irr * &self.irr * self.m_rational();
        match lhs.cmp(&rhs) {
            Ordering::Greater => sr,
            Ordering::Less => si,
            Ordering::Equal => 0,
        }
    }

    /// Absolute value.
    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact floor.
    ///
    /// Writes the value as `(A + B*sqrt(m)) / C` over a common denominator,
    /// floors `B*sqrt(m)` with an integer square root, and repairs the at
    /// most one unit of slack with an exact comparison.
    pub fn floor(&self) -> Int {
        if self.irr.is_zero() {
            return floor_rat(&self.rat);
        }
        let c = self.rat.denom() * self.irr.denom();
        let a = self.rat.numer() * self.irr.denom();
        let b = self.irr.numer() * self.rat.denom();
        let b2m = &b * &b * Int::from(self.m);
        let root = num_integer::Roots::sqrt(&b2m);
        let floor_bsqrt = if !b.is_negative() {
            root
        } else if &root * &root == b2m {
            -root
        } else {
            -root - 1
        };
        let mut f = div_floor_int(&(a + floor_bsqrt), &c);
        while self.cmp_int(&(&f + 1)) != Ordering::Less {
            f += 1;
        }
        while self.cmp_int(&f) == Ordering::Less {
            f -= 1;
        }
        f
    }

    /// Exact ceiling.
    pub fn ceil(&self) -> Int {
        -(-self).floor()
    }

    /// Exact comparison against an integer.
    pub fn cmp_int(&self, k: &Int) -> Ordering {
        self.cmp(&QuadExt::integer(k.clone(), self.m))
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.cmp(&QuadExt::rational(r.clone(), self.m))
    }

    /// Multiplies by a rational scalar.
    pub fn times_rat(&self, r: &Rational) -> Self {
        QuadExt { rat: &self.rat * r, irr: &self.irr * r, m: self.m }
    }

    /// Divides by a non-zero rational scalar.
    pub fn div_rat(&self, r: &Rational) -> Self {
        assert!(!r.is_zero(), "division by zero rational");
        QuadExt { rat: &self.rat / r, irr: &self.irr / r, m: self.m }
    }

    /// Serialises as a `["p/q", "r/s"]` pair (field index carried by context).
    pub fn to_pair(&self) -> [String; 2] {
        [format_rational(&self.rat), format_rational(&self.irr)]
    }

    /// Parses a `["p/q", "r/s"]` pair against a context field index.
    pub fn from_pair(rat: &str, irr: &str, m: u64) -> Result<Self, NumericError> {
        QuadExt::new(parse_rational(rat)?, parse_rational(irr)?, m)
    }

    /// Field index shared by two operands; panics on a genuine mismatch.
    fn joined_m(&self, other: &Self) -> u64 {
        if self.irr.is_zero() {
            other.m
        } else if other.irr.is_zero() || self.m == other.m {
            self.m
        } else {
            panic!("{}", NumericError::FieldMismatch { a: self.m, b: other.m });
        }
    }
}

fn rational_sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.rat == other.rat
            && self.irr == other.irr
            && (self.irr.is_zero() || self.m == other.m)
    }
}

impl Eq for QuadExt {}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    /// Exact order by value; operands must share a field.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { rat: -&self.rat, irr: -&self.irr, m: self.m }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

impl Add for &QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        QuadExt {
            rat: &self.rat + &rhs.rat,
            irr: &self.irr + &rhs.irr,
            m: self.joined_m(rhs),
        }
    }
}

impl Sub for &QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        QuadExt {
            rat: &self.rat - &rhs.rat,
            irr: &self.irr - &rhs.irr,
            m: self.joined_m(rhs),
        }
    }
}

impl Mul for &QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        let m = self.joined_m(rhs);
        // Rational operands dominate in practice; skip the cross terms.
        if self.irr.is_zero() {
            return QuadExt { rat: &self.rat * &rhs.rat, irr: &self.rat * &rhs.irr, m };
        }
        if rhs.irr.is_zero() {
            return QuadExt { rat: &self.rat * &rhs.rat, irr: &self.irr * &rhs.rat, m };
        }
        let m_rat = Rational::from_integer(Int::from(m));
        QuadExt {
            rat: &self.rat * &rhs.rat + &self.irr * &rhs.irr * &m_rat,
            irr: &self.rat * &rhs.irr + &self.irr * &rhs.rat,
            m,
        }
    }
}

impl Div for &QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: &QuadExt) -> QuadExt {
        assert!(!rhs.is_zero(), "division by zero in Q(sqrt(m))");
        let m = self.joined_m(rhs);
        if rhs.irr.is_zero() {
            return QuadExt { rat: &self.rat / &rhs.rat, irr: &self.irr / &rhs.rat, m };
        }
        let m_rat = Rational::from_integer(Int::from(m));
        // 1/(c + d*sqrt(m)) = (c - d*sqrt(m)) / (c^2 - d^2 m); the norm is
        // non-zero for non-zero operands because m is squarefree.
        let norm = &rhs.rat * &rhs.rat - &rhs.irr * &rhs.irr * &m_rat;
        assert!(!norm.is_zero(), "zero norm: field index is not squarefree");
        let inv = QuadExt { rat: &rhs.rat / &norm, irr: -(&rhs.irr / &norm), m };
        self * &inv
    }
}

macro_rules! forward_owned_binop {
    ($($trait:ident, $method:ident);* $(;)?) => {$(
        impl $trait for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned_binop! {
    Add, add;
    Sub, sub;
    Mul, mul;
    Div, div;
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            return write!(f, "{}", format_rational(&self.rat));
        }
        if self.rat.is_zero() {
            return write!(f, "{}*sqrt({})", format_rational(&self.irr), self.m);
        }
        if self.irr.is_negative() {
            write!(
                f,
                "{} - {}*sqrt({})",
                format_rational(&self.rat),
                format_rational(&-&self.irr),
                self.m
            )
        } else {
            write!(
                f,
                "{} + {}*sqrt({})",
                format_rational(&self.rat),
                format_rational(&self.irr),
                self.m
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(Int::from(p), Int::from(q))
    }

    fn qe(rp: i64, rq: i64, ip: i64, iq: i64) -> QuadExt {
        QuadExt::new(rat(rp, rq), rat(ip, iq), 2).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_field_index() {
        assert_eq!(
            QuadExt::new(rat(1, 1), rat(1, 1), 4).unwrap_err(),
            NumericError::NotSquarefree { m: 4 }
        );
        assert!(QuadExt::new(rat(0, 1), rat(1, 1), 1).is_err());
        assert!(QuadExt::sqrt_m(12).is_err());
        assert!(QuadExt::sqrt_m(10).is_ok());
    }

    #[test]
    fn signs_decided_by_squaring() {
        // 3 - 2*sqrt(2) > 0 because 3^2 = 9 > 8 = (2*sqrt(2))^2.
        assert_eq!(qe(3, 1, -2, 1).sign(), 1);
        // 1 - sqrt(2) < 0 because 1 < 2.
        assert_eq!(qe(1, 1, -1, 1).sign(), -1);
        // 99/70 - sqrt(2) > 0 because 9801/4900 > 2.
        assert_eq!(qe(99, 70, -1, 1).sign(), 1);
        // 41/29 - sqrt(2) < 0 because 1681/841 < 2.
        assert_eq!(qe(41, 29, -1, 1).sign(), -1);
        assert_eq!(qe(0, 1, 0, 1).sign(), 0);
        assert_eq!(qe(0, 1, -3, 7).sign(), -1);
    }

    #[test]
    fn floors_of_quadratic_values() {
        // floor(sqrt(2)) = 1: 1^2 <= 2 < 2^2.
        assert_eq!(qe(0, 1, 1, 1).floor(), Int::from(1));
        // floor(3 - 2*sqrt(2)) = 0: the value lies in (0, 1).
        assert_eq!(qe(3, 1, -2, 1).floor(), Int::from(0));
        // floor((3/2)*sqrt(2)) = 2: 4 < 9/2 < 9.
        assert_eq!(qe(0, 1, 3, 2).floor(), Int::from(2));
        // floor(-sqrt(2)) = -2.
        assert_eq!(qe(0, 1, -1, 1).floor(), Int::from(-2));
        // Exact integers floor to themselves.
        assert_eq!(qe(7, 1, 0, 1).floor(), Int::from(7));
        assert_eq!(qe(-3, 2, 0, 1).floor(), Int::from(-2));
        // Ceilings.
        assert_eq!(qe(0, 1, 1, 1).ceil(), Int::from(2));
        assert_eq!(qe(3, 1, -2, 1).ceil(), Int::from(1));
    }

    #[test]
    fn field_arithmetic_identities() {
        let one = QuadExt::one(2);
        // (1 + sqrt(2))(1 - sqrt(2)) = -1.
        assert_eq!(&qe(1, 1, 1, 1) * &qe(1, 1, -1, 1), -&one);
        // (3 - 2*sqrt(2))(3 + 2*sqrt(2)) = 1.
        assert_eq!(&qe(3, 1, -2, 1) * &qe(3, 1, 2, 1), one.clone());
        // 1/(1 + sqrt(2)) = sqrt(2) - 1.
        assert_eq!(&one / &qe(1, 1, 1, 1), qe(-1, 1, 1, 1));
        // (1 + sqrt(2)) + (1 - sqrt(2)) = 2 exactly.
        assert_eq!(&qe(1, 1, 1, 1) + &qe(1, 1, -1, 1), QuadExt::integer(2, 2));
    }

    #[test]
    fn rationals_are_field_agnostic() {
        let a = QuadExt::rational(rat(1, 2), 2);
        let b = QuadExt::rational(rat(1, 3), 3);
        assert_eq!(&a + &b, QuadExt::rational(rat(5, 6), 5));
        let c = QuadExt::sqrt_m(3).unwrap();
        assert_eq!((&a + &c).field_index(), 3);
    }

    #[test]
    #[should_panic(expected = "mixed quadratic fields")]
    fn mixing_irrational_fields_panics() {
        let _ = QuadExt::sqrt_m(2).unwrap() + QuadExt::sqrt_m(3).unwrap();
    }

    #[test]
    fn ordering_sorts_by_value() {
        let mut xs = vec![
            qe(0, 1, 1, 1),   // sqrt(2) ~ 1.414
            qe(3, 1, -2, 1),  // ~ 0.172
            qe(-1, 1, 1, 1),  // ~ 0.414
            qe(3, 2, 0, 1),   // 1.5
            qe(0, 1, -1, 2),  // ~ -0.707
        ];
        xs.sort();
        let floors: Vec<_> = xs.iter().map(|x| x.floor()).collect();
        assert_eq!(
            floors,
            vec![Int::from(-1), Int::from(0), Int::from(0), Int::from(1), Int::from(1)]
        );
        assert_eq!(xs[4], qe(3, 2, 0, 1));
    }

    #[test]
    fn pair_serialisation_round_trip() {
        let x = qe(-3, 4, 7, 5);
        let [r, i] = x.to_pair();
        assert_eq!(r, "-3/4");
        assert_eq!(i, "7/5");
        assert_eq!(QuadExt::from_pair(&r, &i, 2).unwrap(), x);
    }

    /// High-precision evaluation of `x` as a bracketing rational interval,
    /// using a 200-bit enclosure of sqrt(m).  Independent of `sign`/`floor`.
    fn bracket(x: &QuadExt) -> (Rational, Rational) {
        let m = Rational::from_integer(Int::from(x.field_index()));
        let (slo, shi) = super::super::sqrt_enclosure(&m, 200);
        let (ilo, ihi) = if x.irr_part().is_negative() {
            (x.irr_part() * &shi, x.irr_part() * &slo)
        } else {
            (x.irr_part() * &slo, x.irr_part() * &shi)
        };
        (x.rat_part() + &ilo, x.rat_part() + &ihi)
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-1_000_000i64..1_000_000, 1i64..10_000).prop_map(|(p, q)| rat(p, q))
    }

    fn field_index() -> impl Strategy<Value = u64> {
        prop_oneof![Just(2u64), Just(3), Just(5), Just(6), Just(7), Just(10)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2500))]

        /// floor(x) <= x < floor(x) + 1, with both comparisons exact.
        #[test]
        fn floor_brackets_value(r in small_rat(), i in small_rat(), m in field_index()) {
            let x = QuadExt::new(r, i, m).unwrap();
            let f = x.floor();
            prop_assert!(x.cmp_int(&f) != Ordering::Less);
            prop_assert!(x.cmp_int(&(&f + 1)) == Ordering::Less);
        }

        /// Exact signs agree with a 200-bit numeric bracket.
        #[test]
        fn sign_matches_high_precision_bracket(r in small_rat(), i in small_rat(), m in field_index()) {
            let x = QuadExt::new(r, i, m).unwrap();
            let (lo, hi) = bracket(&x);
            if lo.is_positive() {
                prop_assert_eq!(x.sign(), 1);
            } else if hi.is_negative() {
                prop_assert_eq!(x.sign(), -1);
            }
            // Brackets of width 2^-200 that straddle zero only occur for
            // values that are rationally zero; sign() handles those exactly.
        }

        /// Field axioms: commutativity, associativity, distributivity,
        /// and multiplicative inverses.
        #[test]
        fn field_axioms(
            (ar, ai) in (small_rat(), small_rat()),
            (br, bi) in (small_rat(), small_rat()),
            (cr, ci) in (small_rat(), small_rat()),
            m in field_index(),
        ) {
            let a = QuadExt::new(ar, ai, m).unwrap();
            let b = QuadExt::new(br, bi, m).unwrap();
            let c = QuadExt::new(cr, ci, m).unwrap();
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b) * &b, a.clone());
            }
        }

        /// Comparison is antisymmetric and agrees with subtraction sign.
        #[test]
        fn compare_consistent_with_sign(
            (ar, ai) in (small_rat(), small_rat()),
            (br, bi) in (small_rat(), small_rat()),
            m in field_index(),
        ) {
            let a = QuadExt::new(ar, ai, m).unwrap();
            let b = QuadExt::new(br, bi, m).unwrap();
            let ord = a.cmp(&b);
            prop_assert_eq!(ord.reverse(), b.cmp(&a));
            let diff_sign = (&a - &b).sign();
            prop_assert_eq!(
                ord,
                match diff_sign {
                    s if s < 0 => Ordering::Less,
                    0 => Ordering::Equal,
                    _ => Ordering::Greater,
                }
            );
        }
    }
}
