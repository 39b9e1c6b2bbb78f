//! Certified rational enclosures and ambiguity-aware floors.
//!
//! Support values of smooth bodies are square roots that need not lie in the
//! working field, so they are carried as [`CertifiedInterval`]s: exact
//! rational brackets `[lo, hi]` around the true value, refinable on demand.
//! [`floor_interval`] floors such a value only when the bracket pins the
//! floor down; otherwise it refines within a budget and then fails with
//! [`NumericError::AmbiguousFloor`] rather than rounding silently.
//!
//! [`SqrtExpr`] is the concrete refinable value `base + coeff*sqrt(radicand)`
//! produced by ball and ellipse support oracles.  Its refiner detects exact
//! integer hits (the one case bisection alone cannot decide) by an exact
//! comparison in the working field, so flooring a true square root always
//! terminates.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{
    floor_rat, rational_square_root, sqrt_enclosure, Int, NumericError, QuadExt, Rational,
};

/// An exact rational bracket `lo <= value <= hi` around a real number.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedInterval {
    /// Certified lower bound.
    pub lo: Rational,
    /// Certified upper bound.
    pub hi: Rational,
    /// Whether a refinement callback can shrink this bracket further.
    pub refinable: bool,
}

impl CertifiedInterval {
    /// Creates a bracket; panics unless `lo <= hi`.
    pub fn new(lo: Rational, hi: Rational, refinable: bool) -> Self {
        assert!(lo <= hi, "inverted interval");
        CertifiedInterval { lo, hi, refinable }
    }

    /// The degenerate bracket around an exactly known value.
    pub fn point(value: Rational) -> Self {
        CertifiedInterval { lo: value.clone(), hi: value, refinable: false }
    }

    /// Bracket width `hi - lo`.
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Floors a bracketed value, refining at most `budget` times.
///
/// The floor is determined as soon as both endpoints share a floor.  The
/// callback returns the next (tighter) bracket, or `None` when it cannot
/// refine further; exhaustion yields [`NumericError::AmbiguousFloor`] with
/// the final bracket attached.
pub fn floor_interval<F>(
    interval: CertifiedInterval,
    mut refine: F,
    budget: u32,
) -> Result<Int, NumericError>
where
    F: FnMut(&CertifiedInterval) -> Option<CertifiedInterval>,
{
    let mut iv = interval;
    let mut spent = 0u32;
    loop {
        let lo_floor = floor_rat(&iv.lo);
        if lo_floor == floor_rat(&iv.hi) {
            return Ok(lo_floor);
        }
        if !iv.refinable || spent == budget {
            return Err(NumericError::AmbiguousFloor { lo: iv.lo, hi: iv.hi });
        }
        spent += 1;
        match refine(&iv) {
            Some(next) => iv = next,
            None => return Err(NumericError::AmbiguousFloor { lo: iv.lo, hi: iv.hi }),
        }
    }
}

/// The exact value `base + coeff * sqrt(radicand)` with `radicand >= 0`.
///
/// `base` and `radicand` live in the working field; the square root itself
/// usually does not.  The struct offers exact comparisons against field
/// elements (by sign analysis and squaring) and arbitrarily tight rational
/// enclosures.
#[derive(Clone, Debug)]
pub struct SqrtExpr {
    base: QuadExt,
    coeff: Rational,
    radicand: QuadExt,
}

impl SqrtExpr {
    /// Creates `base + coeff*sqrt(radicand)`; panics if `radicand < 0`.
    pub fn new(base: QuadExt, coeff: Rational, radicand: QuadExt) -> Self {
        assert!(radicand.sign() >= 0, "negative radicand");
        SqrtExpr { base, coeff, radicand }
    }

    fn field_index(&self) -> u64 {
        if self.base.is_rational() {
            self.radicand.field_index()
        } else {
            self.base.field_index()
        }
    }

    /// The affine part `base`.
    pub fn base(&self) -> &QuadExt {
        &self.base
    }

    /// The coefficient of the square root.
    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    /// The radicand under the square root.
    pub fn radicand(&self) -> &QuadExt {
        &self.radicand
    }

    /// The exact value as a field element, when `sqrt(radicand)` lies in
    /// `Q(sqrt(m))`; otherwise `None`.
    pub fn exact(&self) -> Option<QuadExt> {
        let root = sqrt_in_field(&self.radicand)?;
        Some(&self.base + &root.times_rat(&self.coeff))
    }

    /// Exact comparison against a field element.
    pub fn cmp_quad(&self, rhs: &QuadExt) -> Ordering {
        // Compare coeff*sqrt(radicand) with w := rhs - base.
        let w = rhs - &self.base;
        let lhs_sign = if self.coeff.is_zero() || self.radicand.is_zero() {
            0
        } else if self.coeff.is_positive() {
            1
        } else {
            -1
        };
        let w_sign = w.sign();
        if lhs_sign != w_sign {
            return lhs_sign.cmp(&w_sign);
        }
        if lhs_sign == 0 {
            return Ordering::Equal;
        }
        // Same non-zero sign: squaring preserves (or flips) the order.
        let lhs_sq = self.radicand.times_rat(&(&self.coeff * &self.coeff));
        let rhs_sq = &w * &w;
        let ord = lhs_sq.cmp(&rhs_sq);
        if lhs_sign > 0 {
            ord
        } else {
            ord.reverse()
        }
    }

    /// Exact comparison against an integer.
    pub fn cmp_int(&self, k: &Int) -> Ordering {
        self.cmp_quad(&QuadExt::integer(k.clone(), self.field_index()))
    }

    /// A certified bracket of width roughly `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> CertifiedInterval {
        let (base_lo, base_hi) = quad_enclosure(&self.base, bits);
        let (rad_lo, rad_hi) = quad_enclosure(&self.radicand, bits);
        let rad_lo = if rad_lo.is_negative() { Rational::zero() } else { rad_lo };
        let sq_lo = sqrt_enclosure(&rad_lo, bits).0;
        let sq_hi = sqrt_enclosure(&rad_hi, bits).1;
        let (lo, hi) = if self.coeff.is_negative() {
            (base_lo + &self.coeff * sq_hi, base_hi + &self.coeff * sq_lo)
        } else {
            (base_lo + &self.coeff * sq_lo, base_hi + &self.coeff * sq_hi)
        };
        CertifiedInterval::new(lo, hi, true)
    }

    /// A refinement callback for [`floor_interval`], doubling precision per
    /// call and collapsing to a point bracket on an exact integer hit.
    pub fn refiner(&self) -> impl FnMut(&CertifiedInterval) -> Option<CertifiedInterval> + '_ {
        let mut bits = 32u32;
        move |iv: &CertifiedInterval| {
            // Bisection alone cannot separate a value from itself: when only
            // a few integer candidates remain, test them exactly.
            let lo_floor = floor_rat(&iv.lo);
            let hi_floor = floor_rat(&iv.hi);
            if (&hi_floor - &lo_floor) <= BigInt::from(4) {
                let mut k = &lo_floor + 1;
                while k <= hi_floor {
                    if self.cmp_int(&k) == Ordering::Equal {
                        let exact = Rational::from_integer(k);
                        return Some(CertifiedInterval::point(exact));
                    }
                    k += 1;
                }
            }
            bits = bits.saturating_mul(2);
            Some(self.enclosure(bits))
        }
    }

    /// Exact floor; always terminates because values outside the working
    /// field are irrational and rational values are recognised by `exact`.
    pub fn floor_exact(&self) -> Int {
        if let Some(v) = self.exact() {
            return v.floor();
        }
        let mut bits = 64u32;
        loop {
            let enc = self.enclosure(bits);
            let lo_floor = floor_rat(&enc.lo);
            if lo_floor == floor_rat(&enc.hi) {
                return lo_floor;
            }
            bits = bits.saturating_mul(2);
        }
    }
}

/// Rational bracket of width at most about `2^-bits` around a field value
/// (exact point bracket for rational values).
pub(crate) fn quad_enclosure(q: &QuadExt, bits: u32) -> (Rational, Rational) {
    if let Some(r) = q.to_rational() {
        return (r.clone(), r);
    }
    let scale = Rational::from_integer(Int::one() << bits);
    let n = q.times_rat(&scale).floor();
    (
        Rational::new(n.clone(), Int::one() << bits),
        Rational::new(n + 1, Int::one() << bits),
    )
}

/// Square root of a non-negative field element within the same field, if any.
///
/// For rational `t` this means `t = q^2` or `t = q^2 * m`; for irrational
/// `a + b*sqrt(m)` it solves `(u + v*sqrt(m))^2 = a + b*sqrt(m)` over the
/// rationals.
fn sqrt_in_field(x: &QuadExt) -> Option<QuadExt> {
    let m = x.field_index();
    let m_rat = Rational::from_integer(Int::from(m));
    if let Some(t) = x.to_rational() {
        if let Some(r) = rational_square_root(&t) {
            return Some(QuadExt::rational(r, m));
        }
        if let Some(q) = rational_square_root(&(&t / &m_rat)) {
            return QuadExt::new(Rational::zero(), q, m).ok();
        }
        return None;
    }
    let a = x.rat_part();
    let b = x.irr_part();
    // u^2 + m v^2 = a and 2uv = b force u^2 to solve
    // z^2 - a z + m b^2 / 4 = 0.
    let disc = a * a - &m_rat * b * b;
    let s = rational_square_root(&disc)?;
    let half = Rational::new(Int::one(), Int::from(2));
    for z in [(a + &s) * &half, (a - &s) * &half] {
        if let Some(u) = rational_square_root(&z) {
            if u.is_zero() {
                continue;
            }
            let v = b / (&u * Rational::from_integer(Int::from(2)));
            let candidate = QuadExt::new(u, v, m).ok()?;
            let candidate = if candidate.sign() < 0 { -&candidate } else { candidate };
            if &candidate * &candidate == *x {
                return Some(candidate);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(Int::from(p), Int::from(q))
    }

    #[test]
    fn decided_interval_needs_no_refinement() {
        let iv = CertifiedInterval::new(rat(19, 10), rat(199, 100), false);
        let floor = floor_interval(iv, |_| panic!("refiner must not run"), 10).unwrap();
        assert_eq!(floor, Int::from(1));
    }

    #[test]
    fn unrefinable_ambiguous_interval_errors() {
        let iv = CertifiedInterval::new(rat(199, 100), rat(201, 100), false);
        let err = floor_interval(iv, |_| None, 10).unwrap_err();
        assert_eq!(
            err,
            NumericError::AmbiguousFloor { lo: rat(199, 100), hi: rat(201, 100) }
        );
    }

    #[test]
    fn refinement_resolves_an_exact_integer() {
        // The value is exactly 2 = 0 + 1*sqrt(4); brackets straddle 2 until
        // the refiner detects the hit and collapses.
        let expr = SqrtExpr::new(QuadExt::zero(2), rat(1, 1), QuadExt::integer(4, 2));
        let iv = CertifiedInterval::new(rat(199, 100), rat(201, 100), true);
        let floor = floor_interval(iv, expr.refiner(), 16).unwrap();
        assert_eq!(floor, Int::from(2));
    }

    #[test]
    fn adversarial_refiner_exhausts_budget() {
        // A refiner that halves the bracket but insists on keeping 2 inside:
        // the floor of the true value 2 - 1e-9 is never decided.
        let two = rat(2, 1);
        let refine = |iv: &CertifiedInterval| {
            let lo = (&iv.lo + &two) / rat(2, 1);
            let hi = (&iv.hi + &two) / rat(2, 1);
            Some(CertifiedInterval::new(lo, hi, true))
        };
        let iv = CertifiedInterval::new(rat(19, 10), rat(21, 10), true);
        let err = floor_interval(iv, refine, 12).unwrap_err();
        match err {
            NumericError::AmbiguousFloor { lo, hi } => {
                assert!(lo < two && two < hi);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sqrt_expr_floor_matches_known_values() {
        // (3/2)*sqrt(2): floor 2.
        let expr = SqrtExpr::new(QuadExt::zero(2), rat(3, 2), QuadExt::integer(2, 2));
        assert_eq!(expr.floor_exact(), Int::from(2));
        // sqrt(5) over the field Q(sqrt(2)): genuinely outside, floor 2.
        let expr = SqrtExpr::new(QuadExt::zero(2), rat(1, 1), QuadExt::integer(5, 2));
        assert!(expr.exact().is_none());
        assert_eq!(expr.floor_exact(), Int::from(2));
        // 1 - 2*sqrt(3) over Q(sqrt(3)): floor(-2.46..) = -3.
        let expr = SqrtExpr::new(QuadExt::one(3), rat(-2, 1), QuadExt::integer(3, 3));
        assert_eq!(expr.floor_exact(), Int::from(-3));
    }

    #[test]
    fn exact_roots_inside_the_field_are_recognised() {
        // sqrt(2) in Q(sqrt(2)).
        let expr = SqrtExpr::new(QuadExt::zero(2), rat(1, 1), QuadExt::integer(2, 2));
        assert_eq!(expr.exact().unwrap(), QuadExt::sqrt_m(2).unwrap());
        // sqrt(9/4) = 3/2.
        let expr = SqrtExpr::new(QuadExt::zero(2), rat(1, 1), QuadExt::rational(rat(9, 4), 2));
        assert_eq!(expr.exact().unwrap(), QuadExt::rational(rat(3, 2), 2));
        // sqrt(3 + 2*sqrt(2)) = 1 + sqrt(2).
        let rad = QuadExt::new(rat(3, 1), rat(2, 1), 2).unwrap();
        let expr = SqrtExpr::new(QuadExt::zero(2), rat(1, 1), rad);
        assert_eq!(expr.exact().unwrap(), QuadExt::new(rat(1, 1), rat(1, 1), 2).unwrap());
        // sqrt(3 - 2*sqrt(2)) = sqrt(2) - 1, the positive branch.
        let rad = QuadExt::new(rat(3, 1), rat(-2, 1), 2).unwrap();
        let expr = SqrtExpr::new(QuadExt::zero(2), rat(1, 1), rad);
        assert_eq!(expr.exact().unwrap(), QuadExt::new(rat(-1, 1), rat(1, 1), 2).unwrap());
    }

    #[test]
    fn enclosures_tighten_with_precision() {
        let expr = SqrtExpr::new(QuadExt::one(2), rat(2, 1), QuadExt::integer(2, 2));
        let coarse = expr.enclosure(8);
        let fine = expr.enclosure(64);
        assert!(fine.width() < coarse.width());
        assert!(coarse.lo <= fine.lo && fine.hi <= coarse.hi);
        // The bracket really contains 1 + 2*sqrt(2) ~ 3.828.
        assert!(fine.lo < rat(3829, 1000) && rat(3828, 1000) < fine.hi);
    }
}
