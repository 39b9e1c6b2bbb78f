//! Integer approximants to multiples of a quadratic-field vector.
//!
//! For a nonzero vector `pi` with entries in `Q(sqrt(m))`, the translates
//! `a + N*pi` with `a` an integer vector and `N` an integer multiplier
//! beyond any fixed threshold accumulate on a linear subspace `V` that is
//! cut out by *integer* equations.  This module computes that subspace with
//! its dependency data and lattice generators ([`dense_subspace`]), finds a
//! certified approximant pair `(a, N)` with `N > N0` and `‖a - N*pi‖ < eps`
//! by walking the continued-fraction convergents of `sqrt(m)`
//! ([`approximate`]), and produces families of approximants whose residuals
//! `a_i - m_i*pi` surround the origin of `V` with exact positive convex
//! weights ([`sign_balanced_approximants`]).
//!
//! Everything is certified by exact arithmetic: residual norms are compared
//! as squared field elements, subspace membership is checked with integer
//! equations, and the convex weights are solved in `Q(sqrt(m))` and verified
//! to cancel the residuals identically.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numeric::{Int, QuadExt, Rational};

/// Failure modes of the approximant search.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KroneckerError {
    /// The convergent walk hit its iteration cap before reaching the target
    /// tolerance; retry with a larger cap or a coarser tolerance.
    #[error("approximant search exhausted its budget of {cap} convergents")]
    BudgetExhausted { cap: u32 },
}

/// Default number of continued-fraction convergents examined before the
/// search gives up.  Residuals shrink at least geometrically with the
/// convergent index, so this covers every tolerance of practical size.
pub const DEFAULT_ITERATION_CAP: u32 = 20_000;

/// The rational subspace on which `Z^n + pi*Z_{>N0}` accumulates, together
/// with the integer data that cuts it out.
///
/// Write `I` for the set of coordinates whose entries extend `{1}` to a
/// Q-basis of `span_Q{1, pi_1, ..., pi_n}`; over a single quadratic field
/// `I` is empty (rational `pi`) or a single index.  Every remaining entry
/// then satisfies `m_star * pi_j = n_j + sum_{i in I} n_ji * pi_i` with
/// integers `m_star >= 1`, `n_j`, `n_ji`, and the subspace is
///
/// ```text
/// V = { x : m_star * x_j = sum_{i in I} n_ji * x_i   for every j not in I }.
/// ```
///
/// The lattice generators `g_i` (one per basis index, with `m_star` in
/// coordinate `i` and `n_ji` in coordinate `j`) and the shifted vector
/// `pi_tilde = m_star*pi - sum_j n_j e_j` all satisfy the equations exactly;
/// this is asserted on construction.
#[derive(Debug, Clone)]
pub struct KroneckerSubspace {
    field: u64,
    basis_indices: Vec<usize>,
    m_star: Int,
    dependency: Vec<(usize, Vec<Int>)>,
    offsets: Vec<Int>,
    generators: Vec<Vec<Int>>,
    pi_tilde: Vec<QuadExt>,
    rational_part_dim: usize,
}

impl KroneckerSubspace {
    /// Field index `m` of the coordinates.
    pub fn field(&self) -> u64 {
        self.field
    }

    /// Coordinates whose entries form the Q-basis beyond the constant `1`.
    pub fn basis_indices(&self) -> &[usize] {
        &self.basis_indices
    }

    /// Common positive integer denominator `m_star` of the dependency data.
    pub fn m_star(&self) -> &Int {
        &self.m_star
    }

    /// For each non-basis coordinate `j`, the coefficients `n_ji` of the
    /// defining equation `m_star * x_j = sum_i n_ji * x_i` (indexed like
    /// [`Self::basis_indices`]).
    pub fn dependency(&self) -> &[(usize, Vec<Int>)] {
        &self.dependency
    }

    /// Integer offsets `n_j` with `m_star * pi_j = n_j + sum_i n_ji * pi_i`
    /// (zero at basis coordinates).
    pub fn offsets(&self) -> &[Int] {
        &self.offsets
    }

    /// Lattice vectors spanning the integer points of the subspace, one per
    /// basis index.
    pub fn generators(&self) -> &[Vec<Int>] {
        &self.generators
    }

    /// The shifted direction `pi_tilde = m_star*pi - sum_j n_j e_j`, a
    /// subspace member whose integer multiples stay on the subspace.
    pub fn pi_tilde(&self) -> &[QuadExt] {
        &self.pi_tilde
    }

    /// Number of Q-basis coordinates beyond the constant `1`; this equals
    /// the dimension of the subspace.
    pub fn rational_part_dim(&self) -> usize {
        self.rational_part_dim
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.rational_part_dim
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        self.pi_tilde.len()
    }

    /// Integer normals `w` with `V = {x : w·x = 0 for every returned w}`.
    pub fn equation_normals(&self) -> Vec<Vec<Int>> {
        self.dependency
            .iter()
            .map(|(j, coeffs)| {
                let mut w = vec![Int::zero(); self.ambient_dim()];
                w[*j] = self.m_star.clone();
                for (i, c) in self.basis_indices.iter().zip(coeffs) {
                    w[*i] = -c.clone();
                }
                w
            })
            .collect()
    }

    /// Whether an integer vector satisfies every defining equation.
    pub fn contains_int(&self, x: &[Int]) -> bool {
        assert_eq!(x.len(), self.ambient_dim(), "dimension mismatch");
        self.dependency.iter().all(|(j, coeffs)| {
            let rhs: Int = self
                .basis_indices
                .iter()
                .zip(coeffs)
                .map(|(i, c)| c * &x[*i])
                .sum();
            &self.m_star * &x[*j] == rhs
        })
    }

    /// Whether a field vector satisfies every defining equation.
    pub fn contains_quad(&self, x: &[QuadExt]) -> bool {
        assert_eq!(x.len(), self.ambient_dim(), "dimension mismatch");
        let scale = Rational::from_integer(self.m_star.clone());
        self.dependency.iter().all(|(j, coeffs)| {
            let mut rhs = QuadExt::zero(self.field);
            for (i, c) in self.basis_indices.iter().zip(coeffs) {
                rhs = rhs + x[*i].times_rat(&Rational::from_integer(c.clone()));
            }
            x[*j].times_rat(&scale) == rhs
        })
    }
}

/// Computes the accumulation subspace of `Z^n + pi*Z_{>N0}` for a nonzero
/// `pi` over `Q(sqrt(m))`.
///
/// When `pi` is rational the subspace is the origin (the set already
/// contains `0` exactly: take any multiplier clearing the denominators), so
/// every coordinate equation reads `m_star * x_j = 0`.  Otherwise the first
/// irrational coordinate serves as the basis entry, each other coordinate is
/// an exact rational combination of `1` and that entry, and clearing
/// denominators yields the integer equations of a line.
///
/// # Panics
///
/// Panics if `pi` is empty or zero.
pub fn dense_subspace(pi: &[QuadExt]) -> KroneckerSubspace {
    assert!(
        pi.iter().any(|x| !x.is_zero()),
        "dense_subspace needs a nonzero direction"
    );
    let n = pi.len();
    let dec = decompose(pi);
    match pi.iter().position(|x| !x.is_rational()) {
        None => {
            // Rational direction: V = {0}, cut out by m_star * x_j = 0.
            let m_star = dec.delta.clone();
            let sub = KroneckerSubspace {
                field: dec.m,
                basis_indices: Vec::new(),
                m_star,
                dependency: (0..n).map(|j| (j, Vec::new())).collect(),
                offsets: dec.gamma.clone(),
                generators: Vec::new(),
                pi_tilde: vec![QuadExt::zero(dec.m); n],
                rational_part_dim: 0,
            };
            check_subspace(&sub);
            sub
        }
        Some(i_star) => {
            let r_star = pi[i_star].rat_part().clone();
            let s_star = pi[i_star].irr_part().clone();
            // pi_j = o_j + c_j * pi_{i*} over Q for every other coordinate.
            let mut coeff = vec![Rational::zero(); n];
            let mut offset = vec![Rational::zero(); n];
            let mut m_star = Int::one();
            for j in 0..n {
                if j == i_star {
                    continue;
                }
                let c = pi[j].irr_part() / &s_star;
                let o = pi[j].rat_part() - &(&r_star * &c);
                m_star = m_star.lcm(c.denom()).lcm(o.denom());
                coeff[j] = c;
                offset[j] = o;
            }
            let scale = Rational::from_integer(m_star.clone());
            let mut offsets = vec![Int::zero(); n];
            let mut dependency = Vec::new();
            let mut generator = vec![Int::zero(); n];
            generator[i_star] = m_star.clone();
            for j in 0..n {
                if j == i_star {
                    continue;
                }
                let nji = (&coeff[j] * &scale).to_integer();
                offsets[j] = (&offset[j] * &scale).to_integer();
                generator[j] = nji.clone();
                dependency.push((j, vec![nji]));
            }
            let pi_tilde = pi
                .iter()
                .zip(&offsets)
                .map(|(p, nj)| p.times_rat(&scale) - QuadExt::integer(nj.clone(), dec.m))
                .collect();
            let sub = KroneckerSubspace {
                field: dec.m,
                basis_indices: vec![i_star],
                m_star,
                dependency,
                offsets,
                generators: vec![generator],
                pi_tilde,
                rational_part_dim: 1,
            };
            check_subspace(&sub);
            sub
        }
    }
}

fn check_subspace(sub: &KroneckerSubspace) {
    for g in &sub.generators {
        assert!(
            sub.contains_int(g),
            "subspace generator must satisfy the defining equations"
        );
    }
    assert!(
        sub.contains_quad(&sub.pi_tilde),
        "shifted direction must lie on the subspace"
    );
}

/// Finds `(a, N)` with `N > n0` and `‖a - N*pi‖ < eps`, certified exactly,
/// using the default iteration cap.
///
/// The residual comparison is performed on `‖a - N*pi‖²` as an element of
/// `Q(sqrt(m))` against `eps²`; no floating point is consulted.  For a
/// rational `pi` the returned residual is exactly zero.
///
/// # Panics
///
/// Panics if `pi` is empty or zero or `eps` is not positive.
pub fn approximate(
    pi: &[QuadExt],
    eps: &Rational,
    n0: &Int,
) -> Result<(Vec<Int>, Int), KroneckerError> {
    approximate_with_cap(pi, eps, n0, DEFAULT_ITERATION_CAP)
}

/// [`approximate`] with an explicit cap on the number of convergents tried.
pub fn approximate_with_cap(
    pi: &[QuadExt],
    eps: &Rational,
    n0: &Int,
    cap: u32,
) -> Result<(Vec<Int>, Int), KroneckerError> {
    assert!(
        pi.iter().any(|x| !x.is_zero()),
        "approximate needs a nonzero direction"
    );
    assert!(eps.is_positive(), "tolerance must be positive");
    let dec = decompose(pi);
    if dec.irr.iter().all(Zero::is_zero) {
        // Rational direction: exact hit at the first multiple of the common
        // denominator past n0.
        let q = std::cmp::max(n0.div_floor(&dec.delta) + 1, Int::one());
        let n = &dec.delta * &q;
        let a: Vec<Int> = dec.gamma.iter().map(|g| g * &q).collect();
        debug_assert!(residual_norm_sq(pi, &a, &n).is_zero());
        return Ok((a, n));
    }
    let eps_sq = eps * eps;
    let mut convergents = SqrtConvergents::new(dec.m);
    for _ in 0..cap {
        let (p, mden) = convergents.next().expect("convergent stream is infinite");
        let n = &dec.delta * &mden;
        if n <= *n0 {
            continue;
        }
        if dec.norm_sq_at(&p, &mden).cmp_rational(&eps_sq) == Ordering::Less {
            let a = dec.approximant_at(&p, &mden);
            debug_assert_eq!(
                residual_norm_sq(pi, &a, &n).cmp_rational(&eps_sq),
                Ordering::Less
            );
            return Ok((a, n));
        }
    }
    Err(KroneckerError::BudgetExhausted { cap })
}

/// A family of approximants whose residuals `a_i - m_i*pi` cancel under
/// exact positive convex weights.
///
/// The residuals all lie on the accumulation subspace of
/// `Z^n + pi*Z_{>N0}`, have norm below the requested tolerance, and satisfy
/// `sum_i lambda_i * (a_i - m_i*pi) = 0` with `lambda_i > 0` summing to one;
/// all of this is verified with exact arithmetic before the family is
/// returned.
#[derive(Debug, Clone)]
pub struct BalancedApproximants {
    /// The pairs `(a_i, m_i)`, each with `m_i > n0`.
    pub approximants: Vec<(Vec<Int>, Int)>,
    /// The exact weights, one per approximant.
    pub lambda: Vec<QuadExt>,
}

/// Finds `count` approximants whose residuals surround the origin of the
/// accumulation subspace, with exact convex weights.
///
/// `count` must be one more than the subspace dimension: a single exact hit
/// suffices for a rational `pi`, while an irrational `pi` needs two
/// residuals of opposite sign along the subspace line.  The two are taken
/// from consecutive continued-fraction convergents, which straddle
/// `sqrt(m)`; the weights are solved in `Q(sqrt(m))` and the cancellation
/// `sum_i lambda_i (a_i - m_i*pi) = 0` is asserted coordinate by
/// coordinate.
///
/// # Panics
///
/// Panics if `pi` is empty or zero, `eps` is not positive, or `count` does
/// not equal the subspace dimension plus one.
pub fn sign_balanced_approximants(
    pi: &[QuadExt],
    eps: &Rational,
    n0: &Int,
    count: usize,
) -> Result<BalancedApproximants, KroneckerError> {
    sign_balanced_with_cap(pi, eps, n0, count, DEFAULT_ITERATION_CAP)
}

/// [`sign_balanced_approximants`] with an explicit convergent cap.
pub fn sign_balanced_with_cap(
    pi: &[QuadExt],
    eps: &Rational,
    n0: &Int,
    count: usize,
    cap: u32,
) -> Result<BalancedApproximants, KroneckerError> {
    assert!(
        pi.iter().any(|x| !x.is_zero()),
        "sign_balanced_approximants needs a nonzero direction"
    );
    assert!(eps.is_positive(), "tolerance must be positive");
    let dec = decompose(pi);
    let rational = dec.irr.iter().all(Zero::is_zero);
    let dim = usize::from(!rational);
    assert_eq!(
        count,
        dim + 1,
        "count must be the subspace dimension plus one"
    );
    if rational {
        let (a, n) = approximate_with_cap(pi, eps, n0, cap)?;
        return Ok(BalancedApproximants {
            approximants: vec![(a, n)],
            lambda: vec![QuadExt::one(dec.m)],
        });
    }
    let eps_sq = eps * eps;
    let mut convergents = SqrtConvergents::new(dec.m);
    let mut first = None;
    for _ in 0..cap {
        let (p, mden) = convergents.next().expect("convergent stream is infinite");
        let n = &dec.delta * &mden;
        if n <= *n0 {
            continue;
        }
        if dec.norm_sq_at(&p, &mden).cmp_rational(&eps_sq) == Ordering::Less {
            first = Some((p, mden));
            break;
        }
    }
    let Some((p1, m1)) = first else {
        return Err(KroneckerError::BudgetExhausted { cap });
    };
    // The successor convergent sits on the other side of sqrt(m), has a
    // strictly smaller residual, and a denominator at least as large, so it
    // inherits both the tolerance and the multiplier floor.
    let (p2, m2) = convergents.next().expect("convergent stream is infinite");
    let t1 = dec.residual_factor(&p1, &m1);
    let t2 = dec.residual_factor(&p2, &m2);
    assert!(
        t1.sign() * t2.sign() == -1,
        "consecutive convergents must straddle sqrt(m)"
    );
    let span = &t2 - &t1;
    let lambda = vec![&t2 / &span, -&t1 / &span];
    let approximants = vec![
        (dec.approximant_at(&p1, &m1), &dec.delta * &m1),
        (dec.approximant_at(&p2, &m2), &dec.delta * &m2),
    ];
    certify_balance(pi, &approximants, &lambda, &eps_sq, n0, dec.m);
    Ok(BalancedApproximants {
        approximants,
        lambda,
    })
}

/// Exact value of `‖a - n*pi‖²` as a field element; the certificate checked
/// against `eps²` by every approximant search.
pub fn residual_norm_sq(pi: &[QuadExt], a: &[Int], n: &Int) -> QuadExt {
    assert_eq!(pi.len(), a.len(), "dimension mismatch");
    assert!(!pi.is_empty(), "direction must be nonempty");
    let m = field_of(pi);
    let scale = Rational::from_integer(n.clone());
    let mut acc = QuadExt::zero(m);
    for (p, ai) in pi.iter().zip(a) {
        let r = QuadExt::integer(ai.clone(), m) - p.times_rat(&scale);
        acc = acc + &r * &r;
    }
    acc
}

/// Asserts every invariant of a balanced family with exact arithmetic.
fn certify_balance(
    pi: &[QuadExt],
    approximants: &[(Vec<Int>, Int)],
    lambda: &[QuadExt],
    eps_sq: &Rational,
    n0: &Int,
    m: u64,
) {
    let mut total = QuadExt::zero(m);
    for l in lambda {
        assert!(l.sign() > 0, "convex weights must be positive");
        total = total + l;
    }
    assert!(
        total.cmp_rational(&Rational::one()) == Ordering::Equal,
        "convex weights must sum to one"
    );
    for (a, n) in approximants {
        assert!(n > n0, "multipliers must exceed the floor");
        assert_eq!(
            residual_norm_sq(pi, a, n).cmp_rational(eps_sq),
            Ordering::Less,
            "every residual must meet the tolerance"
        );
    }
    for j in 0..pi.len() {
        let mut s = QuadExt::zero(m);
        for ((a, n), l) in approximants.iter().zip(lambda) {
            let r = QuadExt::integer(a[j].clone(), m)
                - pi[j].times_rat(&Rational::from_integer(n.clone()));
            s = s + l * &r;
        }
        assert!(s.is_zero(), "balanced residuals must cancel exactly");
    }
}

/// Field index shared by the entries (the index of the first irrational
/// entry, or of the first entry when all are rational).
fn field_of(pi: &[QuadExt]) -> u64 {
    pi.iter()
        .find(|x| !x.is_rational())
        .unwrap_or(&pi[0])
        .field_index()
}

/// `pi_i = (gamma_i + irr_i * sqrt(m)) / delta` with one common positive
/// denominator `delta`.
struct Decomposition {
    m: u64,
    delta: Int,
    gamma: Vec<Int>,
    irr: Vec<Int>,
}

fn decompose(pi: &[QuadExt]) -> Decomposition {
    assert!(!pi.is_empty(), "direction must be nonempty");
    let m = field_of(pi);
    let mut delta = Int::one();
    for x in pi {
        delta = delta.lcm(x.rat_part().denom()).lcm(x.irr_part().denom());
    }
    let scale = Rational::from_integer(delta.clone());
    let to_int = |r: &Rational| -> Int {
        let scaled = r * &scale;
        debug_assert!(scaled.is_integer());
        scaled.to_integer()
    };
    Decomposition {
        m,
        delta,
        gamma: pi.iter().map(|x| to_int(x.rat_part())).collect(),
        irr: pi.iter().map(|x| to_int(x.irr_part())).collect(),
    }
}

impl Decomposition {
    /// The factor `t = p - q*sqrt(m)` common to every residual coordinate:
    /// for `N = delta*q` and `a_i = gamma_i*q + irr_i*p`, the residual is
    /// `a - N*pi = t * (irr_1, ..., irr_n)`.
    fn residual_factor(&self, p: &Int, q: &Int) -> QuadExt {
        QuadExt::new(
            Rational::from_integer(p.clone()),
            -Rational::from_integer(q.clone()),
            self.m,
        )
        .expect("field index of a QuadExt is squarefree")
    }

    /// Exact `‖a - N*pi‖²` at a convergent, via the residual factor.
    fn norm_sq_at(&self, p: &Int, q: &Int) -> QuadExt {
        let t = self.residual_factor(p, q);
        let weight: Int = self.irr.iter().map(|d| d * d).sum();
        (&t * &t).times_rat(&Rational::from_integer(weight))
    }

    /// The integer vector `a` paired with the multiplier `N = delta*q`.
    fn approximant_at(&self, p: &Int, q: &Int) -> Vec<Int> {
        self.gamma
            .iter()
            .zip(&self.irr)
            .map(|(g, d)| g * q + d * p)
            .collect()
    }
}

/// Continued-fraction convergents `(P_k, M_k)` of `sqrt(m)` for a
/// squarefree `m >= 2`, produced by the classical periodic recurrence.
///
/// The callers rely on three classical facts, each re-certified with exact
/// arithmetic at the point of use: the signs of `P_k - M_k*sqrt(m)`
/// alternate, their absolute values shrink strictly, and the denominators
/// `M_k` never decrease.
struct SqrtConvergents {
    m: u64,
    a0: u64,
    mk: u64,
    dk: u64,
    ak: u64,
    p_back: Int,
    p_front: Int,
    q_back: Int,
    q_front: Int,
}

impl SqrtConvergents {
    fn new(m: u64) -> Self {
        let a0 = num_integer::Roots::sqrt(&m);
        debug_assert!(a0 * a0 < m, "field index must not be a perfect square");
        SqrtConvergents {
            m,
            a0,
            mk: 0,
            dk: 1,
            ak: a0,
            p_back: Int::zero(),
            p_front: Int::one(),
            q_back: Int::one(),
            q_front: Int::zero(),
        }
    }
}

impl Iterator for SqrtConvergents {
    type Item = (Int, Int);

    fn next(&mut self) -> Option<(Int, Int)> {
        let p = Int::from(self.ak) * &self.p_front + &self.p_back;
        let q = Int::from(self.ak) * &self.q_front + &self.q_back;
        self.p_back = std::mem::replace(&mut self.p_front, p.clone());
        self.q_back = std::mem::replace(&mut self.q_front, q.clone());
        // Advance the periodic state (m_k, d_k, a_k); the quantities stay
        // below 2*sqrt(m) + 1, and the division is exact.
        let mk1 = u128::from(self.dk) * u128::from(self.ak) - u128::from(self.mk);
        let dk1 = (u128::from(self.m) - mk1 * mk1) / u128::from(self.dk);
        debug_assert!(dk1 > 0, "continued-fraction state stays positive");
        let ak1 = (u128::from(self.a0) + mk1) / dk1;
        self.mk = u64::try_from(mk1).expect("continued-fraction state fits in u64");
        self.dk = u64::try_from(dk1).expect("continued-fraction state fits in u64");
        self.ak = u64::try_from(ak1).expect("continued-fraction state fits in u64");
        Some((p, q))
    }
}
