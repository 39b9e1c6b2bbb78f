//! Lifting face-valid cuts into certified families of integral cuts.
//!
//! Let `F` be the compact face of a polytope body `K` supported by `pi`
//! (so `pi*x = pi0` on `F` and `pi*x <= pi0` on `K`), and suppose the
//! integral direction `c` satisfies `c*x <= delta` on `F`.  [`lift_cut`]
//! synthesizes finitely many integral cuts whose exact convex combination
//! is the tilted inequality
//!
//! ```text
//! (c + alpha*pi) * x <= floor(delta) + alpha*pi0,        alpha > 0,
//! ```
//!
//! packaged as a [`HomogeneityCertificate`] whose every claim is verified
//! with exact arithmetic before it is returned.  The member cuts have
//! normals `c + a_i` for integer approximants `a_i` of `m_i*pi`; each is
//! implied by the genuine Chvátal-Gomory cut of `K` in its direction
//! (`floor(h_K(c + a_i)) <= rhs_i`), which is what makes the combination a
//! consequence of the closure.
//!
//! The working constants come from explicit, deliberately conservative
//! formulas; when a first attempt fails its exact validity check (the
//! formulas are heuristic, the check is not), the synthesizer shrinks the
//! tolerance, raises the multiplier floor, and tries again.
//!
//! [`pin_to_rational_subspace`] applies the machinery with `c = 0`,
//! `delta = 0` to the affine-hull equations of a lower-dimensional body,
//! producing genuine CG cuts that confine the closure to a rational affine
//! subspace.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::body::{BodyError, ConvexBody};
use crate::cuts::{cg_cut, CGCut, CutPool, CutsError};
use crate::geometry::margin::{positive_lower_bound, sqrt_upper_bound};
use crate::geometry::{face_stability_margin, Face, GeometryError, Polytope};
use crate::jsonio;
use crate::kronecker::{
    dense_subspace, residual_norm_sq, sign_balanced_approximants, KroneckerError,
};
use crate::linalg::{dot_int_quad, norm_sq_int, norm_sq_quad};
use crate::numeric::{ceil_rat, sqrt_enclosure, Int, QuadExt, Rational};

/// Failure modes of cut lifting.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomogeneityError {
    /// The supplied direction does not support the body at the supplied
    /// face (support value mismatch, or a face vertex off the hyperplane).
    #[error("direction does not support the body at the given face")]
    NotAFace,
    /// The base cut `c*x <= delta` fails somewhere on the face.
    #[error("base cut is violated on the face")]
    CutInvalidOnFace,
    /// Cut lifting works on polytope bodies only.
    #[error("cut lifting needs a polytope body")]
    PolytopeOnly,
    /// Every retry of the constant schedule failed its exact validity
    /// check; this indicates a bug rather than a hard instance.
    #[error("cut synthesis failed to certify after {attempts} attempts")]
    SynthesisFailed { attempts: u32 },
    /// The approximant search ran out of budget.
    #[error(transparent)]
    Kronecker(#[from] KroneckerError),
    /// Geometry on the face or hull failed.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// The support oracle failed.
    #[error(transparent)]
    Body(#[from] BodyError),
    /// A genuine CG cut could not be formed.
    #[error(transparent)]
    Cuts(#[from] CutsError),
}

/// How often the synthesizer tightens its constants before giving up.
const MAX_SYNTHESIS_ATTEMPTS: u32 = 32;

/// The explicit constants steering one synthesis attempt.
///
/// * `eps` bounds the drift `|r*x|` of residuals over the face, chosen
///   below the fractional part of the (possibly nudged) `delta` so that
///   flooring collapses correctly;
/// * `eps1` is the residual-norm tolerance handed to the approximant
///   search, `eps / (max vertex norm + 1)`;
/// * `eps2` is the face-stability margin: any direction within `eps2` of
///   `pi` (as unit vectors) maximizes inside the face — for a face equal to
///   the whole (lower-dimensional) body the margin is vacuous and set to 1;
/// * `n_floor` is the least admissible multiplier,
///   `ceil(2*(|c| + eps1) / (eps2*|pi|))`, making lifted directions fall
///   within the margin;
/// * `neighborhood` is the compact region on which the drift bound is
///   enforced: for polytopes the face itself serves as the neighbourhood.
#[derive(Debug, Clone)]
pub struct WorkingConstants {
    pub eps: Rational,
    pub eps1: Rational,
    pub eps2: Rational,
    pub n_floor: Int,
    pub neighborhood: Polytope,
}

impl WorkingConstants {
    /// JSON rendering (the neighbourhood is summarized by its vertices).
    pub fn to_json(&self) -> Value {
        json!({
            "eps": jsonio::rat_to_value(&self.eps),
            "eps1": jsonio::rat_to_value(&self.eps1),
            "eps2": jsonio::rat_to_value(&self.eps2),
            "n_floor": jsonio::int_to_value(&self.n_floor),
            "neighborhood_vertices": Value::Array(
                self.neighborhood
                    .vertices()
                    .iter()
                    .map(|v| jsonio::quad_vec_to_value(v))
                    .collect(),
            ),
        })
    }
}

/// One member of the lifted family.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCut {
    /// Integer approximant `a_i` of `m_i * pi`.
    pub a: Vec<Int>,
    /// Multiplier `m_i >= N`.
    pub multiplier: Int,
    /// The cut `(c + a_i)*x <= floor(delta) + m_i*pi0`.
    pub cut: CGCut,
    /// `floor(h_K(c + a_i))`: the genuine CG right-hand side, at most
    /// `cut.rhs`, witnessing that the cut is implied by the closure.
    pub support_floor: Int,
}

impl CertificateCut {
    /// JSON rendering.
    pub fn to_json(&self) -> Value {
        json!({
            "a": jsonio::int_vec_to_value(&self.a),
            "multiplier": jsonio::int_to_value(&self.multiplier),
            "cut": self.cut.to_json(),
            "support_floor": jsonio::int_to_value(&self.support_floor),
        })
    }
}

/// A fully verified lifting of a face-valid cut.
///
/// The four claims, all checked exactly before construction completes:
///
/// 1. `sum_i lambda_i * (c + a_i) = c + alpha*pi` with
///    `alpha = sum_i lambda_i * m_i > 0`;
/// 2. `sum_i lambda_i * rhs_i = floor(delta) + alpha*pi0`;
/// 3. every member cut is implied by the genuine CG cut in its direction:
///    `floor(h_K(c + a_i)) <= rhs_i`;
/// 4. `m_i >= N` and `‖a_i - m_i*pi‖ < eps1` for every member.
///
/// Consequently every point satisfying the member cuts satisfies
/// `(c + alpha*pi)*x <= floor(delta) + alpha*pi0`.
#[derive(Debug, Clone)]
pub struct HomogeneityCertificate {
    /// Base cut normal `c`.
    pub c: Vec<Int>,
    /// Base cut bound `delta` (as supplied; `floor(delta)` enters the cuts).
    pub delta: QuadExt,
    /// Face normal after rescaling (`pi0` is then an integer in {-1,0,1}).
    pub pi: Vec<QuadExt>,
    /// Face value after rescaling.
    pub pi0: Int,
    /// The lifted cut family.
    pub cuts: Vec<CertificateCut>,
    /// Exact positive convex weights, one per member cut.
    pub lambda: Vec<QuadExt>,
    /// The scale `alpha = sum_i lambda_i * m_i`.
    pub alpha: QuadExt,
    /// Constants of the successful synthesis attempt.
    pub constants: WorkingConstants,
}

impl HomogeneityCertificate {
    /// JSON rendering of the full certificate.
    pub fn to_json(&self) -> Value {
        json!({
            "c": jsonio::int_vec_to_value(&self.c),
            "delta": jsonio::quad_to_value(&self.delta),
            "pi": jsonio::quad_vec_to_value(&self.pi),
            "pi0": jsonio::int_to_value(&self.pi0),
            "cuts": Value::Array(self.cuts.iter().map(CertificateCut::to_json).collect()),
            "lambda": jsonio::quad_vec_to_value(&self.lambda),
            "alpha": jsonio::quad_to_value(&self.alpha),
            "constants": self.constants.to_json(),
        })
    }

    /// The tilted inequality implied by the family: returns
    /// `(c + alpha*pi, floor(delta) + alpha*pi0)`.
    pub fn implied_inequality(&self) -> (Vec<QuadExt>, QuadExt) {
        let m = field_of_vec(&self.pi);
        let normal = self
            .c
            .iter()
            .zip(&self.pi)
            .map(|(cj, pj)| &QuadExt::integer(cj.clone(), m) + &(&self.alpha * pj))
            .collect();
        let rhs = &QuadExt::integer(self.delta.floor(), m)
            + &self.alpha.times_rat(&Rational::from_integer(self.pi0.clone()));
        (normal, rhs)
    }
}

/// Computes the constants for a first synthesis attempt, after running the
/// same admissibility checks as [`lift_cut`].
pub fn working_constants(
    body: &ConvexBody,
    face: &Face,
    c: &[Int],
    delta: &QuadExt,
) -> Result<WorkingConstants, HomogeneityError> {
    let p = polytope_of(body)?;
    validate_face(body, face)?;
    validate_base_cut(face, c, delta)?;
    let (pi, _) = rescale_face_normal(&face.direction, &face.value);
    constants_for(p, face, c, &nudged_delta(delta), &pi)
}

/// Synthesizes a certified cut family lifting `c*x <= delta` from the face
/// into the tilted inequality `(c + alpha*pi)*x <= floor(delta) + alpha*pi0`.
///
/// The face may be the whole body when the body is lower-dimensional.  The
/// resulting certificate's claims have all been verified exactly; see
/// [`HomogeneityCertificate`].
pub fn lift_cut(
    body: &ConvexBody,
    face: &Face,
    c: &[Int],
    delta: &QuadExt,
) -> Result<HomogeneityCertificate, HomogeneityError> {
    let p = polytope_of(body)?;
    validate_face(body, face)?;
    validate_base_cut(face, c, delta)?;
    let m = p.field_index();
    let (pi, pi0) = rescale_face_normal(&face.direction, &face.value);
    let delta_floor = delta.floor();
    let delta_eff = nudged_delta(delta);
    let mut constants = constants_for(p, face, c, &delta_eff, &pi)?;
    let family_size = dense_subspace(&pi).dim() + 1;
    for _ in 0..MAX_SYNTHESIS_ATTEMPTS {
        let n0 = &constants.n_floor - Int::one();
        let balanced = sign_balanced_approximants(&pi, &constants.eps1, &n0, family_size)?;
        if let Some(cuts) = assemble_cuts(body, c, &delta_floor, &pi0, &balanced.approximants)? {
            let alpha = balanced
                .lambda
                .iter()
                .zip(&balanced.approximants)
                .fold(QuadExt::zero(m), |acc, (l, (_, mi))| {
                    &acc + &l.times_rat(&Rational::from_integer(mi.clone()))
                });
            let certificate = HomogeneityCertificate {
                c: c.to_vec(),
                delta: delta.clone(),
                pi,
                pi0,
                cuts,
                lambda: balanced.lambda,
                alpha,
                constants,
            };
            verify_certificate(&certificate);
            return Ok(certificate);
        }
        // The exact validity check failed: tighten the drift tolerance and
        // raise the multiplier floor, both of which only help.
        let half = Rational::new(Int::one(), Int::from(2));
        constants.eps *= &half;
        constants.eps1 *= &half;
        constants.n_floor *= Int::from(2);
    }
    Err(HomogeneityError::SynthesisFailed {
        attempts: MAX_SYNTHESIS_ATTEMPTS,
    })
}

/// Confines a lower-dimensional body to a rational affine subspace with
/// genuine CG cuts.
///
/// Every affine-hull equation of the body is imposed from both sides:
/// rational equations through the CG cuts of their primitive integer
/// normals, irrational ones through [`lift_cut`] with `c = 0`, `delta = 0`
/// (whose certificate proves that the returned cuts imply the equation).
/// A full-dimensional body yields an empty pool.
pub fn pin_to_rational_subspace(body: &ConvexBody) -> Result<CutPool, HomogeneityError> {
    let p = polytope_of(body)?;
    let mut pool = CutPool::new("rational-subspace-pinning");
    let Some(aff) = p.affine() else {
        return Ok(pool);
    };
    let m = p.field_index();
    let n = p.ambient_dim();
    for (w, b) in aff.equations() {
        let negated: Vec<QuadExt> = w.iter().map(|x| -x).collect();
        for (dir, val) in [(w.clone(), b.clone()), (negated, -b)] {
            if dir.iter().all(QuadExt::is_rational) {
                pool.insert(cg_cut(body, &primitive_integer_normal(&dir))?);
            } else {
                let face = p.pi_face(&dir)?;
                debug_assert_eq!(&face.value, &val);
                let cert = lift_cut(body, &face, &vec![Int::zero(); n], &QuadExt::zero(m))?;
                for member in &cert.cuts {
                    pool.insert(CGCut {
                        c: member.cut.c.clone(),
                        rhs: member.support_floor.clone(),
                        certified: true,
                    });
                }
            }
        }
    }
    Ok(pool)
}

fn polytope_of(body: &ConvexBody) -> Result<&Polytope, HomogeneityError> {
    body.as_polytope().ok_or(HomogeneityError::PolytopeOnly)
}

/// Checks that the face direction supports the body exactly at the face.
fn validate_face(body: &ConvexBody, face: &Face) -> Result<(), HomogeneityError> {
    if face.direction.len() != body.ambient_dim() || face.polytope.vertices().is_empty() {
        return Err(HomogeneityError::NotAFace);
    }
    let support = body.support(&face.direction);
    if support.value.as_exact().as_ref() != Some(&face.value) {
        return Err(HomogeneityError::NotAFace);
    }
    for v in face.polytope.vertices() {
        if dot_quad_at(&face.direction, v) != face.value || !body.contains(v).unwrap_or(false) {
            return Err(HomogeneityError::NotAFace);
        }
    }
    Ok(())
}

fn dot_quad_at(dir: &[QuadExt], v: &[QuadExt]) -> QuadExt {
    crate::linalg::dot_quad(dir, v)
}

/// Checks `c*x <= delta` on the face (it suffices to test the vertices).
fn validate_base_cut(face: &Face, c: &[Int], delta: &QuadExt) -> Result<(), HomogeneityError> {
    let max = face
        .polytope
        .vertices()
        .iter()
        .map(|v| dot_int_quad(c, v))
        .max()
        .expect("face has vertices");
    if max > *delta {
        return Err(HomogeneityError::CutInvalidOnFace);
    }
    Ok(())
}

/// Divides the face data by `|pi0|` so the face value becomes an integer in
/// `{-1, 0, 1}`; dividing by a positive scalar leaves the face unchanged.
fn rescale_face_normal(direction: &[QuadExt], value: &QuadExt) -> (Vec<QuadExt>, Int) {
    match value.sign() {
        0 => (direction.to_vec(), Int::zero()),
        s => {
            let abs = value.abs();
            (
                direction.iter().map(|d| d / &abs).collect(),
                Int::from(i64::from(s)),
            )
        }
    }
}

/// Moves an integral `delta` up by one half, which leaves its floor alone
/// but creates the fractional room the drift tolerance is carved from.
fn nudged_delta(delta: &QuadExt) -> QuadExt {
    if delta.is_integer() {
        let half = QuadExt::rational(
            Rational::new(Int::one(), Int::from(2)),
            delta.field_index(),
        );
        delta + &half
    } else {
        delta.clone()
    }
}

fn constants_for(
    p: &Polytope,
    face: &Face,
    c: &[Int],
    delta_eff: &QuadExt,
    pi: &[QuadExt],
) -> Result<WorkingConstants, HomogeneityError> {
    let m = p.field_index();
    let frac = delta_eff - &QuadExt::integer(delta_eff.floor(), m);
    let eps = positive_lower_bound(&frac) / Rational::from_integer(Int::from(4));
    let vertex_norm_ub = p
        .vertices()
        .iter()
        .map(|v| sqrt_upper_bound(&norm_sq_quad(v)))
        .max()
        .expect("polytope has vertices");
    let eps1 = &eps / (vertex_norm_ub + Rational::one());
    let eps2 = match face_stability_margin(p, face) {
        Ok(margin) => margin,
        // A face equal to the whole lower-dimensional body: every
        // direction maximizes inside it, so any margin is admissible.
        Err(GeometryError::DegenerateFace) => Rational::one(),
        Err(e) => return Err(e.into()),
    };
    let c_norm_ub = sqrt_enclosure(&Rational::from_integer(norm_sq_int(c)), 32).1;
    let pi_norm_lb = sqrt_positive_lower_bound(&positive_lower_bound(&norm_sq_quad(pi)));
    let two = Rational::from_integer(Int::from(2));
    let n_raw = &two * (c_norm_ub + &eps1) / (&eps2 * pi_norm_lb);
    let n_floor = std::cmp::max(ceil_rat(&n_raw), Int::one());
    Ok(WorkingConstants {
        eps,
        eps1,
        eps2,
        n_floor,
        neighborhood: face.polytope.clone(),
    })
}

/// A positive rational strictly below `sqrt(t)` for a positive rational `t`.
fn sqrt_positive_lower_bound(t: &Rational) -> Rational {
    let mut bits = 32;
    loop {
        let (lo, _) = sqrt_enclosure(t, bits);
        if lo.is_positive() {
            return lo;
        }
        bits *= 2;
    }
}

/// Builds the member cuts and runs the exact validity check; `Ok(None)`
/// asks the caller to retry with tighter constants.
fn assemble_cuts(
    body: &ConvexBody,
    c: &[Int],
    delta_floor: &Int,
    pi0: &Int,
    approximants: &[(Vec<Int>, Int)],
) -> Result<Option<Vec<CertificateCut>>, HomogeneityError> {
    let m = body.field_index();
    let mut cuts = Vec::with_capacity(approximants.len());
    for (a, mi) in approximants {
        let normal: Vec<Int> = c.iter().zip(a).map(|(cj, aj)| cj + aj).collect();
        if normal.iter().all(Zero::is_zero) {
            return Ok(None);
        }
        let rhs = delta_floor + mi * pi0;
        let direction: Vec<QuadExt> = normal
            .iter()
            .map(|z| QuadExt::integer(z.clone(), m))
            .collect();
        let support_floor = body.support(&direction).value.floor();
        if support_floor > rhs {
            // The maximizer escaped the face or the drift exceeded the
            // fractional room: the constants were too lax.
            return Ok(None);
        }
        let certified = support_floor == rhs;
        cuts.push(CertificateCut {
            a: a.clone(),
            multiplier: mi.clone(),
            cut: CGCut {
                c: normal,
                rhs,
                certified,
            },
            support_floor,
        });
    }
    Ok(Some(cuts))
}

/// Asserts the four certificate claims; violations are bugs, not inputs.
fn verify_certificate(cert: &HomogeneityCertificate) {
    let m = field_of_vec(&cert.pi);
    assert!(cert.alpha.sign() > 0, "scale must be positive");
    let mut weight = QuadExt::zero(m);
    for l in &cert.lambda {
        assert!(l.sign() > 0, "weights must be positive");
        weight = &weight + l;
    }
    assert_eq!(
        weight.cmp_rational(&Rational::one()),
        Ordering::Equal,
        "weights must sum to one"
    );
    // Claim 1: the weighted normals add up to c + alpha*pi.
    for j in 0..cert.c.len() {
        let mut lhs = QuadExt::zero(m);
        for (member, l) in cert.cuts.iter().zip(&cert.lambda) {
            lhs = &lhs + &l.times_rat(&Rational::from_integer(member.cut.c[j].clone()));
        }
        let rhs = &QuadExt::integer(cert.c[j].clone(), m) + &(&cert.alpha * &cert.pi[j]);
        assert_eq!(lhs, rhs, "weighted normals must tilt the base cut");
    }
    // Claim 2: the weighted right-hand sides add up exactly.
    let mut lhs = QuadExt::zero(m);
    for (member, l) in cert.cuts.iter().zip(&cert.lambda) {
        lhs = &lhs + &l.times_rat(&Rational::from_integer(member.cut.rhs.clone()));
    }
    let rhs = &QuadExt::integer(cert.delta.floor(), m)
        + &cert
            .alpha
            .times_rat(&Rational::from_integer(cert.pi0.clone()));
    assert_eq!(lhs, rhs, "weighted bounds must match the tilted bound");
    // Claims 3 and 4 per member.
    let eps1_sq = &cert.constants.eps1 * &cert.constants.eps1;
    for member in &cert.cuts {
        assert!(
            member.support_floor <= member.cut.rhs,
            "member cut must be implied by its genuine CG cut"
        );
        assert!(
            member.multiplier >= cert.constants.n_floor,
            "multiplier must meet the floor"
        );
        assert_eq!(
            residual_norm_sq(&cert.pi, &member.a, &member.multiplier).cmp_rational(&eps1_sq),
            Ordering::Less,
            "residual must meet the tolerance"
        );
    }
}

fn field_of_vec(pi: &[QuadExt]) -> u64 {
    pi.iter()
        .find(|x| !x.is_rational())
        .unwrap_or(&pi[0])
        .field_index()
}

/// Clears denominators and divides by the gcd, preserving orientation.
fn primitive_integer_normal(dir: &[QuadExt]) -> Vec<Int> {
    use num_integer::Integer;
    let mut denom_lcm = Int::one();
    for x in dir {
        denom_lcm = denom_lcm.lcm(x.rat_part().denom());
    }
    let scale = Rational::from_integer(denom_lcm);
    let ints: Vec<Int> = dir
        .iter()
        .map(|x| (x.rat_part() * &scale).to_integer())
        .collect();
    let gcd = ints.iter().fold(Int::zero(), |g, z| g.gcd(z));
    assert!(!gcd.is_zero(), "normal must be nonzero");
    ints.iter().map(|z| z / &gcd).collect()
}
