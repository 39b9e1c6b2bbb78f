//! Convex bodies and their exact support oracles.
//!
//! A [`ConvexBody`] is one of four compact, nonempty shapes: a polytope with
//! rational vertices, a polytope with vertices in `Q(sqrt(m))`, a planar
//! ball, or a planar ellipse.  All cutting machinery downstream consumes a
//! body only through two exact queries:
//!
//! * [`ConvexBody::support`] — the maximum of `c . x` over the body, as an
//!   exact field element for polytopes and as an exactly comparable square
//!   root expression for the smooth bodies.  The maximizer comes along as a
//!   witness: an exposed face for polytopes, a certified coordinate box for
//!   smooth bodies.
//! * [`ConvexBody::contains`] — exact membership.
//!
//! The module also provides [`interior_radius`], a certified positive lower
//! bound on how far a point sits from the boundary measured inside a given
//! affine subspace.  Its reciprocal bounds how long a projected direction
//! must be before its cut can remove the point, which is what keeps the
//! closure search finite.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::geometry::{AffineSubspace, Face, GeometryError, Inequality, Polytope};
use crate::jsonio;
use crate::linalg::{
    dot_quad, norm_sq_quad, project_onto_span_quad, quad_vec_from_rat, sub_quad,
};
use crate::numeric::{
    sqrt_enclosure, CertifiedInterval, Int, QuadExt, Rational, SqrtExpr,
};

/// Field index used for smooth bodies, whose own data is always rational.
const DEFAULT_FIELD: u64 = 2;

/// Errors raised by body construction, parsing, and queries.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BodyError {
    /// Bodies must be compact and nonempty by construction.
    #[error("body must be nonempty")]
    EmptyBody,
    /// The ellipse shape matrix must be symmetric positive definite.
    #[error("shape matrix must be symmetric positive definite")]
    NotPositiveDefinite,
    /// Ball and ellipse bodies are supported in the plane only.
    #[error("smooth bodies are supported in dimension 2 only")]
    UnsupportedDimension,
    /// Membership could not be decided by field comparisons.
    ///
    /// With points represented in `Q(sqrt(m))` every quadratic-form
    /// comparison closes inside the field, so the current variants never
    /// produce this; it is kept so callers can match on it uniformly.
    #[error("membership does not reduce to field comparisons")]
    UndecidableMembership,
    /// A geometric predicate failed (boundary point, dimension mismatch...).
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Malformed JSON description.
    #[error("malformed body description: {0}")]
    Parse(String),
}

/// A compact, nonempty convex body with an exact support oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    /// Polytope with all-rational vertex coordinates.
    QPolytope(Polytope),
    /// Polytope with vertex coordinates in `Q(sqrt(m))`.
    QuadPolytope(Polytope),
    /// Euclidean disk `{x : |x - center| <= radius}` in the plane.
    Ball {
        /// Rational center.
        center: Vec<Rational>,
        /// Strictly positive rational radius.
        radius: Rational,
    },
    /// Ellipse `{x : (x - center)^T A (x - center) <= 1}` in the plane.
    Ellipse2D {
        /// Rational center.
        center: Vec<Rational>,
        /// Symmetric positive definite rational shape matrix `A`.
        matrix: [[Rational; 2]; 2],
    },
}

/// Exact support value: a field element, or a square root expression that
/// still admits exact comparisons and floors.
#[derive(Debug, Clone)]
pub enum SupportValue {
    /// `max c . x` lies in the working field.
    Exact(QuadExt),
    /// `max c . x = base + coeff * sqrt(radicand)`, exactly comparable.
    Radical(SqrtExpr),
}

/// Description of the maximizer set of a support query.
#[derive(Debug, Clone)]
pub enum Maximizer {
    /// Polytopes expose the whole optimal face.
    Face(Face),
    /// Smooth bodies certify a coordinate box around the unique maximizer.
    Point(Vec<CertifiedInterval>),
}

/// Result of a support query: the value and a maximizer witness.
#[derive(Debug, Clone)]
pub struct Support {
    /// The support value `max over K of c . x`.
    pub value: SupportValue,
    /// Where the maximum is attained.
    pub maximizer: Maximizer,
}

impl SupportValue {
    /// Exact floor of the support value.
    pub fn floor(&self) -> Int {
        match self {
            SupportValue::Exact(q) => q.floor(),
            SupportValue::Radical(s) => s.floor_exact(),
        }
    }

    /// The value as a field element, when it lies in the field.
    pub fn as_exact(&self) -> Option<QuadExt> {
        match self {
            SupportValue::Exact(q) => Some(q.clone()),
            SupportValue::Radical(s) => s.exact(),
        }
    }

    /// Exact three-way comparison with a field element.
    pub fn cmp_quad(&self, rhs: &QuadExt) -> std::cmp::Ordering {
        match self {
            SupportValue::Exact(q) => q.cmp(rhs),
            SupportValue::Radical(s) => s.cmp_quad(rhs),
        }
    }

    /// Rational enclosure of the value, about `2^-bits` wide.
    pub fn interval(&self, bits: u32) -> CertifiedInterval {
        match self {
            SupportValue::Exact(q) => match q.to_rational() {
                Some(r) => CertifiedInterval::point(r),
                None => {
                    let (lo, hi) = crate::numeric::quad_enclosure(q, bits);
                    CertifiedInterval::new(lo, hi, true)
                }
            },
            SupportValue::Radical(s) => s.enclosure(bits),
        }
    }
}

impl ConvexBody {
    /// Wraps a nonempty polytope, classifying it by coordinate rationality.
    pub fn from_polytope(p: Polytope) -> Result<Self, BodyError> {
        if p.is_empty() {
            return Err(BodyError::EmptyBody);
        }
        let rational = p
            .vertices()
            .iter()
            .all(|v| v.iter().all(QuadExt::is_rational));
        Ok(if rational {
            ConvexBody::QPolytope(p)
        } else {
            ConvexBody::QuadPolytope(p)
        })
    }

    /// A planar disk with rational center and positive rational radius.
    pub fn ball(center: Vec<Rational>, radius: Rational) -> Result<Self, BodyError> {
        if center.len() != 2 {
            return Err(BodyError::UnsupportedDimension);
        }
        if !radius.is_positive() {
            return Err(BodyError::EmptyBody);
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    /// A planar ellipse `(x - center)^T A (x - center) <= 1`.
    pub fn ellipse(
        center: Vec<Rational>,
        matrix: [[Rational; 2]; 2],
    ) -> Result<Self, BodyError> {
        if center.len() != 2 {
            return Err(BodyError::UnsupportedDimension);
        }
        let det = &matrix[0][0] * &matrix[1][1] - &matrix[0][1] * &matrix[1][0];
        if matrix[0][1] != matrix[1][0]
            || !matrix[0][0].is_positive()
            || !det.is_positive()
        {
            return Err(BodyError::NotPositiveDefinite);
        }
        Ok(ConvexBody::Ellipse2D { center, matrix })
    }

    /// Ambient dimension of the body.
    pub fn ambient_dim(&self) -> usize {
        match self {
            ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => p.ambient_dim(),
            ConvexBody::Ball { center, .. } | ConvexBody::Ellipse2D { center, .. } => {
                center.len()
            }
        }
    }

    /// Field index `m` of the coordinate field `Q(sqrt(m))`.
    pub fn field_index(&self) -> u64 {
        match self {
            ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => p.field_index(),
            _ => DEFAULT_FIELD,
        }
    }

    /// The underlying polytope, for the polytope variants.
    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => Some(p),
            _ => None,
        }
    }

    /// Whether the boundary is smooth (ball or ellipse variant).
    pub fn is_smooth(&self) -> bool {
        self.as_polytope().is_none()
    }

    /// Exact support query: the maximum of `c . x` over the body together
    /// with a witness for where it is attained.
    ///
    /// The direction must be nonzero and of the ambient dimension.
    pub fn support(&self, c: &[QuadExt]) -> Support {
        assert_eq!(c.len(), self.ambient_dim(), "direction dimension mismatch");
        assert!(c.iter().any(|x| !x.is_zero()), "support of the zero direction");
        match self {
            ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => {
                let face = p.pi_face(c).expect("nonzero direction of matching dimension");
                Support {
                    value: SupportValue::Exact(face.value.clone()),
                    maximizer: Maximizer::Face(face),
                }
            }
            ConvexBody::Ball { center, radius } => {
                let m = field_of(c);
                let z = quad_vec_from_rat(center, m);
                let base = dot_quad(c, &z);
                let s = norm_sq_quad(c);
                // Maximizer: center + radius * c / sqrt(s).
                let sqrt_s = sqrt_pos_enclosure(&s, 32);
                let witness = (0..2)
                    .map(|i| {
                        let (clo, chi) = crate::numeric::quad_enclosure(&c[i], 32);
                        let num = scale_interval(radius, (clo, chi));
                        let (lo, hi) = div_pos_interval(num, sqrt_s.clone());
                        CertifiedInterval::new(&center[i] + lo, &center[i] + hi, true)
                    })
                    .collect();
                Support {
                    value: SupportValue::Radical(SqrtExpr::new(base, radius.clone(), s)),
                    maximizer: Maximizer::Point(witness),
                }
            }
            ConvexBody::Ellipse2D { center, matrix } => {
                let m = field_of(c);
                let z = quad_vec_from_rat(center, m);
                let base = dot_quad(c, &z);
                let w = inverse_apply(matrix, c, m);
                let t = dot_quad(c, &w);
                assert!(t.sign() > 0, "positive definite form on a nonzero direction");
                // Maximizer: center + A^{-1} c / sqrt(t).
                let sqrt_t = sqrt_pos_enclosure(&t, 32);
                let witness = (0..2)
                    .map(|i| {
                        let num = crate::numeric::quad_enclosure(&w[i], 32);
                        let (lo, hi) = div_pos_interval(num, sqrt_t.clone());
                        CertifiedInterval::new(&center[i] + lo, &center[i] + hi, true)
                    })
                    .collect();
                Support {
                    value: SupportValue::Radical(SqrtExpr::new(base, Rational::one(), t)),
                    maximizer: Maximizer::Point(witness),
                }
            }
        }
    }

    /// Exact membership test for a point with field coordinates.
    pub fn contains(&self, x: &[QuadExt]) -> Result<bool, BodyError> {
        if x.len() != self.ambient_dim() {
            return Err(BodyError::Geometry(GeometryError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.len(),
            }));
        }
        match self {
            ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => Ok(p.contains(x)),
            ConvexBody::Ball { center, radius } => {
                let m = field_of(x);
                let z = quad_vec_from_rat(center, m);
                let d2 = norm_sq_quad(&sub_quad(x, &z));
                let r2 = QuadExt::rational(radius * radius, m);
                Ok(d2 <= r2)
            }
            ConvexBody::Ellipse2D { center, matrix } => {
                let m = field_of(x);
                let z = quad_vec_from_rat(center, m);
                let d = sub_quad(x, &z);
                let q = quadratic_form(matrix, &d, m);
                Ok(q <= QuadExt::one(m))
            }
        }
    }

    /// Rational outer bounding box, one `(lower, upper)` pair per axis.
    pub fn bounding_box(&self) -> Vec<(Rational, Rational)> {
        match self {
            ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => p
                .bounding_box()
                .expect("bodies are nonempty")
                .into_iter()
                .map(|(lo, hi)| {
                    (
                        crate::numeric::quad_enclosure(&lo, 32).0,
                        crate::numeric::quad_enclosure(&hi, 32).1,
                    )
                })
                .collect(),
            ConvexBody::Ball { center, radius } => center
                .iter()
                .map(|z| (z - radius, z + radius))
                .collect(),
            ConvexBody::Ellipse2D { center, matrix } => {
                // Axis extent along e_i is sqrt((A^{-1})_ii).
                let det = &matrix[0][0] * &matrix[1][1] - &matrix[0][1] * &matrix[1][0];
                let diag = [&matrix[1][1] / &det, &matrix[0][0] / &det];
                center
                    .iter()
                    .zip(diag)
                    .map(|(z, d)| {
                        let ext = sqrt_enclosure(&d, 32).1;
                        (z - &ext, z + &ext)
                    })
                    .collect()
            }
        }
    }

    /// Parses a body from a JSON string; see [`ConvexBody::from_json`].
    pub fn from_json_str(s: &str) -> Result<Self, BodyError> {
        let v: Value =
            serde_json::from_str(s).map_err(|e| BodyError::Parse(format!("invalid JSON: {e}")))?;
        Self::from_json(&v)
    }

    /// Parses a body from its JSON description.
    pub fn from_json(v: &Value) -> Result<Self, BodyError> {
        let parse = BodyError::Parse;
        let kind = jsonio::field(v, "type")
            .map_err(parse)?
            .as_str()
            .ok_or_else(|| BodyError::Parse("field \"type\" must be a string".into()))?;
        match kind {
            "polytope" => {
                let field = match v.get("field") {
                    Some(f) => f
                        .as_u64()
                        .ok_or_else(|| BodyError::Parse("field index must be an integer".into()))?,
                    None => DEFAULT_FIELD,
                };
                if let Some(verts) = v.get("vertices") {
                    let rows = verts
                        .as_array()
                        .ok_or_else(|| BodyError::Parse("vertices must be an array".into()))?;
                    let points = rows
                        .iter()
                        .map(|row| jsonio::quad_vec_from_value(row, field))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(parse)?;
                    let p = Polytope::from_vertices(field, points)?;
                    ConvexBody::from_polytope(p)
                } else if let Some(ineqs) = v.get("inequalities") {
                    let rows = ineqs
                        .as_array()
                        .ok_or_else(|| BodyError::Parse("inequalities must be an array".into()))?;
                    let ambient = jsonio::field(v, "ambient")
                        .map_err(parse)?
                        .as_u64()
                        .ok_or_else(|| BodyError::Parse("ambient must be an integer".into()))?
                        as usize;
                    let system = rows
                        .iter()
                        .map(|row| {
                            let normal =
                                jsonio::quad_vec_from_value(jsonio::field(row, "normal")?, field)?;
                            let rhs = jsonio::quad_from_value(jsonio::field(row, "rhs")?, field)?;
                            Ok(Inequality::new(normal, rhs))
                        })
                        .collect::<Result<Vec<_>, String>>()
                        .map_err(parse)?;
                    let p = Polytope::from_halfspaces(field, ambient, &system)?;
                    ConvexBody::from_polytope(p)
                } else {
                    Err(BodyError::Parse(
                        "polytope needs \"vertices\" or \"inequalities\"".into(),
                    ))
                }
            }
            "ball" => {
                let center =
                    jsonio::rat_vec_from_value(jsonio::field(v, "center").map_err(parse)?)
                        .map_err(parse)?;
                let radius = jsonio::rat_from_value(jsonio::field(v, "radius").map_err(parse)?)
                    .map_err(parse)?;
                ConvexBody::ball(center, radius)
            }
            "ellipse" => {
                let center =
                    jsonio::rat_vec_from_value(jsonio::field(v, "center").map_err(parse)?)
                        .map_err(parse)?;
                let rows =
                    jsonio::field(v, "matrix").map_err(parse)?.as_array().ok_or_else(|| {
                        BodyError::Parse("matrix must be a 2x2 array".into())
                    })?;
                if rows.len() != 2 {
                    return Err(BodyError::Parse("matrix must be a 2x2 array".into()));
                }
                let mut entries = Vec::new();
                for row in rows {
                    let row = jsonio::rat_vec_from_value(row).map_err(parse)?;
                    if row.len() != 2 {
                        return Err(BodyError::Parse("matrix must be a 2x2 array".into()));
                    }
                    entries.push(row);
                }
                let matrix = [
                    [entries[0][0].clone(), entries[0][1].clone()],
                    [entries[1][0].clone(), entries[1][1].clone()],
                ];
                ConvexBody::ellipse(center, matrix)
            }
            other => Err(BodyError::Parse(format!("unknown body type {other:?}"))),
        }
    }

    /// Serializes the body to its JSON description.
    pub fn to_json(&self) -> Value {
        match self {
            ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => json!({
                "type": "polytope",
                "field": p.field_index(),
                "vertices": Value::Array(
                    p.vertices().iter().map(|v| jsonio::quad_vec_to_value(v)).collect(),
                ),
            }),
            ConvexBody::Ball { center, radius } => json!({
                "type": "ball",
                "center": jsonio::rat_vec_to_value(center),
                "radius": jsonio::rat_to_value(radius),
            }),
            ConvexBody::Ellipse2D { center, matrix } => json!({
                "type": "ellipse",
                "center": jsonio::rat_vec_to_value(center),
                "matrix": Value::Array(
                    matrix.iter().map(|row| jsonio::rat_vec_to_value(row)).collect(),
                ),
            }),
        }
    }
}

/// Certified positive radius `r` such that every point of the subspace
/// within distance `r` of `v` stays inside the body.
///
/// The bound is a rational under-approximation of the true distance from
/// `v` to the boundary measured along the subspace; under-approximation is
/// harmless for callers, which use `1/r` as an upper bound on how short a
/// direction must be to cut `v`.  Errors with
/// [`GeometryError::OnBoundary`] when `v` is not interior in the required
/// sense.
pub fn interior_radius(
    v: &[QuadExt],
    body: &ConvexBody,
    subspace: &AffineSubspace,
) -> Result<Rational, BodyError> {
    assert_eq!(v.len(), body.ambient_dim(), "point dimension mismatch");
    assert_eq!(subspace.ambient_dim(), body.ambient_dim(), "subspace dimension mismatch");
    if !body.contains(v)? {
        return Err(BodyError::Geometry(GeometryError::OnBoundary));
    }
    match body {
        ConvexBody::QPolytope(p) | ConvexBody::QuadPolytope(p) => {
            let basis = subspace.basis();
            if basis.is_empty() {
                // A zero-dimensional subspace never leaves `v`.
                return Ok(Rational::one());
            }
            let aff = p.affine().expect("bodies are nonempty");
            // Moving inside the subspace must not leave the affine hull.
            for (eq, _) in aff.equations() {
                let proj = project_onto_span_quad(basis, eq);
                if proj.iter().any(|x| !x.is_zero()) {
                    return Err(BodyError::Geometry(GeometryError::OnBoundary));
                }
            }
            let mut best: Option<Rational> = None;
            for ineq in p.inequalities() {
                let proj = project_onto_span_quad(basis, &ineq.normal);
                if proj.iter().all(QuadExt::is_zero) {
                    // The facet is invariant along the subspace; it cannot
                    // limit the radius.
                    continue;
                }
                let slack = ineq.slack(v);
                if slack.sign() <= 0 {
                    return Err(BodyError::Geometry(GeometryError::OnBoundary));
                }
                let bound = positive_ratio_lower_bound(&slack, &norm_sq_quad(&proj));
                best = Some(match best {
                    Some(b) => b.min(bound),
                    None => bound,
                });
            }
            Ok(best.unwrap_or_else(Rational::one))
        }
        ConvexBody::Ball { center, radius } => {
            let m = field_of(v);
            let z = quad_vec_from_rat(center, m);
            let t = norm_sq_quad(&sub_quad(v, &z));
            let r2 = QuadExt::rational(radius * radius, m);
            if t >= r2 {
                return Err(BodyError::Geometry(GeometryError::OnBoundary));
            }
            if t.is_zero() {
                return Ok(radius.clone());
            }
            // radius - |v - center|, certified positive by refining the
            // upper square-root bound until it clears the radius.
            let mut bits = 32;
            loop {
                let (_, hi) = sqrt_pos_enclosure(&t, bits);
                let gap = radius - &hi;
                if gap.is_positive() {
                    return Ok(gap);
                }
                bits *= 2;
            }
        }
        ConvexBody::Ellipse2D { center, matrix } => {
            let m = field_of(v);
            let z = quad_vec_from_rat(center, m);
            let d = sub_quad(v, &z);
            let t = quadratic_form(matrix, &d, m);
            if t >= QuadExt::one(m) {
                return Err(BodyError::Geometry(GeometryError::OnBoundary));
            }
            // For |w| <= rho the form grows by at most
            // (sqrt(t) + rho * sqrt(trace A))^2, so rho = (1 - ub sqrt(t))
            // / ub sqrt(trace A) keeps v + w inside.
            let trace = &matrix[0][0] + &matrix[1][1];
            let g = sqrt_enclosure(&trace, 32).1;
            let mut bits = 32;
            loop {
                let hi = if t.is_zero() {
                    Rational::zero()
                } else {
                    sqrt_pos_enclosure(&t, bits).1
                };
                let gap = Rational::one() - &hi;
                if gap.is_positive() {
                    return Ok(gap / &g);
                }
                bits *= 2;
            }
        }
    }
}

/// Field index governing a coordinate vector.
fn field_of(x: &[QuadExt]) -> u64 {
    x.iter()
        .find(|e| !e.is_rational())
        .map_or_else(|| x.first().map_or(DEFAULT_FIELD, QuadExt::field_index), QuadExt::field_index)
}

/// `A^{-1} c` for the 2x2 rational matrix `A` and a field vector `c`.
fn inverse_apply(matrix: &[[Rational; 2]; 2], c: &[QuadExt], m: u64) -> Vec<QuadExt> {
    let det = &matrix[0][0] * &matrix[1][1] - &matrix[0][1] * &matrix[1][0];
    let inv = [
        [&matrix[1][1] / &det, -(&matrix[0][1] / &det)],
        [-(&matrix[1][0] / &det), &matrix[0][0] / &det],
    ];
    (0..2)
        .map(|i| {
            let row = [
                QuadExt::rational(inv[i][0].clone(), m),
                QuadExt::rational(inv[i][1].clone(), m),
            ];
            dot_quad(&row, c)
        })
        .collect()
}

/// `d^T A d` for the 2x2 rational matrix `A` and a field vector `d`.
fn quadratic_form(matrix: &[[Rational; 2]; 2], d: &[QuadExt], m: u64) -> QuadExt {
    let rows: Vec<QuadExt> = (0..2)
        .map(|i| {
            let row = [
                QuadExt::rational(matrix[i][0].clone(), m),
                QuadExt::rational(matrix[i][1].clone(), m),
            ];
            dot_quad(&row, d)
        })
        .collect();
    dot_quad(&rows, d)
}

/// Positive rational enclosure of `sqrt(t)` for a strictly positive `t`.
fn sqrt_pos_enclosure(t: &QuadExt, bits: u32) -> (Rational, Rational) {
    debug_assert!(t.sign() > 0, "radicand must be strictly positive");
    let mut b = bits;
    loop {
        let (lo, hi) = crate::numeric::quad_enclosure(t, b);
        if lo.is_positive() {
            return (sqrt_enclosure(&lo, b).0, sqrt_enclosure(&hi, b).1);
        }
        b *= 2;
    }
}

/// Certified positive lower bound for `num / sqrt(den)`, both positive.
fn positive_ratio_lower_bound(num: &QuadExt, den_sq: &QuadExt) -> Rational {
    let mut bits = 32;
    loop {
        let (lo, _) = crate::numeric::quad_enclosure(num, bits);
        if lo.is_positive() {
            let (_, den_hi) = sqrt_pos_enclosure(den_sq, bits);
            return lo / den_hi;
        }
        bits *= 2;
    }
}

/// `[r * lo, r * hi]` for a positive rational scale `r`.
fn scale_interval(r: &Rational, (lo, hi): (Rational, Rational)) -> (Rational, Rational) {
    (r * &lo, r * &hi)
}

/// Interval quotient `num / den` for a strictly positive denominator.
fn div_pos_interval(
    (nlo, nhi): (Rational, Rational),
    (dlo, dhi): (Rational, Rational),
) -> (Rational, Rational) {
    debug_assert!(dlo.is_positive());
    let candidates = [&nlo / &dlo, &nlo / &dhi, &nhi / &dlo, &nhi / &dhi];
    let lo = candidates.iter().min().expect("nonempty").clone();
    let hi = candidates.iter().max().expect("nonempty").clone();
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use serde_json::json;

    use super::*;
    use crate::numeric::Int;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(Int::from(n), Int::from(d))
    }

    fn q(n: i64, d: i64) -> QuadExt {
        QuadExt::rational(rat(n, d), 2)
    }

    fn qe(a_n: i64, a_d: i64, b_n: i64, b_d: i64) -> QuadExt {
        QuadExt::new(rat(a_n, a_d), rat(b_n, b_d), 2).unwrap()
    }

    fn unit_square() -> ConvexBody {
        let p = Polytope::from_vertices(
            2,
            vec![
                vec![q(0, 1), q(0, 1)],
                vec![q(1, 1), q(0, 1)],
                vec![q(0, 1), q(1, 1)],
                vec![q(1, 1), q(1, 1)],
            ],
        )
        .unwrap();
        ConvexBody::from_polytope(p).unwrap()
    }

    fn irrational_segment() -> ConvexBody {
        let p = Polytope::from_vertices(
            2,
            vec![vec![q(0, 1), q(0, 1)], vec![q(1, 1), qe(0, 1, 1, 1)]],
        )
        .unwrap();
        ConvexBody::from_polytope(p).unwrap()
    }

    #[test]
    fn square_support_is_exact_with_vertex_face() {
        let body = unit_square();
        assert!(matches!(body, ConvexBody::QPolytope(_)));
        let sup = body.support(&[q(1, 1), q(1, 1)]);
        assert_eq!(sup.value.as_exact().unwrap(), q(2, 1));
        assert_eq!(sup.value.floor(), Int::from(2));
        match sup.maximizer {
            Maximizer::Face(f) => {
                assert_eq!(f.polytope.vertices(), &[vec![q(1, 1), q(1, 1)]]);
            }
            Maximizer::Point(_) => panic!("polytopes expose faces"),
        }
    }

    #[test]
    fn ball_support_is_a_refinable_radical() {
        let body = ConvexBody::ball(vec![rat(0, 1), rat(0, 1)], rat(3, 2)).unwrap();
        let sup = body.support(&[q(1, 1), q(1, 1)]);
        // Value is (3/2) sqrt(2), which lies in Q(sqrt(2)).
        let exact = sup.value.as_exact().unwrap();
        assert_eq!(exact, qe(0, 1, 3, 2));
        let ivl = sup.value.interval(20);
        assert!(ivl.lo <= rat(2121, 1000) && rat(2122, 1000) <= ivl.hi || ivl.width() < rat(1, 1000));
        assert!(ivl.refinable);
        assert_eq!(sup.value.floor(), Int::from(2));
        // Maximizer box contains the true maximizer (3/(2 sqrt 2)) (1,1).
        match sup.maximizer {
            Maximizer::Point(coords) => {
                let true_coord = qe(0, 1, 3, 4); // 3 sqrt(2) / 4
                for c in coords {
                    assert!(true_coord.cmp_rational(&c.lo).is_ge());
                    assert!(true_coord.cmp_rational(&c.hi).is_le());
                }
            }
            Maximizer::Face(_) => panic!("smooth bodies certify points"),
        }
    }

    #[test]
    fn segment_support_in_the_field() {
        let body = irrational_segment();
        assert!(matches!(body, ConvexBody::QuadPolytope(_)));
        let sup = body.support(&[q(0, 1), q(1, 1)]);
        assert_eq!(sup.value.as_exact().unwrap(), qe(0, 1, 1, 1));
        match sup.maximizer {
            Maximizer::Face(f) => {
                assert_eq!(f.polytope.vertices(), &[vec![q(1, 1), qe(0, 1, 1, 1)]]);
            }
            Maximizer::Point(_) => panic!("polytopes expose faces"),
        }
    }

    #[test]
    fn membership_is_exact() {
        let square = unit_square();
        assert!(square.contains(&[q(1, 2), q(1, 2)]).unwrap());
        assert!(!square.contains(&[q(3, 2), q(1, 2)]).unwrap());

        let ball = ConvexBody::ball(vec![rat(0, 1), rat(0, 1)], rat(3, 2)).unwrap();
        assert!(ball.contains(&[q(1, 1), q(1, 1)]).unwrap()); // 2 <= 9/4
        assert!(!ball.contains(&[q(3, 2), q(1, 2)]).unwrap()); // 5/2 > 9/4
        // Irrational points still compare exactly inside the field.
        assert!(ball.contains(&[qe(0, 1, 1, 1), q(0, 1)]).unwrap()); // |x| = sqrt 2 < 3/2
        assert!(!ball.contains(&[qe(0, 1, 1, 1), q(1, 1)]).unwrap()); // 3 > 9/4

        let segment = irrational_segment();
        assert!(segment.contains(&[q(1, 2), qe(0, 1, 1, 2)]).unwrap());
        assert!(!segment.contains(&[q(1, 2), q(1, 2)]).unwrap());
    }

    #[test]
    fn vertices_inside_outward_steps_outside() {
        let body = unit_square();
        let p = body.as_polytope().unwrap().clone();
        for v in p.vertices() {
            assert!(body.contains(v).unwrap());
        }
        for ineq in p.inequalities() {
            for v in p.vertices() {
                if ineq.tight_at(v) {
                    let stepped: Vec<QuadExt> = v
                        .iter()
                        .zip(&ineq.normal)
                        .map(|(x, n)| x + &n.times_rat(&rat(1, 7)))
                        .collect();
                    assert!(!body.contains(&stepped).unwrap());
                }
            }
        }
    }

    #[test]
    fn polytope_support_is_sublinear_and_homogeneous() {
        let mut rng = StdRng::seed_from_u64(0x0b0d01);
        let body = irrational_segment();
        for _ in 0..100 {
            let c1 = vec![q(rng.gen_range(-5..=5), 1), q(rng.gen_range(-5..=5), 1)];
            let c2 = vec![q(rng.gen_range(-5..=5), 1), q(rng.gen_range(-5..=5), 1)];
            if c1.iter().all(QuadExt::is_zero) || c2.iter().all(QuadExt::is_zero) {
                continue;
            }
            let sum: Vec<QuadExt> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            let h1 = body.support(&c1).value.as_exact().unwrap();
            let h2 = body.support(&c2).value.as_exact().unwrap();
            if sum.iter().any(|x| !x.is_zero()) {
                let h12 = body.support(&sum).value.as_exact().unwrap();
                assert!(h12 <= &h1 + &h2);
            }
            let t = rat(rng.gen_range(1..=9), rng.gen_range(1..=3));
            let scaled: Vec<QuadExt> = c1.iter().map(|x| x.times_rat(&t)).collect();
            let ht = body.support(&scaled).value.as_exact().unwrap();
            assert_eq!(ht, h1.times_rat(&t));
        }
    }

    #[test]
    fn smooth_support_is_sublinear_by_exact_squaring() {
        // For h(c) = c.z + coeff * sqrt(form(c)) sublinearity reduces to
        // sqrt(form(c1+c2)) <= sqrt(form(c1)) + sqrt(form(c2)), i.e. to
        // form(c1+c2) - form(c1) - form(c2) <= 2 sqrt(form(c1) form(c2)),
        // which squares to a rational comparison.
        let ball = ConvexBody::ball(vec![rat(1, 3), rat(-1, 2)], rat(5, 4)).unwrap();
        let ell = ConvexBody::ellipse(
            vec![rat(0, 1), rat(0, 1)],
            [[rat(2, 1), rat(1, 2)], [rat(1, 2), rat(1, 1)]],
        )
        .unwrap();
        let mut rng = StdRng::seed_from_u64(0x0b0d02);
        for body in [&ball, &ell] {
            for _ in 0..100 {
                let c1 = [rat(rng.gen_range(-5..=5), 1), rat(rng.gen_range(-5..=5), 1)];
                let c2 = [rat(rng.gen_range(-5..=5), 1), rat(rng.gen_range(-5..=5), 1)];
                if (c1[0].is_zero() && c1[1].is_zero()) || (c2[0].is_zero() && c2[1].is_zero()) {
                    continue;
                }
                let form = |c: &[Rational; 2]| -> Rational {
                    let cq = [q_of(&c[0]), q_of(&c[1])];
                    let t = match body {
                        ConvexBody::Ball { .. } => norm_sq_quad(&cq),
                        ConvexBody::Ellipse2D { matrix, .. } => {
                            let w = inverse_apply(matrix, &cq, 2);
                            dot_quad(&cq, &w)
                        }
                        _ => unreachable!(),
                    };
                    t.to_rational().unwrap()
                };
                let t1 = form(&c1);
                let t2 = form(&c2);
                let sum = [&c1[0] + &c2[0], &c1[1] + &c2[1]];
                let t12 = form(&sum);
                let lhs = &t12 - &t1 - &t2;
                // lhs <= 2 sqrt(t1 t2) checked by squaring the positive case.
                if lhs.is_positive() {
                    assert!(&lhs * &lhs <= rat(4, 1) * &t1 * &t2);
                }
            }
        }

        fn q_of(r: &Rational) -> QuadExt {
            QuadExt::rational(r.clone(), 2)
        }
    }

    #[test]
    fn vrep_support_matches_hrep_rebuild() {
        let mut rng = StdRng::seed_from_u64(0x0b0d03);
        for _ in 0..30 {
            let npts = rng.gen_range(3..=6);
            let points: Vec<Vec<QuadExt>> = (0..npts)
                .map(|_| {
                    vec![
                        q(rng.gen_range(-6..=6), rng.gen_range(1..=2)),
                        q(rng.gen_range(-6..=6), rng.gen_range(1..=2)),
                    ]
                })
                .collect();
            let p = Polytope::from_vertices(2, points).unwrap();
            if p.is_empty() {
                continue;
            }
            // Rebuild from the facet system plus the affine hull equations.
            let mut system = p.inequalities().to_vec();
            for (eq, rhs) in p.affine().unwrap().equations() {
                system.push(Inequality::new(eq.clone(), rhs.clone()));
                system.push(Inequality::new(
                    eq.iter().map(|x| -x).collect(),
                    -rhs,
                ));
            }
            let rebuilt = Polytope::from_halfspaces(2, 2, &system).unwrap();
            for _ in 0..10 {
                let c = vec![q(rng.gen_range(-4..=4), 1), q(rng.gen_range(-4..=4), 1)];
                if c.iter().all(QuadExt::is_zero) {
                    continue;
                }
                assert_eq!(p.support(&c), rebuilt.support(&c));
            }
        }
    }

    #[test]
    fn interior_radius_of_disk_center_is_the_radius() {
        let ball = ConvexBody::ball(vec![rat(0, 1), rat(0, 1)], rat(3, 2)).unwrap();
        let plane = AffineSubspace::from_points(
            2,
            &[
                vec![q(0, 1), q(0, 1)],
                vec![q(1, 1), q(0, 1)],
                vec![q(0, 1), q(1, 1)],
            ],
        );
        let r = interior_radius(&[q(0, 1), q(0, 1)], &ball, &plane).unwrap();
        assert_eq!(r, rat(3, 2));
        // Off-center points get a positive bound below radius - distance.
        let r2 = interior_radius(&[q(1, 1), q(0, 1)], &ball, &plane).unwrap();
        assert!(r2.is_positive() && r2 <= rat(1, 2));
        // Boundary and exterior points are rejected.
        assert_eq!(
            interior_radius(&[q(3, 2), q(0, 1)], &ball, &plane),
            Err(BodyError::Geometry(GeometryError::OnBoundary))
        );
        assert_eq!(
            interior_radius(&[q(2, 1), q(0, 1)], &ball, &plane),
            Err(BodyError::Geometry(GeometryError::OnBoundary))
        );
    }

    #[test]
    fn interior_radius_of_box_center() {
        let p = Polytope::from_box(2, &[(q(0, 1), q(3, 2)), (q(0, 1), q(3, 2))]).unwrap();
        let body = ConvexBody::from_polytope(p).unwrap();
        let plane = AffineSubspace::from_points(
            2,
            &[
                vec![q(0, 1), q(0, 1)],
                vec![q(1, 1), q(0, 1)],
                vec![q(0, 1), q(1, 1)],
            ],
        );
        // Distance from (1/2, 1/2) to the nearest side is exactly 1/2 and
        // the facet normals are unit vectors, so the bound is exact.
        let r = interior_radius(&[q(1, 2), q(1, 2)], &body, &plane).unwrap();
        assert_eq!(r, rat(1, 2));
        // Restricted to a vertical line the nearest sides are still 1/2 away.
        let line = AffineSubspace::from_points(
            2,
            &[vec![q(1, 2), q(0, 1)], vec![q(1, 2), q(1, 1)]],
        );
        let r_line = interior_radius(&[q(1, 2), q(1, 2)], &body, &line).unwrap();
        assert_eq!(r_line, rat(1, 2));
        // A zero-dimensional subspace cannot leave the point.
        let point = AffineSubspace::from_points(2, &[vec![q(1, 2), q(1, 2)]]);
        assert_eq!(interior_radius(&[q(1, 2), q(1, 2)], &body, &point).unwrap(), rat(1, 1));
    }

    #[test]
    fn interior_radius_rejects_subspaces_leaving_the_hull() {
        let segment = irrational_segment();
        // The ambient plane leaves the segment's affine hull immediately.
        let plane = AffineSubspace::from_points(
            2,
            &[
                vec![q(0, 1), q(0, 1)],
                vec![q(1, 1), q(0, 1)],
                vec![q(0, 1), q(1, 1)],
            ],
        );
        assert_eq!(
            interior_radius(&[q(1, 2), qe(0, 1, 1, 2)], &segment, &plane),
            Err(BodyError::Geometry(GeometryError::OnBoundary))
        );
        // A point subspace at an interior point is fine.
        let point = AffineSubspace::from_points(2, &[vec![q(1, 2), qe(0, 1, 1, 2)]]);
        assert_eq!(
            interior_radius(&[q(1, 2), qe(0, 1, 1, 2)], &segment, &point).unwrap(),
            rat(1, 1)
        );
    }

    #[test]
    fn interior_radius_of_ellipse_point() {
        let ell = ConvexBody::ellipse(
            vec![rat(0, 1), rat(0, 1)],
            [[rat(1, 1), rat(0, 1)], [rat(0, 1), rat(4, 1)]],
        )
        .unwrap();
        let plane = AffineSubspace::from_points(
            2,
            &[
                vec![q(0, 1), q(0, 1)],
                vec![q(1, 1), q(0, 1)],
                vec![q(0, 1), q(1, 1)],
            ],
        );
        let r = interior_radius(&[q(0, 1), q(0, 1)], &ell, &plane).unwrap();
        // True clearance is the semi-minor axis 1/2; the bound is a positive
        // under-approximation.
        assert!(r.is_positive() && r <= rat(1, 2));
        let near = interior_radius(&[q(1, 2), q(0, 1)], &ell, &plane).unwrap();
        assert!(near.is_positive() && near < r);
        assert_eq!(
            interior_radius(&[q(0, 1), q(1, 2)], &ell, &plane),
            Err(BodyError::Geometry(GeometryError::OnBoundary))
        );
    }

    #[test]
    fn construction_guards() {
        assert_eq!(
            ConvexBody::ball(vec![rat(0, 1)], rat(1, 1)),
            Err(BodyError::UnsupportedDimension)
        );
        assert_eq!(
            ConvexBody::ball(vec![rat(0, 1), rat(0, 1)], rat(0, 1)),
            Err(BodyError::EmptyBody)
        );
        assert_eq!(
            ConvexBody::ellipse(
                vec![rat(0, 1), rat(0, 1)],
                [[rat(1, 1), rat(2, 1)], [rat(2, 1), rat(1, 1)]],
            ),
            Err(BodyError::NotPositiveDefinite)
        );
    }

    #[test]
    fn bounding_boxes_are_outer() {
        let ball = ConvexBody::ball(vec![rat(1, 2), rat(0, 1)], rat(3, 2)).unwrap();
        assert_eq!(ball.bounding_box(), vec![(rat(-1, 1), rat(2, 1)), (rat(-3, 2), rat(3, 2))]);

        let segment = irrational_segment();
        let bb = segment.bounding_box();
        assert_eq!(bb[0], (rat(0, 1), rat(1, 1)));
        assert!(bb[1].0 <= rat(0, 1));
        assert!(qe(0, 1, 1, 1).cmp_rational(&bb[1].1).is_le());

        let ell = ConvexBody::ellipse(
            vec![rat(0, 1), rat(0, 1)],
            [[rat(1, 1), rat(0, 1)], [rat(0, 1), rat(4, 1)]],
        )
        .unwrap();
        let bb = ell.bounding_box();
        assert!(bb[0].0 <= rat(-1, 1) && rat(1, 1) <= bb[0].1);
        assert!(bb[1].0 <= rat(-1, 2) && rat(1, 2) <= bb[1].1);
    }

    #[test]
    fn json_round_trips() {
        let bodies = [
            unit_square(),
            irrational_segment(),
            ConvexBody::ball(vec![rat(0, 1), rat(0, 1)], rat(3, 2)).unwrap(),
            ConvexBody::ellipse(
                vec![rat(1, 2), rat(0, 1)],
                [[rat(2, 1), rat(1, 2)], [rat(1, 2), rat(1, 1)]],
            )
            .unwrap(),
        ];
        for body in &bodies {
            let v = body.to_json();
            let back = ConvexBody::from_json(&v).unwrap();
            assert_eq!(&back, body);
        }
    }

    #[test]
    fn json_halfspace_form_parses() {
        let v = json!({
            "type": "polytope",
            "field": 2,
            "ambient": 2,
            "inequalities": [
                {"normal": ["1/1", "0/1"], "rhs": "3/2"},
                {"normal": ["-1/1", "0/1"], "rhs": "0/1"},
                {"normal": ["0/1", "1/1"], "rhs": "3/2"},
                {"normal": ["0/1", "-1/1"], "rhs": "0/1"},
            ],
        });
        let body = ConvexBody::from_json(&v).unwrap();
        let p = body.as_polytope().unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert!(body.contains(&[q(3, 2), q(3, 2)]).unwrap());
        // Unknown types and malformed fields fail loudly.
        assert!(matches!(
            ConvexBody::from_json(&json!({"type": "simplex"})),
            Err(BodyError::Parse(_))
        ));
        assert!(matches!(
            ConvexBody::from_json(&json!({"type": "ball", "center": ["0/1", "0/1"]})),
            Err(BodyError::Parse(_))
        ));
    }
}
