//! Quantitative non-degeneracy: stability margins of faces and certified
//! interior radii, as explicit positive rationals.
//!
//! The closure algorithm only ever needs *some* valid positive bound, not
//! a tight one, so both functions return conservative rational values
//! obtained from interval enclosures of the exact field quantities.

use num_traits::{One, Zero};

use super::polytope::{Face, Polytope};
use super::GeometryError;
use crate::linalg::{dot_quad, norm_sq_quad};
use crate::numeric::{quad_enclosure, sqrt_enclosure, QuadExt, Rational};

/// A positive rational strictly below a positive field value.
pub(crate) fn positive_lower_bound(x: &QuadExt) -> Rational {
    assert!(x.sign() > 0, "value must be strictly positive");
    let mut bits = 32;
    loop {
        let (lo, _) = quad_enclosure(x, bits);
        if lo > Rational::zero() {
            return lo;
        }
        bits *= 2;
    }
}

/// A rational upper bound on `sqrt(t)` for a nonnegative field value `t`.
pub(crate) fn sqrt_upper_bound(t: &QuadExt) -> Rational {
    assert!(t.sign() >= 0, "radicand must be nonnegative");
    let (_, hi) = quad_enclosure(t, 32);
    sqrt_enclosure(&hi, 32).1
}

/// A positive margin by which the direction of a proper face may be
/// perturbed (in Euclidean norm) without its maximizer set escaping the
/// face.
///
/// Fails with [`GeometryError::DegenerateFace`] when the face is the whole
/// polytope — every perturbation is then harmless and no finite margin is
/// meaningful.
pub fn face_stability_margin(p: &Polytope, face: &Face) -> Result<Rational, GeometryError> {
    let n = p.ambient_dim();
    if face.direction.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: face.direction.len() });
    }
    let off_face: Vec<&Vec<QuadExt>> = p
        .vertices()
        .iter()
        .filter(|v| dot_quad(&face.direction, v) != face.value)
        .collect();
    if off_face.is_empty() {
        return Err(GeometryError::DegenerateFace);
    }
    let min_slack = off_face
        .iter()
        .map(|v| &face.value - &dot_quad(&face.direction, v))
        .min()
        .expect("non-empty off-face set");
    let slack_lo = positive_lower_bound(&min_slack);
    let vertex_norm_ub = p
        .vertices()
        .iter()
        .map(|v| sqrt_upper_bound(&norm_sq_quad(v)))
        .max()
        .expect("non-empty polytope");
    let dir_norm_ub = sqrt_upper_bound(&norm_sq_quad(&face.direction));
    let two = Rational::from_integer(2.into());
    Ok(slack_lo / (dir_norm_ub * (&two * vertex_norm_ub + two)))
}

/// A positive rational `r` such that the ball of radius `r` around `x`
/// *within the affine hull* is contained in the polytope.
///
/// Fails with [`GeometryError::OnBoundary`] unless `x` lies in the
/// relative interior.  A zero-dimensional polytope has relative interior
/// radius 1 by convention (the relative ball is the point itself).
pub fn interior_radius(p: &Polytope, x: &[QuadExt]) -> Result<Rational, GeometryError> {
    if x.len() != p.ambient_dim() {
        return Err(GeometryError::DimensionMismatch { expected: p.ambient_dim(), got: x.len() });
    }
    let inside_hull = p.affine().map_or(false, |aff| aff.contains(x));
    if !inside_hull {
        return Err(GeometryError::OnBoundary);
    }
    if p.dim() == Some(0) {
        return Ok(Rational::one());
    }
    let mut radius: Option<Rational> = None;
    for ineq in p.inequalities() {
        let slack = ineq.slack(x);
        if slack.sign() <= 0 {
            return Err(GeometryError::OnBoundary);
        }
        // Facet normals are stored inside the direction space, so the
        // in-hull distance to the facet is slack / |normal|.
        let r = positive_lower_bound(&slack) / sqrt_upper_bound(&norm_sq_quad(&ineq.normal));
        radius = Some(radius.map_or(r.clone(), |best| best.min(r)));
    }
    Ok(radius.expect("positive-dimensional polytope has facets"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Int, Rational};

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(Int::from(p), Int::from(q))
    }

    fn q(p: i64, q_: i64) -> QuadExt {
        QuadExt::rational(rat(p, q_), 2)
    }

    fn pt(coords: &[(i64, i64)]) -> Vec<QuadExt> {
        coords.iter().map(|&(p, q_)| q(p, q_)).collect()
    }

    fn unit_square() -> Polytope {
        Polytope::from_vertices(
            2,
            vec![
                pt(&[(0, 1), (0, 1)]),
                pt(&[(1, 1), (0, 1)]),
                pt(&[(0, 1), (1, 1)]),
                pt(&[(1, 1), (1, 1)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn margin_of_a_square_edge() {
        let p = unit_square();
        let face = p.pi_face(&pt(&[(1, 1), (0, 1)])).unwrap();
        let eps = face_stability_margin(&p, &face).unwrap();
        assert!(eps > Rational::zero());
        // slack 1, |pi| = 1, max vertex norm sqrt(2): the bound is below
        // 1 / (2*1 + 2) and certainly below 1/4.
        assert!(eps <= rat(1, 4));
    }

    #[test]
    fn whole_polytope_face_has_no_margin() {
        let seg = Polytope::from_vertices(2, vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (1, 1)])])
            .unwrap();
        let face = seg.pi_face(&pt(&[(1, 1), (-1, 1)])).unwrap();
        assert_eq!(face.polytope, seg);
        assert_eq!(face_stability_margin(&seg, &face), Err(GeometryError::DegenerateFace));
    }

    #[test]
    fn margin_with_irrational_vertex() {
        let s2 = QuadExt::sqrt_m(2).unwrap();
        let p = Polytope::from_vertices(2, vec![pt(&[(0, 1), (0, 1)]), vec![q(1, 1), s2]])
            .unwrap();
        let face = p.pi_face(&pt(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(face.polytope.vertices().len(), 1);
        let eps = face_stability_margin(&p, &face).unwrap();
        assert!(eps > Rational::zero());
    }

    #[test]
    fn interior_radius_of_the_square_center() {
        let p = unit_square();
        let r = interior_radius(&p, &pt(&[(1, 2), (1, 2)])).unwrap();
        // Every facet normal is a unit vector, so the bound is exact here.
        assert_eq!(r, rat(1, 2));
        assert_eq!(
            interior_radius(&p, &pt(&[(0, 1), (1, 2)])),
            Err(GeometryError::OnBoundary)
        );
        assert_eq!(
            interior_radius(&p, &pt(&[(2, 1), (1, 2)])),
            Err(GeometryError::OnBoundary)
        );
    }

    #[test]
    fn perturbations_within_the_margin_keep_the_face() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(0x3a97);
        let mut rounds = 0;
        while rounds < 40 {
            // A random polygon, occasionally with an irrational vertex.
            let nverts = rng.gen_range(3..=5);
            let mut verts: Vec<Vec<QuadExt>> = (0..nverts)
                .map(|_| {
                    pt(&[
                        (rng.gen_range(-4..=4), rng.gen_range(1..=2)),
                        (rng.gen_range(-4..=4), rng.gen_range(1..=2)),
                    ])
                })
                .collect();
            if rng.gen_bool(0.3) {
                let s2 = QuadExt::sqrt_m(2).unwrap();
                verts.push(vec![&q(5, 1) + &s2, q(0, 1)]);
            }
            let p = Polytope::from_vertices(2, verts).unwrap();
            if p.dim() != Some(2) {
                continue;
            }
            let dir = pt(&[(rng.gen_range(-5..=5), 1), (rng.gen_range(-5..=5), 1)]);
            if dir.iter().all(|x| x.sign() == 0) {
                continue;
            }
            let face = p.pi_face(&dir).unwrap();
            let Ok(margin) = face_stability_margin(&p, &face) else {
                continue;
            };
            rounds += 1;
            // Componentwise bound b = margin * |dir| / 8 keeps the distance
            // of the unit directions below 2 * |y| / |dir| <= margin / 2.
            let dir_norm_sq = norm_sq_quad(&dir).to_rational().expect("rational direction");
            let dir_norm_lb = sqrt_enclosure(&dir_norm_sq, 32).0;
            let b = &margin * &dir_norm_lb / Rational::from_integer(8.into());
            for _ in 0..25 {
                let perturbed: Vec<QuadExt> = dir
                    .iter()
                    .map(|x| {
                        let k = Rational::from_integer(rng.gen_range(-8i64..=8).into());
                        let y = &b * &(k / Rational::from_integer(8.into()));
                        x + &QuadExt::rational(y, 2)
                    })
                    .collect();
                let moved = p.pi_face(&perturbed).unwrap();
                for v in moved.polytope.vertices() {
                    assert!(
                        face.polytope.vertices().contains(v),
                        "maximizer escaped the face under an in-margin perturbation"
                    );
                }
            }
        }
    }

    #[test]
    fn interior_radius_respects_the_hull()  {
        // Segment {0} x [0,1]: mid point is relatively interior.
        let seg = Polytope::from_vertices(2, vec![pt(&[(0, 1), (0, 1)]), pt(&[(0, 1), (1, 1)])])
            .unwrap();
        let r = interior_radius(&seg, &pt(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(r, rat(1, 2));
        // A point off the hull is on the boundary for our purposes.
        assert_eq!(
            interior_radius(&seg, &pt(&[(1, 2), (1, 2)])),
            Err(GeometryError::OnBoundary)
        );
        // Zero-dimensional convention.
        let point = Polytope::from_vertices(2, vec![pt(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(interior_radius(&point, &pt(&[(1, 2), (1, 2)])), Ok(Rational::one()));
    }
}
