//! Compact polytopes carrying both exact descriptions at once.
//!
//! A [`Polytope`] stores a canonical (deduplicated, lexicographically
//! sorted) vertex set, a facet-defining inequality system, and the affine
//! hull.  Vertex-to-facet conversion enumerates hyperplanes spanned by
//! `d`-subsets of points inside an affine coordinate chart; facet-to-vertex
//! conversion either enumerates basis subsets of the inequality system
//! (checking the recession cone of the *input* system first) or clips a
//! known bounding polytope one halfspace at a time.

use itertools::Itertools;

use super::affine::AffineSubspace;
use super::GeometryError;
use crate::linalg::{dot_quad, null_space, rank_quad, solve_square};
use crate::numeric::QuadExt;

/// Largest ambient dimension the enumerative engines accept.
pub(crate) const MAX_AMBIENT_DIM: usize = 4;

/// A closed halfspace `normal . x <= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub normal: Vec<QuadExt>,
    pub rhs: QuadExt,
}

impl Inequality {
    pub fn new(normal: Vec<QuadExt>, rhs: QuadExt) -> Self {
        Inequality { normal, rhs }
    }

    /// `rhs - normal . x`: nonnegative exactly on the halfspace.
    pub fn slack(&self, x: &[QuadExt]) -> QuadExt {
        &self.rhs - &dot_quad(&self.normal, x)
    }

    pub fn satisfied_by(&self, x: &[QuadExt]) -> bool {
        self.slack(x).sign() >= 0
    }

    pub fn tight_at(&self, x: &[QuadExt]) -> bool {
        self.slack(x).is_zero()
    }

    /// Scales so the first non-zero normal entry has absolute value one.
    fn canonicalized(mut self) -> Self {
        if let Some(pos) = self.normal.iter().position(|a| !a.is_zero()) {
            let s = self.normal[pos].abs();
            for a in self.normal.iter_mut() {
                *a = &*a / &s;
            }
            self.rhs = &self.rhs / &s;
        }
        self
    }
}

/// The set of maximizers of a linear functional over a polytope.
#[derive(Clone, Debug)]
pub struct Face {
    /// The maximized functional.
    pub direction: Vec<QuadExt>,
    /// The maximum value (the support value of the direction).
    pub value: QuadExt,
    /// The maximizer set itself.
    pub polytope: Polytope,
}

/// A compact polytope over the working field, possibly empty or of lower
/// dimension than its ambient space.
#[derive(Clone, Debug)]
pub struct Polytope {
    field: u64,
    ambient: usize,
    vertices: Vec<Vec<QuadExt>>,
    inequalities: Vec<Inequality>,
    affine: Option<AffineSubspace>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vertices == other.vertices
    }
}

impl Polytope {
    /// The empty polytope.
    pub fn empty(field: u64, ambient: usize) -> Self {
        Polytope { field, ambient, vertices: vec![], inequalities: vec![], affine: None }
    }

    /// Convex hull of a finite point set; interior and duplicate points are
    /// pruned.
    pub fn from_vertices(
        field: u64,
        points: Vec<Vec<QuadExt>>,
    ) -> Result<Self, GeometryError> {
        let Some(first) = points.first() else {
            return Err(GeometryError::DimensionMismatch { expected: 1, got: 0 });
        };
        let ambient = first.len();
        check_ambient(ambient)?;
        for p in &points {
            if p.len() != ambient {
                return Err(GeometryError::DimensionMismatch { expected: ambient, got: p.len() });
            }
        }
        Ok(Self::hull(field, ambient, points))
    }

    /// Axis-aligned box `lo_i <= x_i <= hi_i` given per-coordinate bounds.
    pub fn from_box(
        field: u64,
        bounds: &[(QuadExt, QuadExt)],
    ) -> Result<Self, GeometryError> {
        check_ambient(bounds.len())?;
        let n = bounds.len();
        let mut corners = vec![Vec::with_capacity(n)];
        for (lo, hi) in bounds {
            assert!(lo <= hi, "box bounds out of order");
            let mut next = Vec::with_capacity(corners.len() * 2);
            for c in corners {
                let mut a = c.clone();
                a.push(lo.clone());
                next.push(a);
                if hi != lo {
                    let mut b = c;
                    b.push(hi.clone());
                    next.push(b);
                }
            }
            corners = next;
        }
        Self::from_vertices(field, corners)
    }

    /// Solves a small halfspace system by basis enumeration.
    ///
    /// Fails with [`GeometryError::Unbounded`] whenever the recession cone
    /// of the *input system* is nontrivial, even if the feasible region
    /// itself happens to be empty.  A bounded infeasible system yields the
    /// empty polytope.
    pub fn from_halfspaces(
        field: u64,
        ambient: usize,
        system: &[Inequality],
    ) -> Result<Self, GeometryError> {
        check_ambient(ambient)?;
        for ineq in system {
            if ineq.normal.len() != ambient {
                return Err(GeometryError::DimensionMismatch {
                    expected: ambient,
                    got: ineq.normal.len(),
                });
            }
        }
        let rows: Vec<Vec<QuadExt>> = system.iter().map(|i| i.normal.clone()).collect();
        if rank_quad(&rows) < ambient {
            return Err(GeometryError::Unbounded);
        }
        // A nontrivial recession cone of a pointed system contains an
        // extreme ray, spanned by the null space of n-1 independent rows.
        for subset in (0..rows.len()).combinations(ambient - 1) {
            let sub: Vec<Vec<QuadExt>> = subset.iter().map(|&i| rows[i].clone()).collect();
            let rays = null_space(&sub, ambient, field);
            if rays.len() != 1 {
                continue;
            }
            let ray = &rays[0];
            let neg: Vec<QuadExt> = ray.iter().map(|x| -x).collect();
            for r in [ray, &neg] {
                if rows.iter().all(|row| dot_quad(row, r).sign() <= 0) {
                    return Err(GeometryError::Unbounded);
                }
            }
        }
        // Bounded: every vertex is the unique solution of n tight rows.
        let mut points = Vec::new();
        for subset in (0..system.len()).combinations(ambient) {
            let a: Vec<Vec<QuadExt>> = subset.iter().map(|&i| rows[i].clone()).collect();
            let b: Vec<QuadExt> = subset.iter().map(|&i| system[i].rhs.clone()).collect();
            let Some(x) = solve_square(&a, &b) else { continue };
            if system.iter().all(|ineq| ineq.satisfied_by(&x)) {
                points.push(x);
            }
        }
        if points.is_empty() {
            return Ok(Self::empty(field, ambient));
        }
        Ok(Self::hull(field, ambient, points))
    }

    /// Intersects a known compact polytope with extra halfspaces, one clip
    /// at a time.  Unlike [`Polytope::from_halfspaces`], boundedness comes
    /// for free from the seed.
    pub(crate) fn from_halfspaces_clip(seed: &Polytope, system: &[Inequality]) -> Self {
        let mut cur = seed.clone();
        for ineq in system {
            if cur.is_empty() {
                break;
            }
            cur = cur.clipped(ineq);
        }
        cur
    }

    /// Intersects with a single halfspace, updating both descriptions
    /// incrementally (new vertices appear only on edges that cross the
    /// hyperplane; facets are filtered by a rank test).
    pub(crate) fn clipped(self, ineq: &Inequality) -> Self {
        let slacks: Vec<QuadExt> = self.vertices.iter().map(|v| ineq.slack(v)).collect();
        let signs: Vec<i32> = slacks.iter().map(QuadExt::sign).collect();
        if signs.iter().all(|&s| s >= 0) {
            return self; // redundant halfspace
        }
        if signs.iter().all(|&s| s < 0) {
            return Self::empty(self.field, self.ambient);
        }
        if signs.iter().all(|&s| s <= 0) {
            // No strictly interior vertex: the halfspace shaves the
            // polytope down to the face where it is tight.
            let tight: Vec<Vec<QuadExt>> = self
                .vertices
                .iter()
                .zip(&signs)
                .filter(|(_, &s)| s == 0)
                .map(|(v, _)| v.clone())
                .collect();
            return Self::hull(self.field, self.ambient, tight);
        }
        // Mixed signs: the clipped region keeps the full dimension of the
        // hull, so the affine hull carries over.
        let aff = self.affine.as_ref().expect("non-empty polytope");
        let d = aff.dim();
        debug_assert!(d >= 1, "mixed slack signs need at least two vertices");
        let chart_normal = |a: &[QuadExt]| -> Vec<QuadExt> {
            aff.basis().iter().map(|b| dot_quad(a, b)).collect()
        };
        let facet_chart: Vec<Vec<QuadExt>> =
            self.inequalities.iter().map(|i| chart_normal(&i.normal)).collect();
        let tight_sets: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .map(|v| {
                self.inequalities
                    .iter()
                    .enumerate()
                    .filter(|(_, i)| i.tight_at(v))
                    .map(|(f, _)| f)
                    .collect()
            })
            .collect();
        let mut points: Vec<Vec<QuadExt>> = Vec::new();
        for (v, &s) in self.vertices.iter().zip(&signs) {
            if s >= 0 {
                points.push(v.clone());
            }
        }
        for (u, &su) in signs.iter().enumerate() {
            if su <= 0 {
                continue;
            }
            for (w, &sw) in signs.iter().enumerate() {
                if sw >= 0 {
                    continue;
                }
                // u and w span an edge exactly when their common tight
                // facet normals leave one degree of freedom in the chart.
                let common: Vec<Vec<QuadExt>> = tight_sets[u]
                    .iter()
                    .filter(|f| tight_sets[w].contains(f))
                    .map(|&f| facet_chart[f].clone())
                    .collect();
                if rank_quad(&common) != d - 1 {
                    continue;
                }
                let lambda = &slacks[u] / &(&slacks[u] - &slacks[w]);
                let crossing: Vec<QuadExt> = self.vertices[u]
                    .iter()
                    .zip(&self.vertices[w])
                    .map(|(a, b)| a + &(&lambda * &(b - a)))
                    .collect();
                points.push(crossing);
            }
        }
        points.sort();
        points.dedup();
        // Facets of the intersection are supported by old facet
        // hyperplanes or by the new one; keep those whose tight set still
        // spans dimension d - 1.
        let mut kept: Vec<Inequality> = Vec::new();
        for cand in self.inequalities.iter().cloned().chain([ineq.clone().canonicalized()]) {
            let tight: Vec<&Vec<QuadExt>> =
                points.iter().filter(|p| cand.tight_at(p)).collect();
            let Some(first) = tight.first() else { continue };
            let diffs: Vec<Vec<QuadExt>> = tight[1..]
                .iter()
                .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
                .collect();
            if rank_quad(&diffs) == d - 1 {
                kept.push(cand);
            }
        }
        kept.sort_by(|p, q| p.normal.cmp(&q.normal).then_with(|| p.rhs.cmp(&q.rhs)));
        kept.dedup();
        let poly = Polytope {
            field: self.field,
            ambient: self.ambient,
            vertices: points,
            inequalities: kept,
            affine: self.affine.clone(),
        };
        poly.debug_validate();
        poly
    }

    /// Shared constructor: canonicalize the point set and build all the
    /// derived data.
    fn hull(field: u64, ambient: usize, points: Vec<Vec<QuadExt>>) -> Self {
        let data = hull_data(field, ambient, points);
        let poly = Polytope {
            field,
            ambient,
            vertices: data.vertices,
            inequalities: data.inequalities,
            affine: Some(data.affine),
        };
        poly.debug_validate();
        poly
    }

    fn debug_validate(&self) {
        if cfg!(debug_assertions) {
            for v in &self.vertices {
                debug_assert!(
                    self.inequalities.iter().all(|i| i.satisfied_by(v)),
                    "vertex violates a facet inequality"
                );
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension; `None` for the empty polytope.
    pub fn dim(&self) -> Option<usize> {
        self.affine.as_ref().map(AffineSubspace::dim)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn field_index(&self) -> u64 {
        self.field
    }

    /// Canonical vertex list (deduplicated, lexicographically sorted).
    pub fn vertices(&self) -> &[Vec<QuadExt>] {
        &self.vertices
    }

    /// Facet-defining inequalities (empty when `dim <= 0`).
    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    /// Affine hull; `None` for the empty polytope.
    pub fn affine(&self) -> Option<&AffineSubspace> {
        self.affine.as_ref()
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[QuadExt]) -> bool {
        match &self.affine {
            None => false,
            Some(aff) => {
                aff.contains(x) && self.inequalities.iter().all(|i| i.satisfied_by(x))
            }
        }
    }

    /// Support value `max { dir . x : x in the polytope }`.
    ///
    /// Panics on the empty polytope: callers must check emptiness first.
    pub fn support(&self, dir: &[QuadExt]) -> QuadExt {
        assert!(!self.is_empty(), "support of the empty polytope");
        self.vertices
            .iter()
            .map(|v| dot_quad(dir, v))
            .max()
            .expect("non-empty vertex set")
    }

    /// The face of maximizers of `dir` (the whole polytope when `dir` is
    /// constant over it).
    pub fn pi_face(&self, dir: &[QuadExt]) -> Result<Face, GeometryError> {
        if dir.len() != self.ambient {
            return Err(GeometryError::DimensionMismatch {
                expected: self.ambient,
                got: dir.len(),
            });
        }
        if dir.iter().all(QuadExt::is_zero) {
            return Err(GeometryError::ZeroDirection);
        }
        assert!(!self.is_empty(), "face of the empty polytope");
        let value = self.support(dir);
        let tight: Vec<Vec<QuadExt>> = self
            .vertices
            .iter()
            .filter(|v| dot_quad(dir, v) == value)
            .cloned()
            .collect();
        Ok(Face {
            direction: dir.to_vec(),
            value,
            polytope: Self::hull(self.field, self.ambient, tight),
        })
    }

    /// Facets paired with their defining inequalities; empty when
    /// `dim <= 0`.
    pub fn facets(&self) -> Vec<(Inequality, Polytope)> {
        self.inequalities
            .iter()
            .map(|ineq| {
                let tight: Vec<Vec<QuadExt>> = self
                    .vertices
                    .iter()
                    .filter(|v| ineq.tight_at(v))
                    .cloned()
                    .collect();
                (ineq.clone(), Self::hull(self.field, self.ambient, tight))
            })
            .collect()
    }

    /// Per-coordinate `(min, max)` over the polytope; `None` when empty.
    pub fn bounding_box(&self) -> Option<Vec<(QuadExt, QuadExt)>> {
        if self.is_empty() {
            return None;
        }
        Some(
            (0..self.ambient)
                .map(|i| {
                    let lo = self.vertices.iter().map(|v| v[i].clone()).min().unwrap();
                    let hi = self.vertices.iter().map(|v| v[i].clone()).max().unwrap();
                    (lo, hi)
                })
                .collect(),
        )
    }

    /// Arithmetic mean of the vertices; `None` when empty.
    pub fn barycenter(&self) -> Option<Vec<QuadExt>> {
        if self.is_empty() {
            return None;
        }
        let k = crate::numeric::Rational::from_integer(crate::numeric::Int::from(
            self.vertices.len() as i64,
        ));
        let mut sum = vec![QuadExt::zero(self.field); self.ambient];
        for v in &self.vertices {
            for (s, x) in sum.iter_mut().zip(v) {
                *s = &*s + x;
            }
        }
        Some(sum.into_iter().map(|s| s.div_rat(&k)).collect())
    }
}

fn check_ambient(ambient: usize) -> Result<(), GeometryError> {
    if ambient == 0 || ambient > MAX_AMBIENT_DIM {
        return Err(GeometryError::DimensionTooLarge { dim: ambient });
    }
    Ok(())
}

struct HullData {
    vertices: Vec<Vec<QuadExt>>,
    inequalities: Vec<Inequality>,
    affine: AffineSubspace,
}

/// Canonicalizes a non-empty point set into vertices, facets and hull.
fn hull_data(field: u64, ambient: usize, mut points: Vec<Vec<QuadExt>>) -> HullData {
    assert!(!points.is_empty());
    points.sort();
    points.dedup();
    let affine = AffineSubspace::from_points(field, &points);
    let d = affine.dim();
    if d == 0 {
        return HullData { vertices: points, inequalities: vec![], affine };
    }
    // Work in affine coordinates, where the hull is full-dimensional.
    let charts: Vec<Vec<QuadExt>> = points.iter().map(|p| affine.coordinates(p)).collect();
    let mut chart_facets: Vec<(Vec<QuadExt>, QuadExt)> = Vec::new();
    for subset in (0..charts.len()).combinations(d) {
        // Hyperplane nu . y = beta through the subset: null space of the
        // rows (y_i, -1).
        let rows: Vec<Vec<QuadExt>> = subset
            .iter()
            .map(|&i| {
                let mut r = charts[i].clone();
                r.push(-&QuadExt::one(field));
                r
            })
            .collect();
        let ns = null_space(&rows, d + 1, field);
        if ns.len() != 1 {
            continue;
        }
        let mut nu = ns[0].clone();
        let mut beta = nu.pop().expect("nonempty null vector");
        let signs: Vec<i32> =
            charts.iter().map(|y| (&dot_quad(&nu, y) - &beta).sign()).collect();
        if signs.iter().any(|&s| s > 0) {
            if signs.iter().any(|&s| s < 0) {
                continue; // hyperplane separates the points: not a facet
            }
            nu = nu.iter().map(|x| -x).collect();
            beta = -&beta;
        }
        let canon = Inequality::new(nu, beta.clone()).canonicalized();
        chart_facets.push((canon.normal, canon.rhs));
    }
    chart_facets.sort();
    chart_facets.dedup();
    // Vertices are the points whose tight facet normals span the chart.
    let vertices: Vec<Vec<QuadExt>> = points
        .iter()
        .zip(&charts)
        .filter(|(_, y)| {
            let tight: Vec<Vec<QuadExt>> = chart_facets
                .iter()
                .filter(|(nu, beta)| dot_quad(nu, y) == *beta)
                .map(|(nu, _)| nu.clone())
                .collect();
            rank_quad(&tight) == d
        })
        .map(|(p, _)| p.clone())
        .collect();
    // Lift each chart facet nu . y <= beta back to ambient coordinates.
    let gram: Vec<Vec<QuadExt>> = (0..d)
        .map(|i| (0..d).map(|j| dot_quad(&affine.basis()[i], &affine.basis()[j])).collect())
        .collect();
    let mut inequalities: Vec<Inequality> = chart_facets
        .into_iter()
        .map(|(nu, beta)| {
            let w = solve_square(&gram, &nu).expect("Gram matrix is invertible");
            let mut a = vec![QuadExt::zero(field); ambient];
            for (wi, b) in w.iter().zip(affine.basis()) {
                for (ai, bi) in a.iter_mut().zip(b) {
                    *ai = &*ai + &(wi * bi);
                }
            }
            let rhs = &beta + &dot_quad(&a, affine.base());
            Inequality::new(a, rhs).canonicalized()
        })
        .collect();
    inequalities.sort_by(|p, q| p.normal.cmp(&q.normal).then_with(|| p.rhs.cmp(&q.rhs)));
    // Recompute the hull from the true vertex set so the stored base point
    // is itself a vertex.
    let affine = AffineSubspace::from_points(field, &vertices);
    HullData { vertices, inequalities, affine }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Int, Rational};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(Int::from(p), Int::from(q))
    }

    fn q(p: i64, q_: i64) -> QuadExt {
        QuadExt::rational(rat(p, q_), 2)
    }

    fn qi(r: i64, i: i64) -> QuadExt {
        QuadExt::new(rat(r, 1), rat(i, 1), 2).unwrap()
    }

    fn pt(coords: &[(i64, i64)]) -> Vec<QuadExt> {
        coords.iter().map(|&(p, q_)| q(p, q_)).collect()
    }

    fn unit_square() -> Polytope {
        Polytope::from_vertices(
            2,
            vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (0, 1)]), pt(&[(0, 1), (1, 1)]), pt(&[(1, 1), (1, 1)])],
        )
        .unwrap()
    }

    #[test]
    fn square_has_four_vertices_and_facets() {
        let p = unit_square();
        assert_eq!(p.dim(), Some(2));
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.inequalities().len(), 4);
        assert!(p.contains(&pt(&[(1, 2), (1, 2)])));
        assert!(!p.contains(&pt(&[(3, 2), (1, 2)])));
        assert_eq!(p.support(&pt(&[(1, 1), (1, 1)])), q(2, 1));
        let face = p.pi_face(&pt(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(face.value, q(1, 1));
        assert_eq!(face.polytope.vertices().len(), 2);
        assert_eq!(face.polytope.dim(), Some(1));
    }

    #[test]
    fn interior_and_duplicate_points_are_pruned() {
        let mut pts = unit_square().vertices().to_vec();
        pts.push(pt(&[(1, 2), (1, 2)]));
        pts.push(pt(&[(0, 1), (0, 1)]));
        pts.push(pt(&[(1, 2), (0, 1)])); // midpoint of an edge
        let p = Polytope::from_vertices(2, pts).unwrap();
        assert_eq!(p, unit_square());
    }

    #[test]
    fn irrational_segment() {
        let p = Polytope::from_vertices(2, vec![pt(&[(0, 1), (0, 1)]), vec![q(1, 1), qi(0, 1)]])
            .unwrap();
        assert_eq!(p.dim(), Some(1));
        assert_eq!(p.vertices().len(), 2);
        assert_eq!(p.inequalities().len(), 2);
        let mid = vec![q(1, 2), qi(0, 1).div_rat(&rat(2, 1))];
        assert!(p.contains(&mid));
        assert!(!p.contains(&pt(&[(1, 2), (1, 2)])));
        let facets = p.facets();
        assert_eq!(facets.len(), 2);
        assert!(facets.iter().all(|(_, f)| f.dim() == Some(0)));
    }

    #[test]
    fn halfspaces_of_the_square_round_trip() {
        let p = unit_square();
        let h = Polytope::from_halfspaces(2, 2, p.inequalities()).unwrap();
        assert_eq!(h, p);
    }

    #[test]
    fn unbounded_system_is_rejected() {
        // Only three sides of a square: recession along -x.
        let sys = vec![
            Inequality::new(pt(&[(1, 1), (0, 1)]), q(1, 1)),
            Inequality::new(pt(&[(0, 1), (1, 1)]), q(1, 1)),
            Inequality::new(pt(&[(0, 1), (-1, 1)]), q(0, 1)),
        ];
        assert_eq!(Polytope::from_halfspaces(2, 2, &sys), Err(GeometryError::Unbounded));
        // A single row in the plane leaves a full halfplane.
        let sys = vec![Inequality::new(pt(&[(1, 1), (1, 1)]), q(1, 1))];
        assert_eq!(Polytope::from_halfspaces(2, 2, &sys), Err(GeometryError::Unbounded));
    }

    #[test]
    fn bounded_infeasible_system_is_empty() {
        let sys = vec![
            Inequality::new(pt(&[(1, 1), (0, 1)]), q(0, 1)),
            Inequality::new(pt(&[(-1, 1), (0, 1)]), q(-1, 1)), // x >= 1
            Inequality::new(pt(&[(0, 1), (1, 1)]), q(1, 1)),
            Inequality::new(pt(&[(0, 1), (-1, 1)]), q(0, 1)),
        ];
        let p = Polytope::from_halfspaces(2, 2, &sys).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.dim(), None);
    }

    #[test]
    fn clipping_the_square() {
        let seed = unit_square();
        // x + y <= 1 cuts the square down to a triangle.
        let tri = Polytope::from_halfspaces_clip(
            &seed,
            &[Inequality::new(pt(&[(1, 1), (1, 1)]), q(1, 1))],
        );
        assert_eq!(tri.vertices().len(), 3);
        assert!(tri.contains(&pt(&[(1, 4), (1, 4)])));
        assert!(!tri.contains(&pt(&[(3, 4), (3, 4)])));
        // x <= 0 flattens it to a segment.
        let seg = Polytope::from_halfspaces_clip(
            &seed,
            &[Inequality::new(pt(&[(1, 1), (0, 1)]), q(0, 1))],
        );
        assert_eq!(seg.dim(), Some(1));
        assert_eq!(seg.vertices().len(), 2);
        // x <= -1 empties it.
        let none = Polytope::from_halfspaces_clip(
            &seed,
            &[Inequality::new(pt(&[(1, 1), (0, 1)]), q(-1, 1))],
        );
        assert!(none.is_empty());
    }

    #[test]
    fn cube_and_octahedron_in_three_dimensions() {
        let cube = Polytope::from_box(
            2,
            &[(q(0, 1), q(1, 1)), (q(0, 1), q(1, 1)), (q(0, 1), q(1, 1))],
        )
        .unwrap();
        assert_eq!(cube.vertices().len(), 8);
        assert_eq!(cube.inequalities().len(), 6);
        let mut sys = Vec::new();
        for sx in [-1i64, 1] {
            for sy in [-1i64, 1] {
                for sz in [-1i64, 1] {
                    sys.push(Inequality::new(pt(&[(sx, 1), (sy, 1), (sz, 1)]), q(1, 1)));
                }
            }
        }
        let oct = Polytope::from_halfspaces(2, 3, &sys).unwrap();
        assert_eq!(oct.vertices().len(), 6);
        assert_eq!(oct.inequalities().len(), 8);
        assert!(oct.contains(&pt(&[(1, 4), (1, 4), (1, 4)])));
    }

    #[test]
    fn lower_dimensional_hull_in_space() {
        // A square inside the plane x3 = 1/2.
        let p = Polytope::from_vertices(
            2,
            vec![
                pt(&[(0, 1), (0, 1), (1, 2)]),
                pt(&[(1, 1), (0, 1), (1, 2)]),
                pt(&[(0, 1), (1, 1), (1, 2)]),
                pt(&[(1, 1), (1, 1), (1, 2)]),
            ],
        )
        .unwrap();
        assert_eq!(p.dim(), Some(2));
        assert_eq!(p.inequalities().len(), 4);
        assert!(p.contains(&pt(&[(1, 2), (1, 2), (1, 2)])));
        assert!(!p.contains(&pt(&[(1, 2), (1, 2), (0, 1)])));
        assert_eq!(p.facets().len(), 4);
    }

    #[test]
    fn barycenter_and_bounding_box() {
        let p = unit_square();
        assert_eq!(p.barycenter().unwrap(), pt(&[(1, 2), (1, 2)]));
        let bb = p.bounding_box().unwrap();
        assert_eq!(bb[0], (q(0, 1), q(1, 1)));
        assert_eq!(bb[1], (q(0, 1), q(1, 1)));
    }

    /// Dual-description round trips on random rational polytopes: vertex
    /// set -> facet system -> vertex set must be the identity.
    #[test]
    fn dual_description_round_trip_randomized() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for case in 0..50 {
            let dim = if case % 2 == 0 { 2 } else { 3 };
            let npts = 3 + (case % 5);
            let points: Vec<Vec<QuadExt>> = (0..npts)
                .map(|_| {
                    (0..dim)
                        .map(|_| q(rng.gen_range(-5i64..=5), 1 + rng.gen_range(0i64..2)))
                        .collect()
                })
                .collect();
            let p = Polytope::from_vertices(2, points).unwrap();
            // Feed the facets plus the affine hull equations (as opposing
            // halfspace pairs) back through the enumerative engine.
            let mut sys = p.inequalities().to_vec();
            for (nrm, rhs) in p.affine().unwrap().equations() {
                sys.push(Inequality::new(nrm.clone(), rhs.clone()));
                sys.push(Inequality::new(nrm.iter().map(|x| -x).collect(), -rhs));
            }
            let back = Polytope::from_halfspaces(2, dim, &sys).unwrap();
            assert_eq!(back, p, "round trip failed for case {case}");
            // And the clip engine agrees, starting from a padded box.
            let bb = p.bounding_box().unwrap();
            let padded: Vec<(QuadExt, QuadExt)> = bb
                .iter()
                .map(|(lo, hi)| (lo - &QuadExt::one(2), hi + &QuadExt::one(2)))
                .collect();
            let seed = Polytope::from_box(2, &padded).unwrap();
            let clipped = Polytope::from_halfspaces_clip(&seed, &sys);
            assert_eq!(clipped, p, "clip engine disagreed for case {case}");
        }
    }
}
