//! Affine hulls: base point, direction basis, and defining equations.

use num_traits::Zero;

use crate::linalg::{dot_quad, null_space, rat_vec_from_quad, rref, solve_square};
use crate::numeric::{QuadExt, Rational};

/// The affine hull of a point set: `base + span(basis)`, cut out by the
/// attached equations `normal . x = rhs`.
///
/// The basis is kept in reduced row echelon form, so a rational direction
/// space always shows rational basis entries, and the equation normals are
/// a canonical basis of its orthogonal complement.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspace {
    base: Vec<QuadExt>,
    basis: Vec<Vec<QuadExt>>,
    equations: Vec<(Vec<QuadExt>, QuadExt)>,
    field: u64,
    ambient: usize,
}

impl AffineSubspace {
    /// Affine hull of a non-empty point set.
    pub fn from_points(field: u64, points: &[Vec<QuadExt>]) -> Self {
        assert!(!points.is_empty(), "affine hull of an empty set");
        let ambient = points[0].len();
        let base = points[0].clone();
        let diffs: Vec<Vec<QuadExt>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(&base).map(|(a, b)| a - b).collect())
            .collect();
        let (basis, _) = rref(diffs);
        let normals = null_space(&basis, ambient, field);
        let equations = normals
            .into_iter()
            .map(|nrm| {
                let rhs = dot_quad(&nrm, &base);
                (nrm, rhs)
            })
            .collect();
        AffineSubspace { base, basis, equations, field, ambient }
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// A point of the subspace.
    pub fn base(&self) -> &[QuadExt] {
        &self.base
    }

    /// Canonical basis of the direction (lineality) space.
    pub fn basis(&self) -> &[Vec<QuadExt>] {
        &self.basis
    }

    /// Equations `normal . x = rhs` satisfied by exactly the subspace.
    pub fn equations(&self) -> &[(Vec<QuadExt>, QuadExt)] {
        &self.equations
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[QuadExt]) -> bool {
        x.len() == self.ambient
            && self.equations.iter().all(|(nrm, rhs)| dot_quad(nrm, x) == *rhs)
    }

    /// Whether the subspace is definable over the rationals.
    ///
    /// The base point itself may be irrational; what matters is that the
    /// direction space has a rational basis and the equations rational
    /// right-hand sides.
    pub fn is_rational(&self) -> bool {
        self.basis.iter().flatten().all(QuadExt::is_rational)
            && self.equations.iter().all(|(_, rhs)| rhs.is_rational())
    }

    /// The canonical rational basis of the direction space, if rational.
    pub fn rational_basis(&self) -> Option<Vec<Vec<Rational>>> {
        self.basis.iter().map(|row| rat_vec_from_quad(row)).collect()
    }

    /// Some rational point of the subspace, if one exists.
    pub fn rational_point(&self) -> Option<Vec<Rational>> {
        if !self.is_rational() {
            return None;
        }
        if self.equations.is_empty() {
            return Some(vec![Rational::zero(); self.ambient]);
        }
        // Solve the (already reduced-echelon-shaped) equations with free
        // variables set to zero.
        let rows: Vec<Vec<QuadExt>> = self
            .equations
            .iter()
            .map(|(nrm, rhs)| {
                let mut r = nrm.clone();
                r.push(rhs.clone());
                r
            })
            .collect();
        let (reduced, pivots) = rref(rows);
        let mut x = vec![QuadExt::zero(self.field); self.ambient];
        for (row, &p) in reduced.iter().zip(&pivots) {
            if p == self.ambient {
                return None; // inconsistent (cannot happen for a true hull)
            }
            x[p] = row[self.ambient].clone();
        }
        rat_vec_from_quad(&x)
    }

    /// Coordinates of a subspace point with respect to `base` and `basis`.
    ///
    /// Solves the Gram system, so for points *of the subspace* this inverts
    /// `y -> base + sum y_i basis_i` exactly.
    pub(crate) fn coordinates(&self, x: &[QuadExt]) -> Vec<QuadExt> {
        assert_eq!(x.len(), self.ambient);
        if self.basis.is_empty() {
            return vec![];
        }
        let shifted: Vec<QuadExt> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        let k = self.basis.len();
        let gram: Vec<Vec<QuadExt>> = (0..k)
            .map(|i| (0..k).map(|j| dot_quad(&self.basis[i], &self.basis[j])).collect())
            .collect();
        let rhs: Vec<QuadExt> = (0..k).map(|i| dot_quad(&self.basis[i], &shifted)).collect();
        solve_square(&gram, &rhs).expect("basis Gram matrix is invertible")
    }

    /// Orthogonal projection of a point onto the subspace.
    pub fn project_point(&self, z: &[QuadExt]) -> Vec<QuadExt> {
        assert_eq!(z.len(), self.ambient);
        if self.basis.is_empty() {
            return self.base.clone();
        }
        let shifted: Vec<QuadExt> = z.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        let k = self.basis.len();
        let gram: Vec<Vec<QuadExt>> = (0..k)
            .map(|i| (0..k).map(|j| dot_quad(&self.basis[i], &self.basis[j])).collect())
            .collect();
        let rhs: Vec<QuadExt> = (0..k).map(|i| dot_quad(&self.basis[i], &shifted)).collect();
        let y = solve_square(&gram, &rhs).expect("basis Gram matrix is invertible");
        let mut out = self.base.clone();
        for (yi, b) in y.iter().zip(&self.basis) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o = &*o + &(yi * bi);
            }
        }
        out
    }

    /// Field index of the working field.
    pub fn field_index(&self) -> u64 {
        self.field
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Int;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(Int::from(p), Int::from(q))
    }

    fn qr(p: i64, q: i64) -> QuadExt {
        QuadExt::rational(rat(p, q), 2)
    }

    fn qi(r: i64, i: i64) -> QuadExt {
        QuadExt::new(rat(r, 1), rat(i, 1), 2).unwrap()
    }

    #[test]
    fn hull_of_a_segment_in_the_plane() {
        // Segment from (0,0) to (1, sqrt(2)): a 1-dimensional irrational hull.
        let pts = vec![vec![qr(0, 1), qr(0, 1)], vec![qr(1, 1), qi(0, 1)]];
        let hull = AffineSubspace::from_points(2, &pts);
        assert_eq!(hull.dim(), 1);
        assert_eq!(hull.equations().len(), 1);
        assert!(hull.contains(&pts[1]));
        assert!(!hull.contains(&[qr(1, 1), qr(1, 1)]));
        assert!(!hull.is_rational());
        assert!(hull.rational_point().is_none());
    }

    #[test]
    fn rational_plane_with_fractional_offset() {
        // The plane x3 = 1/2 in R^3 is rational despite its offset.
        let pts = vec![
            vec![qr(0, 1), qr(0, 1), qr(1, 2)],
            vec![qr(1, 1), qr(0, 1), qr(1, 2)],
            vec![qr(0, 1), qr(1, 1), qr(1, 2)],
        ];
        let hull = AffineSubspace::from_points(2, &pts);
        assert_eq!(hull.dim(), 2);
        assert!(hull.is_rational());
        let p = hull.rational_point().unwrap();
        assert_eq!(p[2], rat(1, 2));
        let basis = hull.rational_basis().unwrap();
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn projection_lands_on_the_subspace() {
        let pts = vec![vec![qr(0, 1), qr(0, 1)], vec![qr(1, 1), qr(1, 1)]];
        let hull = AffineSubspace::from_points(2, &pts);
        let proj = hull.project_point(&[qr(1, 1), qr(0, 1)]);
        assert_eq!(proj, vec![qr(1, 2), qr(1, 2)]);
        assert!(hull.contains(&proj));
    }

    #[test]
    fn zero_dimensional_hull() {
        let pts = vec![vec![qi(1, 1), qr(3, 1)]];
        let hull = AffineSubspace::from_points(2, &pts);
        assert_eq!(hull.dim(), 0);
        assert_eq!(hull.equations().len(), 2);
        assert!(hull.contains(&pts[0]));
        assert_eq!(hull.project_point(&[qr(9, 1), qr(9, 1)]), pts[0]);
    }
}
