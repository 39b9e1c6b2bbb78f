//! The integer lattice seen from a rational linear subspace.
//!
//! For a rational direction space `W` inside `R^n`, the orthogonal
//! projection of `Z^n` onto `W` is again a lattice `D`.  A single Hermite
//! normal form computation yields a basis of `D`, an *integral* preimage
//! for each basis vector, and a basis of the kernel lattice
//! `Z^n ∩ W^perp` — everything the closure algorithm needs to translate
//! between cut normals in the ambient lattice and directions inside an
//! affine hull.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::affine::AffineSubspace;
use super::GeometryError;
use crate::linalg::{dot_rat, hermite_normal_form, solve_square};
use crate::numeric::{sqrt_enclosure, Int, QuadExt, Rational};

/// The projection of `Z^n` onto a rational subspace `W`, with integral
/// preimages and the kernel lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedLattice {
    ambient: usize,
    /// Basis of `D = proj_W(Z^n)`: rational ambient vectors lying in `W`.
    pub basis: Vec<Vec<Rational>>,
    /// `preimages[j]` is an integer vector projecting exactly onto
    /// `basis[j]`.
    pub preimages: Vec<Vec<Int>>,
    /// Basis of the kernel lattice `Z^n ∩ W^perp`.
    pub kernel: Vec<Vec<Int>>,
}

/// Computes the projected lattice of the direction space of `subspace`.
///
/// Fails with [`GeometryError::IrrationalSubspace`] unless the direction
/// space is definable over the rationals.
pub fn projected_lattice(subspace: &AffineSubspace) -> Result<ProjectedLattice, GeometryError> {
    let w = subspace.rational_basis().ok_or(GeometryError::IrrationalSubspace)?;
    let n = subspace.ambient_dim();
    let k = w.len();
    if k == 0 {
        let kernel = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
        return Ok(ProjectedLattice { ambient: n, basis: vec![], preimages: vec![], kernel });
    }
    // Coordinates of proj_W(e_i) with respect to the rows of `w`, found by
    // solving the Gram system G c = w e_i.
    let gram_q: Vec<Vec<QuadExt>> = (0..k)
        .map(|i| (0..k).map(|j| QuadExt::rational(dot_rat(&w[i], &w[j]), 2)).collect())
        .collect();
    let mut coords: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for i in 0..n {
        let rhs: Vec<QuadExt> = (0..k).map(|j| QuadExt::rational(w[j][i].clone(), 2)).collect();
        let c = solve_square(&gram_q, &rhs).expect("Gram matrix is invertible");
        coords.push(c.iter().map(|x| x.to_rational().expect("rational solve")).collect());
    }
    // Clear denominators and take one Hermite normal form; the unimodular
    // transform hands back integral preimages and the kernel for free.
    let mut scale = Int::one();
    for c in coords.iter().flatten() {
        scale = scale.lcm(c.denom());
    }
    let scaled: Vec<Vec<Int>> = coords
        .iter()
        .map(|c| c.iter().map(|x| x.numer() * (&scale / x.denom())).collect())
        .collect();
    let (h, u) = hermite_normal_form(&scaled);
    let rank = h.iter().take_while(|row| row.iter().any(|x| !x.is_zero())).count();
    assert_eq!(rank, k, "projection of the integer lattice spans the subspace");
    let basis: Vec<Vec<Rational>> = h[..k]
        .iter()
        .map(|row| {
            let mut d = vec![Rational::zero(); n];
            for (hj, wj) in row.iter().zip(&w) {
                let f = Rational::new(hj.clone(), scale.clone());
                for (di, wji) in d.iter_mut().zip(wj) {
                    *di += &f * wji;
                }
            }
            d
        })
        .collect();
    let preimages = u[..k].to_vec();
    let kernel = u[k..].to_vec();
    Ok(ProjectedLattice { ambient: n, basis, preimages, kernel })
}

impl ProjectedLattice {
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Rank of the projected lattice.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// All lattice vectors of Euclidean norm strictly below `bound`,
    /// paired with an integral preimage, sorted by squared norm and then
    /// lexicographically.  The zero vector is always included (for
    /// positive bounds).
    pub fn vectors_shorter_than(&self, bound: &Rational) -> Vec<(Vec<Rational>, Vec<Int>)> {
        if !bound.is_positive() {
            return vec![];
        }
        let k = self.basis.len();
        if k == 0 {
            return vec![(vec![Rational::zero(); self.ambient], vec![Int::zero(); self.ambient])];
        }
        // Coefficient box: from t = Gram^-1 (d_i . v) and |d_i . v| <=
        // |d_i| |v| < |d_i| * bound we get |t_j| <= bound * sum_i
        // |Gram^-1[j][i]| * ub|d_i|.
        let gram: Vec<Vec<QuadExt>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| QuadExt::rational(dot_rat(&self.basis[i], &self.basis[j]), 2))
                    .collect()
            })
            .collect();
        let norm_ub: Vec<Rational> = self
            .basis
            .iter()
            .map(|d| sqrt_enclosure(&dot_rat(d, d), 32).1)
            .collect();
        let mut box_bound = Vec::with_capacity(k);
        for j in 0..k {
            let mut e = vec![QuadExt::zero(2); k];
            e[j] = QuadExt::one(2);
            let col = solve_square(&gram, &e).expect("Gram matrix is invertible");
            let mut s = Rational::zero();
            for (g, ub) in col.iter().zip(&norm_ub) {
                s += g.to_rational().expect("rational solve").abs() * ub;
            }
            let t = crate::numeric::floor_rat(&(bound * &s));
            box_bound.push(i64::try_from(&t).expect("coefficient box fits in i64"));
        }
        let bound_sq = bound * bound;
        let mut out = Vec::new();
        let mut coeffs: Vec<i64> = box_bound.iter().map(|b| -b).collect();
        'outer: loop {
            let mut v = vec![Rational::zero(); self.ambient];
            let mut pre = vec![Int::zero(); self.ambient];
            for ((t, d), z) in coeffs.iter().zip(&self.basis).zip(&self.preimages) {
                if *t != 0 {
                    let tr = Rational::from_integer(Int::from(*t));
                    for (vi, di) in v.iter_mut().zip(d) {
                        *vi += &tr * di;
                    }
                    for (pi, zi) in pre.iter_mut().zip(z) {
                        *pi += Int::from(*t) * zi;
                    }
                }
            }
            if dot_rat(&v, &v) < bound_sq {
                out.push((v, pre));
            }
            let mut i = 0;
            loop {
                if i == k {
                    break 'outer;
                }
                coeffs[i] += 1;
                if coeffs[i] <= box_bound[i] {
                    break;
                }
                coeffs[i] = -box_bound[i];
                i += 1;
            }
        }
        out.sort_by(|(a, _), (b, _)| {
            dot_rat(a, a).cmp(&dot_rat(b, b)).then_with(|| a.cmp(b))
        });
        out
    }
}
