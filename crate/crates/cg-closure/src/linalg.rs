//! Small exact linear-algebra helpers shared by the geometry layer.
//!
//! Everything here is desk scale (dimension at most 4, handfuls of rows):
//! Gaussian elimination over the working field, row-style Hermite normal
//! forms with unimodular tracking, and assorted dot products.  Nothing is
//! optimised beyond exactness and clarity.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numeric::{Int, QuadExt, Rational};

pub(crate) fn dot_quad(a: &[QuadExt], b: &[QuadExt]) -> QuadExt {
    assert_eq!(a.len(), b.len());
    let m = a
        .iter()
        .chain(b.iter())
        .find(|x| !x.is_rational())
        .map_or_else(|| a.first().map_or(2, QuadExt::field_index), QuadExt::field_index);
    let mut acc = QuadExt::zero(m);
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

pub(crate) fn dot_int_quad(c: &[Int], x: &[QuadExt]) -> QuadExt {
    let cq: Vec<QuadExt> = c
        .iter()
        .map(|k| QuadExt::integer(k.clone(), x.first().map_or(2, QuadExt::field_index)))
        .collect();
    dot_quad(&cq, x)
}

pub(crate) fn dot_rat(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dot_int_rat(c: &[Int], x: &[Rational]) -> Rational {
    assert_eq!(c.len(), x.len());
    c.iter().zip(x).map(|(k, y)| Rational::from_integer(k.clone()) * y).sum()
}

pub(crate) fn sub_quad(a: &[QuadExt], b: &[QuadExt]) -> Vec<QuadExt> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn norm_sq_quad(x: &[QuadExt]) -> QuadExt {
    dot_quad(x, x)
}

pub(crate) fn norm_sq_int(c: &[Int]) -> Int {
    c.iter().map(|k| k * k).sum()
}

pub(crate) fn quad_vec_from_rat(v: &[Rational], m: u64) -> Vec<QuadExt> {
    v.iter().map(|r| QuadExt::rational(r.clone(), m)).collect()
}

/// Extracts rational coordinates; `None` if any entry is irrational.
pub(crate) fn rat_vec_from_quad(v: &[QuadExt]) -> Option<Vec<Rational>> {
    v.iter().map(QuadExt::to_rational).collect()
}

/// Reduced row echelon form over the field; returns the non-zero rows and
/// their pivot columns.
pub(crate) fn rref(rows: Vec<Vec<QuadExt>>) -> (Vec<Vec<QuadExt>>, Vec<usize>) {
    let mut rows: Vec<Vec<QuadExt>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = &QuadExt::one(rows[rank][col].field_index()) / &rows[rank][col];
        for entry in rows[rank].iter_mut() {
            *entry = &*entry * &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..ncols {
                    let delta = &factor * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (rows, pivots)
}

pub(crate) fn rank_quad(rows: &[Vec<QuadExt>]) -> usize {
    rref(rows.to_vec()).0.len()
}

/// Basis of the null space `{x : row·x = 0 for every row}` in `R^n`.
pub(crate) fn null_space(rows: &[Vec<QuadExt>], n: usize, m: u64) -> Vec<Vec<QuadExt>> {
    let (rref_rows, pivots) = rref(rows.to_vec());
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![QuadExt::zero(m); n];
        v[free] = QuadExt::one(m);
        for (row, &pc) in rref_rows.iter().zip(&pivots) {
            v[pc] = -&row[free];
        }
        basis.push(v);
    }
    basis
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub(crate) fn solve_square(a: &[Vec<QuadExt>], b: &[QuadExt]) -> Option<Vec<QuadExt>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut aug: Vec<Vec<QuadExt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (reduced, pivots) = rref(std::mem::take(&mut aug));
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(reduced.into_iter().map(|row| row[n].clone()).collect())
}

/// Orthogonal projection of `x` onto the span of `basis` (rational data);
/// a test-side twin of [`project_onto_span_quad`].
#[cfg(test)]
pub(crate) fn project_onto_span_rat(basis: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    if basis.is_empty() {
        return vec![Rational::zero(); x.len()];
    }
    let k = basis.len();
    // Solve (B^T B) y = B^T x, then return B y.
    let gram: Vec<Vec<QuadExt>> = (0..k)
        .map(|i| (0..k).map(|j| QuadExt::rational(dot_rat(&basis[i], &basis[j]), 2)).collect())
        .collect();
    let rhs: Vec<QuadExt> = (0..k).map(|i| QuadExt::rational(dot_rat(&basis[i], x), 2)).collect();
    let y = solve_square(&gram, &rhs).expect("independent basis has invertible Gram matrix");
    let mut out = vec![Rational::zero(); x.len()];
    for (yi, b) in y.iter().zip(basis) {
        let yi = yi.to_rational().expect("rational solve");
        for (o, bi) in out.iter_mut().zip(b) {
            *o += &yi * bi;
        }
    }
    out
}

/// Orthogonal projection of `x` onto the span of `basis` (field data).
pub(crate) fn project_onto_span_quad(basis: &[Vec<QuadExt>], x: &[QuadExt]) -> Vec<QuadExt> {
    let m = x.first().map_or(2, QuadExt::field_index);
    if basis.is_empty() {
        return vec![QuadExt::zero(m); x.len()];
    }
    let k = basis.len();
    // Solve (B^T B) y = B^T x, then return B y.
    let gram: Vec<Vec<QuadExt>> =
        (0..k).map(|i| (0..k).map(|j| dot_quad(&basis[i], &basis[j])).collect()).collect();
    let rhs: Vec<QuadExt> = (0..k).map(|i| dot_quad(&basis[i], x)).collect();
    let y = solve_square(&gram, &rhs).expect("independent basis has invertible Gram matrix");
    let mut out = vec![QuadExt::zero(m); x.len()];
    for (yi, b) in y.iter().zip(basis) {
        for (o, bi) in out.iter_mut().zip(b) {
            *o = &*o + &(yi * bi);
        }
    }
    out
}

/// Row-style Hermite normal form with unimodular tracking.
///
/// Returns `(h, u)` with `u * mat = h`, `u` unimodular, pivots positive and
/// entries above pivots reduced; zero rows of `h` are kept so `u` stays
/// square.
pub(crate) fn hermite_normal_form(mat: &[Vec<Int>]) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let nrows = mat.len();
    let ncols = mat.first().map_or(0, Vec::len);
    let mut h: Vec<Vec<Int>> = mat.to_vec();
    let mut u: Vec<Vec<Int>> = (0..nrows)
        .map(|i| (0..nrows).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let mut row = 0usize;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(pivot) = (row..nrows).find(|&r| !h[r][col].is_zero()) else {
            continue;
        };
        h.swap(row, pivot);
        u.swap(row, pivot);
        for r in (row + 1)..nrows {
            while !h[r][col].is_zero() {
                let gcd = h[row][col].gcd(&h[r][col]);
                let ext = h[row][col].extended_gcd(&h[r][col]);
                // Combine so that row `row` holds the gcd, row `r` zero.
                let (a0, b0) = (&h[row][col] / &gcd, &h[r][col] / &gcd);
                let new_top: Vec<Int> = (0..ncols)
                    .map(|c| &ext.x * &h[row][c] + &ext.y * &h[r][c])
                    .collect();
                let new_bot: Vec<Int> =
                    (0..ncols).map(|c| &a0 * &h[r][c] - &b0 * &h[row][c]).collect();
                let new_top_u: Vec<Int> = (0..nrows)
                    .map(|c| &ext.x * &u[row][c] + &ext.y * &u[r][c])
                    .collect();
                let new_bot_u: Vec<Int> =
                    (0..nrows).map(|c| &a0 * &u[r][c] - &b0 * &u[row][c]).collect();
                h[row] = new_top;
                h[r] = new_bot;
                u[row] = new_top_u;
                u[r] = new_bot_u;
            }
        }
        if h[row][col].is_negative() {
            for c in 0..ncols {
                h[row][c] = -h[row][c].clone();
            }
            for c in 0..nrows {
                u[row][c] = -u[row][c].clone();
            }
        }
        for r in 0..row {
            let q = h[r][col].div_floor(&h[row][col]);
            if !q.is_zero() {
                for c in 0..ncols {
                    let delta = &q * &h[row][c];
                    h[r][c] = &h[r][c] - delta;
                }
                for c in 0..nrows {
                    let delta = &q * &u[row][c];
                    u[r][c] = &u[r][c] - delta;
                }
            }
        }
        row += 1;
    }
    (h, u)
}

/// Greatest common divisor of a set of rationals (zero for an empty or
/// all-zero set): the positive generator of the additive group they span.
pub(crate) fn rational_gcd(values: &[Rational]) -> Rational {
    let mut denom_lcm = Int::one();
    for v in values {
        denom_lcm = denom_lcm.lcm(v.denom());
    }
    let mut g = Int::zero();
    for v in values {
        let scaled = v.numer() * (&denom_lcm / v.denom());
        g = g.gcd(&scaled);
    }
    Rational::new(g, denom_lcm)
}

/// All integer combinations `sum t_j * basis_j` with `|t_j| <= bound`.
pub(crate) fn lattice_combinations(basis: &[Vec<Int>], bound: i64) -> Vec<Vec<Int>> {
    let n = match basis.first() {
        Some(b) => b.len(),
        None => return vec![],
    };
    let mut out = Vec::new();
    let k = basis.len();
    let mut coeffs = vec![-bound; k];
    loop {
        let mut v = vec![Int::zero(); n];
        for (t, b) in coeffs.iter().zip(basis) {
            if *t != 0 {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += Int::from(*t) * bi;
                }
            }
        }
        out.push(v);
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            coeffs[i] += 1;
            if coeffs[i] <= bound {
                break;
            }
            coeffs[i] = -bound;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(Int::from(p), Int::from(q))
    }

    fn qv(vals: &[(i64, i64)]) -> Vec<QuadExt> {
        vals.iter().map(|&(r, i)| QuadExt::new(rat(r, 1), rat(i, 1), 2).unwrap()).collect()
    }

    #[test]
    fn rref_and_rank() {
        let rows = vec![qv(&[(1, 0), (2, 0), (3, 0)]), qv(&[(2, 0), (4, 0), (6, 0)])];
        assert_eq!(rank_quad(&rows), 1);
        let rows = vec![qv(&[(1, 1), (0, 0)]), qv(&[(0, 0), (1, 0)])];
        assert_eq!(rank_quad(&rows), 2);
    }

    #[test]
    fn null_space_annihilates_rows() {
        let rows = vec![qv(&[(1, 0), (1, 0), (1, 0)])];
        let ns = null_space(&rows, 3, 2);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot_quad(&rows[0], v).is_zero());
        }
    }

    #[test]
    fn solve_square_inverts() {
        let a = vec![qv(&[(2, 0), (1, 0)]), qv(&[(1, 0), (3, 0)])];
        let b = qv(&[(5, 0), (10, 0)]);
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x, qv(&[(1, 0), (3, 0)]));
        let singular = vec![qv(&[(1, 0), (2, 0)]), qv(&[(2, 0), (4, 0)])];
        assert!(solve_square(&singular, &b).is_none());
    }

    #[test]
    fn projection_onto_span() {
        let basis = vec![vec![rat(1, 1), rat(1, 1)]];
        let p = project_onto_span_rat(&basis, &[rat(1, 1), rat(0, 1)]);
        assert_eq!(p, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn hnf_of_known_lattice() {
        // Rows (2, 4) and (3, 5) generate a lattice with HNF basis
        // (1, 1), (0, 2).
        let mat = vec![
            vec![Int::from(2), Int::from(4)],
            vec![Int::from(3), Int::from(5)],
        ];
        let (h, u) = hermite_normal_form(&mat);
        assert_eq!(h[0], vec![Int::from(1), Int::from(1)]);
        assert_eq!(h[1], vec![Int::from(0), Int::from(2)]);
        // u * mat == h.
        for (ur, hr) in u.iter().zip(&h) {
            for c in 0..2 {
                let v: Int = (0..2).map(|j| &ur[j] * &mat[j][c]).sum();
                assert_eq!(v, hr[c]);
            }
        }
        // u unimodular: determinant +-1 for the 2x2 case.
        let det = &u[0][0] * &u[1][1] - &u[0][1] * &u[1][0];
        assert!(det == Int::one() || det == -Int::one());
    }

    #[test]
    fn rational_gcd_spans_the_group() {
        let g = rational_gcd(&[rat(1, 2), rat(1, 3)]);
        assert_eq!(g, rat(1, 6));
        assert_eq!(rational_gcd(&[rat(0, 1)]), rat(0, 1));
        assert_eq!(rational_gcd(&[rat(4, 1), rat(6, 1)]), rat(2, 1));
    }

    #[test]
    fn lattice_combinations_enumerate_box() {
        let basis = vec![vec![Int::from(1), Int::from(0)], vec![Int::from(0), Int::from(1)]];
        let pts = lattice_combinations(&basis, 1);
        assert_eq!(pts.len(), 9);
        assert!(pts.contains(&vec![Int::from(-1), Int::from(1)]));
    }
}
