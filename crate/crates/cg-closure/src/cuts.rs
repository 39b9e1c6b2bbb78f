//! CG cut construction, pooling, and certified deepest-cut selection.
//!
//! A CG cut of a body `K` is an inequality `c . x <= floor(h_K(c))` with an
//! integer normal `c`; every integer point of `K` satisfies it.  This module
//! provides:
//!
//! * [`cg_cut`] — the cut of a single normal, with an exactly computed
//!   right-hand side.
//! * [`CutPool`] — a deterministic collection keeping the strongest cut per
//!   normal.
//! * [`deepest_cut`] — given a direction `d` in a projected lattice, searches
//!   the integral preimages of `d` for the cut whose restriction to the
//!   rational subspace `V` has the smallest right-hand side.  The restricted
//!   right-hand sides all lie on an explicit arithmetic grid, so a cut whose
//!   value meets a certified grid lower bound is provably the deepest; such
//!   results are flagged `certified`, all others `best_found`.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::body::{ConvexBody, SupportValue};
use crate::geometry::{Inequality, Polytope, ProjectedLattice};
use crate::jsonio;
use crate::linalg::{dot_int_rat, dot_rat, quad_vec_from_rat, rational_gcd};
use crate::numeric::{Int, NumericError, QuadExt, Rational, SqrtExpr};

/// Default cap for the doubling preimage search (1, 2, 4, ..., 64).
pub const DEFAULT_SEARCH_CAP: u32 = 64;

/// Hard limit on preimage candidates examined per call; beyond it the
/// search stops growing and reports its best cut unflagged.
const MAX_CANDIDATES: usize = 300_000;

/// Cap on the lattice-point enumeration used for the integral lower bound.
const MAX_INTEGRAL_BOX: u64 = 4_096;

/// Errors raised by cut construction and selection.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CutsError {
    /// The zero normal yields the trivial cut `0 <= 0` and is rejected.
    #[error("cut normals must be nonzero")]
    ZeroDirection,
    /// The deepest cut found does not trim the current polytope.
    #[error("deepest cut is already implied by the polytope")]
    NoCutNeeded,
    /// A floor could not be certified within the refinement budget.
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// A CG cut `c . x <= rhs` with integer data.
///
/// The normal is kept exactly as derived — dividing out a common factor of
/// `c` would change the floor, so cuts are not scale-normalised.  `certified`
/// records whether the cut was proved deepest in its search family; plain
/// support cuts are certified by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CGCut {
    /// Integer normal.
    pub c: Vec<Int>,
    /// Integer right-hand side, the floor of a support value.
    pub rhs: Int,
    /// Whether the right-hand side met a certified optimality bound.
    pub certified: bool,
}

impl CGCut {
    /// Greatest common divisor of the normal entries (`0` only for the
    /// excluded zero normal).
    pub fn normal_gcd(&self) -> Int {
        self.c.iter().fold(Int::zero(), |g, k| num_integer::Integer::gcd(&g, k))
    }

    /// Exact satisfaction test for a point with field coordinates.
    pub fn satisfied_by(&self, x: &[QuadExt]) -> bool {
        let lhs = crate::linalg::dot_int_quad(&self.c, x);
        lhs.cmp_int(&self.rhs).is_le()
    }

    /// The cut as a halfspace inequality over `Q(sqrt(m))`.
    pub fn as_inequality(&self, m: u64) -> Inequality {
        let normal = self.c.iter().map(|k| QuadExt::integer(k.clone(), m)).collect();
        Inequality::new(normal, QuadExt::integer(self.rhs.clone(), m))
    }

    /// Serializes to `{"c": [...], "rhs": ..., "certified": ...}`.
    pub fn to_json(&self) -> Value {
        json!({
            "c": jsonio::int_vec_to_value(&self.c),
            "rhs": jsonio::int_to_value(&self.rhs),
            "certified": self.certified,
        })
    }

    /// Parses the JSON form produced by [`CGCut::to_json`].
    pub fn from_json(v: &Value) -> Result<Self, String> {
        let c = jsonio::int_vec_from_value(jsonio::field(v, "c")?)?;
        let rhs = jsonio::int_from_value(jsonio::field(v, "rhs")?)?;
        let certified = jsonio::field(v, "certified")?
            .as_bool()
            .ok_or_else(|| "certified must be a boolean".to_string())?;
        Ok(CGCut { c, rhs, certified })
    }
}

/// The CG cut of `body` in the direction of the integer normal `c`.
pub fn cg_cut(body: &ConvexBody, c: &[Int]) -> Result<CGCut, CutsError> {
    if c.iter().all(Zero::is_zero) {
        return Err(CutsError::ZeroDirection);
    }
    let m = body.field_index();
    let dir: Vec<QuadExt> = c.iter().map(|k| QuadExt::integer(k.clone(), m)).collect();
    let rhs = body.support(&dir).value.floor();
    Ok(CGCut { c: c.to_vec(), rhs, certified: true })
}

/// A deterministic pool of CG cuts: at most one cut per normal, keeping the
/// smallest right-hand side, iterated in lexicographic normal order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CutPool {
    source: String,
    cuts: BTreeMap<Vec<Int>, (Int, bool)>,
}

impl CutPool {
    /// An empty pool labelled with the body it belongs to.
    pub fn new(source: impl Into<String>) -> Self {
        CutPool { source: source.into(), cuts: BTreeMap::new() }
    }

    /// Label of the source body.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Inserts a cut, keeping the smaller right-hand side per normal.
    ///
    /// Returns `true` when the pool changed (new normal or strictly smaller
    /// right-hand side).  Equal cuts are pooled once, retaining a
    /// `certified` flag if either copy has one.
    pub fn insert(&mut self, cut: CGCut) -> bool {
        match self.cuts.get_mut(&cut.c) {
            None => {
                self.cuts.insert(cut.c, (cut.rhs, cut.certified));
                true
            }
            Some((rhs, certified)) => {
                if cut.rhs < *rhs {
                    *rhs = cut.rhs;
                    *certified = cut.certified;
                    true
                } else {
                    if cut.rhs == *rhs {
                        *certified = *certified || cut.certified;
                    }
                    false
                }
            }
        }
    }

    /// Merges another pool into this one (deterministic: pools are ordered).
    pub fn merge(&mut self, other: CutPool) {
        for cut in other.iter() {
            self.insert(cut);
        }
    }

    /// Number of pooled cuts.
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    /// Whether the pool holds no cuts.
    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Right-hand side stored for a normal, if any.
    pub fn rhs_for(&self, c: &[Int]) -> Option<&Int> {
        self.cuts.get(c).map(|(rhs, _)| rhs)
    }

    /// Cuts in lexicographic normal order.
    pub fn iter(&self) -> impl Iterator<Item = CGCut> + '_ {
        self.cuts
            .iter()
            .map(|(c, (rhs, certified))| CGCut {
                c: c.clone(),
                rhs: rhs.clone(),
                certified: *certified,
            })
    }

    /// Serializes to `{"source": ..., "cuts": [...]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source,
            "cuts": Value::Array(self.iter().map(|c| c.to_json()).collect()),
        })
    }

    /// Parses the JSON form produced by [`CutPool::to_json`].
    pub fn from_json(v: &Value) -> Result<Self, String> {
        let source = jsonio::field(v, "source")?
            .as_str()
            .ok_or_else(|| "source must be a string".to_string())?;
        let mut pool = CutPool::new(source);
        for entry in jsonio::field(v, "cuts")?
            .as_array()
            .ok_or_else(|| "cuts must be an array".to_string())?
        {
            pool.insert(CGCut::from_json(entry)?);
        }
        Ok(pool)
    }
}

/// A direction of the projected lattice together with the data needed to
/// search its integral preimages: one known preimage and a basis of the
/// integral vectors projecting to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDirection {
    /// The projected direction `d` (rational, lies in the subspace `W`).
    pub d: Vec<Rational>,
    /// One integral vector with `proj_W(preimage) = d`.
    pub preimage: Vec<Int>,
    /// Basis of `Z^n` intersected with the orthogonal complement of `W`.
    pub kernel: Vec<Vec<Int>>,
    /// Basis of `W` itself.
    pub w_basis: Vec<Vec<Rational>>,
}

impl LatticeDirection {
    /// Packages a short vector returned by
    /// [`ProjectedLattice::vectors_shorter_than`] with its lattice context.
    pub fn from_lattice(lattice: &ProjectedLattice, d: Vec<Rational>, preimage: Vec<Int>) -> Self {
        LatticeDirection {
            d,
            preimage,
            kernel: lattice.kernel.clone(),
            w_basis: lattice.basis.clone(),
        }
    }
}

/// The deepest CG cut among those whose normal projects to `direction`.
///
/// Every preimage normal is `c = preimage + u` for an integral `u` in the
/// kernel lattice; the cut restricted to `V = x0 + W` reads
/// `d . x <= rho(c)` with `rho(c) = floor(h_K(c)) - (c - d) . x0`.  The
/// search enumerates kernel coordinates up to `search_bound`, growing the
/// box by doubling and stopping early when the incumbent meets a certified
/// lower bound for `rho` (see `grid_lower_bound`).  The returned cut carries
/// `certified = true` in that case and `false` when only a best-found cut
/// within the budget is known.
///
/// Errors with [`CutsError::NoCutNeeded`] when `p` is full-dimensional in
/// `V` and even the deepest cut leaves it untouched (`rho` strictly above
/// the maximum of `d . x` over `p`).  Supporting cuts with equality are
/// still returned, and so are slack cuts against lower-dimensional `p`,
/// where they witness how the closure slice is bounded in direction `d`.
pub fn deepest_cut(
    p: &Polytope,
    direction: &LatticeDirection,
    x0: &[Rational],
    body: &ConvexBody,
    search_bound: u32,
) -> Result<CGCut, CutsError> {
    if direction.d.iter().all(Zero::is_zero) {
        return Err(CutsError::ZeroDirection);
    }
    assert!(!p.is_empty(), "deepest cut of an empty polytope");
    assert_eq!(p.ambient_dim(), body.ambient_dim(), "polytope/body dimension mismatch");
    assert_eq!(x0.len(), p.ambient_dim(), "base point dimension mismatch");

    let d_shift = dot_rat(&direction.d, x0);
    let rho_of = |c: &[Int], rhs: &Int| -> Rational {
        Rational::from_integer(rhs.clone()) - (dot_int_rat(c, x0) - &d_shift)
    };
    let support_floor = |c: &[Int]| -> Int {
        let m = body.field_index();
        let dir: Vec<QuadExt> = c.iter().map(|k| QuadExt::integer(k.clone(), m)).collect();
        body.support(&dir).value.floor()
    };

    // Incumbent: the known preimage itself.
    let rhs0 = support_floor(&direction.preimage);
    let mut best_c = direction.preimage.clone();
    let mut best_rhs = rhs0;
    let mut best_rho = rho_of(&best_c, &best_rhs);

    // Restricted right-hand sides all lie on `anchor + g Z`.
    let kernel_dots: Vec<Rational> = direction
        .kernel
        .iter()
        .map(|u| dot_int_rat(u, x0))
        .collect();
    let mut grid_values = vec![Rational::one()];
    grid_values.extend(kernel_dots);
    let g = rational_gcd(&grid_values);
    let anchor = best_rho.clone();

    let lower = grid_lower_bound(p, direction, x0, body, &anchor, &g);
    let mut certified = direction.kernel.is_empty() || best_rho == lower;

    // Grow the kernel coordinate box by doubling until certification, the
    // requested bound, or the candidate budget.
    let rank = direction.kernel.len();
    let mut seen = 0usize;
    let mut prev = 0i64;
    let mut bound = 1i64;
    let cap = i64::from(search_bound.max(1));
    while !certified && prev < cap {
        let bound_now = bound.min(cap);
        let ring = coordinate_ring(rank, bound_now, prev);
        seen = seen.saturating_add(ring.len());
        if seen > MAX_CANDIDATES {
            break;
        }
        for t in ring {
            let mut c = direction.preimage.clone();
            for (tj, u) in t.iter().zip(&direction.kernel) {
                for (ci, ui) in c.iter_mut().zip(u) {
                    *ci += ui * Int::from(*tj);
                }
            }
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            let rhs = support_floor(&c);
            let rho = rho_of(&c, &rhs);
            if rho < best_rho {
                best_c = c;
                best_rhs = rhs;
                best_rho = rho;
                if best_rho == lower {
                    certified = true;
                    break;
                }
            }
        }
        prev = bound_now;
        bound *= 2;
    }
    debug_assert!(
        best_rho >= lower || !certified,
        "certified lower bound may only be conditional"
    );

    // For a p that fills V, a cut strictly weaker than p's own support is
    // redundant information.
    let m = p.field_index();
    let d_quad = quad_vec_from_rat(&direction.d, m);
    let p_max = p.support(&d_quad);
    if p.dim() == Some(direction.w_basis.len()) && p_max.cmp_rational(&best_rho).is_lt() {
        return Err(CutsError::NoCutNeeded);
    }
    Ok(CGCut { c: best_c, rhs: best_rhs, certified })
}

/// Certified grid lower bound for the restricted right-hand side.
///
/// Three sound bounds, each rounded up onto the value grid `anchor + g Z`:
///
/// 1. For every `y` in `K` inside `V`, `rho > d . y - 1` (the preimage part
///    of the normal is orthogonal to `W`, so it contributes the same shift
///    to both sides).  With polytope bodies the maximum of `d . x` over the
///    exact slice `K` inside `V` is computable; smooth bodies use the whole
///    body when `V` is full-dimensional and fall back to the vertices of
///    `p` otherwise.
/// 2. Any integer point of `p` survives every CG cut, so `rho >= d . z`.
/// 3. If the closure meets `V` at all, `rho >= min over p of d . x`; this
///    bound is conditional, so it can only ever delay certification when
///    the closure slice is empty, never wrongly grant it.
fn grid_lower_bound(
    p: &Polytope,
    direction: &LatticeDirection,
    x0: &[Rational],
    body: &ConvexBody,
    anchor: &Rational,
    g: &Rational,
) -> Rational {
    let m = p.field_index();
    let d_quad = quad_vec_from_rat(&direction.d, m);
    let one = QuadExt::one(m);

    // Bound 1: strictly above (max of d . x over the V-slice of K) - 1.
    let slice_max: SupportValue = match body.as_polytope() {
        Some(kp) => {
            let sliced = slice_by_subspace(kp, &direction.w_basis, x0);
            match sliced {
                Some(slice) if !slice.is_empty() => {
                    SupportValue::Exact(slice.support(&quad_vec_from_rat(&direction.d, slice.field_index())))
                }
                _ => SupportValue::Exact(p.support(&d_quad)),
            }
        }
        None if direction.w_basis.len() == body.ambient_dim() => {
            body.support(&quad_vec_from_rat(&direction.d, body.field_index())).value
        }
        None => SupportValue::Exact(p.support(&d_quad)),
    };
    let mut lower = match slice_max {
        SupportValue::Exact(q) => smallest_grid_above(&(&q - &one), anchor, g),
        SupportValue::Radical(s) => {
            let shifted = SqrtExpr::new(s.base() - &one, s.coeff().clone(), s.radicand().clone());
            smallest_grid_above_root(&shifted, anchor, g)
        }
    };

    // Bound 2: at least the best integral point of p.
    if let Some(points) = integral_points(p) {
        for z in points {
            let value = dot_int_rat(&z, &direction.d);
            let rounded = smallest_grid_at_least(&QuadExt::rational(value, m), anchor, g);
            if rounded > lower {
                lower = rounded;
            }
        }
    }

    // Bound 3: at least the minimum of d . x over p (conditional).
    let neg_d: Vec<QuadExt> = d_quad.iter().map(|x| -x).collect();
    let p_min = -&p.support(&neg_d);
    let rounded = smallest_grid_at_least(&p_min, anchor, g);
    if rounded > lower {
        lower = rounded;
    }
    lower
}

/// The exact slice of a polytope body by the subspace `x0 + span(w_basis)`.
fn slice_by_subspace(
    kp: &Polytope,
    w_basis: &[Vec<Rational>],
    x0: &[Rational],
) -> Option<Polytope> {
    let m = kp.field_index();
    let n = kp.ambient_dim();
    let x0q = quad_vec_from_rat(x0, m);
    let mut system: Vec<Inequality> = kp.inequalities().to_vec();
    let aff = kp.affine()?;
    for (eq, rhs) in aff.equations() {
        system.push(Inequality::new(eq.clone(), rhs.clone()));
        system.push(Inequality::new(eq.iter().map(|x| -x).collect(), -rhs));
    }
    let w_rows: Vec<Vec<QuadExt>> =
        w_basis.iter().map(|row| quad_vec_from_rat(row, m)).collect();
    for normal in crate::linalg::null_space(&w_rows, n, m) {
        let rhs = crate::linalg::dot_quad(&normal, &x0q);
        system.push(Inequality::new(normal.iter().map(|x| -x).collect(), -&rhs));
        system.push(Inequality::new(normal, rhs));
    }
    Polytope::from_halfspaces(m, n, &system).ok()
}

/// All integer points of a polytope, or `None` when its bounding box is too
/// large to scan.
fn integral_points(p: &Polytope) -> Option<Vec<Vec<Int>>> {
    let bb = p.bounding_box()?;
    let mut ranges: Vec<(Int, Int)> = Vec::new();
    let mut volume: u64 = 1;
    for (lo, hi) in bb {
        let lo = lo.ceil();
        let hi = hi.floor();
        if hi < lo {
            return Some(vec![]);
        }
        let width = (&hi - &lo) + Int::one();
        volume = volume.saturating_mul(u64::try_from(&width).unwrap_or(u64::MAX));
        if volume > MAX_INTEGRAL_BOX {
            return None;
        }
        ranges.push((lo, hi));
    }
    let m = p.field_index();
    let mut points = vec![Vec::new()];
    for (lo, hi) in &ranges {
        let mut next = Vec::new();
        for prefix in &points {
            let mut k = lo.clone();
            while &k <= hi {
                let mut p2 = prefix.clone();
                p2.push(k.clone());
                next.push(p2);
                k += Int::one();
            }
        }
        points = next;
    }
    Some(
        points
            .into_iter()
            .filter(|z| {
                let zq: Vec<QuadExt> =
                    z.iter().map(|k| QuadExt::integer(k.clone(), m)).collect();
                p.contains(&zq)
            })
            .collect(),
    )
}

/// Smallest value of `anchor + g Z` that is `>= x`.
fn smallest_grid_at_least(x: &QuadExt, anchor: &Rational, g: &Rational) -> Rational {
    let y = (x - &QuadExt::rational(anchor.clone(), x.field_index())).div_rat(g);
    anchor + g * Rational::from_integer(y.ceil())
}

/// Smallest value of `anchor + g Z` that is strictly `> x`.
fn smallest_grid_above(x: &QuadExt, anchor: &Rational, g: &Rational) -> Rational {
    let y = (x - &QuadExt::rational(anchor.clone(), x.field_index())).div_rat(g);
    anchor + g * Rational::from_integer(y.floor() + Int::one())
}

/// Smallest value of `anchor + g Z` strictly above a square root expression.
fn smallest_grid_above_root(x: &SqrtExpr, anchor: &Rational, g: &Rational) -> Rational {
    let base = (x.base() - &QuadExt::rational(anchor.clone(), x.base().field_index())).div_rat(g);
    let y = SqrtExpr::new(base, x.coeff() / g, x.radicand().clone());
    anchor + g * Rational::from_integer(y.floor_exact() + Int::one())
}

/// Kernel coordinate vectors with `max |t_j| <= bound` but `> prev`,
/// ordered by total displacement then lexicographically, so searches are
/// deterministic and prefer small perturbations.
fn coordinate_ring(rank: usize, bound: i64, prev: i64) -> Vec<Vec<i64>> {
    if rank == 0 {
        return vec![];
    }
    let mut all = vec![Vec::new()];
    for _ in 0..rank {
        let mut next = Vec::new();
        for prefix in &all {
            for t in -bound..=bound {
                let mut p = prefix.clone();
                p.push(t);
                next.push(p);
            }
        }
        all = next;
    }
    let mut ring: Vec<Vec<i64>> = all
        .into_iter()
        .filter(|t| t.iter().any(|x| x.abs() > prev))
        .collect();
    ring.sort_by_key(|t| (t.iter().map(|x| x.abs()).sum::<i64>(), t.clone()));
    ring
}
