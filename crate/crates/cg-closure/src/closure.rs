//! Face-recursive computation of the CG closure, a brute-force bounded
//! oracle, and an independent result verifier.
//!
//! For a polytope body `K` the closure `K'` — the intersection of all CG
//! cuts `c . x <= floor(h_K(c))` — is computed exactly in four phases:
//!
//! 1. **Bounding box.** The coordinate cuts `±e_i` seed the pool, so every
//!    halfspace system built later is bounded.
//! 2. **Boundary.** Recurse on each facet `F` (induction on dimension; a
//!    zero-dimensional polytope has no facets).  The facet's supporting
//!    inequality and every cut defining the recursively computed closure
//!    `F'` are tilted into full-dimensional genuine cuts of `K` via
//!    [`lift_cut`].  The cuts collected so far intersect to a polytope `P`
//!    with `P ∩ ∂K = K' ∩ ∂K` and `P ⊆ K`.
//! 3. **Pinning.** [`pin_to_rational_subspace`] confines `P` to the largest
//!    rational affine subspace `V` meeting `K'`.
//! 4. **Interior fixpoint.** Vertices of `P` in the relative interior of
//!    `K` can only be cut by lattice directions `d` of `V` with
//!    `‖d‖ < 1/r(v)`, where `r(v)` is a certified interior radius.  For
//!    each candidate the deepest preimage cut is added when it trims a
//!    vertex; the loop stops when no vertex is cut.
//!
//! Every cut entering the pool is *genuine*: its right-hand side is exactly
//! `floor(h_K(c))`.  The final polytope is therefore an intersection of
//! integer-data halfspaces, which makes the closure rational even when `K`
//! itself has irrational coordinates.

use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

use crate::body::{interior_radius, BodyError, ConvexBody};
use crate::cuts::{
    cg_cut, deepest_cut, CGCut, CutPool, CutsError, LatticeDirection, DEFAULT_SEARCH_CAP,
};
use crate::geometry::{
    projected_lattice, AffineSubspace, Face, GeometryError, Inequality, Polytope,
};
use crate::homogeneity::{
    lift_cut, pin_to_rational_subspace, HomogeneityCertificate, HomogeneityError,
};
use crate::jsonio;
use crate::linalg::{dot_int_quad, dot_int_rat, dot_rat, lattice_combinations};
use crate::numeric::{ceil_rat, Int, QuadExt, Rational};

/// Largest supported ambient dimension.
pub const MAX_DIMENSION: usize = 4;

/// Cap on interior fixpoint rounds before the loop gives up with a
/// [`LogEntry::RoundCapReached`] record.
const MAX_ROUNDS: u32 = 100;

/// Coordinate bound for the bounded search along the kernel lattice when a
/// constant direction might empty the closure.
const RESIDUE_SEARCH_BOUND: i64 = 4;

/// Cap on the per-vertex direction enumeration radius.  A vertex whose
/// sound bound `1/r(v)` exceeds the cap is scanned up to the cap only and
/// left unsettled, recorded by a [`LogEntry::DirectionBoundCapped`] entry.
const DIRECTION_ENUM_CAP: i64 = 32;

/// Cap on the number of enumerated candidate directions per round; the
/// radius is halved until the enumeration fits.
const MAX_INTERIOR_CANDIDATES: usize = 20_000;

/// Errors raised by closure computation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClosureError {
    /// Exact closures are computed for polytope bodies only; smooth bodies
    /// are served by the brute-force oracle.
    #[error("exact closure computation requires a polytope body")]
    PolytopeOnly,
    /// The ambient dimension exceeds the supported desk scale.
    #[error("ambient dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    /// A cut family synthesis failed.
    #[error(transparent)]
    Homogeneity(#[from] HomogeneityError),
    /// A cut construction or selection failed.
    #[error(transparent)]
    Cuts(#[from] CutsError),
    /// A body predicate failed.
    #[error(transparent)]
    Body(#[from] BodyError),
    /// A geometric primitive failed.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One record of the certificate log; each phase of the algorithm appends
/// the cuts it contributed together with the data that justified them.
#[derive(Debug, Clone)]
pub enum LogEntry {
    /// Coordinate cuts seeding the pool.
    BoundingBox {
        /// The cuts `±x_i <= floor(h_K(±e_i))` that entered the pool.
        cuts: Vec<CGCut>,
    },
    /// One facet processed: its supporting data and the genuine cuts
    /// contributed by lifting the facet-closure description.
    BoundaryFace {
        /// Outward normal of the facet's supporting inequality.
        normal: Vec<QuadExt>,
        /// Support value of the normal.
        value: QuadExt,
        /// Genuine cuts inserted while lifting this facet.
        lifted_cuts: Vec<CGCut>,
    },
    /// Cuts pinning the affine hull to its largest rational subspace.
    SubspacePinning {
        /// Genuine cuts produced by the pinning phase.
        cuts: Vec<CGCut>,
    },
    /// One cut added during the interior fixpoint: the vertex it removed,
    /// the radius bound `1/r(v)` that limited the direction search, and the
    /// lattice direction whose deepest cut did the trimming.
    InteriorCut {
        /// Zero-based round counter.
        round: u32,
        /// The vertex of the running intersection that the cut removed.
        vertex: Vec<QuadExt>,
        /// `1/r(v)`: directions at least this long cannot cut the vertex.
        direction_bound: Rational,
        /// The projected lattice direction of the cut.
        direction: Vec<Rational>,
        /// The genuine cut that entered the pool.
        cut: CGCut,
    },
    /// Summary of one interior round.
    InteriorRound {
        /// Zero-based round counter.
        round: u32,
        /// Number of (vertex, direction) pairs tested this round.
        tested: usize,
        /// Number of cuts added this round.
        added: usize,
    },
    /// A vertex's direction bound `1/r(v)` exceeded the enumeration cap, so
    /// only directions up to the cap were tested.  The result remains a
    /// superset of the true closure but its completeness is not certified.
    DirectionBoundCapped {
        /// The largest sound bound requested by a vertex this round.
        requested: Rational,
        /// The radius actually enumerated.
        used: Rational,
    },
    /// A deepest-cut search exhausted its budget without certifying
    /// optimality; the computed closure is still a superset of the true
    /// closure built from genuine cuts.
    UncertifiedDeepestCut {
        /// The projected direction whose search was inconclusive.
        direction: Vec<Rational>,
    },
    /// Directions constant on `V` (integer normals orthogonal to the
    /// subspace): whether their behaviour was certified on a kernel basis,
    /// and an emptying cut when one was found.
    ZeroDirectionResidue {
        /// `true` when the phase's conclusion is exact: either every
        /// constant value is integral (no kernel cut can trim `V` while the
        /// closure is nonempty) or an emptying cut was found.
        certified: bool,
        /// A genuine cut whose right-hand side falls below its constant
        /// value on `V`, proving the closure empty.
        emptying_cut: Option<CGCut>,
    },
    /// The fixpoint iteration stopped at the round cap.
    RoundCapReached {
        /// Number of completed rounds.
        rounds: u32,
    },
}

impl LogEntry {
    /// JSON form of the record.
    pub fn to_json(&self) -> Value {
        fn cuts_json(cuts: &[CGCut]) -> Value {
            Value::Array(cuts.iter().map(CGCut::to_json).collect())
        }
        match self {
            LogEntry::BoundingBox { cuts } => json!({
                "phase": "bounding-box",
                "cuts": cuts_json(cuts),
            }),
            LogEntry::BoundaryFace { normal, value, lifted_cuts } => json!({
                "phase": "boundary-face",
                "normal": jsonio::quad_vec_to_value(normal),
                "value": jsonio::quad_to_value(value),
                "lifted_cuts": cuts_json(lifted_cuts),
            }),
            LogEntry::SubspacePinning { cuts } => json!({
                "phase": "subspace-pinning",
                "cuts": cuts_json(cuts),
            }),
            LogEntry::InteriorCut { round, vertex, direction_bound, direction, cut } => json!({
                "phase": "interior-cut",
                "round": round,
                "vertex": jsonio::quad_vec_to_value(vertex),
                "direction_bound": jsonio::rat_to_value(direction_bound),
                "direction": jsonio::rat_vec_to_value(direction),
                "cut": cut.to_json(),
            }),
            LogEntry::InteriorRound { round, tested, added } => json!({
                "phase": "interior-round",
                "round": round,
                "tested": tested,
                "added": added,
            }),
            LogEntry::DirectionBoundCapped { requested, used } => json!({
                "phase": "direction-bound-capped",
                "requested": jsonio::rat_to_value(requested),
                "used": jsonio::rat_to_value(used),
            }),
            LogEntry::UncertifiedDeepestCut { direction } => json!({
                "phase": "uncertified-deepest-cut",
                "direction": jsonio::rat_vec_to_value(direction),
            }),
            LogEntry::ZeroDirectionResidue { certified, emptying_cut } => json!({
                "phase": "zero-direction-residue",
                "certified": certified,
                "emptying_cut": match emptying_cut {
                    Some(cut) => cut.to_json(),
                    None => Value::Null,
                },
            }),
            LogEntry::RoundCapReached { rounds } => json!({
                "phase": "round-cap-reached",
                "rounds": rounds,
            }),
        }
    }
}

/// One facet of the recursion: the face and its recursively computed
/// closure.
#[derive(Debug, Clone)]
pub struct FaceNode {
    /// The facet as a face of the parent body.
    pub face: Face,
    /// The closure of the facet, computed by the same algorithm one
    /// dimension down.
    pub result: ClosureResult,
}

/// The outcome of [`cg_closure`].
#[derive(Debug, Clone)]
pub struct ClosureResult {
    /// The closure polytope, always with rational vertex data; `None` when
    /// the closure is empty.
    pub closure: Option<Polytope>,
    /// Every genuine cut collected during the computation; the closure is
    /// exactly the intersection of these halfspaces.
    pub defining_cuts: CutPool,
    /// Per-phase records of how the cuts were obtained.
    pub certificate_log: Vec<LogEntry>,
    /// One node per facet with the recursively computed facet closure.
    pub recursion_tree: Vec<FaceNode>,
}

impl ClosureResult {
    /// Whether every search in this result and its recursion certified
    /// completeness.  When `false` the computed polytope is still a valid
    /// superset of the true closure (every cut is genuine), but some cut
    /// that would shrink it further may have been missed.
    pub fn certified_complete(&self) -> bool {
        let here = self.certificate_log.iter().all(|entry| match entry {
            LogEntry::UncertifiedDeepestCut { .. } => false,
            LogEntry::ZeroDirectionResidue { certified, .. } => *certified,
            LogEntry::RoundCapReached { .. } => false,
            LogEntry::DirectionBoundCapped { .. } => false,
            _ => true,
        });
        here && self.recursion_tree.iter().all(|node| node.result.certified_complete())
    }

    /// JSON form: closure V- and H-representation, cut pool, log, and the
    /// recursion tree.
    pub fn to_json(&self) -> Value {
        json!({
            "closure": match &self.closure {
                Some(p) => polytope_to_json(p),
                None => Value::Null,
            },
            "defining_cuts": self.defining_cuts.to_json(),
            "certificate_log": Value::Array(
                self.certificate_log.iter().map(LogEntry::to_json).collect(),
            ),
            "recursion_tree": Value::Array(
                self.recursion_tree
                    .iter()
                    .map(|node| {
                        json!({
                            "face": {
                                "direction": jsonio::quad_vec_to_value(&node.face.direction),
                                "value": jsonio::quad_to_value(&node.face.value),
                            },
                            "result": node.result.to_json(),
                        })
                    })
                    .collect(),
            ),
            "certified_complete": self.certified_complete(),
        })
    }
}

/// The truncated closure of a body at a given bound and its stability flag.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Intersection of every CG cut with `‖c‖∞ <= bound` (possibly empty).
    pub polytope: Polytope,
    /// The enumeration bound.
    pub bound: u32,
    /// Whether recomputing at `2 * bound` yields the identical polytope.
    pub stable: bool,
}

impl OracleResult {
    /// JSON form of the oracle result.
    pub fn to_json(&self) -> Value {
        json!({
            "polytope": polytope_to_json(&self.polytope),
            "bound": self.bound,
            "stable": self.stable,
        })
    }
}

/// One pass/fail entry of a verification report.
#[derive(Debug, Clone)]
pub struct VerifyCheck {
    /// Stable identifier of the checked property.
    pub name: String,
    /// Whether the property held exactly.
    pub passed: bool,
    /// Human-readable explanation.
    pub detail: String,
}

/// The outcome of [`verify_closure`]: independent pass/fail re-derivations
/// of the claims a [`ClosureResult`] makes.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// The individual checks in a fixed order.
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    /// Whether every check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// JSON form of the report.
    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checks": Value::Array(
                self.checks
                    .iter()
                    .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                    .collect(),
            ),
        })
    }
}

/// Computes the CG closure of a polytope body exactly.
///
/// The result carries the closure polytope (or `None` when empty), the pool
/// of genuine cuts whose intersection it is, a per-phase certificate log,
/// and the recursion tree of facet closures.
///
/// # Errors
///
/// [`ClosureError::PolytopeOnly`] for smooth bodies and
/// [`ClosureError::DimensionTooLarge`] above dimension 4; errors of the
/// underlying primitives are propagated.
pub fn cg_closure(body: &ConvexBody) -> Result<ClosureResult, ClosureError> {
    let p = body.as_polytope().ok_or(ClosureError::PolytopeOnly)?;
    let dim = p.ambient_dim();
    if dim > MAX_DIMENSION {
        return Err(ClosureError::DimensionTooLarge { dim, max: MAX_DIMENSION });
    }
    closure_of(body, p)
}

fn closure_of(body: &ConvexBody, p: &Polytope) -> Result<ClosureResult, ClosureError> {
    let m = p.field_index();
    let n = p.ambient_dim();
    let mut pool = CutPool::new("cg-closure");
    let mut log: Vec<LogEntry> = Vec::new();

    // Phase 1: coordinate cuts.  They bound every halfspace system below.
    let mut box_cuts = Vec::new();
    for i in 0..n {
        for sign in [1i64, -1] {
            let mut c = vec![Int::zero(); n];
            c[i] = Int::from(sign);
            let cut = cg_cut(body, &c)?;
            if pool.insert(cut.clone()) {
                box_cuts.push(cut);
            }
        }
    }
    log.push(LogEntry::BoundingBox { cuts: box_cuts });

    // Phase 2: boundary.  Recurse on every facet and lift the cuts defining
    // the facet closure; the lifted families force the eventual polytope to
    // meet each facet hyperplane exactly in the facet closure.
    let mut tree = Vec::new();
    for (ineq, facet) in p.facets() {
        let face = Face {
            direction: ineq.normal.clone(),
            value: ineq.rhs.clone(),
            polytope: facet.clone(),
        };
        let facet_body = ConvexBody::from_polytope(facet.clone())?;
        let sub = closure_of(&facet_body, &facet)?;
        let mut lifted = Vec::new();
        // The supporting inequality itself (zero base cut).
        let zero = vec![Int::zero(); n];
        let cert = lift_cut(body, &face, &zero, &QuadExt::zero(m))?;
        absorb(&cert, &mut pool, &mut lifted);
        // The cuts defining the facet closure.
        for sub_cut in defining_subsystem(&sub, &facet)? {
            let dir = int_dir(&sub_cut.c, m);
            let delta = facet.support(&dir);
            debug_assert_eq!(delta.floor(), sub_cut.rhs, "pool cuts are genuine");
            let cert = lift_cut(body, &face, &sub_cut.c, &delta)?;
            absorb(&cert, &mut pool, &mut lifted);
        }
        log.push(LogEntry::BoundaryFace {
            normal: face.direction.clone(),
            value: face.value.clone(),
            lifted_cuts: lifted,
        });
        tree.push(FaceNode { face, result: sub });
    }

    // Phase 3: pin the affine hull to its largest rational subspace.
    let pin = pin_to_rational_subspace(body)?;
    log.push(LogEntry::SubspacePinning { cuts: pin.iter().collect() });
    pool.merge(pin);

    // Phase 4: interior fixpoint.  Each round walks the vertices of the
    // running intersection.  Vertices on the boundary of the body belong to
    // the closure by the recursion on facets, and integral vertices satisfy
    // every genuine cut outright; both are settled for free.  Every other
    // vertex scans the subspace lattice in order of increasing length for a
    // deepest cut that removes it — a vertex that survives all certified
    // cuts from directions strictly shorter than `1/r(v)` can never be cut
    // and stays settled for the rest of the run.
    let mut current = intersect_pool(m, n, &pool)?;
    let mut settled: BTreeSet<Vec<QuadExt>> = BTreeSet::new();
    let mut round: u32 = 0;
    while !current.is_empty() {
        let aff = current.affine().expect("nonempty polytope").clone();
        debug_assert!(aff.is_rational(), "integer cut data yields rational polytopes");
        let lattice = projected_lattice(&aff)?;
        let x0 = base_point(&current);

        // Directions constant on V: their cuts compare a constant value
        // against a genuine floor, so they either never trim (integral
        // constants) or empty the closure outright.
        if !lattice.kernel.is_empty() {
            let (certified, emptying_cut) = residue_status(&lattice.kernel, &x0, body)?;
            let found = emptying_cut.is_some();
            if let Some(cut) = &emptying_cut {
                pool.insert(cut.clone());
            }
            log.push(LogEntry::ZeroDirectionResidue { certified, emptying_cut });
            if found {
                current = intersect_pool(m, n, &pool)?;
                debug_assert!(current.is_empty(), "an emptying cut leaves nothing on V");
                continue;
            }
        }

        // Vertices still in need of a certificate, with their sound
        // direction bounds 1/r(v).
        let mut targets: Vec<(Vec<QuadExt>, Rational)> = Vec::new();
        for v in current.vertices() {
            if settled.contains(v) {
                continue;
            }
            if v.iter().all(QuadExt::is_integer) {
                settled.insert(v.clone());
                continue;
            }
            match interior_radius(v, body, &aff) {
                Ok(r) => targets.push((v.clone(), r.recip())),
                Err(BodyError::Geometry(GeometryError::OnBoundary)) => {
                    settled.insert(v.clone());
                }
                Err(e) => return Err(e.into()),
            }
        }
        if targets.is_empty() {
            log.push(LogEntry::InteriorRound { round, tested: 0, added: 0 });
            break;
        }

        // One shared, capped enumeration radius per round; per vertex only
        // the prefix strictly shorter than its own bound is consulted.
        let max_requested =
            targets.iter().map(|(_, b)| b.clone()).max().expect("nonempty targets");
        let cap = Rational::from_integer(Int::from(DIRECTION_ENUM_CAP));
        let mut used = max_requested.clone().min(cap);
        let mut cands = lattice.vectors_shorter_than(&used);
        let half = Rational::new(Int::from(1), Int::from(2));
        while cands.len() > MAX_INTERIOR_CANDIDATES {
            used = &used * &half;
            cands = lattice.vectors_shorter_than(&used);
        }
        if used < max_requested {
            log.push(LogEntry::DirectionBoundCapped {
                requested: max_requested,
                used: used.clone(),
            });
        }
        let with_norms: Vec<(Rational, Vec<Rational>, Vec<Int>)> =
            cands.into_iter().map(|(d, pre)| (dot_rat(&d, &d), d, pre)).collect();

        // Deepest cuts are a property of the direction alone within a
        // round; share them across vertices.
        let mut deepest_cache: BTreeMap<Vec<Int>, Option<CGCut>> = BTreeMap::new();
        let mut tested: usize = 0;
        let mut added: usize = 0;
        for (v, requested) in &targets {
            let v_bound = requested.clone().min(used.clone());
            let v_bound_sq = &v_bound * &v_bound;
            let mut cutter: Option<(Vec<Rational>, CGCut)> = None;
            let mut all_certified = true;
            for (norm_sq, d, pre) in &with_norms {
                if *norm_sq >= v_bound_sq {
                    break;
                }
                if d.iter().all(Zero::is_zero) {
                    continue;
                }
                let entry = match deepest_cache.get(pre) {
                    Some(e) => e.clone(),
                    None => {
                        let dir =
                            LatticeDirection::from_lattice(&lattice, d.clone(), pre.clone());
                        let computed =
                            match deepest_cut(&current, &dir, &x0, body, DEFAULT_SEARCH_CAP) {
                                Ok(cut) => {
                                    if !cut.certified {
                                        log.push(LogEntry::UncertifiedDeepestCut {
                                            direction: d.clone(),
                                        });
                                    }
                                    Some(cut)
                                }
                                Err(CutsError::NoCutNeeded) => None,
                                Err(e) => return Err(e.into()),
                            };
                        deepest_cache.insert(pre.clone(), computed.clone());
                        computed
                    }
                };
                tested += 1;
                if let Some(cut) = entry {
                    if !cut.certified {
                        all_certified = false;
                    }
                    if !cut.satisfied_by(v) {
                        cutter = Some((d.clone(), cut));
                        break;
                    }
                }
            }
            match cutter {
                Some((direction, cut)) => {
                    if pool.insert(cut.clone()) {
                        added += 1;
                        log.push(LogEntry::InteriorCut {
                            round,
                            vertex: v.clone(),
                            direction_bound: requested.clone(),
                            direction,
                            cut,
                        });
                    }
                }
                None => {
                    // Settling is only sound when no direction was skipped:
                    // every search below the bound must be certified and
                    // the bound itself must not have been capped.
                    if all_certified && *requested <= used {
                        settled.insert(v.clone());
                    }
                }
            }
        }
        let done = added == 0;
        log.push(LogEntry::InteriorRound { round, tested, added });
        if done {
            break;
        }
        current = intersect_pool(m, n, &pool)?;
        round += 1;
        if round >= MAX_ROUNDS {
            log.push(LogEntry::RoundCapReached { rounds: round });
            break;
        }
    }

    let closure = if current.is_empty() { None } else { Some(current) };
    Ok(ClosureResult { closure, defining_cuts: pool, certificate_log: log, recursion_tree: tree })
}

/// The direction bound for interior vertices and the candidate lattice
/// directions below it.
///
/// A vertex `v` of `current` in the relative interior of the body has a
/// certified radius `r(v)` such that directions `d` of the subspace lattice
/// with `‖d‖ >= 1/r(v)` cannot cut it: their genuine cuts keep the whole
/// radius-`r(v)` ball.  The returned bound is `max_v 1/r(v)`; vertices on
/// the boundary are skipped because they already belong to the closure.
/// The candidate list contains every lattice vector strictly shorter than
/// the bound (the zero vector included) with an integral preimage.  A
/// `None` bound means every vertex is pinned to the boundary and the
/// fixpoint is reached.
pub fn interior_direction_bound(
    current: &Polytope,
    body: &ConvexBody,
    subspace: &AffineSubspace,
) -> Result<(Option<Rational>, Vec<(Vec<Rational>, Vec<Int>)>), ClosureError> {
    let lattice = projected_lattice(subspace)?;
    let mut bound: Option<Rational> = None;
    for v in current.vertices() {
        match interior_radius(v, body, subspace) {
            Ok(r) => {
                let b = r.recip();
                bound = Some(match bound {
                    Some(old) => old.max(b),
                    None => b,
                });
            }
            Err(BodyError::Geometry(GeometryError::OnBoundary)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let candidates = match &bound {
        Some(b) => lattice.vectors_shorter_than(b),
        None => Vec::new(),
    };
    Ok((bound, candidates))
}

/// The truncated closure: the intersection of every CG cut with
/// `‖c‖∞ <= bound`.
///
/// Coordinate cuts are processed first so that every partial system is
/// bounded; the remaining normals follow in lexicographic order.  Cuts
/// already satisfied by the running intersection are skipped — the running
/// polytope only shrinks, so they stay redundant.
pub fn truncated_closure(body: &ConvexBody, bound: u32) -> Result<Polytope, ClosureError> {
    assert!(bound >= 1, "the enumeration bound must be at least 1");
    let n = body.ambient_dim();
    let m = body.field_index();
    if n > MAX_DIMENSION {
        return Err(ClosureError::DimensionTooLarge { dim: n, max: MAX_DIMENSION });
    }
    let mut seed: Vec<Inequality> = Vec::new();
    for i in 0..n {
        for sign in [1i64, -1] {
            let mut c = vec![Int::zero(); n];
            c[i] = Int::from(sign);
            seed.push(cg_cut(body, &c)?.as_inequality(m));
        }
    }
    let mut current = Polytope::from_halfspaces(m, n, &seed)?;
    let b = bound as i64;
    let mut c = vec![-b; n];
    loop {
        if c.iter().any(|&k| k != 0) {
            let normal: Vec<Int> = c.iter().map(|&k| Int::from(k)).collect();
            let cut = cg_cut(body, &normal)?;
            let ineq = cut.as_inequality(m);
            if current.vertices().iter().any(|v| !ineq.satisfied_by(v)) {
                current = current.clipped(&ineq);
                if current.is_empty() {
                    break;
                }
            }
        }
        if !advance(&mut c, b) {
            break;
        }
    }
    Ok(current)
}

/// Lexicographic odometer over the box `[-b, b]^n`; returns `false` once
/// the last tuple has been visited.
fn advance(c: &mut [i64], b: i64) -> bool {
    for i in (0..c.len()).rev() {
        if c[i] < b {
            c[i] += 1;
            for entry in c.iter_mut().skip(i + 1) {
                *entry = -b;
            }
            return true;
        }
    }
    false
}

/// The brute-force oracle: the truncated closure at `bound` together with a
/// stability flag from recomputing at `2 * bound`.
///
/// Works for every body kind, including smooth ones.  The truncation is
/// monotone: a larger bound intersects more cuts, so the polytope can only
/// shrink.
pub fn brute_force_closure(body: &ConvexBody, bound: u32) -> Result<OracleResult, ClosureError> {
    let polytope = truncated_closure(body, bound)?;
    let doubled = truncated_closure(body, 2 * bound)?;
    Ok(OracleResult { stable: polytope == doubled, polytope, bound })
}

/// Independently re-derives the claims of a closure result.
///
/// Four checks, each exact: the closure is inside the body; the closure is
/// inside the truncated closure at `bound`; every defining cut's right-hand
/// side reproduces the genuine support floor; and slicing the closure with
/// each recursion-tree facet hyperplane reproduces the recursively computed
/// facet closure.  Failures are report entries, not errors.
pub fn verify_closure(
    result: &ClosureResult,
    body: &ConvexBody,
    bound: u32,
) -> Result<VerifyReport, ClosureError> {
    let mut checks = Vec::new();

    let inside = match &result.closure {
        None => true,
        Some(p) => {
            let mut ok = true;
            for v in p.vertices() {
                if !body.contains(v)? {
                    ok = false;
                    break;
                }
            }
            ok
        }
    };
    checks.push(VerifyCheck {
        name: "closure-inside-body".into(),
        passed: inside,
        detail: if inside {
            "every closure vertex lies in the body".into()
        } else {
            "a closure vertex escapes the body".into()
        },
    });

    let oracle = truncated_closure(body, bound)?;
    let inside_oracle = match &result.closure {
        None => true,
        Some(p) => p.vertices().iter().all(|v| oracle.contains(v)),
    };
    checks.push(VerifyCheck {
        name: "closure-inside-oracle".into(),
        passed: inside_oracle,
        detail: format!("compared against the truncated closure at bound {bound}"),
    });

    let mut genuine = true;
    for cut in result.defining_cuts.iter() {
        let fresh = cg_cut(body, &cut.c)?;
        if fresh.rhs != cut.rhs {
            genuine = false;
            break;
        }
    }
    checks.push(VerifyCheck {
        name: "cuts-genuine".into(),
        passed: genuine,
        detail: if genuine {
            "every defining cut reproduces its exact support floor".into()
        } else {
            "a defining cut's right-hand side is not the support floor".into()
        },
    });

    let mut commutes = true;
    for node in &result.recursion_tree {
        let slice = closure_slice(result, &node.face)?;
        let matches = match (&slice, &node.result.closure) {
            (None, None) => true,
            (Some(s), Some(f)) => s == f,
            _ => false,
        };
        if !matches {
            commutes = false;
            break;
        }
    }
    checks.push(VerifyCheck {
        name: "face-commutation".into(),
        passed: commutes,
        detail: if commutes {
            "slicing the closure along each facet reproduces the facet closure".into()
        } else {
            "a facet slice disagrees with the recursive facet closure".into()
        },
    });

    Ok(VerifyReport { checks })
}

/// Intersection of the closure polytope with a face hyperplane; `None` when
/// empty.
fn closure_slice(result: &ClosureResult, face: &Face) -> Result<Option<Polytope>, ClosureError> {
    let Some(p) = &result.closure else {
        return Ok(None);
    };
    let system = [
        Inequality::new(face.direction.clone(), face.value.clone()),
        Inequality::new(face.direction.iter().map(|x| -x).collect(), -&face.value),
    ];
    let slice = Polytope::from_halfspaces_clip(p, &system);
    Ok(if slice.is_empty() { None } else { Some(slice) })
}

/// Inserts the genuine member cuts of a lift certificate into the pool and
/// records the fresh ones.
fn absorb(cert: &HomogeneityCertificate, pool: &mut CutPool, sink: &mut Vec<CGCut>) {
    for member in &cert.cuts {
        let genuine = CGCut {
            c: member.cut.c.clone(),
            rhs: member.support_floor.clone(),
            certified: true,
        };
        if pool.insert(genuine.clone()) {
            sink.push(genuine);
        }
    }
}

/// The cuts of a facet closure worth lifting.
///
/// For a nonempty facet closure these are the pool cuts tight somewhere on
/// it: their intersection is exactly the facet closure (an inequality slack
/// on all of a polytope is redundant for describing it).  For an empty
/// facet closure, the shortest infeasible prefix of the pool is found by
/// bisection — adding cuts preserves infeasibility, so the predicate is
/// monotone in the prefix length.
fn defining_subsystem(sub: &ClosureResult, facet: &Polytope) -> Result<Vec<CGCut>, ClosureError> {
    let mut all: Vec<CGCut> = sub.defining_cuts.iter().collect();
    match &sub.closure {
        Some(f) => {
            let m = f.field_index();
            Ok(all
                .into_iter()
                .filter(|cut| {
                    let rhs = QuadExt::integer(cut.rhs.clone(), m);
                    f.vertices().iter().any(|v| dot_int_quad(&cut.c, v) == rhs)
                })
                .collect())
        }
        None => {
            let m = facet.field_index();
            let n = facet.ambient_dim();
            let infeasible = |k: usize| -> bool {
                let system: Vec<Inequality> =
                    all[..k].iter().map(|cut| cut.as_inequality(m)).collect();
                match Polytope::from_halfspaces(m, n, &system) {
                    Ok(p) => p.is_empty(),
                    // An unbounded prefix is still feasible.
                    Err(_) => false,
                }
            };
            let mut lo = 1usize;
            let mut hi = all.len();
            debug_assert!(infeasible(hi), "an empty closure refutes its own cut pool");
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if infeasible(mid) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            all.truncate(hi);
            Ok(all)
        }
    }
}

/// Builds the intersection polytope of every cut in the pool.
fn intersect_pool(m: u64, n: usize, pool: &CutPool) -> Result<Polytope, ClosureError> {
    let system: Vec<Inequality> = pool.iter().map(|cut| cut.as_inequality(m)).collect();
    Ok(Polytope::from_halfspaces(m, n, &system)?)
}

/// A rational point of `aff(p)`: the barycenter rounded to the nearest
/// lattice point (ties toward the lexicographically smaller choice) and
/// projected back onto the affine hull.
fn base_point(p: &Polytope) -> Vec<Rational> {
    let half = Rational::new(Int::from(1), Int::from(2));
    let m = p.field_index();
    let rounded: Vec<QuadExt> = p
        .barycenter()
        .expect("nonempty polytope")
        .iter()
        .map(|x| {
            let r = x.to_rational().expect("rational polytope");
            QuadExt::integer(ceil_rat(&(&r - &half)), m)
        })
        .collect();
    let aff = p.affine().expect("nonempty polytope");
    aff.project_point(&rounded)
        .iter()
        .map(|x| x.to_rational().expect("rational affine hull"))
        .collect()
}

/// Decides how cuts with normals in the kernel lattice `L = Z^n ∩ W⊥`
/// behave.  Such a normal has a constant value `t(c) = c . x0` on `V`, and
/// `t` is additive, so integrality on a kernel basis certifies integrality
/// on all of `L` — and an integral constant never exceeds the genuine
/// floor while the closure polytope is nonempty.  Otherwise a bounded
/// search looks for a kernel cut whose right-hand side falls below its
/// constant value; such a cut proves the closure empty.
fn residue_status(
    kernel: &[Vec<Int>],
    x0: &[Rational],
    body: &ConvexBody,
) -> Result<(bool, Option<CGCut>), ClosureError> {
    let integral = kernel.iter().all(|c| dot_int_rat(c, x0).is_integer());
    if integral {
        return Ok((true, None));
    }
    for c in lattice_combinations(kernel, RESIDUE_SEARCH_BOUND) {
        if c.iter().all(Zero::is_zero) {
            continue;
        }
        let t = dot_int_rat(&c, x0);
        let cut = cg_cut(body, &c)?;
        if Rational::from_integer(cut.rhs.clone()) < t {
            return Ok((true, Some(cut)));
        }
    }
    Ok((false, None))
}

fn int_dir(c: &[Int], m: u64) -> Vec<QuadExt> {
    c.iter().map(|k| QuadExt::integer(k.clone(), m)).collect()
}

fn polytope_to_json(p: &Polytope) -> Value {
    json!({
        "field": p.field_index(),
        "ambient": p.ambient_dim(),
        "vertices": Value::Array(
            p.vertices().iter().map(|v| jsonio::quad_vec_to_value(v)).collect(),
        ),
        "inequalities": Value::Array(
            p.inequalities()
                .iter()
                .map(|i| {
                    json!({
                        "normal": jsonio::quad_vec_to_value(&i.normal),
                        "rhs": jsonio::quad_to_value(&i.rhs),
                    })
                })
                .collect(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(Int::from(p), Int::from(q))
    }

    fn q(p: i64, q_: i64) -> QuadExt {
        QuadExt::rational(rat(p, q_), 2)
    }

    fn quad(rp: i64, rq: i64, ip: i64, iq: i64) -> QuadExt {
        QuadExt::new(rat(rp, rq), rat(ip, iq), 2).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn pt(coords: &[(i64, i64)]) -> Vec<QuadExt> {
        coords.iter().map(|&(p, q_)| q(p, q_)).collect()
    }

    fn body_from(points: Vec<Vec<QuadExt>>) -> ConvexBody {
        ConvexBody::from_polytope(Polytope::from_vertices(2, points).unwrap()).unwrap()
    }

    fn square(side_num: i64, side_den: i64) -> ConvexBody {
        let s = (side_num, side_den);
        body_from(vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[s, (0, 1)]),
            pt(&[(0, 1), s]),
            pt(&[s, s]),
        ])
    }

    fn irrational_segment() -> ConvexBody {
        body_from(vec![
            pt(&[(0, 1), (0, 1)]),
            vec![q(1, 1), quad(0, 1, 1, 1)],
        ])
    }

    fn vertex_set(p: &Polytope) -> Vec<Vec<QuadExt>> {
        p.vertices().to_vec()
    }

    #[test]
    fn an_integral_box_is_its_own_closure() {
        let body = square(1, 1);
        let result = cg_closure(&body).unwrap();
        let closure = result.closure.as_ref().unwrap();
        assert_eq!(vertex_set(closure), vertex_set(body.as_polytope().unwrap()));
        assert!(result.certified_complete());
    }

    #[test]
    fn the_shrunken_square_closes_to_the_unit_square() {
        let body = square(3, 2);
        let result = cg_closure(&body).unwrap();
        let closure = result.closure.as_ref().unwrap();
        let expected = vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(1, 1), (1, 1)]),
        ];
        assert_eq!(vertex_set(closure), expected);
        assert_eq!(result.defining_cuts.rhs_for(&ints(&[1, 0])), Some(&Int::from(1)));
        assert_eq!(result.defining_cuts.rhs_for(&ints(&[0, 1])), Some(&Int::from(1)));
        assert!(result.certified_complete());
    }

    #[test]
    fn the_interior_direction_bound_of_the_shrunken_square_is_two() {
        let body = square(3, 2);
        let result = cg_closure(&body).unwrap();
        let closure = result.closure.as_ref().unwrap();
        let aff = closure.affine().unwrap().clone();
        let (bound, candidates) = interior_direction_bound(closure, &body, &aff).unwrap();
        // The only interior vertex (1,1) has radius 1/2, so directions of
        // length at least 2 cannot cut it; nine lattice vectors are shorter:
        // zero, the four units, and the four diagonals.
        assert_eq!(bound, Some(rat(2, 1)));
        assert_eq!(candidates.len(), 9);
        let rounds: Vec<_> = result
            .certificate_log
            .iter()
            .filter_map(|e| match e {
                LogEntry::InteriorRound { round, tested, added } => {
                    Some((*round, *tested, *added))
                }
                _ => None,
            })
            .collect();
        // The closure run itself tests nothing: the unit square's vertices
        // are integral or on the boundary of the body, so the single round
        // settles them all without a direction scan.
        assert_eq!(rounds, vec![(0, 0, 0)]);
    }

    #[test]
    fn the_irrational_segment_closes_to_the_origin() {
        let body = irrational_segment();
        let result = cg_closure(&body).unwrap();
        let closure = result.closure.as_ref().unwrap();
        assert_eq!(vertex_set(closure), vec![pt(&[(0, 1), (0, 1)])]);
        // The pinning phase must have produced cuts: the segment's affine
        // hull is an irrational line.
        let pinned: usize = result
            .certificate_log
            .iter()
            .map(|e| match e {
                LogEntry::SubspacePinning { cuts } => cuts.len(),
                _ => 0,
            })
            .sum();
        assert!(pinned > 0, "pinning cuts must appear in the log");
        assert!(result.certified_complete());
    }

    #[test]
    fn a_soft_triangle_closes_to_its_integer_hull() {
        let body = body_from(vec![
            pt(&[(1, 2), (1, 2)]),
            pt(&[(5, 2), (1, 2)]),
            pt(&[(1, 2), (5, 2)]),
        ]);
        let result = cg_closure(&body).unwrap();
        let closure = result.closure.as_ref().unwrap();
        let expected = vec![
            pt(&[(1, 1), (1, 1)]),
            pt(&[(1, 1), (2, 1)]),
            pt(&[(2, 1), (1, 1)]),
        ];
        assert_eq!(vertex_set(closure), expected);
        assert!(result.certified_complete());
    }

    #[test]
    fn point_closures_are_decided_by_integrality() {
        let integral = body_from(vec![pt(&[(2, 1), (3, 1)])]);
        let result = cg_closure(&integral).unwrap();
        assert_eq!(
            vertex_set(result.closure.as_ref().unwrap()),
            vec![pt(&[(2, 1), (3, 1)])]
        );

        let fractional = body_from(vec![pt(&[(1, 2), (0, 1)])]);
        assert!(cg_closure(&fractional).unwrap().closure.is_none());

        let irrational = body_from(vec![vec![q(1, 1), quad(0, 1, 1, 1)]]);
        assert!(cg_closure(&irrational).unwrap().closure.is_none());
    }

    #[test]
    fn a_half_integer_slab_in_three_dimensions_has_empty_closure() {
        let mut points = Vec::new();
        for x in 0..2i64 {
            for y in 0..2i64 {
                points.push(vec![q(x, 1), q(y, 1), q(1, 2)]);
            }
        }
        let body =
            ConvexBody::from_polytope(Polytope::from_vertices(2, points).unwrap()).unwrap();
        let result = cg_closure(&body).unwrap();
        assert!(result.closure.is_none());
    }

    #[test]
    fn smooth_bodies_are_rejected_by_the_exact_path() {
        let ball = ConvexBody::ball(vec![rat(0, 1), rat(0, 1)], rat(3, 2)).unwrap();
        assert_eq!(cg_closure(&ball).unwrap_err(), ClosureError::PolytopeOnly);
    }

    #[test]
    fn the_oracle_matches_the_exact_closure_on_the_shrunken_square() {
        let body = square(3, 2);
        let exact = cg_closure(&body).unwrap();
        let oracle = brute_force_closure(&body, 3).unwrap();
        assert!(oracle.stable);
        assert_eq!(exact.closure.as_ref().unwrap(), &oracle.polytope);
    }

    #[test]
    fn the_ball_oracle_at_bound_one_is_the_octagon_square() {
        let ball = ConvexBody::ball(vec![rat(0, 1), rat(0, 1)], rat(3, 2)).unwrap();
        let oracle = brute_force_closure(&ball, 1).unwrap();
        // Eight cuts: the diagonal ones have right-hand side
        // floor(3*sqrt(2)/2) = 2, supporting the square [-1,1]^2 at its
        // corners, so the intersection is that square.
        let expected = vec![
            pt(&[(-1, 1), (-1, 1)]),
            pt(&[(-1, 1), (1, 1)]),
            pt(&[(1, 1), (-1, 1)]),
            pt(&[(1, 1), (1, 1)]),
        ];
        assert_eq!(vertex_set(&oracle.polytope), expected);
        assert!(oracle.stable);
        let diag = cg_cut(&ball, &ints(&[1, 1])).unwrap();
        assert_eq!(diag.rhs, Int::from(2));
    }

    #[test]
    fn truncated_closures_shrink_as_the_bound_grows() {
        let bodies = vec![
            irrational_segment(),
            square(3, 2),
            ConvexBody::ball(vec![rat(0, 1), rat(0, 1)], rat(3, 2)).unwrap(),
        ];
        for body in bodies {
            let mut previous: Option<Polytope> = None;
            for bound in [1u32, 2, 4, 8] {
                let p = truncated_closure(&body, bound).unwrap();
                if let Some(prev) = &previous {
                    assert!(
                        p.vertices().iter().all(|v| prev.contains(v)),
                        "truncation at bound {bound} escaped the previous polytope"
                    );
                }
                previous = Some(p);
            }
        }
    }

    #[test]
    fn the_verifier_accepts_computed_results() {
        for body in [square(3, 2), irrational_segment()] {
            let result = cg_closure(&body).unwrap();
            let report = verify_closure(&result, &body, 6).unwrap();
            assert!(report.passed(), "failed checks: {:?}", report.checks);
        }
    }

    #[test]
    fn the_verifier_flags_doctored_results() {
        let body = square(3, 2);
        let result = cg_closure(&body).unwrap();

        // Enlarge the closure beyond the oracle: containment check fails.
        let mut enlarged = result.clone();
        enlarged.closure = Some(body.as_polytope().unwrap().clone());
        let report = verify_closure(&enlarged, &body, 3).unwrap();
        let oracle_check =
            report.checks.iter().find(|c| c.name == "closure-inside-oracle").unwrap();
        assert!(!oracle_check.passed);

        // Sneak in a cut with an understated right-hand side: the genuine
        // floor for the normal (3,0) is 4, not 2.
        let mut sharpened = result.clone();
        sharpened
            .defining_cuts
            .insert(CGCut { c: ints(&[3, 0]), rhs: Int::from(2), certified: true });
        let report = verify_closure(&sharpened, &body, 3).unwrap();
        let genuine_check = report.checks.iter().find(|c| c.name == "cuts-genuine").unwrap();
        assert!(!genuine_check.passed);

        // Shrink the closure: a facet slice no longer matches its node.
        let mut shrunk = result.clone();
        shrunk.closure = Some(
            Polytope::from_vertices(2, vec![pt(&[(0, 1), (0, 1)]), pt(&[(0, 1), (1, 1)])])
                .unwrap(),
        );
        let report = verify_closure(&shrunk, &body, 3).unwrap();
        let face_check = report.checks.iter().find(|c| c.name == "face-commutation").unwrap();
        assert!(!face_check.passed);
    }

    #[test]
    fn closures_of_quadratic_polygons_are_rational() {
        // A triangle with one vertex at (1 + sqrt(2)/2, 1/2).
        let body = body_from(vec![
            pt(&[(0, 1), (0, 1)]),
            vec![quad(1, 1, 1, 2), q(1, 2)],
            pt(&[(0, 1), (2, 1)]),
        ]);
        let result = cg_closure(&body).unwrap();
        let closure = result.closure.as_ref().unwrap();
        assert!(!closure.is_empty());
        assert!(closure
            .vertices()
            .iter()
            .all(|v| v.iter().all(QuadExt::is_rational)));
        let report = verify_closure(&result, &body, 8).unwrap();
        assert!(report.passed(), "failed checks: {:?}", report.checks);
    }

    #[test]
    fn random_rational_polygons_pass_verification() {
        let mut rng = StdRng::seed_from_u64(0x510e5);
        for _ in 0..5 {
            let mut points = Vec::new();
            for _ in 0..4 {
                let x = rat(rng.gen_range(-4..8), rng.gen_range(1..4));
                let y = rat(rng.gen_range(-4..8), rng.gen_range(1..4));
                points.push(vec![QuadExt::rational(x, 2), QuadExt::rational(y, 2)]);
            }
            let p = Polytope::from_vertices(2, points).unwrap();
            if p.dim() != Some(2) {
                continue;
            }
            let body = ConvexBody::from_polytope(p).unwrap();
            let result = cg_closure(&body).unwrap();
            let report = verify_closure(&result, &body, 6).unwrap();
            assert!(report.passed(), "failed checks: {:?}", report.checks);
        }
    }

    #[test]
    fn the_json_round_trip_preserves_the_closure_shape() {
        let body = square(3, 2);
        let result = cg_closure(&body).unwrap();
        let v = result.to_json();
        assert!(v["closure"]["vertices"].as_array().unwrap().len() == 4);
        assert!(v["certified_complete"].as_bool().unwrap());
        let phases: Vec<&str> = v["certificate_log"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["phase"].as_str().unwrap())
            .collect();
        assert!(phases.contains(&"bounding-box"));
        assert!(phases.contains(&"boundary-face"));
        assert!(phases.contains(&"subspace-pinning"));
        assert!(phases.contains(&"interior-round"));
    }
}
