//! Exact polyhedral geometry at desk scale (ambient dimension <= 4).
//!
//! The central type is [`Polytope`]: a compact polyhedron over the working
//! field carrying both descriptions at once — the exact vertex set and a
//! facet-defining inequality system — together with its affine hull.  The
//! two descriptions are derived from each other by exhaustive exact
//! enumeration plus an incremental clipping engine, and every public
//! constructor leaves them cross-validated.
//!
//! Around it live the supporting notions the closure algorithm needs:
//! faces in a direction ([`Polytope::pi_face`]), the stability margin of a
//! face ([`face_stability_margin`]), interior balls ([`interior_radius`]),
//! and the projection of the integer lattice onto the affine hull's
//! direction space ([`projected_lattice`]).

mod affine;
mod lattice;
pub(crate) mod margin;
mod polytope;

pub use affine::AffineSubspace;
pub use lattice::{projected_lattice, ProjectedLattice};
pub use margin::{face_stability_margin, interior_radius};
pub use polytope::{Face, Inequality, Polytope};

/// Errors raised by geometric constructions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    /// The input halfspaces admit an unbounded recession direction.
    #[error("halfspace system has a nontrivial recession cone")]
    Unbounded,
    /// A direction argument was the zero vector.
    #[error("zero direction vector")]
    ZeroDirection,
    /// The face equals the whole polytope, so no stability margin exists.
    #[error("face is not proper: it equals the whole polytope")]
    DegenerateFace,
    /// The point is not in the relative interior of the body.
    #[error("point lies on the boundary (or outside) of the body")]
    OnBoundary,
    /// The affine subspace is not definable over the rationals.
    #[error("affine subspace is not rational")]
    IrrationalSubspace,
    /// Mismatched vector lengths.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Ambient dimension beyond the supported desk scale.
    #[error("ambient dimension {dim} exceeds the supported maximum of 4")]
    DimensionTooLarge { dim: usize },
}

