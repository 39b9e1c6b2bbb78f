//! Exact computation of Chvátal-Gomory closures of compact convex bodies.
//!
//! Given a compact convex body `K` in `R^n`, every integer direction `c`
//! yields the *Chvátal-Gomory cut* `c·x <= floor(h_K(c))`, where `h_K` is the
//! support function of `K`.  The intersection of all such cuts is the
//! *CG closure* `K'`, a rational polytope even when `K` itself has irrational
//! data.  This crate computes `K'` exactly for bodies whose coordinates live
//! in a single real quadratic field `Q(sqrt(m))`, producing machine-checkable
//! certificates for every cut it emits.
//!
//! The pipeline mirrors the structure of the finiteness proof:
//!
//! * [`numeric`] - arbitrary-precision rationals, quadratic field elements
//!   with exact sign/floor decisions, and certified interval enclosures;
//! * [`geometry`] - exact dual descriptions of small polytopes, faces,
//!   stability margins, and projected integer lattices;
//! * [`body`] - the convex-body abstraction (polytopes, balls, ellipses)
//!   with an exact support oracle;
//! * [`cuts`] - cut objects, deduplicating pools, and the deepest-cut search
//!   over preimages of a projected direction;
//! * [`kronecker`] - simultaneous Diophantine approximation of irrational
//!   directions, with sign-balanced approximant families;
//! * [`homogeneity`] - synthesis of finite cut families whose convex
//!   combination tilts a face inequality into an irrational direction;
//! * [`closure`] - the face-recursive closure algorithm, a brute-force
//!   bounded oracle, and an independent verifier.
//!
//! # Example
//!
//! ```
//! use cg_closure::body::ConvexBody;
//! use cg_closure::closure::cg_closure;
//!
//! // The square [0, 3/2]^2; its closure is the unit square.
//! let body = ConvexBody::from_json_str(r#"{
//!     "type": "polytope",
//!     "field": 2,
//!     "vertices": [[["0/1","0/1"],["0/1","0/1"]],
//!                  [["3/2","0/1"],["0/1","0/1"]],
//!                  [["0/1","0/1"],["3/2","0/1"]],
//!                  [["3/2","0/1"],["3/2","0/1"]]]
//! }"#).unwrap();
//! let result = cg_closure(&body).unwrap();
//! let closure = result.closure.as_ref().unwrap();
//! assert_eq!(closure.vertices().len(), 4);
//! assert!(closure.vertices().iter().all(|v| v.iter().all(|x| x.is_integer())));
//! ```

pub mod body;
pub mod closure;
pub mod cuts;
pub mod geometry;
pub mod homogeneity;
pub mod jsonio;
pub mod kronecker;
mod linalg;
pub mod numeric;

pub use numeric::{QuadExt, Rational};
