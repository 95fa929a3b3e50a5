//! Oriented chain complexes over simplicial complexes.
//!
//! The crate covers the standard simplex with exact rational geometry, the smoothing
//! self-maps of the simplex, ordered and oriented chains, the prism chain homotopy on
//! linear simplices, integral homology by Smith normal form, and the face-pairing
//! gluing of cycles into pseudomanifolds and cobordisms.

pub mod chains;
pub mod corpus;
pub mod gluing;
pub mod homology;
pub mod prism;
pub mod simplex;
pub mod smoothing;

pub use simplex::{BaryPoint, FaceInclusion, Permutation, Rational, RegionSpec, SimplexError};
pub use smoothing::{BumpSpec, SmoothingError, SmoothingMap};
