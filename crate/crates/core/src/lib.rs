//! Triangulated 3-pseudomanifolds, their singular skeletons, bistellar moves
//! and the Turaev–Viro type state sum at a root of unity.

pub mod algebra;
pub mod analysis;
pub mod constructions;
pub mod io;
pub mod moves;
pub mod perm;
pub mod signature;
pub mod statesum;
pub mod surface;
pub mod tri;
mod union_find;

pub use perm::{Perm3, Perm4};
pub use surface::{SurfaceClassification, SurfaceComplex};
pub use tri::{Triangulation, TriError, VertexLabel};
