//! Shear coordinates on the Farey tessellation.
//!
//! A shear function assigns a real number to every edge of the Farey
//! tessellation of the upper half-plane. This crate develops such a function
//! into a boundary map fixing `0`, `1` and `∞`, recovers shears from boundary
//! maps, and evaluates the fan-sum condition that decides whether the
//! developed map is quasisymmetric.

pub mod cli;
pub mod error;
pub mod farey;
pub mod geom;
pub mod num;
pub mod qsdiag;
pub mod shear;

pub use error::{Error, Result};
pub use farey::{Edge, FareyVertex, Tessellation, Triangle};
pub use geom::{BoundaryPoint, MobiusMap};
pub use num::{Real, Scalar};
pub use shear::{DevelopedMap, ShearFunction};
