//! Exact deformation engine for generalized complex, generalized Kähler and
//! bihermitian structures on flat tori, plus Picard-lattice arithmetic for
//! rational surfaces.

pub mod algebra;
pub mod biherm;
pub mod brackets;
pub mod fields;
pub mod gk;
pub mod hodge;
pub mod linalg;
pub mod mc;
pub mod scalar;
pub mod surfaces;

pub use scalar::{Scalar, Q};
