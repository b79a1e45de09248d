//! Exact computer algebra for L∞ structures on mapping cones of DGLA morphisms.
//!
//! Everything is computed over ℚ. Brackets live on suspended spaces
//! (`W = V[1]`, degree shifted down by one) as graded-symmetric maps of degree 1.

pub mod algebra;
pub mod cone;
pub mod deformation;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod graded;
pub mod linalg;
pub mod linfty;
pub mod scalar;
pub mod transfer;

pub use error::{Error, Result};
pub use graded::{GradedMap, GradedSpace, Vector};
pub use scalar::Scalar;
