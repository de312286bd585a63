pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod field;
pub mod geometry;
pub mod operators;
pub mod quadrature;
pub mod swe;
pub mod testcases;
pub mod timestepping;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use geometry::{build_mesh, Mesh, Vec3};
