//! Dual variational scheme for the SU(2) Chern-Simons flatness equations
//! on a rectangular box.
//!
//! Fields are sampled on a collocated node grid. Each node carries a 3×3
//! coefficient matrix `A_{Zp}` (Lie index `Z`, spatial index `p`).

pub mod chern_simons;
pub mod dual_quadratic;
pub mod error;
pub mod gradcheck;
pub mod grid;
pub mod lie;
pub mod reduce;
pub mod pointwise;
pub mod report;
pub mod snapshot;
pub mod tensor;
pub mod tilde;

pub use error::{Error, Result};
pub use lie::{Mat2c, StructureData, Su2Basis};
pub use report::{Check, RunReport, SCHEMA_VERSION};
pub use tensor::{Mat3, Mat9, Vec9};
pub use grid::{BoundaryField, BoxGrid, CoeffField, Scheme};
