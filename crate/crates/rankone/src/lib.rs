//! Harmonic analysis on rank-one symmetric spaces: Iwasawa and Bruhat data,
//! boundary cocycles, Poisson transforms, Harish-Chandra c-functions and their
//! meromorphic continuation, the regularized N̄-integral transform, and the
//! geometric lift to G/M.

pub mod boundary;
pub mod cfunc;
pub mod error;
pub mod geomtransform;
pub mod lie_core;
pub mod patterson_sullivan;
pub mod poisson;
pub mod quad;
pub mod regularize;
pub mod special;

pub use error::{Error, Result};
pub use lie_core::{GroupElement, ModelName, NbarCoordinates, RankOneModel};
