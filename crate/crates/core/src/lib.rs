//! Finite-dimensional quasilinear maps between `l_p^n` spaces.
//!
//! The crate evaluates Ribe's functional and Kalton-Peck maps, estimates
//! their quasilinearity constants, certifies lower bounds on their distance
//! to linear maps, builds twisted sums, and classifies families `n -> f_n`
//! by the finite-grid trends of those statistics.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below cover the common case.

pub mod asymptotics;
pub mod distance;
pub mod error;
pub mod estimation;
pub mod group;
pub mod linalg;
pub mod maps;
pub mod optimize;
pub mod sampling;
pub mod scalar;
pub mod spaces;
pub mod twisted;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use maps::{HomogeneousMap, LipschitzProfile, MapKind};
pub use scalar::Scalar;
pub use spaces::{PExponent, PNormedSpace, Vector};

pub type Vec64 = Vector<f64>;
pub type Space64 = PNormedSpace<f64>;
pub type Exponent64 = PExponent<f64>;
pub type Map64 = HomogeneousMap<f64>;
pub type Profile64 = LipschitzProfile<f64>;
pub type Matrix64 = Matrix<f64>;

pub type Vec32 = Vector<f32>;
pub type Space32 = PNormedSpace<f32>;
pub type Map32 = HomogeneousMap<f32>;
