//! Catenoids, parabolic catenoids and tall rectangles in H²×R.
//!
//! The crate evaluates the three families of minimal surfaces foliated by
//! circles, horocycles and equidistant arcs, certifies their minimality with
//! a generic extrinsic-curvature engine, and studies the Jacobi operator of
//! the parabolic catenoid on the strip `R × [0, π]`, including a
//! Fourier-multiplier solver for its Dirichlet and inhomogeneous problems.
//!
//! Numerical kernels are generic over [`Real`] (`f32` or `f64`). The aliases
//! at the crate root fix the scalar to `f64`, which is what the accuracy
//! targets of the verification suites assume.

// Guards are written `!(x > 0)` so that NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the tensor notation of the curvature formulas.
#![allow(clippy::needless_range_loop)]

pub mod bvp;
pub mod catenoid;
pub mod curvature;
pub mod elliptic;
pub mod error;
pub mod export;
pub mod hyperbolic;
pub mod jacobi;
pub mod jet;
pub mod mesh;
pub mod ode;
pub mod parabolic;
pub mod quadrature;
pub mod scalar;
pub mod tall;
pub mod verify;

pub use error::{Error, Result};
pub use hyperbolic::Model;
pub use scalar::Real;

pub type Point2H = hyperbolic::Point2H<f64>;
pub type Point3 = hyperbolic::Point3<f64>;
pub type MetricData = hyperbolic::MetricData<f64>;
pub type Jet2 = jet::Jet2<f64>;
pub type ExtrinsicReport = curvature::ExtrinsicReport<f64>;
pub type CatenoidProfile = catenoid::CatenoidProfile<f64>;
pub type Catenoid = catenoid::Catenoid<f64>;
pub type ParabolicCatenoid = parabolic::ParabolicCatenoid<f64>;
pub type TallRectSpec = tall::TallRectSpec<f64>;
pub type TallRectangle = tall::TallRectangle<f64>;
pub type StripField = jacobi::StripField<f64>;
pub type BoundaryData = bvp::BoundaryData<f64>;
pub type SourceData = bvp::SourceData<f64>;
