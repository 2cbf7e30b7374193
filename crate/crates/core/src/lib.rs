//! Algebra of generalized convolutions on probability measures over [0, inf).
//!
//! The crate provides, generically over the scalar type:
//! - a mixture-measure representation (point masses plus a catalog of
//!   continuous densities) with dilation, mixing, CDF/quantile evaluation,
//!   and quadrature against arbitrary integrands (`measures`);
//! - the convolution family catalog with its integral kernels, generalized
//!   characteristic functions, and kernel-shape checks (`kernels`);
//! - exact point-mass convolutions, lack-of-memory laws, max-representation
//!   mixing laws, and convex decompositions per family (`families`);
//! - the Williamson-type integral transform and the exact CDF algebra of the
//!   Kendall convolution (`williamson`).
//!
//! Simulation runs at `f64`:
//! - seeded, stream-split samplers for every constructible convolution
//!   (`samplers`);
//! - empirical CDFs, Kolmogorov-Smirnov tests, and the cosine transform
//!   (`stats`);
//! - named verification suites combining all of the above (`suites`).
//!
//! Concrete `f64` aliases for the common types live at the crate root.

pub mod error;
pub mod families;
pub mod kernels;
pub mod measures;
pub mod numerics;
pub mod real;
pub mod samplers;
pub mod stats;
pub mod suites;
pub mod williamson;

pub use error::{Error, Result};
pub use real::Real;

/// Default-scalar aliases.
pub type Measure = measures::MixtureMeasure<f64>;
pub type Component = measures::ContinuousComponent<f64>;
pub type Density = measures::DensityKind<f64>;
pub type Family = families::Family<f64>;
pub type QuadConfig = numerics::QuadratureConfig<f64>;
pub type CdfPair = williamson::CdfPair<f64>;
pub type WeakStableDensity = kernels::WeakStableDensity<f64>;
