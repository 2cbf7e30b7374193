//! Shared numeric machinery: special functions and adaptive quadrature.

pub mod quad;
pub mod special;

pub use quad::{
    alternating_series_sum, cos_weighted_integral, linspace, power_tail_sum, quad_integrate,
    quad_with_breakpoints, QuadratureConfig,
};
pub use special::{
    binomial, gamma, gamma_pq, gamma_reflection_product, kingman_kernel_series, lgamma,
    sin_moment,
};
