//! Scalar abstraction for the analytic layer.
//!
//! Everything that evaluates densities, kernels, transforms, or quadrature is
//! generic over [`Real`]. Simulation (sampling, KS statistics) is pinned to
//! `f64` because the seeded generator contract is specified in 64-bit words.

use serde::{de::DeserializeOwned, Serialize};

/// Floating point scalar usable by the analytic core.
///
/// `lit` converts an `f64` literal; for `f32` this rounds, which is the
/// intended semantics for tolerance and coefficient constants.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + core::fmt::Debug
    + core::fmt::Display
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert to Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real must convert to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn half<T: Real>() -> T {
        T::lit(0.5)
    }

    #[test]
    fn lit_round_trips_for_both_widths() {
        assert_eq!(half::<f64>(), 0.5);
        assert_eq!(half::<f32>(), 0.5f32);
        assert_eq!(half::<f64>().as_f64(), 0.5);
    }
}
