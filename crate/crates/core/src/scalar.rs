use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar used by every geometric routine: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Default absolute tolerance for distance consistency checks.
    fn default_eps() -> Self;

    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_eps() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn default_eps() -> Self {
        1e-3
    }
}

/// Tolerances shared by the localizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Absolute distance tolerance.
    pub eps: T,
    /// Normalized degeneracy threshold (squared-volume scale).
    pub tau: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            eps: T::default_eps(),
            tau: T::lit(1e-12),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn with_eps(mut self, eps: T) -> Self {
        self.eps = eps;
        self
    }

    /// Relative singular value cutoff matching `tau` (which is a squared quantity).
    pub fn rank_cutoff(&self) -> T {
        self.tau.sqrt()
    }
}
