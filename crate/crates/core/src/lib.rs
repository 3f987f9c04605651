//! Range-based localization of wireless sensor networks whose nodes sit on
//! hyperplanar groups (corridors on a floor, floors in a building).
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the type
//! aliases below fix it to `f64`, which is what the CLI uses.

pub mod building;
pub mod error;
pub mod eval;
pub mod gadget;
pub mod group;
pub mod interval;
pub mod linalg;
pub mod model;
pub mod quad;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Scalar, Tolerances};

pub type Network = model::NetworkInstance<f64>;
pub type Formation = model::PointFormation<f64>;
pub type Plane = model::Hyperplane<f64>;
