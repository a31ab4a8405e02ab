//! Square-tiled surfaces, SU(2) representation varieties and Dehn-twist
//! dynamics in explicit quaternion coordinates.

pub mod foliation;
pub mod invariants;
pub mod origami;
pub mod quat;
pub mod repvar;
pub mod rng;
pub mod stats;
pub mod twist;
pub mod scalar;

pub use scalar::Real;

/// Double-precision aliases used throughout the crate.
pub type Quat = quat::Quaternion<f64>;
pub type UnitQuat = quat::UnitQuaternion<f64>;
pub type ImVec = quat::ImaginaryVector<f64>;
pub type ProjDirection = quat::ProjectiveDirection<f64>;
pub type Iso4 = quat::Isometry4<f64>;

/// Single-precision aliases.
pub type UnitQuat32 = quat::UnitQuaternion<f32>;
pub type ProjDirection32 = quat::ProjectiveDirection<f32>;
