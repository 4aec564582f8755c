//! Nonrelativistic space-time kinematics: rigid observers, space-time
//! splittings, and material, Lie, convected and Jaumann time derivatives of
//! tensor fields, with flow-pullback oracles for the closed forms.

pub mod derivatives;
pub mod error;
pub mod fields;
pub mod observers;
pub mod spacetime;

pub use derivatives::{lie_derivative, lie_oracle, material_derivative, LieKind, OracleConfig};
pub use error::{KinematicsError, Result};
pub use fields::{Field, FieldKind, FieldValue, VelocityField};
pub use observers::RigidObserver;
pub use spacetime::{FourCovector, FourVector, Instant, SpaceCovector, SpaceTensor2, SpaceVector, Tensor2, Variance, WorldPoint};
