use thiserror::Error;

use crate::fields::FieldKind;
use crate::spacetime::Variance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("variance mismatch: {left:?} vs {right:?}")]
    VarianceMismatch { left: Variance, right: Variance },

    #[error("kind mismatch: expected {expected:?}, found {found:?}")]
    KindMismatch { expected: FieldKind, found: FieldKind },

    #[error("non-finite field evaluation at t={t}, q=({x}, {y}, {z})")]
    Domain { t: f64, x: f64, y: f64, z: f64 },

    #[error("flow integration failed at s={s}: {reason}")]
    Integration { s: f64, reason: String },

    #[error("unknown catalog field `{0}`")]
    UnknownField(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("angular velocity is not antisymmetric at t={t} (residual {residual:e})")]
    NotAntisymmetric { t: f64, residual: f64 },
}

pub type Result<T> = std::result::Result<T, KinematicsError>;

impl KinematicsError {
    pub(crate) fn domain(x: &crate::spacetime::WorldPoint) -> Self {
        KinematicsError::Domain {
            t: x.t,
            x: x.q.x,
            y: x.q.y,
            z: x.q.z,
        }
    }

    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        KinematicsError::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
