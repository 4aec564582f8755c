//! Smooth fields on space-time and their absolute and spacelike derivatives.
//!
//! A [`Field`] pairs an evaluation closure with an optional analytic
//! derivative provider. Without one, derivatives are taken by central
//! differences with step `h = fd_h * max(1, |x_i|)` per chart coordinate.

mod catalog;
mod flow;
mod polynomial;
mod velocity;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{KinematicsError, Result};
use crate::spacetime::{
    antisym_space, FourCovector, FourVector, SpaceCovector, SpaceTensor2, SpaceVector, Tensor2,
    Variance, WorldPoint,
};

pub use catalog::{catalog, CatalogField};
pub use flow::{deformation_gradient, flow, flow_point, FlowResult, DEFAULT_FLOW_STEP};
pub use polynomial::{random_polynomial_field, Polynomial, PolynomialField};
pub use velocity::{SpatialJacobian, VelocityField};

/// Default relative finite-difference step.
pub const DEFAULT_FD_H: f64 = 1e-5;

/// What a field takes values in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Scalar,
    FourVector,
    SpaceVector,
    FourCovector,
    SpaceCovector,
    Tensor2Con,
    Tensor2Cov,
    Tensor2Mix,
    SpaceTensor2Con,
    SpaceTensor2Cov,
    SpaceTensor2Mix,
}

impl FieldKind {
    pub const ALL: [FieldKind; 11] = [
        FieldKind::Scalar,
        FieldKind::FourVector,
        FieldKind::SpaceVector,
        FieldKind::FourCovector,
        FieldKind::SpaceCovector,
        FieldKind::Tensor2Con,
        FieldKind::Tensor2Cov,
        FieldKind::Tensor2Mix,
        FieldKind::SpaceTensor2Con,
        FieldKind::SpaceTensor2Cov,
        FieldKind::SpaceTensor2Mix,
    ];

    /// Number of stored components.
    pub fn len(self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::SpaceVector | FieldKind::SpaceCovector => 3,
            FieldKind::FourVector | FieldKind::FourCovector => 4,
            FieldKind::SpaceTensor2Con | FieldKind::SpaceTensor2Cov | FieldKind::SpaceTensor2Mix => 9,
            FieldKind::Tensor2Con | FieldKind::Tensor2Cov | FieldKind::Tensor2Mix => 16,
        }
    }

    pub fn is_spacelike(self) -> bool {
        matches!(
            self,
            FieldKind::SpaceVector
                | FieldKind::SpaceCovector
                | FieldKind::SpaceTensor2Con
                | FieldKind::SpaceTensor2Cov
                | FieldKind::SpaceTensor2Mix
        )
    }

    /// The four-dimensional kind a spacelike kind embeds into.
    pub fn embedded(self) -> FieldKind {
        match self {
            FieldKind::SpaceVector => FieldKind::FourVector,
            FieldKind::SpaceCovector => FieldKind::FourCovector,
            FieldKind::SpaceTensor2Con => FieldKind::Tensor2Con,
            FieldKind::SpaceTensor2Cov => FieldKind::Tensor2Cov,
            FieldKind::SpaceTensor2Mix => FieldKind::Tensor2Mix,
            k => k,
        }
    }

    pub fn tensor_variance(self) -> Option<Variance> {
        match self {
            FieldKind::Tensor2Con | FieldKind::SpaceTensor2Con => Some(Variance::Contravariant),
            FieldKind::Tensor2Cov | FieldKind::SpaceTensor2Cov => Some(Variance::Covariant),
            FieldKind::Tensor2Mix | FieldKind::SpaceTensor2Mix => Some(Variance::Mixed),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::FourVector => "four_vector",
            FieldKind::SpaceVector => "space_vector",
            FieldKind::FourCovector => "four_covector",
            FieldKind::SpaceCovector => "space_covector",
            FieldKind::Tensor2Con => "tensor2_con",
            FieldKind::Tensor2Cov => "tensor2_cov",
            FieldKind::Tensor2Mix => "tensor2_mix",
            FieldKind::SpaceTensor2Con => "space_tensor2_con",
            FieldKind::SpaceTensor2Cov => "space_tensor2_cov",
            FieldKind::SpaceTensor2Mix => "space_tensor2_mix",
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value of some field kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldValue {
    Scalar(f64),
    FourVector(FourVector),
    SpaceVector(SpaceVector),
    FourCovector(FourCovector),
    SpaceCovector(SpaceCovector),
    Tensor2(Tensor2),
    SpaceTensor2(SpaceTensor2),
}

impl FieldValue {
    pub fn kind(&self) -> FieldKind {
        match self {
            FieldValue::Scalar(_) => FieldKind::Scalar,
            FieldValue::FourVector(_) => FieldKind::FourVector,
            FieldValue::SpaceVector(_) => FieldKind::SpaceVector,
            FieldValue::FourCovector(_) => FieldKind::FourCovector,
            FieldValue::SpaceCovector(_) => FieldKind::SpaceCovector,
            FieldValue::Tensor2(t) => match t.variance() {
                Variance::Contravariant => FieldKind::Tensor2Con,
                Variance::Covariant => FieldKind::Tensor2Cov,
                Variance::Mixed => FieldKind::Tensor2Mix,
            },
            FieldValue::SpaceTensor2(t) => match t.variance() {
                Variance::Contravariant => FieldKind::SpaceTensor2Con,
                Variance::Covariant => FieldKind::SpaceTensor2Cov,
                Variance::Mixed => FieldKind::SpaceTensor2Mix,
            },
        }
    }

    pub fn zero(kind: FieldKind) -> FieldValue {
        FieldValue::from_components(kind, &[0.0; 16])
    }

    /// Flat component array; tensors are row-major. Only the first
    /// `kind().len()` entries are meaningful.
    pub fn components(&self) -> [f64; 16] {
        let mut c = [0.0; 16];
        match self {
            FieldValue::Scalar(s) => c[0] = *s,
            FieldValue::FourVector(v) => c[..4].copy_from_slice(v.components().as_slice()),
            FieldValue::FourCovector(k) => c[..4].copy_from_slice(k.components().as_slice()),
            FieldValue::SpaceVector(v) => c[..3].copy_from_slice(v.0.as_slice()),
            FieldValue::SpaceCovector(k) => c[..3].copy_from_slice(k.0.as_slice()),
            FieldValue::Tensor2(t) => {
                for r in 0..4 {
                    for col in 0..4 {
                        c[4 * r + col] = t.m[(r, col)];
                    }
                }
            }
            FieldValue::SpaceTensor2(t) => {
                for r in 0..3 {
                    for col in 0..3 {
                        c[3 * r + col] = t.m[(r, col)];
                    }
                }
            }
        }
        c
    }

    pub fn from_components(kind: FieldKind, c: &[f64]) -> FieldValue {
        let v3 = || Vector3::new(c[0], c[1], c[2]);
        let v4 = || Vector4::new(c[0], c[1], c[2], c[3]);
        match kind {
            FieldKind::Scalar => FieldValue::Scalar(c[0]),
            FieldKind::FourVector => FieldValue::FourVector(FourVector::from_components(v4())),
            FieldKind::FourCovector => FieldValue::FourCovector(FourCovector::from_components(v4())),
            FieldKind::SpaceVector => FieldValue::SpaceVector(SpaceVector(v3())),
            FieldKind::SpaceCovector => FieldValue::SpaceCovector(SpaceCovector(v3())),
            FieldKind::Tensor2Con | FieldKind::Tensor2Cov | FieldKind::Tensor2Mix => FieldValue::Tensor2(
                Tensor2::new(kind.tensor_variance().unwrap(), Matrix4::from_row_slice(&c[..16])),
            ),
            FieldKind::SpaceTensor2Con | FieldKind::SpaceTensor2Cov | FieldKind::SpaceTensor2Mix => {
                FieldValue::SpaceTensor2(SpaceTensor2::new(
                    kind.tensor_variance().unwrap(),
                    Matrix3::from_row_slice(&c[..9]),
                ))
            }
        }
    }

    /// `a * self + b * other`; both must have the same kind.
    pub fn lin_comb(&self, a: f64, other: &FieldValue, b: f64) -> Result<FieldValue> {
        let kind = self.kind();
        if other.kind() != kind {
            return Err(KinematicsError::KindMismatch {
                expected: kind,
                found: other.kind(),
            });
        }
        let (x, y) = (self.components(), other.components());
        let mut out = [0.0; 16];
        for i in 0..kind.len() {
            out[i] = a * x[i] + b * y[i];
        }
        Ok(FieldValue::from_components(kind, &out))
    }

    pub fn scale(&self, a: f64) -> FieldValue {
        let c = self.components();
        let mut out = [0.0; 16];
        for i in 0..16 {
            out[i] = a * c[i];
        }
        FieldValue::from_components(self.kind(), &out)
    }

    /// The four-dimensional object a spacelike value embeds as; other values
    /// are returned unchanged.
    pub fn embed(&self) -> FieldValue {
        match self {
            FieldValue::SpaceVector(v) => FieldValue::FourVector(v.embed()),
            FieldValue::SpaceCovector(k) => FieldValue::FourCovector(k.embed()),
            FieldValue::SpaceTensor2(t) => FieldValue::Tensor2(t.embed()),
            other => *other,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components()[..self.kind().len()].iter().all(|c| c.is_finite())
    }

    /// Largest absolute component difference; `f64::INFINITY` on kind
    /// mismatch.
    pub fn max_abs_diff(&self, other: &FieldValue) -> f64 {
        if self.kind() != other.kind() {
            return f64::INFINITY;
        }
        let (a, b) = (self.components(), other.components());
        (0..self.kind().len()).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.components()[..self.kind().len()]
            .iter()
            .map(|c| c.abs())
            .fold(0.0, f64::max)
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            FieldValue::Scalar(s) => Some(*s),
            _ => None,
        }
    }

    /// Vector-like values as four components (spacelike ones with zero time
    /// part).
    pub fn as_vector4(&self) -> Option<Vector4<f64>> {
        match self {
            FieldValue::FourVector(v) => Some(v.components()),
            FieldValue::SpaceVector(v) => Some(v.embed().components()),
            FieldValue::FourCovector(k) => Some(k.components()),
            FieldValue::SpaceCovector(k) => Some(k.embed().components()),
            _ => None,
        }
    }

    /// Second-order tensors as a 4x4 matrix (spacelike ones embedded).
    pub fn as_matrix4(&self) -> Option<Matrix4<f64>> {
        match self {
            FieldValue::Tensor2(t) => Some(t.m),
            FieldValue::SpaceTensor2(t) => Some(t.embed().m),
            _ => None,
        }
    }

    pub fn as_space_vector(&self) -> Option<SpaceVector> {
        match self {
            FieldValue::SpaceVector(v) => Some(*v),
            _ => None,
        }
    }
}

/// The four chart partials `(d/dt, d/dx, d/dy, d/dz)` of a field at a point,
/// each of the field's own kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDerivative {
    pub partials: [FieldValue; 4],
}

impl FieldDerivative {
    pub fn kind(&self) -> FieldKind {
        self.partials[0].kind()
    }

    /// Contraction of the derivative slot with a four-vector.
    pub fn directional(&self, w: &FourVector) -> FieldValue {
        let wc = w.components();
        let kind = self.kind();
        let mut out = [0.0; 16];
        for (g, p) in self.partials.iter().enumerate() {
            let c = p.components();
            for i in 0..kind.len() {
                out[i] += wc[g] * c[i];
            }
        }
        FieldValue::from_components(kind, &out)
    }

    /// Derivative of a scalar field as a covector.
    pub fn as_covector(&self) -> Option<FourCovector> {
        let mut k = Vector4::zeros();
        for (g, p) in self.partials.iter().enumerate() {
            k[g] = p.as_scalar()?;
        }
        Some(FourCovector::from_components(k))
    }

    /// Derivative of a (co)vector field as a second-order tensor with
    /// `m[(a, g)] = d_g C_a`: mixed for vector fields, covariant for
    /// covector fields.
    pub fn as_tensor2(&self) -> Option<Tensor2> {
        let variance = match self.kind() {
            FieldKind::FourVector | FieldKind::SpaceVector => Variance::Mixed,
            FieldKind::FourCovector | FieldKind::SpaceCovector => Variance::Covariant,
            _ => return None,
        };
        let mut m = Matrix4::zeros();
        for (g, p) in self.partials.iter().enumerate() {
            m.set_column(g, &p.as_vector4()?);
        }
        Some(Tensor2::new(variance, m))
    }

    /// `d_g T` as 4x4 matrices, for second-order tensor fields.
    pub fn tensor_partials(&self) -> Option<[Matrix4<f64>; 4]> {
        Some([
            self.partials[0].as_matrix4()?,
            self.partials[1].as_matrix4()?,
            self.partials[2].as_matrix4()?,
            self.partials[3].as_matrix4()?,
        ])
    }

    /// Restriction of the derivative slot to spacelike directions.
    pub fn spacelike(&self) -> SpacelikeDerivative {
        SpacelikeDerivative {
            partials: [self.partials[1], self.partials[2], self.partials[3]],
        }
    }
}

/// The three spatial partials of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacelikeDerivative {
    pub partials: [FieldValue; 3],
}

impl SpacelikeDerivative {
    pub fn as_space_covector(&self) -> Option<SpaceCovector> {
        let mut k = Vector3::zeros();
        for (j, p) in self.partials.iter().enumerate() {
            k[j] = p.as_scalar()?;
        }
        Some(SpaceCovector(k))
    }

    /// `m[(i, j)] = d_j c_i`. Vector and velocity fields give a mixed
    /// tensor, covector fields a covariant one. For four-vector fields the
    /// spatial components are used.
    pub fn as_space_tensor(&self) -> Option<SpaceTensor2> {
        let variance = match self.partials[0].kind() {
            FieldKind::FourVector | FieldKind::SpaceVector => Variance::Mixed,
            FieldKind::FourCovector | FieldKind::SpaceCovector => Variance::Covariant,
            _ => return None,
        };
        let mut m = Matrix3::zeros();
        for (j, p) in self.partials.iter().enumerate() {
            let c = p.as_vector4()?;
            m.set_column(j, &Vector3::new(c[1], c[2], c[3]));
        }
        Some(SpaceTensor2::new(variance, m))
    }
}

type EvalFn = dyn Fn(&WorldPoint) -> FieldValue + Send + Sync;
type JacobianFn = dyn Fn(&WorldPoint) -> [FieldValue; 4] + Send + Sync;

/// A smooth map from space-time into one of the [`FieldKind`]s.
#[derive(Clone)]
pub struct Field {
    kind: FieldKind,
    eval: Arc<EvalFn>,
    jacobian: Option<Arc<JacobianFn>>,
    fd_h: f64,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("kind", &self.kind)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .field("fd_h", &self.fd_h)
            .finish()
    }
}

impl Field {
    pub fn new<F>(kind: FieldKind, eval: F) -> Self
    where
        F: Fn(&WorldPoint) -> FieldValue + Send + Sync + 'static,
    {
        Self {
            kind,
            eval: Arc::new(eval),
            jacobian: None,
            fd_h: DEFAULT_FD_H,
        }
    }

    /// Attaches analytic chart partials `(d/dt, d/dx, d/dy, d/dz)`.
    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&WorldPoint) -> [FieldValue; 4] + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    /// Drops the analytic jacobian so derivatives fall back to finite
    /// differences.
    pub fn without_jacobian(mut self) -> Self {
        self.jacobian = None;
        self
    }

    pub fn with_fd_step(mut self, fd_h: f64) -> Self {
        self.fd_h = fd_h;
        self
    }

    pub fn constant(value: FieldValue) -> Self {
        let zero = FieldValue::zero(value.kind());
        Field::new(value.kind(), move |_| value).with_jacobian(move |_| [zero; 4])
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn evaluate(&self, x: &WorldPoint) -> Result<FieldValue> {
        let v = (self.eval)(x);
        if v.kind() != self.kind {
            return Err(KinematicsError::KindMismatch {
                expected: self.kind,
                found: v.kind(),
            });
        }
        if !v.is_finite() {
            return Err(KinematicsError::domain(x));
        }
        Ok(v)
    }

    pub fn derivative(&self, x: &WorldPoint) -> Result<FieldDerivative> {
        match &self.jacobian {
            Some(j) => {
                let partials = j(x);
                for p in &partials {
                    if p.kind() != self.kind {
                        return Err(KinematicsError::KindMismatch {
                            expected: self.kind,
                            found: p.kind(),
                        });
                    }
                    if !p.is_finite() {
                        return Err(KinematicsError::domain(x));
                    }
                }
                Ok(FieldDerivative { partials })
            }
            None => self.fd_derivative(x),
        }
    }

    /// Central-difference chart partials, ignoring any analytic jacobian.
    pub fn fd_derivative(&self, x: &WorldPoint) -> Result<FieldDerivative> {
        let c = x.coords();
        let mut partials = [FieldValue::zero(self.kind); 4];
        for (g, partial) in partials.iter_mut().enumerate() {
            let h = self.fd_h * c[g].abs().max(1.0);
            let mut plus = c;
            let mut minus = c;
            plus[g] += h;
            minus[g] -= h;
            let fp = self.evaluate(&WorldPoint::from_coords(plus))?;
            let fm = self.evaluate(&WorldPoint::from_coords(minus))?;
            *partial = fp.lin_comb(0.5 / h, &fm, -0.5 / h)?;
        }
        Ok(FieldDerivative { partials })
    }
}

/// Absolute derivative of `f` at `x`.
pub fn derivative(f: &Field, x: &WorldPoint) -> Result<FieldDerivative> {
    f.derivative(x)
}

/// Restriction of the absolute derivative to spacelike directions.
pub fn spacelike_derivative(f: &Field, x: &WorldPoint) -> Result<SpacelikeDerivative> {
    Ok(f.derivative(x)?.spacelike())
}

/// `(grad c)* - grad c` for a spacelike-vector or velocity field.
pub fn wedge_derivative(c: &Field, x: &WorldPoint) -> Result<SpaceTensor2> {
    let grad = spacelike_derivative(c, x)?
        .as_space_tensor()
        .filter(|t| t.variance() == Variance::Mixed)
        .ok_or(KinematicsError::KindMismatch {
            expected: FieldKind::SpaceVector,
            found: c.kind(),
        })?;
    Ok(antisym_space(&grad))
}

/// Angular velocity (vorticity) of a continuum, `-1/2 (wedge derivative)`.
pub fn vorticity(u: &Field, x: &WorldPoint) -> Result<SpaceTensor2> {
    Ok(wedge_derivative(u, x)?.scale(-0.5))
}
