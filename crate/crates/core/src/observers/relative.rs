//! Observer-relative forms of absolute quantities given at a world point.

use nalgebra::{Matrix3, Matrix4, Vector3};

use super::{split_jacobian_from, RigidObserver};
use crate::error::{KinematicsError, Result};
use crate::fields::{FieldKind, FieldValue};
use crate::spacetime::{FourCovector, FourVector, SpaceCovector, SpaceTensor2, SpaceVector, Tensor2, Variance, WorldPoint};

/// The split of an absolute quantity into time and space parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelForm {
    Scalar(f64),
    /// `(τC, R⁻¹(C - U τC))`
    Vector { time: f64, space: Vector3<f64> },
    /// `R⁻¹c`
    SpaceVector(Vector3<f64>),
    /// `(K·U, R⁻¹(K·i))`
    Covector { time: f64, space: Vector3<f64> },
    /// `R⁻¹ f R`
    SpaceTensor(SpaceTensor2),
    /// `(R⁻¹ F·U, R⁻¹ (F·i) R)` for `F: M → E ⊗ M*`
    MixedEM { time: Vector3<f64>, space: Matrix3<f64> },
    /// Block matrix `[[t00, t0j], [ti0, tij]]` in (time, space) layout.
    Tensor2(Tensor2),
}

impl RelForm {
    /// The spacelike part: space components of vectors and covectors, the
    /// space-space block of tensors.
    pub fn space_vector(&self) -> Option<Vector3<f64>> {
        match self {
            RelForm::Vector { space, .. } | RelForm::Covector { space, .. } => Some(*space),
            RelForm::SpaceVector(v) => Some(*v),
            _ => None,
        }
    }

    pub fn time_scalar(&self) -> Option<f64> {
        match self {
            RelForm::Scalar(s) => Some(*s),
            RelForm::Vector { time, .. } | RelForm::Covector { time, .. } => Some(*time),
            _ => None,
        }
    }

    pub fn space_block(&self) -> Option<Matrix3<f64>> {
        match self {
            RelForm::SpaceTensor(t) => Some(t.m),
            RelForm::MixedEM { space, .. } => Some(*space),
            RelForm::Tensor2(t) => Some(t.m.fixed_view::<3, 3>(1, 1).into_owned()),
            _ => None,
        }
    }
}

struct Frame {
    r: Matrix3<f64>,
    u: Vector3<f64>,
}

impl Frame {
    fn dh(&self) -> Matrix4<f64> {
        split_jacobian_from(&self.r, &self.u)
    }

    fn dp(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        m.fixed_view_mut::<3, 1>(1, 0).copy_from(&self.u);
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&self.r);
        m
    }
}

impl RigidObserver {
    fn frame(&self, x: &WorldPoint) -> Frame {
        let s = self.state(x.t);
        Frame {
            r: s.rotation,
            u: s.origin_velocity + s.omega * (x.q - s.origin),
        }
    }

    pub fn rel_scalar(&self, _x: &WorldPoint, f: f64) -> f64 {
        f
    }

    pub fn rel_vector(&self, x: &WorldPoint, c: &FourVector) -> (f64, Vector3<f64>) {
        let fr = self.frame(x);
        (c.dt, fr.r.transpose() * (c.dq - fr.u * c.dt))
    }

    pub fn rel_space_vector(&self, x: &WorldPoint, c: &SpaceVector) -> SpaceVector {
        SpaceVector(self.frame(x).r.transpose() * c.0)
    }

    pub fn rel_space_tensor(&self, x: &WorldPoint, f: &SpaceTensor2) -> SpaceTensor2 {
        let r = self.frame(x).r;
        SpaceTensor2::new(f.variance(), r.transpose() * f.m * r)
    }

    pub fn rel_covector(&self, x: &WorldPoint, k: &FourCovector) -> (f64, Vector3<f64>) {
        let fr = self.frame(x);
        (k.k0 + k.k.dot(&fr.u), fr.r.transpose() * k.k)
    }

    /// Split of a mixed field with values in `E ⊗ M*` (a mixed tensor with
    /// vanishing time row).
    pub fn rel_mixed_em(&self, x: &WorldPoint, f: &Tensor2) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        if f.variance() != Variance::Mixed {
            return Err(KinematicsError::VarianceMismatch {
                left: Variance::Mixed,
                right: f.variance(),
            });
        }
        if f.m.row(0).iter().any(|&c| c != 0.0) {
            return Err(KinematicsError::KindMismatch {
                expected: FieldKind::SpaceTensor2Mix,
                found: FieldKind::Tensor2Mix,
            });
        }
        let fr = self.frame(x);
        let rows = f.m.fixed_view::<3, 4>(1, 0).into_owned();
        let u4 = FourVector::new(1.0, fr.u).components();
        let fi = rows.fixed_view::<3, 3>(0, 1).into_owned();
        Ok((fr.r.transpose() * (rows * u4), fr.r.transpose() * fi * fr.r))
    }

    /// `DH T DHᵀ`
    pub fn rel_tensor2_con(&self, x: &WorldPoint, t: &Tensor2) -> Result<Tensor2> {
        expect_variance(t, Variance::Contravariant)?;
        let dh = self.frame(x).dh();
        Ok(Tensor2::new(Variance::Contravariant, dh * t.m * dh.transpose()))
    }

    /// `DPᵀ W DP`
    pub fn rel_tensor2_cov(&self, x: &WorldPoint, w: &Tensor2) -> Result<Tensor2> {
        expect_variance(w, Variance::Covariant)?;
        let dp = self.frame(x).dp();
        Ok(Tensor2::new(Variance::Covariant, dp.transpose() * w.m * dp))
    }

    /// `DH A DP`
    pub fn rel_tensor2_mix(&self, x: &WorldPoint, a: &Tensor2) -> Result<Tensor2> {
        expect_variance(a, Variance::Mixed)?;
        let fr = self.frame(x);
        Ok(Tensor2::new(Variance::Mixed, fr.dh() * a.m * fr.dp()))
    }

    /// Relative form of any field value at `x`. Spacelike covectors are split
    /// as covectors vanishing on the chart time axis.
    pub fn rel_form(&self, x: &WorldPoint, value: &FieldValue) -> RelForm {
        match value {
            FieldValue::Scalar(f) => RelForm::Scalar(*f),
            FieldValue::FourVector(c) => {
                let (time, space) = self.rel_vector(x, c);
                RelForm::Vector { time, space }
            }
            FieldValue::SpaceVector(c) => RelForm::SpaceVector(self.rel_space_vector(x, c).0),
            FieldValue::FourCovector(k) => {
                let (time, space) = self.rel_covector(x, k);
                RelForm::Covector { time, space }
            }
            FieldValue::SpaceCovector(k) => {
                let (time, space) = self.rel_covector(x, &SpaceCovector::embed(k));
                RelForm::Covector { time, space }
            }
            FieldValue::SpaceTensor2(f) => RelForm::SpaceTensor(self.rel_space_tensor(x, f)),
            FieldValue::Tensor2(t) => RelForm::Tensor2(match t.variance() {
                Variance::Contravariant => self.rel_tensor2_con(x, t),
                Variance::Covariant => self.rel_tensor2_cov(x, t),
                Variance::Mixed => self.rel_tensor2_mix(x, t),
            }
            .expect("variance matched above")),
        }
    }
}

fn expect_variance(t: &Tensor2, v: Variance) -> Result<()> {
    if t.variance() != v {
        return Err(KinematicsError::VarianceMismatch {
            left: v,
            right: t.variance(),
        });
    }
    Ok(())
}
