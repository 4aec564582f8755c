use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4, Vector3};

use super::{Field, FieldKind, FieldValue, DEFAULT_FD_H};
use crate::error::{KinematicsError, Result};
use crate::spacetime::{antisym_space, FourVector, SpaceTensor2, Tensor2, Variance, WorldPoint};

type SpatialFn = dyn Fn(f64, &Vector3<f64>) -> Vector3<f64> + Send + Sync;
type SpatialJacobianFn = dyn Fn(f64, &Vector3<f64>) -> SpatialJacobian + Send + Sync;

/// `(d/dt v, grad v)` of a spatial velocity; `grad[(i, j)] = d_j v_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialJacobian {
    pub dt: Vector3<f64>,
    pub grad: Matrix3<f64>,
}

/// An absolute velocity field `u = (1, v(t, q))`.
#[derive(Clone)]
pub struct VelocityField {
    name: String,
    spatial: Arc<SpatialFn>,
    jacobian: Option<Arc<SpatialJacobianFn>>,
    fd_h: f64,
}

impl fmt::Debug for VelocityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VelocityField")
            .field("name", &self.name)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl VelocityField {
    pub fn new<F>(name: impl Into<String>, spatial: F) -> Self
    where
        F: Fn(f64, &Vector3<f64>) -> Vector3<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            spatial: Arc::new(spatial),
            jacobian: None,
            fd_h: DEFAULT_FD_H,
        }
    }

    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(f64, &Vector3<f64>) -> SpatialJacobian + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn without_jacobian(mut self) -> Self {
        self.jacobian = None;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Spatial part of the velocity, in m/s.
    pub fn spatial(&self, t: f64, q: &Vector3<f64>) -> Result<Vector3<f64>> {
        let v = (self.spatial)(t, q);
        if !v.iter().all(|c| c.is_finite()) {
            return Err(KinematicsError::domain(&WorldPoint::new(t, *q)));
        }
        Ok(v)
    }

    /// The four-velocity; its time component is 1 by construction.
    pub fn velocity(&self, x: &WorldPoint) -> Result<FourVector> {
        Ok(FourVector::new(1.0, self.spatial(x.t, &x.q)?))
    }

    /// Analytic derivatives when available, central differences otherwise.
    pub fn spatial_jacobian(&self, t: f64, q: &Vector3<f64>) -> Result<SpatialJacobian> {
        match &self.jacobian {
            Some(j) => {
                let jac = j(t, q);
                if !(jac.dt.iter().all(|c| c.is_finite()) && jac.grad.iter().all(|c| c.is_finite())) {
                    return Err(KinematicsError::domain(&WorldPoint::new(t, *q)));
                }
                Ok(jac)
            }
            None => self.fd_spatial_jacobian(t, q),
        }
    }

    pub fn fd_spatial_jacobian(&self, t: f64, q: &Vector3<f64>) -> Result<SpatialJacobian> {
        let ht = self.fd_h * t.abs().max(1.0);
        let dt = (self.spatial(t + ht, q)? - self.spatial(t - ht, q)?) / (2.0 * ht);
        let mut grad = Matrix3::zeros();
        for j in 0..3 {
            let h = self.fd_h * q[j].abs().max(1.0);
            let mut qp = *q;
            let mut qm = *q;
            qp[j] += h;
            qm[j] -= h;
            let col = (self.spatial(t, &qp)? - self.spatial(t, &qm)?) / (2.0 * h);
            grad.set_column(j, &col);
        }
        Ok(SpatialJacobian { dt, grad })
    }

    /// `Du` as a mixed tensor; its time row vanishes.
    pub fn derivative(&self, x: &WorldPoint) -> Result<Tensor2> {
        let jac = self.spatial_jacobian(x.t, &x.q)?;
        Ok(Tensor2::new(Variance::Mixed, embed_jacobian(&jac)))
    }

    /// Spacelike derivative `grad u`.
    pub fn spatial_gradient(&self, x: &WorldPoint) -> Result<SpaceTensor2> {
        Ok(SpaceTensor2::mixed(self.spatial_jacobian(x.t, &x.q)?.grad))
    }

    pub fn wedge(&self, x: &WorldPoint) -> Result<SpaceTensor2> {
        Ok(antisym_space(&self.spatial_gradient(x)?))
    }

    /// Angular velocity of the continuum, `-1/2 (wedge u)`.
    pub fn vorticity(&self, x: &WorldPoint) -> Result<SpaceTensor2> {
        Ok(self.wedge(x)?.scale(-0.5))
    }

    /// The same field viewed as a four-vector [`Field`].
    pub fn as_field(&self) -> Field {
        let this = self.clone();
        let field = Field::new(FieldKind::FourVector, move |x| match this.spatial(x.t, &x.q) {
            Ok(v) => FieldValue::FourVector(FourVector::new(1.0, v)),
            Err(_) => FieldValue::FourVector(FourVector::new(1.0, Vector3::repeat(f64::NAN))),
        })
        .with_fd_step(self.fd_h);
        match self.jacobian {
            Some(_) => {
                let this = self.clone();
                field.with_jacobian(move |x| {
                    let m = match this.spatial_jacobian(x.t, &x.q) {
                        Ok(jac) => embed_jacobian(&jac),
                        Err(_) => Matrix4::repeat(f64::NAN),
                    };
                    std::array::from_fn(|g| {
                        FieldValue::FourVector(FourVector::from_components(m.column(g).into_owned()))
                    })
                })
            }
            None => field,
        }
    }
}

pub(crate) fn embed_jacobian(jac: &SpatialJacobian) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 1>(1, 0).copy_from(&jac.dt);
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(&jac.grad);
    m
}
