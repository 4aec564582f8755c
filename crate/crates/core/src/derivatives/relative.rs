//! Convected, Jaumann and material derivatives evaluated from relative
//! fields sampled in observer coordinates `(t, q)`.
//!
//! Partials are central differences with step `h * max(1, |coordinate|)`.
//! `grad[(i, j)] = ∂_j f^i`.

use nalgebra::{Matrix3, Vector3};

use crate::error::{KinematicsError, Result};
use crate::fields::{Field, FieldKind, VelocityField};
use crate::observers::RigidObserver;
use crate::spacetime::{Instant, SpaceVector};

pub type RelativeVectorField<'a> = dyn Fn(f64, &Vector3<f64>) -> Result<Vector3<f64>> + 'a;
pub type RelativeMatrixField<'a> = dyn Fn(f64, &Vector3<f64>) -> Result<Matrix3<f64>> + 'a;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorPartials {
    pub value: Vector3<f64>,
    pub dt: Vector3<f64>,
    pub grad: Matrix3<f64>,
}

impl VectorPartials {
    /// `(∂₀ + v·∇) f`
    pub fn transport(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.dt + self.grad * v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixPartials {
    pub value: Matrix3<f64>,
    pub dt: Matrix3<f64>,
    /// `d[j] = ∂_j f`
    pub d: [Matrix3<f64>; 3],
}

impl MatrixPartials {
    pub fn transport(&self, v: &Vector3<f64>) -> Matrix3<f64> {
        self.dt + self.d[0] * v.x + self.d[1] * v.y + self.d[2] * v.z
    }
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(KinematicsError::invalid("fd_h", "must be positive and finite"));
    }
    Ok(())
}

fn step(h: f64, c: f64) -> f64 {
    h * c.abs().max(1.0)
}

pub fn fd_partials_vector(f: &RelativeVectorField, t: f64, q: &Vector3<f64>, h: f64) -> Result<VectorPartials> {
    check_h(h)?;
    let value = f(t, q)?;
    let ht = step(h, t);
    let dt = (f(t + ht, q)? - f(t - ht, q)?) / (2.0 * ht);
    let mut grad = Matrix3::zeros();
    for j in 0..3 {
        let hj = step(h, q[j]);
        let mut e = Vector3::zeros();
        e[j] = hj;
        let col = (f(t, &(q + e))? - f(t, &(q - e))?) / (2.0 * hj);
        grad.set_column(j, &col);
    }
    Ok(VectorPartials { value, dt, grad })
}

pub fn fd_partials_matrix(f: &RelativeMatrixField, t: f64, q: &Vector3<f64>, h: f64) -> Result<MatrixPartials> {
    check_h(h)?;
    let value = f(t, q)?;
    let ht = step(h, t);
    let dt = (f(t + ht, q)? - f(t - ht, q)?) / (2.0 * ht);
    let mut d = [Matrix3::zeros(); 3];
    for (j, dj) in d.iter_mut().enumerate() {
        let hj = step(h, q[j]);
        let mut e = Vector3::zeros();
        e[j] = hj;
        *dj = (f(t, &(q + e))? - f(t, &(q - e))?) / (2.0 * hj);
    }
    Ok(MatrixPartials { value, dt, d })
}

/// `v_U(t, q)` of the continuum `u` seen by `obs`.
pub fn relative_velocity<'a>(
    obs: &'a RigidObserver,
    u: &'a VelocityField,
) -> impl Fn(f64, &Vector3<f64>) -> Result<Vector3<f64>> + 'a {
    move |t, q| Ok(obs.rel_velocity(u, Instant(t), &SpaceVector(*q))?.0)
}

/// Space part of the relative form of a vector or covector field, as a
/// function of observer coordinates.
pub fn relative_space_part<'a>(
    obs: &'a RigidObserver,
    f: &'a Field,
) -> Result<impl Fn(f64, &Vector3<f64>) -> Result<Vector3<f64>> + 'a> {
    match f.kind() {
        FieldKind::FourVector | FieldKind::SpaceVector | FieldKind::FourCovector | FieldKind::SpaceCovector => {}
        found => {
            return Err(KinematicsError::KindMismatch {
                expected: FieldKind::SpaceVector,
                found,
            })
        }
    }
    Ok(move |t: f64, q: &Vector3<f64>| {
        let x = obs.unsplit(Instant(t), &SpaceVector(*q));
        let v = f.evaluate(&x)?;
        Ok(obs.rel_form(&x, &v).space_vector().expect("vector kind"))
    })
}

/// Space-space block of the relative form of a tensor field.
pub fn relative_space_block<'a>(
    obs: &'a RigidObserver,
    f: &'a Field,
) -> Result<impl Fn(f64, &Vector3<f64>) -> Result<Matrix3<f64>> + 'a> {
    if f.kind().tensor_variance().is_none() {
        return Err(KinematicsError::KindMismatch {
            expected: FieldKind::SpaceTensor2Mix,
            found: f.kind(),
        });
    }
    Ok(move |t: f64, q: &Vector3<f64>| {
        let x = obs.unsplit(Instant(t), &SpaceVector(*q));
        let v = f.evaluate(&x)?;
        Ok(obs.rel_form(&x, &v).space_block().expect("tensor kind"))
    })
}

/// Relative material derivative `(∂₀ + ω + v_U·∇) c_U`, `ω = R⁻¹ΩR`.
pub fn material_rel(
    obs: &RigidObserver,
    c_u: &RelativeVectorField,
    v_u: &RelativeVectorField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<Vector3<f64>> {
    let c = fd_partials_vector(c_u, t, q, h)?;
    let v = v_u(t, q)?;
    let omega = obs.omega_rel(Instant(t)).m;
    Ok(c.transport(&v) + omega * c.value)
}

/// `(∂₀ + v·∇)c - (∇v)c`
pub fn upper_convected_rel(
    v_u: &RelativeVectorField,
    c_u: &RelativeVectorField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<Vector3<f64>> {
    let v = fd_partials_vector(v_u, t, q, h)?;
    let c = fd_partials_vector(c_u, t, q, h)?;
    Ok(c.transport(&v.value) - v.grad * c.value)
}

/// `(∂₀ + v·∇)k + (∇v)ᵀk`
pub fn lower_convected_rel(
    v_u: &RelativeVectorField,
    k_u: &RelativeVectorField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<Vector3<f64>> {
    let v = fd_partials_vector(v_u, t, q, h)?;
    let k = fd_partials_vector(k_u, t, q, h)?;
    Ok(k.transport(&v.value) + v.grad.transpose() * k.value)
}

/// `(∂₀ + v·∇)c + 1/2 ((∇v)ᵀ - ∇v)c`
pub fn jaumann_rel(
    v_u: &RelativeVectorField,
    c_u: &RelativeVectorField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<Vector3<f64>> {
    let v = fd_partials_vector(v_u, t, q, h)?;
    let c = fd_partials_vector(c_u, t, q, h)?;
    Ok(c.transport(&v.value) + 0.5 * (v.grad.transpose() - v.grad) * c.value)
}

/// `ṫ - (∇v)t - t(∇v)ᵀ`
pub fn upper_convected_tensor_rel(
    v_u: &RelativeVectorField,
    t_u: &RelativeMatrixField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<Matrix3<f64>> {
    let v = fd_partials_vector(v_u, t, q, h)?;
    let a = fd_partials_matrix(t_u, t, q, h)?;
    Ok(a.transport(&v.value) - v.grad * a.value - a.value * v.grad.transpose())
}

/// `ẇ + (∇v)ᵀw + w(∇v)`
pub fn lower_convected_tensor_rel(
    v_u: &RelativeVectorField,
    w_u: &RelativeMatrixField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<Matrix3<f64>> {
    let v = fd_partials_vector(v_u, t, q, h)?;
    let a = fd_partials_matrix(w_u, t, q, h)?;
    Ok(a.transport(&v.value) + v.grad.transpose() * a.value + a.value * v.grad)
}

/// `ȧ - (∇v)a + a(∇v)`
pub fn mixed_convected_tensor_rel(
    v_u: &RelativeVectorField,
    a_u: &RelativeMatrixField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<Matrix3<f64>> {
    let v = fd_partials_vector(v_u, t, q, h)?;
    let a = fd_partials_matrix(a_u, t, q, h)?;
    Ok(a.transport(&v.value) - v.grad * a.value + a.value * v.grad)
}

/// Lower-left block `a ∂₀v` of the Lie derivative of a space-spacelike
/// mixed tensor. Valid in coordinates where the tensor has no time
/// components.
pub fn mixed_convected_time_block_rel(
    v_u: &RelativeVectorField,
    a_u: &RelativeMatrixField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<Vector3<f64>> {
    let v = fd_partials_vector(v_u, t, q, h)?;
    Ok(a_u(t, q)? * v.dt)
}

/// Time row and time column `(wᵀ∂₀v, w∂₀v)` of the Lie derivative of a
/// space-spacelike covariant tensor, under the same proviso.
pub fn lower_convected_tensor_time_block_rel(
    v_u: &RelativeVectorField,
    w_u: &RelativeMatrixField,
    t: f64,
    q: &Vector3<f64>,
    h: f64,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let v = fd_partials_vector(v_u, t, q, h)?;
    let w = w_u(t, q)?;
    Ok((w.transpose() * v.dt, w * v.dt))
}
