//! Flow of a velocity field and its derivative by the variational equation.
//!
//! The time coordinate of the flow is advanced exactly (`t + s`); only the
//! spatial part and the spatial rows of the flow derivative are integrated,
//! jointly, with classical fixed-step RK4.

use nalgebra::{Matrix3, Matrix3x4, Matrix4, Vector3};

use super::VelocityField;
use crate::error::{KinematicsError, Result};
use crate::observers::RigidObserver;
use crate::spacetime::{Instant, SpaceTensor2, SpaceVector, Tensor2, Variance, WorldPoint};

/// Default integrator step, seconds.
pub const DEFAULT_FLOW_STEP: f64 = 1e-3;

/// `Υ_s(x)` together with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowResult {
    pub point: WorldPoint,
    /// Mixed tensor; the time row is exactly `(1, 0, 0, 0)`.
    pub jacobian: Tensor2,
    pub s: f64,
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(KinematicsError::invalid("step", "must be positive and finite"));
    }
    Ok(())
}

fn n_steps(s: f64, step: f64) -> usize {
    (s.abs() / step).ceil().max(1.0) as usize
}

fn integration_error(sigma: f64, e: KinematicsError) -> KinematicsError {
    KinematicsError::Integration {
        s: sigma,
        reason: e.to_string(),
    }
}

/// Integrates `dx/ds = u(x)` from `x` over duration `s` (which may be
/// negative) together with `d(DΥ)/ds = Du(Υ) DΥ`, `DΥ_0 = 1`.
pub fn flow(u: &VelocityField, x: &WorldPoint, s: f64, step: f64) -> Result<FlowResult> {
    check_step(step)?;
    if s == 0.0 {
        return Ok(FlowResult {
            point: *x,
            jacobian: Tensor2::new(Variance::Mixed, Matrix4::identity()),
            s,
        });
    }
    let n = n_steps(s, step);
    let h = s / n as f64;

    // Spatial rows of DΥ.
    let rhs = |sigma: f64, q: &Vector3<f64>, js: &Matrix3x4<f64>| -> Result<(Vector3<f64>, Matrix3x4<f64>)> {
        let t = x.t + sigma;
        let v = u.spatial(t, q)?;
        let jac = u.spatial_jacobian(t, q)?;
        // Du restricted to its spatial rows, applied to DΥ whose time row is e_0.
        let mut dj = jac.grad * js;
        for r in 0..3 {
            dj[(r, 0)] += jac.dt[r];
        }
        Ok((v, dj))
    };

    let mut q = x.q;
    let mut js = Matrix3x4::zeros();
    js.fixed_view_mut::<3, 3>(0, 1).copy_from(&Matrix3::identity());
    for i in 0..n {
        let sigma = i as f64 * h;
        let step_result = (|| {
            let (k1q, k1j) = rhs(sigma, &q, &js)?;
            let (k2q, k2j) = rhs(sigma + 0.5 * h, &(q + k1q * (0.5 * h)), &(js + k1j * (0.5 * h)))?;
            let (k3q, k3j) = rhs(sigma + 0.5 * h, &(q + k2q * (0.5 * h)), &(js + k2j * (0.5 * h)))?;
            let (k4q, k4j) = rhs(sigma + h, &(q + k3q * h), &(js + k3j * h))?;
            Ok::<_, KinematicsError>((
                q + (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (h / 6.0),
                js + (k1j + k2j * 2.0 + k3j * 2.0 + k4j) * (h / 6.0),
            ))
        })();
        let (nq, nj) = step_result.map_err(|e| integration_error(sigma, e))?;
        if !(nq.iter().all(|c| c.is_finite()) && nj.iter().all(|c| c.is_finite())) {
            return Err(KinematicsError::Integration {
                s: sigma + h,
                reason: "state became non-finite".into(),
            });
        }
        q = nq;
        js = nj;
    }

    let mut m = Matrix4::zeros();
    m[(0, 0)] = 1.0;
    m.fixed_view_mut::<3, 4>(1, 0).copy_from(&js);
    Ok(FlowResult {
        point: WorldPoint::new(x.t + s, q),
        jacobian: Tensor2::new(Variance::Mixed, m),
        s,
    })
}

/// `Υ_s(x)` without the variational equation.
pub fn flow_point(u: &VelocityField, x: &WorldPoint, s: f64, step: f64) -> Result<WorldPoint> {
    check_step(step)?;
    if s == 0.0 {
        return Ok(*x);
    }
    let n = n_steps(s, step);
    let h = s / n as f64;
    let f = |sigma: f64, q: &Vector3<f64>| u.spatial(x.t + sigma, q).map_err(|e| integration_error(sigma, e));
    let mut q = x.q;
    for i in 0..n {
        let sigma = i as f64 * h;
        let k1 = f(sigma, &q)?;
        let k2 = f(sigma + 0.5 * h, &(q + k1 * (0.5 * h)))?;
        let k3 = f(sigma + 0.5 * h, &(q + k2 * (0.5 * h)))?;
        let k4 = f(sigma + h, &(q + k3 * h))?;
        q += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !q.iter().all(|c| c.is_finite()) {
            return Err(KinematicsError::Integration {
                s: sigma + h,
                reason: "state became non-finite".into(),
            });
        }
    }
    Ok(WorldPoint::new(x.t + s, q))
}

/// Deformation gradient of the motion seen by `obs`: the space-space block
/// of `DH(Υ_s(x)) DΥ_s(x) DP(t0, X)` with `x = P(t0, X)`.
pub fn deformation_gradient(
    u: &VelocityField,
    obs: &RigidObserver,
    t0: Instant,
    reference: &SpaceVector,
    s: f64,
    step: f64,
) -> Result<SpaceTensor2> {
    let x = obs.unsplit(t0, reference);
    let fl = flow(u, &x, s, step)?;
    let dh = obs.split_jacobian(&fl.point);
    let dp = obs.unsplit_jacobian(t0, reference);
    let full = dh * fl.jacobian.m * dp;
    Ok(SpaceTensor2::mixed(full.fixed_view::<3, 3>(1, 1).into_owned()))
}
