//! Dual-path identities that involve observers.

use nalgebra::{Matrix3, Vector3};

use super::jaumann_derivative;
use super::relative::{fd_partials_vector, relative_velocity};
use super::OracleConfig;
use crate::error::{KinematicsError, Result};
use crate::fields::{deformation_gradient, Field, FieldKind, VelocityField};
use crate::observers::{ObserverOptions, RigidObserver};
use crate::spacetime::{Instant, SpaceVector, WorldPoint};

/// Largest `|∂₀c_U(t, 0) - (J_u c)_U(t, 0)|` over `instants`, with `U` the
/// observer corotating with `u` at `o`.
pub fn jaumann_corotating_check(
    u: &VelocityField,
    o: WorldPoint,
    c: &Field,
    instants: &[f64],
    opts: &ObserverOptions,
    fd_h: f64,
) -> Result<f64> {
    if c.kind() != FieldKind::SpaceVector {
        return Err(KinematicsError::KindMismatch {
            expected: FieldKind::SpaceVector,
            found: c.kind(),
        });
    }
    let obs = RigidObserver::corotating(u, o, opts)?;
    let c_u = |t: f64, q: &Vector3<f64>| -> Result<Vector3<f64>> {
        let x = obs.unsplit(Instant(t), &SpaceVector(*q));
        let v = c.evaluate(&x)?.as_space_vector().expect("checked kind");
        Ok(obs.rel_space_vector(&x, &v).0)
    };
    let mut worst: f64 = 0.0;
    for &t in instants {
        let p = fd_partials_vector(&c_u, t, &Vector3::zeros(), fd_h)?;
        let x = obs.origin_line(Instant(t));
        let j = jaumann_derivative(c, u, &x)?;
        let j_u = obs.rel_space_vector(&x, &j).0;
        worst = worst.max((p.dt - j_u).abs().max());
    }
    Ok(worst)
}

/// Largest entry of `dF/ds - ∇v_U F` at `s`, with `dF/ds` a central
/// difference of step `cfg.s_step` and `∇v_U` a finite difference at the
/// image point in observer coordinates.
pub fn deformation_lie_check(
    u: &VelocityField,
    obs: &RigidObserver,
    t0: Instant,
    reference: &SpaceVector,
    s: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    cfg.validate()?;
    let h = cfg.s_step;
    let f = |s: f64| deformation_gradient(u, obs, t0, reference, s, cfg.flow_step).map(|f| f.m);
    let fdot: Matrix3<f64> = (f(s + h)? - f(s - h)?) / (2.0 * h);
    let f_s = f(s)?;
    let x0 = obs.unsplit(t0, reference);
    let image = crate::fields::flow_point(u, &x0, s, cfg.flow_step)?;
    let (t, q) = obs.split(&image);
    let v_u = relative_velocity(obs, u);
    let grad = fd_partials_vector(&v_u, t.0, &q.0, cfg.fd_h)?.grad;
    Ok((fdot - grad * f_s).abs().max())
}
