//! Rigid observers and the space-time splittings they induce.
//!
//! A rigid observer is given by the world line `q_o` of its origin, its
//! angular velocity `Ω(t)` and the rotation `R(t)` with `dR/dt = Ω R`,
//! `R(t_o) = 1`. Its velocity field is the affine field
//! `U(x) = dq_o/dt + Ω(t) (x - q_o(t))`, `t = τ(x)`.
//!
//! The splitting is `H(x) = (t, R(t)⁻¹ (x - q_o(t)))` with inverse
//! `P(t, q) = q_o(t) + R(t) q`.

mod motion;
mod relative;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{KinematicsError, Result};
use crate::fields::VelocityField;
use crate::spacetime::{cross_matrix, FourVector, Instant, SpaceTensor2, SpaceVector, WorldPoint};

pub use motion::ObserverOptions;
pub use relative::RelForm;

use motion::{antisymmetry_residual, IntegratedMotion, Node};

#[derive(Clone)]
enum Motion {
    /// Uniform origin motion, no rotation. Exact.
    Inertial { origin: WorldPoint, velocity: Vector3<f64> },
    Integrated(Arc<IntegratedMotion>),
}

/// A rigid observer.
#[derive(Clone)]
pub struct RigidObserver {
    anchor: f64,
    motion: Motion,
    label: &'static str,
}

impl fmt::Debug for RigidObserver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RigidObserver")
            .field("kind", &self.label)
            .field("anchor", &self.anchor)
            .finish()
    }
}

/// Instantaneous state of an observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverState {
    /// `q_o(t)`
    pub origin: Vector3<f64>,
    /// `dq_o/dt`
    pub origin_velocity: Vector3<f64>,
    pub rotation: Matrix3<f64>,
    pub omega: Matrix3<f64>,
}

impl RigidObserver {
    /// The inertial observer through `o` with constant spatial velocity
    /// `velocity`.
    pub fn inertial(velocity: Vector3<f64>, o: WorldPoint) -> Self {
        Self {
            anchor: o.t,
            motion: Motion::Inertial { origin: o, velocity },
            label: "inertial",
        }
    }

    /// An observer whose origin starts at `o` and moves with
    /// `origin_velocity`, rotating with angular velocity `omega(t)`.
    pub fn rotating<W>(o: WorldPoint, origin_velocity: &VelocityField, omega: W, opts: &ObserverOptions) -> Result<Self>
    where
        W: Fn(Instant) -> SpaceTensor2 + Send + Sync + 'static,
    {
        let ov = origin_velocity.clone();
        let motion = IntegratedMotion::build(
            o.t,
            o.q,
            Arc::new(move |t, q| ov.spatial(t, q)),
            Arc::new(move |t, _| Ok(omega(Instant(t)).m)),
            opts,
        )?;
        Ok(Self {
            anchor: o.t,
            motion: Motion::Integrated(Arc::new(motion)),
            label: "rotating",
        })
    }

    /// Constant angular velocity `omega0` about `axis` around a resting
    /// origin `o`.
    pub fn rotating_about(axis: Vector3<f64>, omega0: f64, o: WorldPoint, opts: &ObserverOptions) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(KinematicsError::invalid("axis", "must be a nonzero finite vector"));
        }
        let om = SpaceTensor2::mixed(cross_matrix(&(axis * (omega0 / n))));
        let rest = VelocityField::new("rest", |_, _| Vector3::zeros());
        Self::rotating(o, &rest, move |_| om, opts)
    }

    /// The rigid observer corotating with the continuum `u` around the
    /// particle through `o`: its origin follows that particle and its angular
    /// velocity is the vorticity of `u` there.
    pub fn corotating(u: &VelocityField, o: WorldPoint, opts: &ObserverOptions) -> Result<Self> {
        let (uv, uw) = (u.clone(), u.clone());
        let motion = IntegratedMotion::build(
            o.t,
            o.q,
            Arc::new(move |t, q| uv.spatial(t, q)),
            Arc::new(move |t, q| Ok(uw.vorticity(&WorldPoint::new(t, *q))?.m)),
            opts,
        )?;
        Ok(Self {
            anchor: o.t,
            motion: Motion::Integrated(Arc::new(motion)),
            label: "corotating",
        })
    }

    /// `t_o`, where `R(t_o) = 1`.
    pub fn anchor(&self) -> Instant {
        Instant(self.anchor)
    }

    pub fn kind_label(&self) -> &'static str {
        self.label
    }

    /// Full state at `t`. Integration failures outside the tabulated span
    /// show up as non-finite entries.
    pub fn state(&self, t: f64) -> ObserverState {
        match &self.motion {
            Motion::Inertial { origin, velocity } => ObserverState {
                origin: origin.q + velocity * (t - origin.t),
                origin_velocity: *velocity,
                rotation: Matrix3::identity(),
                omega: Matrix3::zeros(),
            },
            Motion::Integrated(m) => {
                let nan = || Matrix3::repeat(f64::NAN);
                let node = m.state(t).unwrap_or(Node {
                    q: Vector3::repeat(f64::NAN),
                    r: nan(),
                });
                ObserverState {
                    origin: node.q,
                    origin_velocity: m
                        .origin_velocity(t, &node.q)
                        .unwrap_or_else(|_| Vector3::repeat(f64::NAN)),
                    rotation: node.r,
                    omega: m.omega(t, &node.q).unwrap_or_else(|_| nan()),
                }
            }
        }
    }

    /// `q_o(t)` as a world point.
    pub fn origin_line(&self, t: Instant) -> WorldPoint {
        WorldPoint::new(t.0, self.state(t.0).origin)
    }

    pub fn omega(&self, t: Instant) -> SpaceTensor2 {
        SpaceTensor2::mixed(self.state(t.0).omega)
    }

    pub fn rotation(&self, t: Instant) -> SpaceTensor2 {
        SpaceTensor2::mixed(self.state(t.0).rotation)
    }

    /// Relative angular velocity `ω = R⁻¹ Ω R`.
    pub fn omega_rel(&self, t: Instant) -> SpaceTensor2 {
        let s = self.state(t.0);
        SpaceTensor2::mixed(s.rotation.transpose() * s.omega * s.rotation)
    }

    /// The observer's own velocity field at `x`.
    pub fn velocity_at(&self, x: &WorldPoint) -> FourVector {
        let s = self.state(x.t);
        FourVector::new(1.0, s.origin_velocity + s.omega * (x.q - s.origin))
    }

    /// The observer's velocity field as a [`VelocityField`] (without analytic
    /// jacobian).
    pub fn velocity_field(&self) -> VelocityField {
        let obs = self.clone();
        VelocityField::new(format!("observer:{}", self.label), move |t, q| {
            obs.velocity_at(&WorldPoint::new(t, *q)).dq
        })
    }

    pub fn split(&self, x: &WorldPoint) -> (Instant, SpaceVector) {
        let s = self.state(x.t);
        (Instant(x.t), SpaceVector(s.rotation.transpose() * (x.q - s.origin)))
    }

    pub fn unsplit(&self, t: Instant, q: &SpaceVector) -> WorldPoint {
        let s = self.state(t.0);
        WorldPoint::new(t.0, s.origin + s.rotation * q.0)
    }

    /// `DH(x)`, rows `(τ ; R⁻¹(1 - U ⊗ τ))` in chart components.
    pub fn split_jacobian(&self, x: &WorldPoint) -> Matrix4<f64> {
        let s = self.state(x.t);
        let u = s.origin_velocity + s.omega * (x.q - s.origin);
        split_jacobian_from(&s.rotation, &u)
    }

    /// `(∂₀P, ∇P) = (U(P), R)`.
    pub fn unsplit_partials(&self, t: Instant, q: &SpaceVector) -> (FourVector, SpaceTensor2) {
        let s = self.state(t.0);
        let u = s.origin_velocity + s.omega * (s.rotation * q.0);
        (FourVector::new(1.0, u), SpaceTensor2::mixed(s.rotation))
    }

    /// `DP(t, q)` as a 4x4 matrix with columns `(∂₀P, ∇P)`.
    pub fn unsplit_jacobian(&self, t: Instant, q: &SpaceVector) -> Matrix4<f64> {
        let (d0, grad) = self.unsplit_partials(t, q);
        let mut m = Matrix4::zeros();
        m.set_column(0, &d0.components());
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&grad.m);
        m
    }

    /// `U`-relative velocity of the continuum `u`: `R⁻¹(u(P) - U(P))`.
    pub fn rel_velocity(&self, u: &VelocityField, t: Instant, q: &SpaceVector) -> Result<SpaceVector> {
        let x = self.unsplit(t, q);
        let v = u.spatial(x.t, &x.q)?;
        let s = self.state(t.0);
        let uo = s.origin_velocity + s.omega * (x.q - s.origin);
        Ok(SpaceVector(s.rotation.transpose() * (v - uo)))
    }

    /// Largest antisymmetry residual of `Ω` at the given instants.
    pub fn max_omega_asymmetry(&self, instants: &[f64]) -> f64 {
        instants
            .iter()
            .map(|&t| antisymmetry_residual(&self.state(t).omega))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn split_jacobian_from(r: &Matrix3<f64>, u: &Vector3<f64>) -> Matrix4<f64> {
    let rt = r.transpose();
    let mut m = Matrix4::zeros();
    m[(0, 0)] = 1.0;
    m.fixed_view_mut::<3, 1>(1, 0).copy_from(&(-(rt * u)));
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(&rt);
    m
}

/// `make_inertial`
pub fn make_inertial(velocity: Vector3<f64>, o: WorldPoint) -> RigidObserver {
    RigidObserver::inertial(velocity, o)
}

/// `make_rotating` with default options.
pub fn make_rotating<W>(o: WorldPoint, origin_velocity: &VelocityField, omega: W) -> Result<RigidObserver>
where
    W: Fn(Instant) -> SpaceTensor2 + Send + Sync + 'static,
{
    RigidObserver::rotating(o, origin_velocity, omega, &ObserverOptions::default())
}

/// The observer corotating with `u` around the particle through `o`, with
/// default options.
pub fn corotating_observer(u: &VelocityField, o: WorldPoint) -> Result<RigidObserver> {
    RigidObserver::corotating(u, o, &ObserverOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::CatalogField;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn origin() -> WorldPoint {
        WorldPoint::new(0.0, Vector3::zeros())
    }

    fn spin_z() -> RigidObserver {
        RigidObserver::rotating_about(Vector3::z(), 1.0, origin(), &ObserverOptions::default()).unwrap()
    }

    fn omega0() -> Matrix3<f64> {
        Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    #[test]
    fn inertial_examples() {
        let rest = make_inertial(Vector3::zeros(), origin());
        let x = WorldPoint::new(3.0, Vector3::new(1.0, -2.0, 0.5));
        let (t, q) = rest.split(&x);
        assert_eq!((t.0, q.0), (x.t, x.q));

        let moving = make_inertial(Vector3::new(1.0, 0.0, 0.0), origin());
        let (t, q) = moving.split(&WorldPoint::new(2.0, Vector3::new(5.0, 0.0, 0.0)));
        assert_eq!(t.0, 2.0);
        assert_eq!(q.0, Vector3::new(3.0, 0.0, 0.0));
        assert_eq!(moving.omega(Instant(7.0)).m, Matrix3::zeros());
        assert_eq!(moving.rotation(Instant(7.0)).m, Matrix3::identity());

        let dh = rest.split_jacobian(&x);
        assert_eq!(dh, Matrix4::identity());
    }

    #[test]
    fn rotating_observer_rotation() {
        let obs = spin_z();
        let r = obs.rotation(Instant(FRAC_PI_2)).m;
        assert_abs_diff_eq!(r * Vector3::x(), Vector3::y(), epsilon = 1e-9);
        let r10 = obs.rotation(Instant(10.0)).m;
        assert!((r10.transpose() * r10 - Matrix3::identity()).abs().max() <= 1e-9);
        let rm = obs.rotation(Instant(-3.3)).m;
        let a: f64 = -3.3;
        assert_abs_diff_eq!(rm[(0, 1)], -a.sin(), epsilon = 1e-9);
    }

    #[test]
    fn zero_omega_reduces_to_inertial() {
        let rest = VelocityField::new("rest", |_, _| Vector3::zeros());
        let obs = make_rotating(origin(), &rest, |_| SpaceTensor2::mixed(Matrix3::zeros())).unwrap();
        let x = WorldPoint::new(4.2, Vector3::new(1.0, 2.0, 3.0));
        let (_, q) = obs.split(&x);
        assert_abs_diff_eq!(q.0, x.q, epsilon = 1e-15);
    }

    #[test]
    fn non_antisymmetric_omega_is_rejected() {
        let rest = VelocityField::new("rest", |_, _| Vector3::zeros());
        let err = make_rotating(origin(), &rest, |_| SpaceTensor2::mixed(Matrix3::identity())).unwrap_err();
        assert!(matches!(err, KinematicsError::NotAntisymmetric { .. }));
    }

    #[test]
    fn split_examples() {
        let obs = spin_z();
        let (t, q) = obs.split(&obs.origin_line(Instant(2.5)));
        assert_eq!(t.0, 2.5);
        assert_abs_diff_eq!(q.0, Vector3::zeros(), epsilon = 1e-15);

        let (_, q) = obs.split(&WorldPoint::new(FRAC_PI_2, Vector3::new(0.0, 1.0, 0.0)));
        assert_abs_diff_eq!(q.0, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-9);

        let x = obs.unsplit(Instant(FRAC_PI_2), &SpaceVector::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(x.q, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-9);
        assert_eq!(obs.unsplit(Instant(1.0), &SpaceVector::default()), obs.origin_line(Instant(1.0)));
    }

    #[test]
    fn unsplit_partials_example() {
        let obs = spin_z();
        let t = Instant(0.8);
        let q = SpaceVector::new(1.0, 0.0, 0.0);
        let (d0, _) = obs.unsplit_partials(t, &q);
        // Ω R q with R = Rz(t)
        let expected = omega0() * obs.rotation(t).m * q.0;
        assert_abs_diff_eq!(d0.dq, expected, epsilon = 1e-12);
        let (d0, _) = obs.unsplit_partials(Instant(0.0), &q);
        assert_abs_diff_eq!(d0.dq, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
        assert_eq!(d0.dt, 1.0);
    }

    #[test]
    fn composite_identity() {
        let obs = spin_z();
        for (t, q) in [(0.3, SpaceVector::new(1.0, 2.0, -1.0)), (7.7, SpaceVector::new(-0.4, 0.1, 2.0))] {
            let x = obs.unsplit(Instant(t), &q);
            let prod = obs.split_jacobian(&x) * obs.unsplit_jacobian(Instant(t), &q);
            assert!((prod - Matrix4::identity()).abs().max() <= 1e-9);
        }
    }

    #[test]
    fn omega_rel_examples() {
        let obs = spin_z();
        for t in [0.0, 1.3, 9.0] {
            assert_abs_diff_eq!(obs.omega_rel(Instant(t)).m, omega0(), epsilon = 1e-12);
        }
        let inertial = make_inertial(Vector3::new(0.1, 0.0, 0.0), origin());
        assert_eq!(inertial.omega_rel(Instant(2.0)).m, Matrix3::zeros());
    }

    #[test]
    fn rel_velocity_examples() {
        let rot = CatalogField::RigidRotation { omega0: 1.0 }.velocity_field().unwrap();
        let co = spin_z();
        for q in [SpaceVector::new(1.0, 0.0, 0.0), SpaceVector::new(0.3, -1.2, 0.7)] {
            assert_abs_diff_eq!(co.rel_velocity(&rot, Instant(2.0), &q).unwrap().0, Vector3::zeros(), epsilon = 1e-12);
        }
        let rest = make_inertial(Vector3::zeros(), origin());
        let shear = CatalogField::SimpleShear { kappa: 1.0 }.velocity_field().unwrap();
        let v = rest.rel_velocity(&shear, Instant(0.0), &SpaceVector::new(0.0, 2.0, 0.0)).unwrap();
        assert_eq!(v.0, Vector3::new(2.0, 0.0, 0.0));
        let own = co.velocity_field();
        let v = co.rel_velocity(&own, Instant(3.0), &SpaceVector::new(0.5, 0.5, 0.5)).unwrap();
        assert_abs_diff_eq!(v.0, Vector3::zeros(), epsilon = 1e-12);
    }

    #[test]
    fn corotating_examples() {
        let rot = CatalogField::RigidRotation { omega0: 1.0 }.velocity_field().unwrap();
        let co = corotating_observer(&rot, origin()).unwrap();
        assert_abs_diff_eq!(co.omega(Instant(1.0)).m, omega0(), epsilon = 1e-12);
        let x = WorldPoint::new(1.4, Vector3::new(0.3, -0.8, 0.5));
        assert_abs_diff_eq!(co.velocity_at(&x).dq, rot.spatial(x.t, &x.q).unwrap(), epsilon = 1e-12);

        let still = CatalogField::Constant { w0: [0.5, 0.0, -0.2] }.velocity_field().unwrap();
        let co = corotating_observer(&still, origin()).unwrap();
        assert_eq!(co.omega(Instant(3.0)).m, Matrix3::zeros());
        assert_abs_diff_eq!(co.rotation(Instant(3.0)).m, Matrix3::identity(), epsilon = 1e-15);
        assert_abs_diff_eq!(co.origin_line(Instant(2.0)).q, Vector3::new(1.0, 0.0, -0.4), epsilon = 1e-12);

        let shear = CatalogField::SimpleShear { kappa: 1.0 }.velocity_field().unwrap();
        let co = corotating_observer(&shear, origin()).unwrap();
        let om = co.omega(Instant(0.5)).m;
        assert_eq!(om[(0, 1)], 0.5);
        assert_eq!(om[(1, 0)], -0.5);
        assert_eq!(om + om.transpose(), Matrix3::zeros());
    }
}
