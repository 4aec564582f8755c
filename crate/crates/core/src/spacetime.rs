//! Affine nonrelativistic space-time in one fixed inertial orthonormal chart.
//!
//! World points carry a time coordinate (seconds) and three space
//! coordinates (meters). Four-vectors split into a time increment and a
//! spatial increment; the time evaluation of a four-vector is its time
//! increment, so the spacelike vectors are exactly those with `dt == 0`.
//!
//! Component layout for every four-dimensional object is `(time, x, y, z)`.
//! Second-order tensors store `m[(row, col)]` with the first tensor slot as
//! the row index.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{KinematicsError, Result};

/// An absolute instant, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Instant(pub f64);

impl Instant {
    pub fn seconds(self) -> f64 {
        self.0
    }
}

/// An event of space-time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldPoint {
    /// seconds
    pub t: f64,
    /// meters
    pub q: Vector3<f64>,
}

impl WorldPoint {
    pub fn new(t: f64, q: Vector3<f64>) -> Self {
        Self { t, q }
    }

    pub fn from_coords(c: Vector4<f64>) -> Self {
        Self {
            t: c[0],
            q: Vector3::new(c[1], c[2], c[3]),
        }
    }

    /// Chart coordinates `(t, x, y, z)`.
    pub fn coords(&self) -> Vector4<f64> {
        Vector4::new(self.t, self.q.x, self.q.y, self.q.z)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.iter().all(|c| c.is_finite())
    }
}

impl Add<FourVector> for WorldPoint {
    type Output = WorldPoint;

    fn add(self, v: FourVector) -> WorldPoint {
        WorldPoint {
            t: self.t + v.dt,
            q: self.q + v.dq,
        }
    }
}

impl Add<SpaceVector> for WorldPoint {
    type Output = WorldPoint;

    fn add(self, v: SpaceVector) -> WorldPoint {
        WorldPoint {
            t: self.t,
            q: self.q + v.0,
        }
    }
}

impl Sub for WorldPoint {
    type Output = FourVector;

    fn sub(self, other: WorldPoint) -> FourVector {
        FourVector {
            dt: self.t - other.t,
            dq: self.q - other.q,
        }
    }
}

/// A tangent vector of space-time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector {
    /// seconds
    pub dt: f64,
    /// meters
    pub dq: Vector3<f64>,
}

impl FourVector {
    pub fn new(dt: f64, dq: Vector3<f64>) -> Self {
        Self { dt, dq }
    }

    pub fn from_components(c: Vector4<f64>) -> Self {
        Self {
            dt: c[0],
            dq: Vector3::new(c[1], c[2], c[3]),
        }
    }

    pub fn components(&self) -> Vector4<f64> {
        Vector4::new(self.dt, self.dq.x, self.dq.y, self.dq.z)
    }

    /// The spacelike vector this four-vector equals, if its time
    /// evaluation vanishes.
    pub fn as_spacelike(&self) -> Option<SpaceVector> {
        (self.dt == 0.0).then_some(SpaceVector(self.dq))
    }
}

impl Add for FourVector {
    type Output = FourVector;

    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.dt + o.dt, self.dq + o.dq)
    }
}

impl Sub for FourVector {
    type Output = FourVector;

    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.dt - o.dt, self.dq - o.dq)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;

    fn mul(self, v: FourVector) -> FourVector {
        FourVector::new(self * v.dt, self * v.dq)
    }
}

impl Neg for FourVector {
    type Output = FourVector;

    fn neg(self) -> FourVector {
        FourVector::new(-self.dt, -self.dq)
    }
}

/// A spacelike vector (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpaceVector(pub Vector3<f64>);

impl SpaceVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn embed(&self) -> FourVector {
        FourVector::new(0.0, self.0)
    }

    pub fn norm(&self) -> f64 {
        euclid_dot(self, self).sqrt()
    }
}

impl Add for SpaceVector {
    type Output = SpaceVector;

    fn add(self, o: SpaceVector) -> SpaceVector {
        SpaceVector(self.0 + o.0)
    }
}

impl Sub for SpaceVector {
    type Output = SpaceVector;

    fn sub(self, o: SpaceVector) -> SpaceVector {
        SpaceVector(self.0 - o.0)
    }
}

impl Mul<SpaceVector> for f64 {
    type Output = SpaceVector;

    fn mul(self, v: SpaceVector) -> SpaceVector {
        SpaceVector(self * v.0)
    }
}

/// A covector of space-time: `k0` per second, `k` per meter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourCovector {
    pub k0: f64,
    pub k: Vector3<f64>,
}

impl FourCovector {
    pub fn new(k0: f64, k: Vector3<f64>) -> Self {
        Self { k0, k }
    }

    pub fn from_components(c: Vector4<f64>) -> Self {
        Self {
            k0: c[0],
            k: Vector3::new(c[1], c[2], c[3]),
        }
    }

    pub fn components(&self) -> Vector4<f64> {
        Vector4::new(self.k0, self.k.x, self.k.y, self.k.z)
    }

    /// Action on a four-vector.
    pub fn apply(&self, v: &FourVector) -> f64 {
        self.k0 * v.dt + self.k.dot(&v.dq)
    }
}

/// A spacelike covector (per meter).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpaceCovector(pub Vector3<f64>);

impl SpaceCovector {
    pub fn apply(&self, v: &SpaceVector) -> f64 {
        self.0.dot(&v.0)
    }

    /// Extension to a four-covector that vanishes on the chart's time axis.
    pub fn embed(&self) -> FourCovector {
        FourCovector::new(0.0, self.0)
    }
}

/// Which slots of a second-order tensor are vector (upper) or covector
/// (lower) slots. `Mixed` is vector-first, covector-second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variance {
    Contravariant,
    Covariant,
    Mixed,
}

/// A second-order tensor over space-time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor2 {
    variance: Variance,
    pub m: Matrix4<f64>,
}

impl Tensor2 {
    pub fn new(variance: Variance, m: Matrix4<f64>) -> Self {
        Self { variance, m }
    }

    pub fn zeros(variance: Variance) -> Self {
        Self::new(variance, Matrix4::zeros())
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn try_add(&self, other: &Tensor2) -> Result<Tensor2> {
        if self.variance != other.variance {
            return Err(KinematicsError::VarianceMismatch {
                left: self.variance,
                right: other.variance,
            });
        }
        Ok(Tensor2::new(self.variance, self.m + other.m))
    }

    pub fn scale(&self, s: f64) -> Tensor2 {
        Tensor2::new(self.variance, self.m * s)
    }

    /// The space-space block.
    pub fn space_block(&self) -> SpaceTensor2 {
        SpaceTensor2::new(self.variance, self.m.fixed_view::<3, 3>(1, 1).into_owned())
    }
}

/// A second-order spacelike tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTensor2 {
    variance: Variance,
    pub m: Matrix3<f64>,
}

impl SpaceTensor2 {
    pub fn new(variance: Variance, m: Matrix3<f64>) -> Self {
        Self { variance, m }
    }

    pub fn mixed(m: Matrix3<f64>) -> Self {
        Self::new(Variance::Mixed, m)
    }

    pub fn identity(variance: Variance) -> Self {
        Self::new(variance, Matrix3::identity())
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn try_add(&self, other: &SpaceTensor2) -> Result<SpaceTensor2> {
        if self.variance != other.variance {
            return Err(KinematicsError::VarianceMismatch {
                left: self.variance,
                right: other.variance,
            });
        }
        Ok(SpaceTensor2::new(self.variance, self.m + other.m))
    }

    pub fn scale(&self, s: f64) -> SpaceTensor2 {
        SpaceTensor2::new(self.variance, self.m * s)
    }

    /// Transpose through the Euclidean identification; the variance tag is
    /// kept.
    pub fn transpose(&self) -> SpaceTensor2 {
        SpaceTensor2::new(self.variance, self.m.transpose())
    }

    pub fn apply(&self, v: &SpaceVector) -> SpaceVector {
        SpaceVector(self.m * v.0)
    }

    /// Embedding into space-time with vanishing time row and column.
    pub fn embed(&self) -> Tensor2 {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&self.m);
        Tensor2::new(self.variance, m)
    }
}

pub fn time_eval(x: &WorldPoint) -> Instant {
    Instant(x.t)
}

/// The time evaluation of a four-vector, in seconds.
pub fn tau_of(v: &FourVector) -> f64 {
    v.dt
}

/// Euclidean inner product of spacelike vectors, in square meters.
pub fn euclid_dot(a: &SpaceVector, b: &SpaceVector) -> f64 {
    a.0.dot(&b.0)
}

/// Lowers a spacelike vector to a covector. The chart is orthonormal, so the
/// components are unchanged.
pub fn flat(q: &SpaceVector) -> SpaceCovector {
    SpaceCovector(q.0)
}

pub fn sharp(k: &SpaceCovector) -> SpaceVector {
    SpaceVector(k.0)
}

/// The absolute spacelike part of a covector: its restriction to spacelike
/// vectors.
pub fn restrict_covector(k: &FourCovector) -> SpaceCovector {
    SpaceCovector(k.k)
}

/// `T* - T`, the antisymmetric combination used for the wedge derivative.
pub fn antisym_space(t: &SpaceTensor2) -> SpaceTensor2 {
    SpaceTensor2::new(t.variance, t.m.transpose() - t.m)
}

/// Matrix of `q -> w x q`.
pub fn cross_matrix(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v3() -> impl Strategy<Value = Vector3<f64>> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b, c)| Vector3::new(a, b, c))
    }

    #[test]
    fn time_eval_projects_the_chart_time() {
        assert_eq!(time_eval(&WorldPoint::new(2.0, Vector3::new(1.0, 0.0, 0.0))).0, 2.0);
        assert_eq!(time_eval(&WorldPoint::new(0.0, Vector3::new(5.0, 5.0, 5.0))).0, 0.0);
        let x = WorldPoint::new(0.5, Vector3::zeros());
        let d = FourVector::new(3.0, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(time_eval(&(x + d)).0 - time_eval(&x).0, 3.0);
    }

    #[test]
    fn tau_is_the_time_increment() {
        assert_eq!(tau_of(&FourVector::new(1.0, Vector3::zeros())), 1.0);
        let s = FourVector::new(0.0, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(tau_of(&s), 0.0);
        assert!(s.as_spacelike().is_some());
        let v = FourVector::new(1.0, Vector3::new(1.0, 0.0, 0.0));
        let w = FourVector::new(2.0, Vector3::new(0.0, 1.0, 0.0));
        assert_eq!(tau_of(&(2.0 * v + (-1.0) * w)), 0.0);
    }

    #[test]
    fn euclidean_structure() {
        let ex = SpaceVector::new(1.0, 0.0, 0.0);
        assert_eq!(euclid_dot(&ex, &ex), 1.0);
        let q = SpaceVector::new(1.0, 2.0, 2.0);
        assert_eq!(euclid_dot(&q, &q), 9.0);
        assert_eq!(q.norm(), 3.0);
        assert_eq!(euclid_dot(&ex, &SpaceVector::new(0.0, 1.0, 0.0)), 0.0);
    }

    #[test]
    fn flat_and_sharp() {
        assert_eq!(flat(&SpaceVector::new(1.0, 2.0, 3.0)).0, Vector3::new(1.0, 2.0, 3.0));
        let q = SpaceVector::new(-4.0, 0.0, 7.0);
        assert_eq!(sharp(&flat(&q)), q);
        assert_eq!(flat(&SpaceVector::new(2.0, 0.0, 0.0)).apply(&SpaceVector::new(3.0, 0.0, 0.0)), 6.0);
    }

    #[test]
    fn covector_restriction() {
        let k = FourCovector::new(5.0, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(restrict_covector(&k).0, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(restrict_covector(&FourCovector::default()).0, Vector3::zeros());
        let k = FourCovector::new(1.0, Vector3::new(1.0, 1.0, 1.0));
        let q = SpaceVector::new(2.0, 0.0, 0.0);
        assert_eq!(restrict_covector(&k).apply(&q), k.apply(&q.embed()));
        assert_eq!(k.apply(&q.embed()), 2.0);
    }

    #[test]
    fn antisymmetric_part() {
        let id = SpaceTensor2::identity(Variance::Mixed);
        assert_eq!(antisym_space(&id).m, Matrix3::zeros());
        let mut m = Matrix3::zeros();
        m[(0, 1)] = 1.0;
        let a = antisym_space(&SpaceTensor2::mixed(m));
        assert_eq!(a.m[(1, 0)], 1.0);
        assert_eq!(a.m[(0, 1)], -1.0);
        assert_eq!(a.m[(0, 0)], 0.0);
    }

    #[test]
    fn mixing_variances_is_rejected() {
        let a = Tensor2::zeros(Variance::Contravariant);
        let b = Tensor2::zeros(Variance::Covariant);
        assert!(matches!(a.try_add(&b), Err(KinematicsError::VarianceMismatch { .. })));
        assert!(a.try_add(&a).is_ok());
        let s = SpaceTensor2::identity(Variance::Mixed);
        assert!(s.try_add(&SpaceTensor2::identity(Variance::Covariant)).is_err());
        assert_eq!(s.scale(2.0).variance(), Variance::Mixed);
        assert_eq!(s.transpose().variance(), Variance::Mixed);
        assert_eq!(s.embed().variance(), Variance::Mixed);
        assert_eq!(s.embed().space_block(), s);
    }

    proptest! {
        #[test]
        fn tau_linear_and_time_eval_affine(
            t in -10.0..10.0f64, q in v3(), dt1 in -5.0..5.0f64, dq1 in v3(),
            dt2 in -5.0..5.0f64, dq2 in v3(), a in -3.0..3.0f64, b in -3.0..3.0f64,
        ) {
            let v = FourVector::new(dt1, dq1);
            let w = FourVector::new(dt2, dq2);
            let lhs = tau_of(&(a * v + b * w));
            prop_assert!((lhs - (a * tau_of(&v) + b * tau_of(&w))).abs() <= 1e-12 * (1.0 + lhs.abs()));
            let x = WorldPoint::new(t, q);
            let d = time_eval(&(x + v)).0 - time_eval(&x).0;
            prop_assert!((d - tau_of(&v)).abs() <= 1e-12 * (1.0 + t.abs()));
        }

        #[test]
        fn euclid_dot_is_an_inner_product(a in v3(), b in v3(), c in v3(), s in -3.0..3.0f64) {
            let (a, b, c) = (SpaceVector(a), SpaceVector(b), SpaceVector(c));
            prop_assert_eq!(euclid_dot(&a, &b), euclid_dot(&b, &a));
            let lhs = euclid_dot(&(s * a + b), &c);
            let rhs = s * euclid_dot(&a, &c) + euclid_dot(&b, &c);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
            if a.0.norm() > 0.0 {
                prop_assert!(euclid_dot(&a, &a) > 0.0);
            }
        }

        #[test]
        fn flat_sharp_are_inverse(q in v3()) {
            prop_assert_eq!(sharp(&flat(&SpaceVector(q))).0, q);
            prop_assert_eq!(flat(&sharp(&SpaceCovector(q))).0, q);
        }

        #[test]
        fn antisym_is_antisymmetric(e in proptest::array::uniform9(-5.0..5.0f64)) {
            let t = SpaceTensor2::mixed(Matrix3::from_row_slice(&e));
            let a = antisym_space(&t);
            prop_assert_eq!(a.m + a.m.transpose(), Matrix3::zeros());
            prop_assert_eq!(a.m, -antisym_space(&t.transpose()).m);
        }
    }
}
