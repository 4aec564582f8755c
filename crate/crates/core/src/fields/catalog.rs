//! Analytic velocity fields with exact jacobians.
//!
//! All fields are total on the chart. `uniform_expansion` grows
//! exponentially along its flow and `time_ramped_shear` grows linearly in
//! time, so long flows of those two should stay inside bounded test boxes.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{SpatialJacobian, VelocityField};
use crate::error::{KinematicsError, Result};
use crate::spacetime::cross_matrix;

/// A named analytic velocity field with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogField {
    /// `v = w0`
    Constant {
        #[serde(default)]
        w0: [f64; 3],
    },
    /// `v = omega0 e_z x q`
    RigidRotation { omega0: f64 },
    /// `v = kappa q_y e_x`
    SimpleShear { kappa: f64 },
    /// `v = a t e_x`
    TimeRampedShear { a: f64 },
    /// `v = omega0 e_z x q exp(-|q|^2 / ell^2)`
    PlanarVortex { omega0: f64, ell: f64 },
    /// `v = alpha q`
    UniformExpansion { alpha: f64 },
}

impl CatalogField {
    pub const NAMES: [&'static str; 6] = [
        "constant",
        "rigid_rotation",
        "simple_shear",
        "time_ramped_shear",
        "planar_vortex",
        "uniform_expansion",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CatalogField::Constant { .. } => "constant",
            CatalogField::RigidRotation { .. } => "rigid_rotation",
            CatalogField::SimpleShear { .. } => "simple_shear",
            CatalogField::TimeRampedShear { .. } => "time_ramped_shear",
            CatalogField::PlanarVortex { .. } => "planar_vortex",
            CatalogField::UniformExpansion { .. } => "uniform_expansion",
        }
    }

    /// Whether the spatial velocity is divergence free.
    pub fn is_incompressible(&self) -> bool {
        matches!(
            self,
            CatalogField::RigidRotation { .. }
                | CatalogField::SimpleShear { .. }
                | CatalogField::PlanarVortex { .. }
                | CatalogField::Constant { .. }
                | CatalogField::TimeRampedShear { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(KinematicsError::invalid(name, "must be finite"))
            }
        };
        match *self {
            CatalogField::Constant { w0 } => w0.iter().try_for_each(|&c| finite("w0", c)),
            CatalogField::RigidRotation { omega0 } => finite("omega0", omega0),
            CatalogField::SimpleShear { kappa } => finite("kappa", kappa),
            CatalogField::TimeRampedShear { a } => finite("a", a),
            CatalogField::UniformExpansion { alpha } => finite("alpha", alpha),
            CatalogField::PlanarVortex { omega0, ell } => {
                finite("omega0", omega0)?;
                finite("ell", ell)?;
                if ell <= 0.0 {
                    return Err(KinematicsError::invalid("ell", "must be positive"));
                }
                Ok(())
            }
        }
    }

    pub fn velocity_field(&self) -> Result<VelocityField> {
        self.validate()?;
        let name = self.name();
        let field = match *self {
            CatalogField::Constant { w0 } => {
                let w = Vector3::from(w0);
                VelocityField::new(name, move |_, _| w).with_jacobian(|_, _| SpatialJacobian {
                    dt: Vector3::zeros(),
                    grad: Matrix3::zeros(),
                })
            }
            CatalogField::RigidRotation { omega0 } => {
                let a = cross_matrix(&Vector3::new(0.0, 0.0, omega0));
                VelocityField::new(name, move |_, q| a * q).with_jacobian(move |_, _| SpatialJacobian {
                    dt: Vector3::zeros(),
                    grad: a,
                })
            }
            CatalogField::SimpleShear { kappa } => {
                let mut grad = Matrix3::zeros();
                grad[(0, 1)] = kappa;
                VelocityField::new(name, move |_, q| Vector3::new(kappa * q.y, 0.0, 0.0))
                    .with_jacobian(move |_, _| SpatialJacobian { dt: Vector3::zeros(), grad })
            }
            CatalogField::TimeRampedShear { a } => VelocityField::new(name, move |t, _| Vector3::new(a * t, 0.0, 0.0))
                .with_jacobian(move |_, _| SpatialJacobian {
                    dt: Vector3::new(a, 0.0, 0.0),
                    grad: Matrix3::zeros(),
                }),
            CatalogField::PlanarVortex { omega0, ell } => {
                let a = cross_matrix(&Vector3::new(0.0, 0.0, omega0));
                let inv_l2 = 1.0 / (ell * ell);
                VelocityField::new(name, move |_, q| a * q * (-q.norm_squared() * inv_l2).exp()).with_jacobian(
                    move |_, q| {
                        let g = (-q.norm_squared() * inv_l2).exp();
                        let grad_g = q * (-2.0 * inv_l2 * g);
                        SpatialJacobian {
                            dt: Vector3::zeros(),
                            grad: a * g + (a * q) * grad_g.transpose(),
                        }
                    },
                )
            }
            CatalogField::UniformExpansion { alpha } => VelocityField::new(name, move |_, q| alpha * q)
                .with_jacobian(move |_, _| SpatialJacobian {
                    dt: Vector3::zeros(),
                    grad: Matrix3::identity() * alpha,
                }),
        };
        Ok(field)
    }
}

/// Looks up a catalog field by name with scalar parameters. The constant
/// field takes `w0_x`, `w0_y`, `w0_z` (each defaulting to 0).
pub fn catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<VelocityField> {
    let mut used = Vec::new();
    let mut get = |key: &'static str| -> Result<f64> {
        used.push(key);
        params
            .get(key)
            .copied()
            .ok_or_else(|| KinematicsError::invalid(key, "missing"))
    };
    let spec = match name {
        "constant" => {
            let mut w0 = [0.0; 3];
            for (i, key) in ["w0_x", "w0_y", "w0_z"].into_iter().enumerate() {
                w0[i] = get(key).unwrap_or(0.0);
            }
            CatalogField::Constant { w0 }
        }
        "rigid_rotation" => CatalogField::RigidRotation { omega0: get("omega0")? },
        "simple_shear" => CatalogField::SimpleShear { kappa: get("kappa")? },
        "time_ramped_shear" => CatalogField::TimeRampedShear { a: get("a")? },
        "planar_vortex" => CatalogField::PlanarVortex {
            omega0: get("omega0")?,
            ell: get("ell")?,
        },
        "uniform_expansion" => CatalogField::UniformExpansion { alpha: get("alpha")? },
        other => return Err(KinematicsError::UnknownField(other.to_string())),
    };
    if let Some(extra) = params.keys().find(|k| !used.contains(&k.as_str())) {
        return Err(KinematicsError::invalid(extra, format!("not a parameter of `{name}`")));
    }
    spec.velocity_field()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::WorldPoint;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    pub(crate) fn all_fields() -> Vec<CatalogField> {
        vec![
            CatalogField::Constant { w0: [0.3, -0.2, 0.1] },
            CatalogField::RigidRotation { omega0: 1.0 },
            CatalogField::SimpleShear { kappa: 1.0 },
            CatalogField::TimeRampedShear { a: 1.0 },
            CatalogField::PlanarVortex { omega0: 1.0, ell: 1.0 },
            CatalogField::UniformExpansion { alpha: 0.5 },
        ]
    }

    #[test]
    fn catalog_examples() {
        let u = catalog("constant", &params(&[])).unwrap();
        assert_eq!(u.spatial(3.0, &Vector3::new(1.0, 2.0, 3.0)).unwrap(), Vector3::zeros());
        let u = catalog("rigid_rotation", &params(&[("omega0", 1.0)])).unwrap();
        assert_eq!(u.spatial(0.0, &Vector3::new(1.0, 0.0, 0.0)).unwrap(), Vector3::new(0.0, 1.0, 0.0));
        let u = catalog("simple_shear", &params(&[("kappa", 1.0)])).unwrap();
        assert_eq!(u.spatial(0.0, &Vector3::new(0.0, 2.0, 0.0)).unwrap(), Vector3::new(2.0, 0.0, 0.0));
        let x = WorldPoint::new(0.0, Vector3::new(0.0, 2.0, 0.0));
        assert_eq!(u.velocity(&x).unwrap().dt, 1.0);
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(catalog("swirl", &params(&[])), Err(KinematicsError::UnknownField(_))));
        assert!(matches!(
            catalog("planar_vortex", &params(&[("omega0", 1.0), ("ell", 0.0)])),
            Err(KinematicsError::InvalidParameter { .. })
        ));
        assert!(catalog("simple_shear", &params(&[])).is_err());
        assert!(catalog("simple_shear", &params(&[("kappa", 1.0), ("omega0", 1.0)])).is_err());
        assert!(CatalogField::SimpleShear { kappa: f64::NAN }.velocity_field().is_err());
    }

    #[test]
    fn serde_uses_the_name_tag() {
        let f: CatalogField = serde_json::from_str(r#"{"name":"planar_vortex","omega0":1.0,"ell":2.0}"#).unwrap();
        assert_eq!(f, CatalogField::PlanarVortex { omega0: 1.0, ell: 2.0 });
        let f: CatalogField = serde_json::from_str(r#"{"name":"constant"}"#).unwrap();
        assert_eq!(f, CatalogField::Constant { w0: [0.0; 3] });
        assert!(serde_json::from_str::<CatalogField>(r#"{"name":"simple_shear","kappa":1,"x":2}"#).is_err());
        assert!(serde_json::from_str::<CatalogField>(r#"{"name":"swirl"}"#).is_err());
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in all_fields() {
            let u = spec.velocity_field().unwrap();
            for _ in 0..100 {
                let t = rng.gen_range(0.0..2.0);
                let q = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
                let a = u.spatial_jacobian(t, &q).unwrap();
                let f = u.fd_spatial_jacobian(t, &q).unwrap();
                assert_abs_diff_eq!(a.dt, f.dt, epsilon = 1e-7);
                assert_abs_diff_eq!(a.grad, f.grad, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn incompressible_fields_are_divergence_free() {
        let q = Vector3::new(0.3, -0.9, 0.4);
        for spec in all_fields().into_iter().filter(|f| f.is_incompressible()) {
            let jac = spec.velocity_field().unwrap().spatial_jacobian(0.5, &q).unwrap();
            assert_abs_diff_eq!(jac.grad.trace(), 0.0, epsilon = 1e-14);
        }
        assert!(!CatalogField::UniformExpansion { alpha: 0.1 }.is_incompressible());
    }
}
