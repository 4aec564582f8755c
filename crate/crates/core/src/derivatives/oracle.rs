//! Lie derivatives by central differences of flow pullbacks.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::LieKind;
use crate::error::{KinematicsError, Result};
use crate::fields::{flow, Field, FieldValue, VelocityField, DEFAULT_FD_H};
use crate::spacetime::WorldPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Flow probe step `s`, seconds.
    pub s_step: f64,
    /// Integrator step, seconds.
    pub flow_step: f64,
    /// Relative finite-difference step.
    pub fd_h: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            s_step: 1e-4,
            flow_step: 1e-5,
            fd_h: DEFAULT_FD_H,
        }
    }
}

impl OracleConfig {
    pub fn new(s_step: f64, flow_step: f64, fd_h: f64) -> Result<Self> {
        let cfg = Self { s_step, flow_step, fd_h };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("s_step", self.s_step), ("flow_step", self.flow_step), ("fd_h", self.fd_h)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(KinematicsError::invalid(name, "must be positive and finite"));
            }
        }
        if self.s_step < 10.0 * self.flow_step {
            return Err(KinematicsError::invalid("s_step", "must be at least 10 * flow_step"));
        }
        Ok(())
    }
}

/// `Υ_s* f` at `x`, embedded kind.
pub fn pullback(f: &Field, u: &VelocityField, x: &WorldPoint, s: f64, flow_step: f64) -> Result<FieldValue> {
    let fl = flow(u, x, s, flow_step)?;
    let value = f.evaluate(&fl.point)?.embed();
    let kind = value.kind();
    let j = fl.jacobian.m;
    let j_inv = || {
        j.try_inverse().ok_or(KinematicsError::Integration {
            s,
            reason: "singular flow derivative".into(),
        })
    };
    let out = match LieKind::of(kind).0 {
        LieKind::Scalar => value,
        LieKind::Vector => FieldValue::from_components(kind, (j_inv()? * value.as_vector4().unwrap()).as_slice()),
        LieKind::Covector => FieldValue::from_components(kind, (j.transpose() * value.as_vector4().unwrap()).as_slice()),
        lk => {
            let m = value.as_matrix4().unwrap();
            let p: Matrix4<f64> = match lk {
                LieKind::Tensor2Con => {
                    let ji = j_inv()?;
                    ji * m * ji.transpose()
                }
                LieKind::Tensor2Cov => j.transpose() * m * j,
                _ => j_inv()? * m * j,
            };
            FieldValue::from_components(kind, p.transpose().as_slice())
        }
    };
    Ok(out)
}

/// `[Υ_s* f - Υ_{-s}* f] / 2s` with `s = cfg.s_step`.
pub fn lie_oracle(f: &Field, u: &VelocityField, x: &WorldPoint, cfg: &OracleConfig) -> Result<FieldValue> {
    cfg.validate()?;
    let s = cfg.s_step;
    let plus = pullback(f, u, x, s, cfg.flow_step)?;
    let minus = pullback(f, u, x, -s, cfg.flow_step)?;
    plus.lin_comb(0.5 / s, &minus, -0.5 / s)
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn log_log_slope(h: &[f64], err: &[f64]) -> f64 {
    let n = h.len().min(err.len()) as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivatives::lie_derivative;
    use crate::fields::{random_polynomial_field, CatalogField, FieldKind};
    use crate::spacetime::SpaceVector;
    use nalgebra::Vector3;

    #[test]
    fn config_validation() {
        assert!(OracleConfig::default().validate().is_ok());
        assert!(OracleConfig::new(1e-4, 1e-4, 1e-5).is_err());
        assert!(OracleConfig::new(-1e-4, 1e-6, 1e-5).is_err());
        assert!(OracleConfig::new(1e-4, 1e-6, 0.0).is_err());
        assert!(OracleConfig::new(f64::NAN, 1e-6, 1e-5).is_err());
    }

    #[test]
    fn shear_example() {
        let u = CatalogField::SimpleShear { kappa: 1.0 }.velocity_field().unwrap();
        let c = Field::constant(FieldValue::SpaceVector(SpaceVector::new(0.0, 1.0, 0.0)));
        let x = WorldPoint::new(0.0, Vector3::new(0.0, 1.0, 0.0));
        let o = lie_oracle(&c, &u, &x, &OracleConfig::default()).unwrap().as_vector4().unwrap();
        assert!((o - nalgebra::Vector4::new(0.0, -1.0, 0.0, 0.0)).abs().max() <= 1e-7);
    }

    #[test]
    fn constant_field_under_constant_flow() {
        let u = CatalogField::Constant { w0: [0.4, -0.1, 0.2] }.velocity_field().unwrap();
        let x = WorldPoint::new(0.3, Vector3::new(0.1, 0.2, 0.3));
        for kind in FieldKind::ALL {
            let f = Field::constant(random_polynomial_field(kind, 1).into_field().evaluate(&x).unwrap());
            let o = lie_oracle(&f, &u, &x, &OracleConfig::default()).unwrap();
            assert!(o.max_abs() <= 1e-9, "{kind:?}");
        }
    }

    #[test]
    fn matches_closed_form_for_every_kind() {
        let u = CatalogField::PlanarVortex { omega0: 1.0, ell: 1.0 }.velocity_field().unwrap();
        let x = WorldPoint::new(0.4, Vector3::new(0.3, -0.6, 0.2));
        for kind in FieldKind::ALL {
            let f = random_polynomial_field(kind, 42).into_field();
            let o = lie_oracle(&f, &u, &x, &OracleConfig::default()).unwrap();
            let l = lie_derivative(&f, &u, &x).unwrap();
            assert!(o.max_abs_diff(&l) <= 1e-6, "{kind:?}: {}", o.max_abs_diff(&l));
        }
    }

    #[test]
    fn second_order_convergence() {
        let u = CatalogField::PlanarVortex { omega0: 1.0, ell: 1.0 }.velocity_field().unwrap();
        let x = WorldPoint::new(0.4, Vector3::new(0.3, -0.6, 0.2));
        let f = random_polynomial_field(FieldKind::Tensor2Mix, 4).into_field();
        let exact = lie_derivative(&f, &u, &x).unwrap();
        let hs = [1e-1, 3e-2, 1e-2];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&s| {
                let cfg = OracleConfig::new(s, 1e-4, 1e-5).unwrap();
                lie_oracle(&f, &u, &x, &cfg).unwrap().max_abs_diff(&exact)
            })
            .collect();
        let slope = log_log_slope(&hs, &errs);
        assert!((slope - 2.0).abs() <= 0.1, "{slope} {errs:?}");
    }

    #[test]
    fn slope_of_power_law() {
        let h = [1.0, 0.1, 0.01];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
        assert!((log_log_slope(&h, &e) - 2.0).abs() < 1e-12);
    }
}
