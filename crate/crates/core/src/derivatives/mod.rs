//! Material and Lie derivatives along a continuum, in closed form and by
//! flow pullback.
//!
//! The chart is inertial, so the closed forms are the component formulas
//! with plain chart partials; no connection terms appear. Spacelike inputs
//! are embedded into space-time first, and their Lie derivatives come back
//! as four-dimensional objects because they need not stay spacelike.

mod checks;
mod oracle;
mod relative;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{KinematicsError, Result};
use crate::fields::{Field, FieldKind, FieldValue, VelocityField};
use crate::spacetime::{SpaceVector, WorldPoint};

pub use checks::{deformation_lie_check, jaumann_corotating_check};
pub use oracle::{lie_oracle, log_log_slope, pullback, OracleConfig};
pub use relative::{
    fd_partials_matrix, fd_partials_vector, jaumann_rel, lower_convected_rel, lower_convected_tensor_rel,
    lower_convected_tensor_time_block_rel, material_rel, mixed_convected_tensor_rel, mixed_convected_time_block_rel,
    relative_space_block, relative_space_part, relative_velocity, upper_convected_rel, upper_convected_tensor_rel,
    MatrixPartials, RelativeMatrixField, RelativeVectorField, VectorPartials,
};

/// The tensor kinds that have a Lie derivative formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LieKind {
    Scalar,
    Vector,
    Covector,
    Tensor2Con,
    Tensor2Cov,
    Tensor2Mix,
}

impl LieKind {
    pub const ALL: [LieKind; 6] = [
        LieKind::Scalar,
        LieKind::Vector,
        LieKind::Covector,
        LieKind::Tensor2Con,
        LieKind::Tensor2Cov,
        LieKind::Tensor2Mix,
    ];

    /// The Lie kind of a field kind and whether the field is spacelike.
    pub fn of(kind: FieldKind) -> (LieKind, bool) {
        let lk = match kind.embedded() {
            FieldKind::Scalar => LieKind::Scalar,
            FieldKind::FourVector => LieKind::Vector,
            FieldKind::FourCovector => LieKind::Covector,
            FieldKind::Tensor2Con => LieKind::Tensor2Con,
            FieldKind::Tensor2Cov => LieKind::Tensor2Cov,
            _ => LieKind::Tensor2Mix,
        };
        (lk, kind.is_spacelike())
    }

    pub fn field_kind(self, spacelike: bool) -> FieldKind {
        match (self, spacelike) {
            (LieKind::Scalar, _) => FieldKind::Scalar,
            (LieKind::Vector, false) => FieldKind::FourVector,
            (LieKind::Vector, true) => FieldKind::SpaceVector,
            (LieKind::Covector, false) => FieldKind::FourCovector,
            (LieKind::Covector, true) => FieldKind::SpaceCovector,
            (LieKind::Tensor2Con, false) => FieldKind::Tensor2Con,
            (LieKind::Tensor2Con, true) => FieldKind::SpaceTensor2Con,
            (LieKind::Tensor2Cov, false) => FieldKind::Tensor2Cov,
            (LieKind::Tensor2Cov, true) => FieldKind::SpaceTensor2Cov,
            (LieKind::Tensor2Mix, false) => FieldKind::Tensor2Mix,
            (LieKind::Tensor2Mix, true) => FieldKind::SpaceTensor2Mix,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LieKind::Scalar => "scalar",
            LieKind::Vector => "vector",
            LieKind::Covector => "covector",
            LieKind::Tensor2Con => "tensor2_con",
            LieKind::Tensor2Cov => "tensor2_cov",
            LieKind::Tensor2Mix => "tensor2_mix",
        }
    }
}

/// `D_u A = (DA)·u` at `x`; same kind as `f`.
pub fn material_derivative(f: &Field, u: &VelocityField, x: &WorldPoint) -> Result<FieldValue> {
    let d = f.derivative(x)?;
    Ok(d.directional(&u.velocity(x)?))
}

struct LieInputs {
    /// embedded value
    value: FieldValue,
    /// embedded chart partials
    partials: [FieldValue; 4],
    /// `u^g`
    u: Vector4<f64>,
    /// `du[(a, g)] = d_g u^a`
    du: Matrix4<f64>,
}

fn lie_inputs(f: &Field, u: &VelocityField, x: &WorldPoint) -> Result<LieInputs> {
    let value = f.evaluate(x)?.embed();
    let d = f.derivative(x)?;
    Ok(LieInputs {
        value,
        partials: d.partials.map(|p| p.embed()),
        u: u.velocity(x)?.components(),
        du: u.derivative(x)?.m,
    })
}

fn transport(inp: &LieInputs) -> [f64; 16] {
    let n = inp.value.kind().len();
    let mut out = [0.0; 16];
    for g in 0..4 {
        let c = inp.partials[g].components();
        for i in 0..n {
            out[i] += inp.u[g] * c[i];
        }
    }
    out
}

/// Closed-form Lie derivative `L_u f` at `x`, by the component formulas:
///
/// * vector: `u^g d_g C^a - C^b d_b u^a`
/// * covector: `u^g d_g K_a + K_b d_a u^b`
/// * contravariant: `u^g d_g T^ab - T^cb d_c u^a - T^ac d_c u^b`
/// * covariant: `u^g d_g W_ab + W_cb d_a u^c + W_ac d_b u^c`
/// * mixed: `u^g d_g A^a_b - d_c u^a A^c_b + d_b u^c A^a_c`
///
/// Scalars give the material derivative.
pub fn lie_derivative(f: &Field, u: &VelocityField, x: &WorldPoint) -> Result<FieldValue> {
    let inp = lie_inputs(f, u, x)?;
    let kind = inp.value.kind();
    let du = |a: usize, g: usize| inp.du[(a, g)];
    let mut out = transport(&inp);
    let c = inp.value.components();
    match LieKind::of(kind).0 {
        LieKind::Scalar => {}
        LieKind::Vector => {
            for a in 0..4 {
                for b in 0..4 {
                    out[a] -= c[b] * du(a, b);
                }
            }
        }
        LieKind::Covector => {
            for a in 0..4 {
                for b in 0..4 {
                    out[a] += c[b] * du(b, a);
                }
            }
        }
        LieKind::Tensor2Con => {
            let t = |a: usize, b: usize| c[4 * a + b];
            for a in 0..4 {
                for b in 0..4 {
                    for k in 0..4 {
                        out[4 * a + b] -= t(k, b) * du(a, k) + t(a, k) * du(b, k);
                    }
                }
            }
        }
        LieKind::Tensor2Cov => {
            let w = |a: usize, b: usize| c[4 * a + b];
            for a in 0..4 {
                for b in 0..4 {
                    for k in 0..4 {
                        out[4 * a + b] += w(k, b) * du(k, a) + w(a, k) * du(k, b);
                    }
                }
            }
        }
        LieKind::Tensor2Mix => {
            let m = |a: usize, b: usize| c[4 * a + b];
            for a in 0..4 {
                for b in 0..4 {
                    for k in 0..4 {
                        out[4 * a + b] += -du(a, k) * m(k, b) + du(k, b) * m(a, k);
                    }
                }
            }
        }
    }
    Ok(FieldValue::from_components(kind, &out))
}

/// The non-transport terms of the Lie derivative, `L_u f - D_u f`, written
/// with matrix products (`-Du C`, `Duᵀ K`, `-Du T - T Duᵀ`, `Duᵀ W + W Du`,
/// `-Du A + A Du`).
pub fn lie_correction(f: &Field, u: &VelocityField, x: &WorldPoint) -> Result<FieldValue> {
    let value = f.evaluate(x)?.embed();
    let du = u.derivative(x)?.m;
    let kind = value.kind();
    let out = match LieKind::of(kind).0 {
        LieKind::Scalar => FieldValue::Scalar(0.0),
        LieKind::Vector => {
            let c = value.as_vector4().expect("vector kind");
            FieldValue::from_components(kind, (-(du * c)).as_slice())
        }
        LieKind::Covector => {
            let k = value.as_vector4().expect("covector kind");
            FieldValue::from_components(kind, (du.transpose() * k).as_slice())
        }
        LieKind::Tensor2Con | LieKind::Tensor2Cov | LieKind::Tensor2Mix => {
            let t = value.as_matrix4().expect("tensor kind");
            let m = match LieKind::of(kind).0 {
                LieKind::Tensor2Con => -(du * t) - t * du.transpose(),
                LieKind::Tensor2Cov => du.transpose() * t + t * du,
                _ => -(du * t) + t * du,
            };
            FieldValue::from_components(kind, m.transpose().as_slice())
        }
    };
    Ok(out)
}

/// Jaumann derivative of a spacelike vector field,
/// `D_u c + 1/2 (wedge u) c`.
pub fn jaumann_derivative(c: &Field, u: &VelocityField, x: &WorldPoint) -> Result<SpaceVector> {
    let dc = material_derivative(c, u, x)?
        .as_space_vector()
        .ok_or(KinematicsError::KindMismatch {
            expected: FieldKind::SpaceVector,
            found: c.kind(),
        })?;
    let cv = c.evaluate(x)?.as_space_vector().expect("checked above");
    let w = u.wedge(x)?;
    Ok(SpaceVector(dc.0 + 0.5 * (w.m * cv.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{random_polynomial_field, CatalogField};
    use crate::spacetime::{flat, sharp, FourCovector, SpaceCovector, SpaceTensor2, Variance};
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix3, Vector3};

    fn p(t: f64, x: f64, y: f64, z: f64) -> WorldPoint {
        WorldPoint::new(t, Vector3::new(x, y, z))
    }

    fn shear() -> VelocityField {
        CatalogField::SimpleShear { kappa: 1.0 }.velocity_field().unwrap()
    }

    fn all_catalog() -> Vec<VelocityField> {
        [
            CatalogField::Constant { w0: [0.3, -0.2, 0.1] },
            CatalogField::RigidRotation { omega0: 1.0 },
            CatalogField::SimpleShear { kappa: 1.0 },
            CatalogField::TimeRampedShear { a: 1.0 },
            CatalogField::PlanarVortex { omega0: 1.0, ell: 1.0 },
            CatalogField::UniformExpansion { alpha: 0.5 },
        ]
        .iter()
        .map(|c| c.velocity_field().unwrap())
        .collect()
    }

    #[test]
    fn material_derivative_examples() {
        let fx = Field::new(FieldKind::Scalar, |x| FieldValue::Scalar(x.q.x));
        let d = material_derivative(&fx, &shear(), &p(0.0, 0.0, 2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d.as_scalar().unwrap(), 2.0, epsilon = 1e-9);
        let k = Field::constant(FieldValue::Scalar(4.0));
        for u in all_catalog() {
            assert_eq!(material_derivative(&k, &u, &p(0.3, 0.1, 0.2, 0.3)).unwrap(), FieldValue::Scalar(0.0));
        }
        let c = Field::constant(FieldValue::SpaceVector(SpaceVector::new(1.0, 2.0, 3.0)));
        let w = CatalogField::Constant { w0: [1.0, 0.0, 0.0] }.velocity_field().unwrap();
        assert_eq!(material_derivative(&c, &w, &p(0.0, 0.0, 0.0, 0.0)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn lie_of_velocity_vanishes() {
        let x = p(0.7, 0.4, -1.1, 0.6);
        for u in all_catalog() {
            let l = lie_derivative(&u.as_field(), &u, &x).unwrap();
            assert!(l.max_abs() <= 1e-12, "{}", u.name());
        }
    }

    #[test]
    fn shear_examples() {
        let x = p(0.0, 0.0, 1.0, 0.0);
        let ey = Field::constant(FieldValue::SpaceVector(SpaceVector::new(0.0, 1.0, 0.0)));
        let l = lie_derivative(&ey, &shear(), &x).unwrap();
        assert_eq!(l, FieldValue::FourVector(crate::spacetime::FourVector::new(0.0, Vector3::new(-1.0, 0.0, 0.0))));

        let ex = Field::constant(FieldValue::SpaceCovector(SpaceCovector(Vector3::x())));
        let l = lie_derivative(&ex, &shear(), &x).unwrap();
        assert_eq!(l, FieldValue::FourCovector(FourCovector::new(0.0, Vector3::new(0.0, 1.0, 0.0))));

        let ramp = CatalogField::TimeRampedShear { a: 1.0 }.velocity_field().unwrap();
        let l = lie_derivative(&ex, &ramp, &p(0.5, 0.2, 0.1, 0.0)).unwrap();
        assert_eq!(l, FieldValue::FourCovector(FourCovector::new(1.0, Vector3::zeros())));

        let id = Field::constant(FieldValue::SpaceTensor2(SpaceTensor2::identity(Variance::Contravariant)));
        let l = lie_derivative(&id, &shear(), &x).unwrap();
        let block = match l {
            FieldValue::Tensor2(t) => t.space_block().m,
            _ => unreachable!(),
        };
        assert_eq!(block, Matrix3::new(0.0, -1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn correction_terms_complete_the_material_derivative() {
        let u = CatalogField::PlanarVortex { omega0: 1.0, ell: 1.0 }.velocity_field().unwrap();
        let x = p(0.4, 0.3, -0.5, 0.2);
        for kind in FieldKind::ALL {
            let f = random_polynomial_field(kind, 5).into_field();
            let lie = lie_derivative(&f, &u, &x).unwrap();
            let mat = material_derivative(&f, &u, &x).unwrap().embed();
            let corr = lie_correction(&f, &u, &x).unwrap();
            let sum = mat.lin_comb(1.0, &corr, 1.0).unwrap();
            assert!(lie.max_abs_diff(&sum) <= 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn scalar_lie_is_material() {
        let f = random_polynomial_field(FieldKind::Scalar, 9).into_field();
        let u = shear();
        let x = p(1.0, 0.5, 0.5, -0.5);
        assert_eq!(lie_derivative(&f, &u, &x).unwrap(), material_derivative(&f, &u, &x).unwrap());
    }

    #[test]
    fn jaumann_examples() {
        let rot = CatalogField::RigidRotation { omega0: 1.0 }.velocity_field().unwrap();
        let ex = Field::constant(FieldValue::SpaceVector(SpaceVector::new(1.0, 0.0, 0.0)));
        let j = jaumann_derivative(&ex, &rot, &p(0.2, 0.3, 0.4, 0.5)).unwrap();
        assert_abs_diff_eq!(j.0, Vector3::new(0.0, -1.0, 0.0), epsilon = 1e-15);

        // average of the upper and the lowered lower convected derivative
        let c = random_polynomial_field(FieldKind::SpaceVector, 21).into_field();
        let cf = c.clone();
        let lowered = Field::new(FieldKind::SpaceCovector, move |x| {
            FieldValue::SpaceCovector(flat(&cf.evaluate(x).unwrap().as_space_vector().unwrap()))
        });
        let x = p(0.6, -0.4, 1.2, 0.3);
        let up = lie_derivative(&c, &shear(), &x).unwrap().as_vector4().unwrap();
        let lo = lie_derivative(&lowered, &shear(), &x).unwrap().as_vector4().unwrap();
        let lo_sharp = sharp(&SpaceCovector(Vector3::new(lo[1], lo[2], lo[3])));
        let avg = 0.5 * (Vector3::new(up[1], up[2], up[3]) + lo_sharp.0);
        let j = jaumann_derivative(&c, &shear(), &x).unwrap();
        assert_abs_diff_eq!(j.0, avg, epsilon = 1e-7);
    }

    #[test]
    fn lie_kind_mapping() {
        for kind in FieldKind::ALL {
            let (lk, spacelike) = LieKind::of(kind);
            assert_eq!(lk.field_kind(spacelike), kind);
        }
    }
}
