//! The invariant suite. Each check samples seeded points, reduces to one
//! maximum residual, and passes when that residual is within tolerance.

use std::collections::BTreeMap;
use std::time::Instant as Clock;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use stk_core::derivatives::{
    deformation_lie_check, fd_partials_vector, jaumann_corotating_check, jaumann_derivative, lie_correction,
    lie_derivative, lie_oracle, log_log_slope, lower_convected_rel, lower_convected_tensor_rel,
    material_derivative, material_rel, mixed_convected_tensor_rel, mixed_convected_time_block_rel,
    relative_space_block, relative_space_part, relative_velocity, upper_convected_rel, upper_convected_tensor_rel,
    OracleConfig,
};
use stk_core::fields::{
    deformation_gradient, flow, flow_point, random_polynomial_field, CatalogField, Field, FieldKind, FieldValue,
    PolynomialField, VelocityField,
};
use stk_core::observers::{ObserverOptions, RigidObserver};
use stk_core::spacetime::{sharp, SpaceCovector};
use stk_core::{Instant, SpaceVector, WorldPoint};

use crate::error::{HarnessError, Result};
use crate::report::CheckReport;

/// Seed shared by every check; each check derives its own stream from it.
pub const SUITE_SEED: u64 = 20_240_901;

type Residual = stk_core::Result<(usize, f64)>;

pub struct Check {
    pub id: &'static str,
    pub tolerance: f64,
    pub description: &'static str,
    run: fn(&mut ChaCha8Rng) -> Residual,
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    // NaN propagates so that a broken evaluation cannot pass
    it.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

fn catalog_all() -> Vec<(CatalogField, VelocityField)> {
    [
        CatalogField::Constant { w0: [0.3, -0.2, 0.1] },
        CatalogField::RigidRotation { omega0: 1.0 },
        CatalogField::SimpleShear { kappa: 1.0 },
        CatalogField::TimeRampedShear { a: 1.0 },
        CatalogField::PlanarVortex { omega0: 1.0, ell: 1.0 },
        CatalogField::UniformExpansion { alpha: 0.5 },
    ]
    .into_iter()
    .map(|c| (c, c.velocity_field().expect("catalog parameters are valid")))
    .collect()
}

fn catalog_flows() -> Vec<VelocityField> {
    catalog_all()
        .into_iter()
        .filter(|(c, _)| {
            matches!(
                c,
                CatalogField::RigidRotation { .. }
                    | CatalogField::SimpleShear { .. }
                    | CatalogField::TimeRampedShear { .. }
                    | CatalogField::PlanarVortex { .. }
            )
        })
        .map(|(_, u)| u)
        .collect()
}

fn field(c: CatalogField) -> VelocityField {
    c.velocity_field().expect("catalog parameters are valid")
}

fn random_q(rng: &mut ChaCha8Rng, half: f64) -> Vector3<f64> {
    Vector3::from_fn(|_, _| rng.gen_range(-half..half))
}

fn random_point(rng: &mut ChaCha8Rng) -> WorldPoint {
    WorldPoint::new(rng.gen_range(0.0..2.0), random_q(rng, 2.0))
}

fn inertial() -> RigidObserver {
    RigidObserver::inertial(Vector3::new(0.3, -0.2, 0.1), WorldPoint::new(0.0, Vector3::new(0.5, 0.0, -0.5)))
}

fn rotating() -> RigidObserver {
    RigidObserver::rotating_about(
        Vector3::new(0.2, 0.3, 1.0).normalize(),
        1.0,
        WorldPoint::new(0.0, Vector3::new(0.2, -0.1, 0.3)),
        &ObserverOptions::default(),
    )
    .expect("rotating observer builds")
}

fn observers() -> [RigidObserver; 2] {
    [inertial(), rotating()]
}

fn vec3_diff(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    (a - b).abs().max()
}

fn space(v: &Vector4<f64>) -> Vector3<f64> {
    Vector3::new(v[1], v[2], v[3])
}

// ---- observers ----

fn split_roundtrip(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let n = 100;
    for obs in observers() {
        for _ in 0..n {
            let t = rng.gen_range(0.0..10.0);
            let q = SpaceVector(random_q(rng, 2.0));
            let x = obs.unsplit(Instant(t), &q);
            let (t2, q2) = obs.split(&x);
            worst = worst.max((t2.0 - t).abs()).max(vec3_diff(&q2.0, &q.0));
            let y = WorldPoint::new(t, random_q(rng, 2.0));
            let back = obs.unsplit(obs.split(&y).0, &obs.split(&y).1);
            worst = worst.max((back.t - y.t).abs()).max(vec3_diff(&back.q, &y.q));
        }
    }
    Ok((2 * n, worst))
}

fn dhp_identity(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let n = 100;
    for obs in observers() {
        for _ in 0..n {
            let t = rng.gen_range(0.0..10.0);
            let q = SpaceVector(random_q(rng, 2.0));
            let x = obs.unsplit(Instant(t), &q);
            let m = obs.split_jacobian(&x) * obs.unsplit_jacobian(Instant(t), &q);
            worst = worst.max((m - Matrix4::identity()).abs().max());
        }
    }
    Ok((2 * n, worst))
}

fn rotation_orthogonality(_: &mut ChaCha8Rng) -> Residual {
    let obs = rotating();
    let n = 10_001;
    let worst = max_abs((0..n).map(|k| {
        let r = obs.rotation(Instant(k as f64 * 1e-3)).m;
        (r.transpose() * r - Matrix3::identity()).abs().max()
    }));
    Ok((n, worst))
}

fn rigidity(rng: &mut ChaCha8Rng) -> Residual {
    let obs = rotating();
    let pairs = 20;
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let a = SpaceVector(random_q(rng, 2.0));
        let b = SpaceVector(random_q(rng, 2.0));
        let d0 = (a.0 - b.0).norm();
        for k in 0..=100 {
            let t = Instant(k as f64 * 0.1);
            let d = (obs.unsplit(t, &a).q - obs.unsplit(t, &b).q).norm();
            worst = worst.max((d - d0).abs());
        }
    }
    Ok((pairs, worst))
}

fn angular_velocity(rng: &mut ChaCha8Rng) -> Residual {
    let obs = rotating();
    let field = obs.velocity_field();
    let n = 50;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let t = rng.gen_range(0.0..10.0);
        let x = WorldPoint::new(t, random_q(rng, 2.0));
        let omega = obs.omega(Instant(t)).m;
        let grad = field.fd_spatial_jacobian(t, &x.q)?.grad;
        worst = worst.max((grad - omega).abs().max());
        let q = random_q(rng, 1.0);
        let du = obs.velocity_at(&WorldPoint::new(t, x.q + q)).dq - obs.velocity_at(&x).dq;
        worst = worst.max(vec3_diff(&du, &(omega * q)));
    }
    Ok((n, worst))
}

fn velocity_gradient_split(rng: &mut ChaCha8Rng) -> Residual {
    let obs = rotating();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        let v_u = relative_velocity(&obs, &u);
        for _ in 0..10 {
            let t = rng.gen_range(0.0..10.0);
            let q = random_q(rng, 2.0);
            let grad = fd_partials_vector(&v_u, t, &q, 1e-5)?.grad;
            let x = obs.unsplit(Instant(t), &SpaceVector(q));
            let r = obs.rotation(Instant(t)).m;
            let nabla_u = r.transpose() * u.spatial_gradient(&x)?.m * r;
            worst = worst.max((nabla_u - grad - obs.omega_rel(Instant(t)).m).abs().max());
            count += 1;
        }
    }
    Ok((count, worst))
}

fn vector_gradient_split(rng: &mut ChaCha8Rng) -> Residual {
    let obs = rotating();
    let c = random_polynomial_field(FieldKind::SpaceVector, rng.gen()).into_field();
    let c_u = relative_space_part(&obs, &c)?;
    let n = 50;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let t = rng.gen_range(0.0..2.0);
        let q = random_q(rng, 1.0);
        let p = fd_partials_vector(&c_u, t, &q, 1e-5)?;
        let x = obs.unsplit(Instant(t), &SpaceVector(q));
        let dc = c.derivative(&x)?.as_tensor2().expect("vector kind").m;
        let r = obs.rotation(Instant(t)).m;
        let split = r.transpose() * dc.fixed_view::<3, 4>(1, 0) * obs.unsplit_jacobian(Instant(t), &SpaceVector(q));
        let time = split.column(0).into_owned();
        let grad = split.fixed_view::<3, 3>(0, 1).into_owned();
        worst = worst
            .max(vec3_diff(&time, &(p.dt + obs.omega_rel(Instant(t)).m * p.value)))
            .max((grad - p.grad).abs().max());
    }
    Ok((n, worst))
}

// ---- fields ----

fn catalog_jacobian(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        for _ in 0..100 {
            let x = random_point(rng);
            let a = u.spatial_jacobian(x.t, &x.q)?;
            let f = u.fd_spatial_jacobian(x.t, &x.q)?;
            worst = worst.max(vec3_diff(&a.dt, &f.dt)).max((a.grad - f.grad).abs().max());
            count += 1;
        }
    }
    Ok((count, worst))
}

fn flow_semigroup(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        for _ in 0..3 {
            let x = random_point(rng);
            for (s, r) in [(0.1, 0.1), (0.1, 0.3), (0.3, 0.1), (0.3, 0.3)] {
                let direct = flow_point(&u, &x, s + r, 1e-3)?;
                let composed = flow_point(&u, &flow_point(&u, &x, r, 1e-3)?, s, 1e-3)?;
                worst = worst.max(vec3_diff(&direct.q, &composed.q));
            }
            count += 1;
        }
    }
    Ok((count, worst))
}

fn flow_jacobian(rng: &mut ChaCha8Rng) -> Residual {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        for _ in 0..3 {
            let x = random_point(rng);
            let jac = flow(&u, &x, 0.5, 1e-3)?.jacobian.m;
            for c in 0..4 {
                let mut e = Vector4::zeros();
                e[c] = h;
                let p = flow_point(&u, &WorldPoint::from_coords(x.coords() + e), 0.5, 1e-3)?.coords();
                let m = flow_point(&u, &WorldPoint::from_coords(x.coords() - e), 0.5, 1e-3)?.coords();
                worst = worst.max(((p - m) / (2.0 * h) - jac.column(c)).abs().max());
            }
            count += 1;
        }
    }
    Ok((count, worst))
}

fn flow_time_exact(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        for _ in 0..5 {
            let x = random_point(rng);
            let s = rng.gen_range(-1.0..1.0);
            let fl = flow(&u, &x, s, 1e-3)?;
            let row = fl.jacobian.m.row(0).transpose() - Vector4::new(1.0, 0.0, 0.0, 0.0);
            worst = worst.max(row.abs().max()).max((fl.point.t - (x.t + s)).abs());
            count += 1;
        }
    }
    Ok((count, worst))
}

fn det_f(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (c, u) in catalog_all() {
        if !c.is_incompressible() {
            continue;
        }
        for obs in observers() {
            for _ in 0..5 {
                let x = random_point(rng);
                let (t0, q) = obs.split(&x);
                for s in [0.25, 0.5, 1.0] {
                    let f = deformation_gradient(&u, &obs, t0, &q, s, 1e-3)?;
                    worst = worst.max((f.m.determinant() - 1.0).abs());
                }
                count += 1;
            }
        }
    }
    Ok((count, worst))
}

fn deformation_rate(rng: &mut ChaCha8Rng) -> Residual {
    let cfg = OracleConfig::new(1e-3, 1e-4, 1e-5)?;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for u in [
        field(CatalogField::SimpleShear { kappa: 1.0 }),
        field(CatalogField::RigidRotation { omega0: 1.0 }),
    ] {
        for obs in observers() {
            for _ in 0..2 {
                let x = random_point(rng);
                let (t0, q) = obs.split(&x);
                for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    worst = worst.max(deformation_lie_check(&u, &obs, t0, &q, s, &cfg)?);
                }
                count += 1;
            }
        }
    }
    Ok((count, worst))
}

// ---- derivatives ----

fn lie_u_u(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        let f = u.as_field();
        for _ in 0..100 {
            worst = worst.max(lie_derivative(&f, &u, &random_point(rng))?.max_abs());
            count += 1;
        }
    }
    Ok((count, worst))
}

fn oracle_kind(rng: &mut ChaCha8Rng, kinds: [FieldKind; 2]) -> Residual {
    let cfg = OracleConfig::default();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for u in catalog_flows() {
        for kind in kinds.iter().cycle().take(50) {
            let f = random_polynomial_field(*kind, rng.gen()).into_field();
            let x = random_point(rng);
            let l = lie_derivative(&f, &u, &x)?;
            let o = lie_oracle(&f, &u, &x, &cfg)?;
            worst = worst.max(l.max_abs_diff(&o));
            count += 1;
        }
    }
    Ok((count, worst))
}

fn oracle_scalar(rng: &mut ChaCha8Rng) -> Residual {
    oracle_kind(rng, [FieldKind::Scalar, FieldKind::Scalar])
}

fn oracle_vector(rng: &mut ChaCha8Rng) -> Residual {
    oracle_kind(rng, [FieldKind::FourVector, FieldKind::SpaceVector])
}

fn oracle_covector(rng: &mut ChaCha8Rng) -> Residual {
    oracle_kind(rng, [FieldKind::FourCovector, FieldKind::SpaceCovector])
}

fn oracle_tensor2_con(rng: &mut ChaCha8Rng) -> Residual {
    oracle_kind(rng, [FieldKind::Tensor2Con, FieldKind::SpaceTensor2Con])
}

fn oracle_tensor2_cov(rng: &mut ChaCha8Rng) -> Residual {
    oracle_kind(rng, [FieldKind::Tensor2Cov, FieldKind::SpaceTensor2Cov])
}

fn oracle_tensor2_mix(rng: &mut ChaCha8Rng) -> Residual {
    oracle_kind(rng, [FieldKind::Tensor2Mix, FieldKind::SpaceTensor2Mix])
}

/// `|slope - 2|` of the oracle error over `s ∈ {1e-2, 1e-3, 1e-4}`.
fn oracle_convergence(rng: &mut ChaCha8Rng) -> Residual {
    let steps = [1e-2, 1e-3, 1e-4];
    let kinds = [
        FieldKind::FourVector,
        FieldKind::FourCovector,
        FieldKind::Tensor2Con,
        FieldKind::Tensor2Cov,
        FieldKind::Tensor2Mix,
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for u in catalog_flows() {
        for kind in kinds {
            let f = random_polynomial_field(kind, rng.gen()).into_field();
            let points: Vec<WorldPoint> = (0..5).map(|_| random_point(rng)).collect();
            let mut errs = Vec::with_capacity(steps.len());
            for s in steps {
                let cfg = OracleConfig::new(s, 1e-5, 1e-5)?;
                let mut e: f64 = 0.0;
                for x in &points {
                    e = e.max(lie_oracle(&f, &u, x, &cfg)?.max_abs_diff(&lie_derivative(&f, &u, x)?));
                }
                errs.push(e);
            }
            worst = worst.max((log_log_slope(&steps, &errs) - 2.0).abs());
            count += 1;
        }
    }
    Ok((count, worst))
}

fn material_lie_split(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        for kind in FieldKind::ALL {
            let f = random_polynomial_field(kind, rng.gen()).into_field();
            let x = random_point(rng);
            let l = lie_derivative(&f, &u, &x)?;
            let m = material_derivative(&f, &u, &x)?.embed();
            let c = lie_correction(&f, &u, &x)?;
            worst = worst.max(l.lin_comb(1.0, &c, -1.0)?.max_abs_diff(&m));
            count += 1;
        }
    }
    Ok((count, worst))
}

fn scalar_lie_material(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        let f = random_polynomial_field(FieldKind::Scalar, rng.gen()).into_field();
        for _ in 0..10 {
            let x = random_point(rng);
            worst = worst.max(lie_derivative(&f, &u, &x)?.max_abs_diff(&material_derivative(&f, &u, &x)?));
            count += 1;
        }
    }
    Ok((count, worst))
}

fn scalar_material_relative(rng: &mut ChaCha8Rng) -> Residual {
    let obs = rotating();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for u in catalog_flows() {
        let f = random_polynomial_field(FieldKind::Scalar, rng.gen()).into_field();
        let f_u = |t: f64, q: &Vector3<f64>| -> stk_core::Result<Vector3<f64>> {
            let x = obs.unsplit(Instant(t), &SpaceVector(*q));
            Ok(Vector3::new(f.evaluate(&x)?.as_scalar().expect("scalar kind"), 0.0, 0.0))
        };
        let v_u = relative_velocity(&obs, &u);
        for _ in 0..10 {
            let t = rng.gen_range(0.0..2.0);
            let q = random_q(rng, 1.5);
            let p = fd_partials_vector(&f_u, t, &q, 1e-5)?;
            let rel = p.transport(&v_u(t, &q)?)[0];
            let x = obs.unsplit(Instant(t), &SpaceVector(q));
            let abs = material_derivative(&f, &u, &x)?.as_scalar().expect("scalar kind");
            worst = worst.max((rel - abs).abs());
            count += 1;
        }
    }
    Ok((count, worst))
}

fn material_objectivity(rng: &mut ChaCha8Rng) -> Residual {
    let obs = rotating();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for u in catalog_flows() {
        let c = random_polynomial_field(FieldKind::SpaceVector, rng.gen()).into_field();
        let c_u = relative_space_part(&obs, &c)?;
        let v_u = relative_velocity(&obs, &u);
        for _ in 0..10 {
            let t = rng.gen_range(0.0..2.0);
            let q = random_q(rng, 1.5);
            let rel = material_rel(&obs, &c_u, &v_u, t, &q, 1e-5)?;
            let x = obs.unsplit(Instant(t), &SpaceVector(q));
            let abs = material_derivative(&c, &u, &x)?.as_space_vector().expect("space vector kind");
            worst = worst.max(vec3_diff(&rel, &obs.rel_space_vector(&x, &abs).0));
            count += 1;
        }
    }
    Ok((count, worst))
}

fn convected_vectors(rng: &mut ChaCha8Rng, kind: FieldKind) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for obs in observers() {
        for u in catalog_flows() {
            let c = random_polynomial_field(kind, rng.gen()).into_field();
            let c_u = relative_space_part(&obs, &c)?;
            let v_u = relative_velocity(&obs, &u);
            for _ in 0..5 {
                let t = rng.gen_range(0.0..2.0);
                let q = random_q(rng, 1.5);
                let rel = if kind == FieldKind::SpaceVector {
                    upper_convected_rel(&v_u, &c_u, t, &q, 1e-5)?
                } else {
                    lower_convected_rel(&v_u, &c_u, t, &q, 1e-5)?
                };
                let x = obs.unsplit(Instant(t), &SpaceVector(q));
                let abs = obs.rel_form(&x, &lie_derivative(&c, &u, &x)?).space_vector().expect("vector kind");
                worst = worst.max(vec3_diff(&rel, &abs));
                count += 1;
            }
        }
    }
    Ok((count, worst))
}

fn upper_convected(rng: &mut ChaCha8Rng) -> Residual {
    convected_vectors(rng, FieldKind::SpaceVector)
}

fn lower_convected(rng: &mut ChaCha8Rng) -> Residual {
    convected_vectors(rng, FieldKind::SpaceCovector)
}

fn convected_tensors(rng: &mut ChaCha8Rng, kind: FieldKind) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for obs in observers() {
        for u in catalog_flows() {
            let a = random_polynomial_field(kind, rng.gen()).into_field();
            let a_u = relative_space_block(&obs, &a)?;
            let v_u = relative_velocity(&obs, &u);
            for _ in 0..5 {
                let t = rng.gen_range(0.0..2.0);
                let q = random_q(rng, 1.5);
                let rel = match kind {
                    FieldKind::SpaceTensor2Con => upper_convected_tensor_rel(&v_u, &a_u, t, &q, 1e-5)?,
                    FieldKind::SpaceTensor2Cov => lower_convected_tensor_rel(&v_u, &a_u, t, &q, 1e-5)?,
                    _ => mixed_convected_tensor_rel(&v_u, &a_u, t, &q, 1e-5)?,
                };
                let x = obs.unsplit(Instant(t), &SpaceVector(q));
                let abs = obs.rel_form(&x, &lie_derivative(&a, &u, &x)?).space_block().expect("tensor kind");
                worst = worst.max((rel - abs).abs().max());
                count += 1;
            }
        }
    }
    Ok((count, worst))
}

fn tensor_con_block(rng: &mut ChaCha8Rng) -> Residual {
    convected_tensors(rng, FieldKind::SpaceTensor2Con)
}

fn tensor_cov_block(rng: &mut ChaCha8Rng) -> Residual {
    convected_tensors(rng, FieldKind::SpaceTensor2Cov)
}

fn tensor_mix_block(rng: &mut ChaCha8Rng) -> Residual {
    convected_tensors(rng, FieldKind::SpaceTensor2Mix)
}

fn chart_observer() -> RigidObserver {
    RigidObserver::inertial(Vector3::zeros(), WorldPoint::new(0.0, Vector3::zeros()))
}

fn nonspacelike_covector(rng: &mut ChaCha8Rng) -> Residual {
    let u = field(CatalogField::TimeRampedShear { a: 1.0 });
    let chart = chart_observer();
    let v_u = relative_velocity(&chart, &u);
    let n = 50;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let k = random_polynomial_field(FieldKind::SpaceCovector, rng.gen()).into_field();
        let x = random_point(rng);
        let dt_v = fd_partials_vector(&v_u, x.t, &x.q, 1e-5)?.dt;
        let kv = k.evaluate(&x)?.components();
        let expected = Vector3::new(kv[0], kv[1], kv[2]).dot(&dt_v);
        let l = lie_derivative(&k, &u, &x)?.as_vector4().expect("covector kind");
        worst = worst.max((l[0] - expected).abs());
    }
    Ok((n, worst))
}

fn nonspacelike_mixed(rng: &mut ChaCha8Rng) -> Residual {
    let u = field(CatalogField::TimeRampedShear { a: 1.0 });
    let chart = chart_observer();
    let v_u = relative_velocity(&chart, &u);
    let n = 50;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let a = random_polynomial_field(FieldKind::SpaceTensor2Mix, rng.gen()).into_field();
        let a_u = relative_space_block(&chart, &a)?;
        let x = random_point(rng);
        let expected = mixed_convected_time_block_rel(&v_u, &a_u, x.t, &x.q, 1e-5)?;
        let l = lie_derivative(&a, &u, &x)?.as_matrix4().expect("tensor kind");
        worst = worst.max(vec3_diff(&l.fixed_view::<3, 1>(1, 0).into_owned(), &expected));
    }
    Ok((n, worst))
}

fn leibniz(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        let k = random_polynomial_field(FieldKind::SpaceCovector, rng.gen()).into_field();
        let c = random_polynomial_field(FieldKind::SpaceVector, rng.gen()).into_field();
        let (k2, c2) = (k.clone(), c.clone());
        let pairing = Field::new(FieldKind::Scalar, move |x| {
            match (k2.evaluate(x), c2.evaluate(x)) {
                (Ok(kv), Ok(cv)) => {
                    let (kv, cv) = (kv.components(), cv.components());
                    FieldValue::Scalar(kv[0] * cv[0] + kv[1] * cv[1] + kv[2] * cv[2])
                }
                _ => FieldValue::Scalar(f64::NAN),
            }
        });
        for _ in 0..10 {
            let x = random_point(rng);
            let lhs = lie_derivative(&pairing, &u, &x)?.as_scalar().expect("scalar kind");
            let lk = lie_derivative(&k, &u, &x)?.as_vector4().expect("covector kind");
            let lc = lie_derivative(&c, &u, &x)?.as_vector4().expect("vector kind");
            let kv = k.evaluate(&x)?.embed().as_vector4().expect("covector kind");
            let cv = c.evaluate(&x)?.embed().as_vector4().expect("vector kind");
            worst = worst.max((lhs - (lk.dot(&cv) + kv.dot(&lc))).abs());
            count += 1;
        }
    }
    Ok((count, worst))
}

fn jaumann_decomposition(rng: &mut ChaCha8Rng) -> Residual {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, u) in catalog_all() {
        let c_poly = random_polynomial_field(FieldKind::SpaceVector, rng.gen());
        let k = PolynomialField::new(FieldKind::SpaceCovector, c_poly.components().to_vec()).into_field();
        let c = c_poly.into_field();
        for _ in 0..10 {
            let x = random_point(rng);
            let up = lie_derivative(&c, &u, &x)?.as_vector4().expect("vector kind");
            let lo = lie_derivative(&k, &u, &x)?.as_vector4().expect("covector kind");
            let avg = 0.5 * (space(&up) + sharp(&SpaceCovector(space(&lo))).0);
            worst = worst.max(vec3_diff(&jaumann_derivative(&c, &u, &x)?.0, &avg));
            count += 1;
        }
    }
    Ok((count, worst))
}

fn corotating(rng: &mut ChaCha8Rng, u: VelocityField, o: WorldPoint) -> Residual {
    let instants = [0.0, 0.5, 1.0];
    let opts = ObserverOptions::default();
    let mut worst: f64 = 0.0;
    let ex = Field::constant(FieldValue::SpaceVector(SpaceVector::new(1.0, 0.0, 0.0)));
    worst = worst.max(jaumann_corotating_check(&u, o, &ex, &instants, &opts, 1e-5)?);
    let fields = 3;
    for _ in 0..fields {
        let c = random_polynomial_field(FieldKind::SpaceVector, rng.gen()).into_field();
        worst = worst.max(jaumann_corotating_check(&u, o, &c, &instants, &opts, 1e-5)?);
    }
    Ok(((fields + 1) * instants.len(), worst))
}

fn jaumann_corotating_vortex(rng: &mut ChaCha8Rng) -> Residual {
    corotating(
        rng,
        field(CatalogField::PlanarVortex { omega0: 1.0, ell: 1.0 }),
        WorldPoint::new(0.0, Vector3::new(0.5, 0.0, 0.0)),
    )
}

fn jaumann_corotating_rotation(rng: &mut ChaCha8Rng) -> Residual {
    corotating(
        rng,
        field(CatalogField::RigidRotation { omega0: 1.0 }),
        WorldPoint::new(0.0, Vector3::zeros()),
    )
}

/// Every check with its default tolerance, ordered by id.
pub fn all_checks() -> Vec<Check> {
    let mut checks = vec![
        Check { id: "angular_velocity", tolerance: 1e-7, description: "observer field gradient equals Omega", run: angular_velocity },
        Check { id: "catalog_jacobian", tolerance: 1e-7, description: "analytic catalog jacobians vs finite differences", run: catalog_jacobian },
        Check { id: "deformation_rate", tolerance: 1e-6, description: "dF/ds equals grad v_U times F", run: deformation_rate },
        Check { id: "det_f", tolerance: 1e-7, description: "incompressible flows keep det F = 1", run: det_f },
        Check { id: "dhp_identity", tolerance: 1e-9, description: "DH(P) DP is the identity", run: dhp_identity },
        Check { id: "flow_jacobian", tolerance: 1e-6, description: "flow derivative vs finite differences", run: flow_jacobian },
        Check { id: "flow_semigroup", tolerance: 1e-8, description: "flow composition", run: flow_semigroup },
        Check { id: "flow_time_exact", tolerance: 0.0, description: "time row and time advance are exact", run: flow_time_exact },
        Check { id: "jaumann_corotating_rotation", tolerance: 1e-6, description: "corotating identity, rigid rotation", run: jaumann_corotating_rotation },
        Check { id: "jaumann_corotating_vortex", tolerance: 1e-5, description: "corotating identity, planar vortex", run: jaumann_corotating_vortex },
        Check { id: "jaumann_decomposition", tolerance: 1e-9, description: "Jaumann is the mean of upper and lowered lower", run: jaumann_decomposition },
        Check { id: "leibniz", tolerance: 1e-7, description: "Lie derivative of a pairing", run: leibniz },
        Check { id: "lie_u_u", tolerance: 1e-8, description: "Lie derivative of u along itself vanishes", run: lie_u_u },
        Check { id: "lower_convected", tolerance: 1e-6, description: "relative lower convected rate vs split Lie derivative", run: lower_convected },
        Check { id: "material_lie_split", tolerance: 1e-9, description: "Lie minus correction terms is the material derivative", run: material_lie_split },
        Check { id: "material_objectivity", tolerance: 1e-6, description: "relative material derivative vs split absolute", run: material_objectivity },
        Check { id: "nonspacelike_covector", tolerance: 1e-8, description: "time component of a spacelike covector rate", run: nonspacelike_covector },
        Check { id: "nonspacelike_mixed", tolerance: 1e-8, description: "lower-left block of a space mixed tensor rate", run: nonspacelike_mixed },
        Check { id: "oracle_convergence", tolerance: 0.1, description: "second-order convergence of the oracle", run: oracle_convergence },
        Check { id: "oracle_covector", tolerance: 1e-6, description: "covector closed form vs oracle", run: oracle_covector },
        Check { id: "oracle_scalar", tolerance: 1e-6, description: "scalar closed form vs oracle", run: oracle_scalar },
        Check { id: "oracle_tensor2_con", tolerance: 1e-6, description: "contravariant tensor closed form vs oracle", run: oracle_tensor2_con },
        Check { id: "oracle_tensor2_cov", tolerance: 1e-6, description: "covariant tensor closed form vs oracle", run: oracle_tensor2_cov },
        Check { id: "oracle_tensor2_mix", tolerance: 1e-6, description: "mixed tensor closed form vs oracle", run: oracle_tensor2_mix },
        Check { id: "oracle_vector", tolerance: 1e-6, description: "vector closed form vs oracle", run: oracle_vector },
        Check { id: "rigidity", tolerance: 1e-8, description: "distances between observer points are constant", run: rigidity },
        Check { id: "rotation_orthogonality", tolerance: 1e-9, description: "R stays orthogonal over 10 s", run: rotation_orthogonality },
        Check { id: "scalar_lie_material", tolerance: 0.0, description: "scalar Lie derivative is the material derivative", run: scalar_lie_material },
        Check { id: "scalar_material_relative", tolerance: 1e-6, description: "scalar substantial derivative in a rotating frame", run: scalar_material_relative },
        Check { id: "split_roundtrip", tolerance: 1e-9, description: "split and unsplit are inverse", run: split_roundtrip },
        Check { id: "tensor_con_block", tolerance: 1e-6, description: "contravariant space block rate", run: tensor_con_block },
        Check { id: "tensor_cov_block", tolerance: 1e-6, description: "covariant space block rate", run: tensor_cov_block },
        Check { id: "tensor_mix_block", tolerance: 1e-6, description: "mixed space block rate", run: tensor_mix_block },
        Check { id: "upper_convected", tolerance: 1e-6, description: "relative upper convected rate vs split Lie derivative", run: upper_convected },
        Check { id: "vector_gradient_split", tolerance: 1e-6, description: "split of Dc into (d0 + omega) c_U and grad c_U", run: vector_gradient_split },
        Check { id: "velocity_gradient_split", tolerance: 1e-6, description: "relative grad u equals grad v_U plus omega", run: velocity_gradient_split },
    ];
    checks.sort_by_key(|c| c.id);
    checks
}

fn check_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a over the id keeps streams independent of suite order
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325_u64 ^ seed, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

fn run_one(check: &Check, tolerance: f64, seed: u64) -> CheckReport {
    let clock = Clock::now();
    let mut rng = ChaCha8Rng::seed_from_u64(check_seed(seed, check.id));
    let outcome = (check.run)(&mut rng);
    let elapsed = clock.elapsed().as_secs_f64();
    match outcome {
        Ok((points, residual)) => CheckReport::new(check.id, points, residual, tolerance, elapsed),
        Err(e) => CheckReport::failed(check.id, tolerance, elapsed, e.to_string()),
    }
}

/// Runs every check whose id contains `filter`, in parallel; reports come
/// back ordered by id. Unknown ids in `overrides` are configuration errors.
pub fn run_check_suite(filter: Option<&str>, overrides: &BTreeMap<String, f64>) -> Result<Vec<CheckReport>> {
    run_check_suite_seeded(filter, overrides, SUITE_SEED)
}

pub fn run_check_suite_seeded(
    filter: Option<&str>,
    overrides: &BTreeMap<String, f64>,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let checks = all_checks();
    for (id, tol) in overrides {
        if !checks.iter().any(|c| c.id == id) {
            return Err(HarnessError::Config(format!("unknown check id {id:?}")));
        }
        if !(*tol >= 0.0) {
            return Err(HarnessError::Config(format!("tolerance for {id} must be non-negative")));
        }
    }
    let selected: Vec<&Check> = checks
        .iter()
        .filter(|c| filter.map_or(true, |f| c.id.contains(f)))
        .collect();
    if selected.is_empty() {
        return Err(HarnessError::Config(format!("no check matches {:?}", filter.unwrap_or(""))));
    }
    let mut reports: Vec<CheckReport> = selected
        .par_iter()
        .map(|c| run_one(c, overrides.get(c.id).copied().unwrap_or(c.tolerance), seed))
        .collect();
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_sorted() {
        let ids: Vec<&str> = all_checks().iter().map(|c| c.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn filter_selects_one_check() {
        let r = run_check_suite(Some("lie_u_u"), &BTreeMap::new()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].id, "lie_u_u");
        assert!(r[0].pass);
    }

    #[test]
    fn zero_tolerance_fails() {
        let overrides = BTreeMap::from([("dhp_identity".to_string(), 0.0)]);
        let r = run_check_suite(Some("dhp_identity"), &overrides).unwrap();
        assert!(!r[0].pass && r[0].max_residual > 0.0);
    }

    #[test]
    fn bad_requests() {
        assert!(run_check_suite(Some("no_such_check"), &BTreeMap::new()).is_err());
        let overrides = BTreeMap::from([("nope".to_string(), 1.0)]);
        assert_eq!(run_check_suite(None, &overrides).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn nan_never_passes() {
        assert!(max_abs([1.0, f64::NAN, 2.0]).is_nan());
        assert_eq!(max_abs([1.0, -3.0]), 3.0);
    }
}
