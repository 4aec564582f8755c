//! Evaluation of a scenario: closed-form derivatives of the test field
//! against independent second paths, one row per point and derivative.

use std::time::Instant as Clock;

use nalgebra::{Matrix3, Vector3};

use stk_core::derivatives::{
    fd_partials_vector, lie_derivative, lie_oracle, lower_convected_rel, lower_convected_tensor_rel,
    material_derivative, material_rel, mixed_convected_tensor_rel, relative_space_block, relative_space_part,
    relative_velocity, upper_convected_rel, upper_convected_tensor_rel,
};
use stk_core::fields::{Field, FieldKind, FieldValue, VelocityField};
use stk_core::observers::RigidObserver;
use stk_core::{Instant, WorldPoint};

use crate::error::Result;
use crate::report::{Cell, CheckReport, Table};
use crate::scenario::Scenario;

/// Derivative rows produced for a test field kind.
pub fn derivatives_for(kind: FieldKind) -> Vec<&'static str> {
    let mut d = vec!["material", "lie"];
    match kind {
        FieldKind::Scalar | FieldKind::SpaceVector => d.push("material_rel"),
        _ => {}
    }
    if kind.is_spacelike() {
        d.push("convected_rel");
    }
    d
}

fn tolerance_key(derivative: &str) -> &'static str {
    match derivative {
        "material" => "material",
        "lie" => "oracle",
        _ => "relative",
    }
}

pub struct ScenarioOutput {
    pub reports: Vec<CheckReport>,
    pub table: Table,
    pub config: String,
}

impl ScenarioOutput {
    pub fn csv(&self) -> String {
        self.table.to_csv(&self.config)
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    u: &'a VelocityField,
    obs: &'a RigidObserver,
    f: &'a Field,
}

/// Straight-line central difference of `f` along `u(x)`.
fn material_fd(ctx: &Context, x: &WorldPoint) -> Result<Vec<f64>> {
    let w = ctx.u.velocity(x)?;
    let h = ctx.scenario.oracle.fd_h * x.coords().abs().max().max(1.0);
    let plus = ctx.f.evaluate(&(*x + h * w))?;
    let minus = ctx.f.evaluate(&(*x + (-h) * w))?;
    let d = plus.lin_comb(0.5 / h, &minus, -0.5 / h)?;
    Ok(flatten(&d.embed()))
}

fn flatten(v: &FieldValue) -> Vec<f64> {
    v.components()[..v.kind().len()].to_vec()
}

fn rel_pair(ctx: &Context, derivative: &str, x: &WorldPoint) -> Result<(Vec<f64>, Vec<f64>)> {
    let (scenario, u, obs, f) = (ctx.scenario, ctx.u, ctx.obs, ctx.f);
    let h = scenario.oracle.fd_h;
    let (t, q) = obs.split(x);
    let (t, q) = (t.0, q.0);
    let v_u = relative_velocity(obs, u);
    let kind = f.kind();
    match (derivative, kind) {
        ("material_rel", FieldKind::Scalar) => {
            let f_u = |t: f64, q: &Vector3<f64>| -> stk_core::Result<Vector3<f64>> {
                let y = obs.unsplit(Instant(t), &stk_core::SpaceVector(*q));
                Ok(Vector3::new(f.evaluate(&y)?.as_scalar().expect("scalar kind"), 0.0, 0.0))
            };
            let p = fd_partials_vector(&f_u, t, &q, h)?;
            let v = v_u(t, &q)?;
            let rel = p.dt[0] + (p.grad.row(0) * v)[0];
            let abs = material_derivative(f, u, x)?.as_scalar().expect("scalar kind");
            Ok((vec![abs], vec![rel]))
        }
        ("material_rel", FieldKind::SpaceVector) => {
            let c_u = relative_space_part(obs, f)?;
            let rel = material_rel(obs, &c_u, &v_u, t, &q, h)?;
            let abs = material_derivative(f, u, x)?.as_space_vector().expect("space vector kind");
            Ok((obs.rel_space_vector(x, &abs).0.as_slice().to_vec(), rel.as_slice().to_vec()))
        }
        ("convected_rel", FieldKind::SpaceVector | FieldKind::SpaceCovector) => {
            let c_u = relative_space_part(obs, f)?;
            let rel = if kind == FieldKind::SpaceVector {
                upper_convected_rel(&v_u, &c_u, t, &q, h)?
            } else {
                lower_convected_rel(&v_u, &c_u, t, &q, h)?
            };
            let abs = obs.rel_form(x, &lie_derivative(f, u, x)?).space_vector().expect("vector kind");
            Ok((abs.as_slice().to_vec(), rel.as_slice().to_vec()))
        }
        ("convected_rel", _) => {
            let a_u = relative_space_block(obs, f)?;
            let rel: Matrix3<f64> = match kind {
                FieldKind::SpaceTensor2Con => upper_convected_tensor_rel(&v_u, &a_u, t, &q, h)?,
                FieldKind::SpaceTensor2Cov => lower_convected_tensor_rel(&v_u, &a_u, t, &q, h)?,
                _ => mixed_convected_tensor_rel(&v_u, &a_u, t, &q, h)?,
            };
            let abs = obs.rel_form(x, &lie_derivative(f, u, x)?).space_block().expect("tensor kind");
            Ok((row_major(&abs), row_major(&rel)))
        }
        _ => unreachable!("derivative {derivative} for {kind}"),
    }
}

fn row_major(m: &Matrix3<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn pair(ctx: &Context, derivative: &str, x: &WorldPoint) -> Result<(Vec<f64>, Vec<f64>)> {
    match derivative {
        "material" => Ok((flatten(&material_derivative(ctx.f, ctx.u, x)?.embed()), material_fd(ctx, x)?)),
        "lie" => Ok((
            flatten(&lie_derivative(ctx.f, ctx.u, x)?),
            flatten(&lie_oracle(ctx.f, ctx.u, x, &ctx.scenario.oracle)?),
        )),
        _ => rel_pair(ctx, derivative, x),
    }
}

/// Evaluates every derivative of the scenario's test field at its points.
///
/// Columns: `point,t,x,y,z,derivative,closed_0..,oracle_0..,residual`, with
/// as many component columns as the embedded test field has. Relative rows
/// fill only the leading components.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioOutput> {
    let u = scenario.field.velocity_field()?;
    let obs = scenario.observer.build(&u)?;
    let f = scenario.test_field.polynomial().into_field();
    let ctx = Context {
        scenario,
        u: &u,
        obs: &obs,
        f: &f,
    };
    let points = scenario.points.resolve(scenario.seed);
    let width = f.kind().embedded().len();

    let mut header: Vec<String> = ["point", "t", "x", "y", "z", "derivative"].iter().map(|s| s.to_string()).collect();
    header.extend((0..width).map(|i| format!("closed_{i}")));
    header.extend((0..width).map(|i| format!("oracle_{i}")));
    header.push("residual".into());
    let mut table = Table::new(header);

    let derivatives = derivatives_for(f.kind());
    let mut worst = vec![0.0_f64; derivatives.len()];
    let mut time = vec![0.0_f64; derivatives.len()];
    for (i, x) in points.iter().enumerate() {
        for (d, name) in derivatives.iter().enumerate() {
            let clock = Clock::now();
            let (closed, oracle) = pair(&ctx, name, x)?;
            time[d] += clock.elapsed().as_secs_f64();
            let residual = closed
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst[d] = worst[d].max(residual);
            let mut row = vec![
                Cell::Int(i as u64),
                Cell::Num(x.t),
                Cell::Num(x.q.x),
                Cell::Num(x.q.y),
                Cell::Num(x.q.z),
                Cell::Text(name.to_string()),
            ];
            for values in [&closed, &oracle] {
                row.extend((0..width).map(|k| values.get(k).map_or(Cell::Empty, |v| Cell::Num(*v))));
            }
            row.push(Cell::Num(residual));
            table.push(row);
        }
    }
    let reports = derivatives
        .iter()
        .enumerate()
        .map(|(d, name)| {
            CheckReport::new(
                format!("{}:{name}", scenario.name),
                points.len(),
                worst[d],
                scenario.tolerance(tolerance_key(name)),
                time[d],
            )
        })
        .collect();
    Ok(ScenarioOutput {
        reports,
        table,
        config: scenario.canonical_json(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(body: &str) -> Scenario {
        Scenario::from_json(body).unwrap()
    }

    #[test]
    fn shear_example_row() {
        let s = scenario(
            r#"{"name": "shear", "field": {"name": "simple_shear", "kappa": 1.0},
                "test_field": {"kind": "space_vector", "constant": [0, 1, 0]},
                "points": {"explicit": [[0, 0, 1, 0]]}, "tolerances": {"oracle": 1e-7}}"#,
        );
        let out = run_scenario(&s).unwrap();
        let lie = out.table.rows.iter().find(|r| r[5] == Cell::Text("lie".into())).unwrap();
        let closed: Vec<Cell> = lie[6..10].to_vec();
        assert_eq!(closed, vec![Cell::Num(0.0), Cell::Num(-1.0), Cell::Num(0.0), Cell::Num(0.0)]);
        assert!(out.reports.iter().all(|r| r.pass), "{:?}", out.reports);
    }

    #[test]
    fn zero_velocity_constant_fields() {
        for kind in ["scalar", "four_covector", "space_tensor2_mix"] {
            let n = stk_core::fields::FieldKind::ALL.iter().find(|k| k.name() == kind).unwrap().len();
            let constant: Vec<String> = (0..n).map(|i| format!("{}", i as f64 * 0.5 - 1.0)).collect();
            let s = scenario(&format!(
                r#"{{"field": {{"name": "constant"}},
                    "observer": {{"kind": "rotating", "omega0": 1.0}},
                    "test_field": {{"kind": "{kind}", "constant": [{}]}},
                    "points": {{"random": {{"count": 3}}}}, "seed": 1}}"#,
                constant.join(",")
            ));
            let out = run_scenario(&s).unwrap();
            for row in &out.table.rows {
                if row[5] == Cell::Text("material".into()) || row[5] == Cell::Text("lie".into()) {
                    for c in &row[6..] {
                        if let Cell::Num(v) = c {
                            assert!(v.abs() <= 1e-12, "{kind} {row:?}");
                        }
                    }
                }
            }
            assert!(out.reports.iter().all(|r| r.pass), "{kind}: {:?}", out.reports);
        }
    }

    #[test]
    fn every_kind_passes_in_a_rotating_frame() {
        for kind in stk_core::fields::FieldKind::ALL {
            let s = scenario(&format!(
                r#"{{"name": "k", "field": {{"name": "planar_vortex", "omega0": 1.0, "ell": 1.0}},
                    "observer": {{"kind": "rotating", "omega0": 1.0, "axis": [0.2, 0.3, 1.0]}},
                    "test_field": {{"kind": "{}", "random_seed": 9}},
                    "points": {{"random": {{"count": 4}}}}, "seed": 2}}"#,
                kind.name()
            ));
            let out = run_scenario(&s).unwrap();
            assert!(out.reports.iter().all(|r| r.pass), "{kind}: {:?}", out.reports);
        }
    }

    #[test]
    fn deterministic_csv() {
        let body = r#"{"field": {"name": "time_ramped_shear", "a": 1.0},
            "observer": {"kind": "corotating", "origin": {"t": 0.0, "q": [0.5, 0.0, 0.0]}},
            "test_field": {"kind": "space_covector", "random_seed": 4},
            "points": {"random": {"count": 5}}, "seed": 11}"#;
        let a = run_scenario(&scenario(body)).unwrap().csv();
        let b = run_scenario(&scenario(body)).unwrap().csv();
        assert_eq!(a, b);
        assert!(a.starts_with("# config: {"));
    }
}
