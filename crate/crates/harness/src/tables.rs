//! Fixed-schema CSV tables derived from a scenario.

use std::str::FromStr;

use nalgebra::Matrix4;

use stk_core::derivatives::{jaumann_corotating_check, jaumann_rel, lower_convected_rel, relative_space_part, relative_velocity, upper_convected_rel};
use stk_core::fields::{FieldKind, PolynomialField};
use stk_core::observers::ObserverOptions;
use stk_core::Instant;

use crate::error::{HarnessError, Result};
use crate::report::{Cell, Table};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    ConvectedComparison,
    SplitRoundtrip,
    Corotating,
}

impl TableKind {
    pub const NAMES: [&'static str; 3] = ["convected_comparison", "split_roundtrip", "corotating"];

    pub fn header(self) -> Vec<String> {
        let cols: &[&str] = match self {
            TableKind::ConvectedComparison => &[
                "point", "t", "x", "y", "z", "upper_x", "upper_y", "upper_z", "lower_x", "lower_y", "lower_z",
                "jaumann_x", "jaumann_y", "jaumann_z",
            ],
            TableKind::SplitRoundtrip => &[
                "point", "t", "x", "y", "z", "t_obs", "q_1", "q_2", "q_3", "roundtrip_residual", "dhp_residual",
            ],
            TableKind::Corotating => &["t", "residual"],
        };
        cols.iter().map(|s| s.to_string()).collect()
    }
}

impl FromStr for TableKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convected_comparison" => Ok(TableKind::ConvectedComparison),
            "split_roundtrip" => Ok(TableKind::SplitRoundtrip),
            "corotating" => Ok(TableKind::Corotating),
            other => Err(HarnessError::Config(format!(
                "unknown table kind {other:?}; expected one of {}",
                TableKind::NAMES.join(", ")
            ))),
        }
    }
}

fn require_space_vector(scenario: &Scenario, table: &str) -> Result<()> {
    if scenario.test_field.kind != FieldKind::SpaceVector {
        return Err(HarnessError::Config(format!(
            "the {table} table needs a space_vector test field, got {}",
            scenario.test_field.kind
        )));
    }
    Ok(())
}

pub fn emit_table(kind: TableKind, scenario: &Scenario) -> Result<Table> {
    let u = scenario.field.velocity_field()?;
    let obs = scenario.observer.build(&u)?;
    let points = scenario.points.resolve(scenario.seed);
    let h = scenario.oracle.fd_h;
    let mut table = Table::new(kind.header());
    match kind {
        TableKind::ConvectedComparison => {
            require_space_vector(scenario, "convected_comparison")?;
            let poly = scenario.test_field.polynomial();
            let lowered = PolynomialField::new(FieldKind::SpaceCovector, poly.components().to_vec()).into_field();
            let c = poly.into_field();
            let c_u = relative_space_part(&obs, &c)?;
            let k_u = relative_space_part(&obs, &lowered)?;
            let v_u = relative_velocity(&obs, &u);
            for (i, x) in points.iter().enumerate() {
                let (t, q) = obs.split(x);
                let upper = upper_convected_rel(&v_u, &c_u, t.0, &q.0, h)?;
                let lower = lower_convected_rel(&v_u, &k_u, t.0, &q.0, h)?;
                let jaumann = jaumann_rel(&v_u, &c_u, t.0, &q.0, h)?;
                let mut row = vec![Cell::Int(i as u64), Cell::Num(x.t), Cell::Num(x.q.x), Cell::Num(x.q.y), Cell::Num(x.q.z)];
                for v in [upper, lower, jaumann] {
                    row.extend(v.iter().map(|c| Cell::Num(*c)));
                }
                table.push(row);
            }
        }
        TableKind::SplitRoundtrip => {
            for (i, x) in points.iter().enumerate() {
                let (t, q) = obs.split(x);
                let back = obs.unsplit(t, &q);
                let roundtrip = (back.q - x.q).abs().max().max((back.t - x.t).abs());
                let dhp = (obs.split_jacobian(x) * obs.unsplit_jacobian(t, &q) - Matrix4::identity()).abs().max();
                let mut row = vec![Cell::Int(i as u64), Cell::Num(x.t), Cell::Num(x.q.x), Cell::Num(x.q.y), Cell::Num(x.q.z)];
                row.push(Cell::Num(t.0));
                row.extend(q.0.iter().map(|c| Cell::Num(*c)));
                row.push(Cell::Num(roundtrip));
                row.push(Cell::Num(dhp));
                table.push(row);
            }
        }
        TableKind::Corotating => {
            require_space_vector(scenario, "corotating")?;
            let c = scenario.test_field.polynomial().into_field();
            let o = scenario.observer.origin().point();
            let opts = ObserverOptions::default();
            for x in &points {
                let r = jaumann_corotating_check(&u, o, &c, &[x.t], &opts, h)?;
                table.push(vec![Cell::Num(Instant(x.t).seconds()), Cell::Num(r)]);
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(field: &str, observer: &str, points: &str) -> Scenario {
        Scenario::from_json(&format!(
            r#"{{"field": {field}, "observer": {observer},
                "test_field": {{"kind": "space_vector", "constant": [0, 1, 0]}},
                "points": {points}, "seed": 3}}"#
        ))
        .unwrap()
    }

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(v) => *v,
            _ => panic!("not a number: {c:?}"),
        }
    }

    #[test]
    fn convected_comparison_for_shear() {
        let s = scenario(
            r#"{"name": "simple_shear", "kappa": 1.0}"#,
            r#"{"kind": "inertial"}"#,
            r#"{"explicit": [[0, 0, 1, 0], [1, 0.5, -0.5, 0.2]]}"#,
        );
        let t = emit_table(TableKind::ConvectedComparison, &s).unwrap();
        for row in &t.rows {
            assert!((num(&row[t.column("upper_x").unwrap()]) + 1.0).abs() <= 1e-9);
            for col in ["lower_x", "lower_y", "lower_z"] {
                assert!(num(&row[t.column(col).unwrap()]).abs() <= 1e-9);
            }
            assert!((num(&row[t.column("jaumann_x").unwrap()]) + 0.5).abs() <= 1e-9);
        }
    }

    #[test]
    fn split_roundtrip_residuals() {
        let s = scenario(
            r#"{"name": "rigid_rotation", "omega0": 1.0}"#,
            r#"{"kind": "rotating", "omega0": 1.0, "axis": [1, 1, 1]}"#,
            r#"{"random": {"count": 20, "t": [0, 10]}}"#,
        );
        let t = emit_table(TableKind::SplitRoundtrip, &s).unwrap();
        assert_eq!(t.rows.len(), 20);
        for row in &t.rows {
            assert!(num(&row[9]) <= 1e-9 && num(&row[10]) <= 1e-9);
        }
    }

    #[test]
    fn corotating_identity() {
        let s = scenario(
            r#"{"name": "planar_vortex", "omega0": 1.0, "ell": 1.0}"#,
            r#"{"kind": "corotating", "origin": {"t": 0, "q": [0.5, 0, 0]}}"#,
            r#"{"explicit": [[0, 0, 0, 0], [0.5, 0, 0, 0], [1, 0, 0, 0]]}"#,
        );
        let t = emit_table(TableKind::Corotating, &s).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(|r| num(&r[1]) <= 1e-5));
    }

    #[test]
    fn kinds_parse() {
        for name in TableKind::NAMES {
            assert!(name.parse::<TableKind>().is_ok());
        }
        assert_eq!("nope".parse::<TableKind>().unwrap_err().exit_code(), 2);
    }
}
