//! Acceptance criteria, one PASS/FAIL line each, against pinned tolerances.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use stk_harness::checks::SUITE_SEED;
use stk_harness::{emit_table, run_check_suite_seeded, run_scenario, CheckReport, Scenario, TableKind};

struct Criterion {
    number: u32,
    title: &'static str,
    bounds: &'static [(&'static str, f64)],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        number: 1,
        title: "splitting identities",
        bounds: &[("split_roundtrip", 1e-9), ("dhp_identity", 1e-9)],
    },
    Criterion {
        number: 2,
        title: "rigid observer structure",
        bounds: &[("rotation_orthogonality", 1e-9), ("rigidity", 1e-8), ("angular_velocity", 1e-7)],
    },
    Criterion {
        number: 3,
        title: "L_u u = 0",
        bounds: &[("lie_u_u", 1e-8)],
    },
    Criterion {
        number: 4,
        title: "oracle equivalence",
        bounds: &[
            ("oracle_vector", 1e-6),
            ("oracle_covector", 1e-6),
            ("oracle_tensor2_con", 1e-6),
            ("oracle_tensor2_cov", 1e-6),
            ("oracle_tensor2_mix", 1e-6),
            ("oracle_convergence", 0.1),
        ],
    },
    Criterion {
        number: 5,
        title: "material derivative objectivity",
        bounds: &[("material_objectivity", 1e-6)],
    },
    Criterion {
        number: 6,
        title: "convected forms",
        bounds: &[
            ("upper_convected", 1e-6),
            ("lower_convected", 1e-6),
            ("tensor_con_block", 1e-6),
            ("tensor_cov_block", 1e-6),
            ("tensor_mix_block", 1e-6),
            ("nonspacelike_covector", 1e-8),
            ("nonspacelike_mixed", 1e-8),
        ],
    },
    Criterion {
        number: 7,
        title: "Jaumann rate",
        bounds: &[
            ("jaumann_decomposition", 1e-9),
            ("jaumann_corotating_vortex", 1e-5),
            ("jaumann_corotating_rotation", 1e-6),
        ],
    },
    Criterion {
        number: 8,
        title: "deformation gradient",
        bounds: &[("deformation_rate", 1e-6), ("det_f", 1e-7)],
    },
];

const SUITE_BUDGET_SECONDS: f64 = 60.0;

fn judge(c: &Criterion, reports: &BTreeMap<&str, &CheckReport>) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (id, bound) in c.bounds {
        match reports.get(id) {
            Some(r) if r.error.is_none() => {
                let pass = r.max_residual <= *bound;
                ok &= pass;
                parts.push(format!("{id}={:.2e}/{bound:.0e}", r.max_residual));
            }
            Some(r) => {
                ok = false;
                parts.push(format!("{id}=error({})", r.error.as_deref().unwrap_or("")));
            }
            None => {
                ok = false;
                parts.push(format!("{id}=missing"));
            }
        }
    }
    (ok, parts.join(" "))
}

fn scenario() -> Scenario {
    Scenario::from_json(
        r#"{"name": "acceptance", "field": {"name": "planar_vortex", "omega0": 1.0, "ell": 1.0},
            "observer": {"kind": "rotating", "omega0": 1.0},
            "test_field": {"kind": "space_vector", "random_seed": 7},
            "points": {"random": {"count": 25, "t": [0, 10]}}, "seed": 42}"#,
    )
    .expect("acceptance scenario parses")
}

fn reproducible_csv() -> Result<bool, String> {
    let s = scenario();
    let a = run_scenario(&s).map_err(|e| e.to_string())?.csv();
    let b = run_scenario(&s).map_err(|e| e.to_string())?.csv();
    let mut same = a == b;
    for kind in [TableKind::ConvectedComparison, TableKind::SplitRoundtrip] {
        let x = emit_table(kind, &s).map_err(|e| e.to_string())?.to_csv(&s.canonical_json());
        let y = emit_table(kind, &s).map_err(|e| e.to_string())?.to_csv(&s.canonical_json());
        same &= x == y;
    }
    Ok(same)
}

fn main() -> ExitCode {
    let clock = Instant::now();
    let reports = match run_check_suite_seeded(None, &BTreeMap::new(), SUITE_SEED) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: suite did not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let elapsed = clock.elapsed().as_secs_f64();
    let again = run_check_suite_seeded(None, &BTreeMap::new(), SUITE_SEED).expect("second suite run");
    let by_id: BTreeMap<&str, &CheckReport> = reports.iter().map(|r| (r.id.as_str(), r)).collect();

    let mut all = true;
    for c in CRITERIA {
        let (ok, detail) = judge(c, &by_id);
        all &= ok;
        println!("criterion {} {:<32} {}  {detail}", c.number, c.title, if ok { "PASS" } else { "FAIL" });
    }

    let suite_ok = reports.iter().all(|r| r.pass);
    let residuals_repeat = reports
        .iter()
        .zip(&again)
        .all(|(a, b)| a.id == b.id && a.max_residual.to_bits() == b.max_residual.to_bits());
    let csv = reproducible_csv();
    let ok = suite_ok && elapsed < SUITE_BUDGET_SECONDS && residuals_repeat && csv == Ok(true);
    all &= ok;
    println!(
        "criterion 9 {:<32} {}  suite={} wall={elapsed:.2}s/{SUITE_BUDGET_SECONDS:.0}s repeat={residuals_repeat} csv={}",
        "suite time and reproducibility",
        if ok { "PASS" } else { "FAIL" },
        if suite_ok { "pass" } else { "fail" },
        match &csv {
            Ok(v) => v.to_string(),
            Err(e) => format!("error({e})"),
        }
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
