//! Scenario documents.
//!
//! ```json
//! {
//!   "name": "shear_ey",
//!   "field": {"name": "simple_shear", "kappa": 1.0},
//!   "observer": {"kind": "rotating", "omega0": 1.0, "axis": [0, 0, 1]},
//!   "test_field": {"kind": "space_vector", "constant": [0, 1, 0]},
//!   "points": {"explicit": [[0, 0, 1, 0]]},
//!   "oracle": {"s_step": 1e-4, "flow_step": 1e-5, "fd_h": 1e-5},
//!   "tolerances": {"oracle": 1e-7},
//!   "seed": 7
//! }
//! ```
//!
//! Everything except `field`, `test_field` and `points` has a default. The
//! canonical form written into CSV headers spells all defaults out.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use stk_core::fields::{CatalogField, FieldKind, Polynomial, PolynomialField, VelocityField};
use stk_core::observers::{ObserverOptions, RigidObserver};
use stk_core::{OracleConfig, WorldPoint};

use crate::error::{HarnessError, Result};

/// Tolerance keys a scenario may override, with their defaults.
pub const TOLERANCE_DEFAULTS: [(&str, f64); 3] = [("material", 1e-6), ("oracle", 1e-6), ("relative", 1e-6)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OriginSpec {
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub q: [f64; 3],
}

impl Default for OriginSpec {
    fn default() -> Self {
        Self { t: 0.0, q: [0.0; 3] }
    }
}

impl OriginSpec {
    pub fn point(&self) -> WorldPoint {
        WorldPoint::new(self.t, Vector3::from(self.q))
    }
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObserverSpec {
    Inertial {
        #[serde(default)]
        velocity: [f64; 3],
        #[serde(default)]
        origin: OriginSpec,
    },
    Rotating {
        omega0: f64,
        #[serde(default = "z_axis")]
        axis: [f64; 3],
        #[serde(default)]
        origin: OriginSpec,
    },
    Corotating {
        #[serde(default)]
        origin: OriginSpec,
    },
}

impl Default for ObserverSpec {
    fn default() -> Self {
        ObserverSpec::Inertial {
            velocity: [0.0; 3],
            origin: OriginSpec::default(),
        }
    }
}

impl ObserverSpec {
    pub fn origin(&self) -> OriginSpec {
        match self {
            ObserverSpec::Inertial { origin, .. }
            | ObserverSpec::Rotating { origin, .. }
            | ObserverSpec::Corotating { origin } => *origin,
        }
    }

    pub fn build(&self, u: &VelocityField) -> Result<RigidObserver> {
        let opts = ObserverOptions::default();
        Ok(match self {
            ObserverSpec::Inertial { velocity, origin } => RigidObserver::inertial(Vector3::from(*velocity), origin.point()),
            ObserverSpec::Rotating { omega0, axis, origin } => {
                let axis = Vector3::from(*axis);
                if !(axis.norm() > 0.0 && axis.iter().all(|c| c.is_finite())) {
                    return Err(HarnessError::Config("observer axis must be a non-zero finite vector".into()));
                }
                if !omega0.is_finite() {
                    return Err(HarnessError::Config("observer omega0 must be finite".into()));
                }
                RigidObserver::rotating_about(axis.normalize(), *omega0, origin.point(), &opts)?
            }
            ObserverSpec::Corotating { origin } => RigidObserver::corotating(u, origin.point(), &opts)?,
        })
    }
}

/// Test field: exactly one of `constant` (components, row-major for
/// tensors), `coefficients` (one polynomial per component) or
/// `random_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFieldSpec {
    pub kind: FieldKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_seed: Option<u64>,
}

impl TestFieldSpec {
    pub fn validate(&self) -> Result<()> {
        let given = [self.constant.is_some(), self.coefficients.is_some(), self.random_seed.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        if given != 1 {
            return Err(HarnessError::Config(
                "test_field needs exactly one of constant, coefficients, random_seed".into(),
            ));
        }
        let n = self.kind.len();
        if let Some(c) = &self.constant {
            if c.len() != n {
                return Err(HarnessError::Config(format!(
                    "test_field constant for {} needs {n} components, got {}",
                    self.kind,
                    c.len()
                )));
            }
        }
        if let Some(cs) = &self.coefficients {
            if cs.len() != n {
                return Err(HarnessError::Config(format!(
                    "test_field coefficients for {} need {n} polynomials, got {}",
                    self.kind,
                    cs.len()
                )));
            }
            if let Some(p) = cs.iter().find(|p| p.len() > Polynomial::n_terms()) {
                return Err(HarnessError::Config(format!(
                    "a polynomial has {} coefficients, at most {} allowed",
                    p.len(),
                    Polynomial::n_terms()
                )));
            }
        }
        let finite = self.constant.iter().flatten().chain(self.coefficients.iter().flatten().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(HarnessError::Config("test_field values must be finite".into()));
        }
        Ok(())
    }

    pub fn polynomial(&self) -> PolynomialField {
        if let Some(c) = &self.constant {
            PolynomialField::new(self.kind, c.iter().map(|v| Polynomial::new(vec![*v])).collect())
        } else if let Some(cs) = &self.coefficients {
            PolynomialField::new(self.kind, cs.iter().map(|p| Polynomial::new(p.clone())).collect())
        } else {
            stk_core::fields::random_polynomial_field(self.kind, self.random_seed.unwrap_or(0))
        }
    }
}

fn default_t_range() -> [f64; 2] {
    [0.0, 2.0]
}

fn default_q_range() -> [f64; 2] {
    [-2.0, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPoints {
    pub count: usize,
    #[serde(default = "default_t_range")]
    pub t: [f64; 2],
    #[serde(default = "default_q_range")]
    pub q: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointsSpec {
    /// `[t, x, y, z]` world points.
    Explicit(Vec<[f64; 4]>),
    /// Uniform in the box, drawn from the scenario seed.
    Random(RandomPoints),
}

impl PointsSpec {
    pub fn len(&self) -> usize {
        match self {
            PointsSpec::Explicit(p) => p.len(),
            PointsSpec::Random(r) => r.count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn resolve(&self, seed: u64) -> Vec<WorldPoint> {
        match self {
            PointsSpec::Explicit(p) => p
                .iter()
                .map(|c| WorldPoint::new(c[0], Vector3::new(c[1], c[2], c[3])))
                .collect(),
            PointsSpec::Random(r) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..r.count)
                    .map(|_| {
                        let t = rng.gen_range(r.t[0]..=r.t[1]);
                        let q = Vector3::from_fn(|_, _| rng.gen_range(r.q[0]..=r.q[1]));
                        WorldPoint::new(t, q)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub field: CatalogField,
    #[serde(default)]
    pub observer: ObserverSpec,
    pub test_field: TestFieldSpec,
    pub points: PointsSpec,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    /// Parses, validates and fills in default tolerances.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let mut s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        for (k, v) in TOLERANCE_DEFAULTS {
            s.tolerances.entry(k.to_string()).or_insert(v);
        }
        Ok(s)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Scenario::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.test_field.validate()?;
        self.oracle.validate()?;
        if self.points.is_empty() {
            return Err(HarnessError::Config("points: at least one point is required".into()));
        }
        if let PointsSpec::Random(r) = &self.points {
            let ok = |b: [f64; 2]| b[0].is_finite() && b[1].is_finite() && b[0] <= b[1];
            if !ok(r.t) || !ok(r.q) {
                return Err(HarnessError::Config("points: random box bounds must be finite and ordered".into()));
            }
        }
        for (k, v) in &self.tolerances {
            if !TOLERANCE_DEFAULTS.iter().any(|(name, _)| name == k) {
                return Err(HarnessError::Config(format!("tolerances: unknown key {k:?}")));
            }
            if !(*v >= 0.0) {
                return Err(HarnessError::Config(format!("tolerances: {k} must be non-negative")));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances
            .get(key)
            .copied()
            .or_else(|| TOLERANCE_DEFAULTS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
            .unwrap_or(0.0)
    }

    /// Compact JSON with every default written out.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }
}
