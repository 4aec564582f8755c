//! Tabulated origin world line and rotation of a rigid observer.
//!
//! `dq_o/dt = w(t, q_o)`, `dR/dt = Ω(t, q_o) R`, `R(t_o) = 1`, integrated
//! with RK4 on a uniform grid around the anchor and projected back to the
//! nearest orthogonal matrix every few steps. Queries between nodes take one
//! RK4 step from the nearest node; queries outside the table keep stepping
//! from its end.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::error::{KinematicsError, Result};

pub(crate) type OriginVelocityFn = dyn Fn(f64, &Vector3<f64>) -> Result<Vector3<f64>> + Send + Sync;
pub(crate) type AngularVelocityFn = dyn Fn(f64, &Vector3<f64>) -> Result<Matrix3<f64>> + Send + Sync;

/// Construction parameters for integrated observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverOptions {
    /// Integrator step, seconds.
    pub step: f64,
    /// The table covers `[t_o - span, t_o + span]`.
    pub span: f64,
    /// Polar reorthonormalization period, in steps.
    pub reorthonormalize_every: usize,
    /// Largest accepted `|Ω + Ωᵀ|` entry relative to `max(1, |Ω|)`.
    pub antisymmetry_tol: f64,
}

impl Default for ObserverOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            span: 16.0,
            reorthonormalize_every: 100,
            antisymmetry_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub q: Vector3<f64>,
    pub r: Matrix3<f64>,
}

pub(crate) struct IntegratedMotion {
    anchor: f64,
    step: f64,
    origin_velocity: Arc<OriginVelocityFn>,
    omega: Arc<AngularVelocityFn>,
    // node k sits at anchor + k * step (forward) or anchor - k * step (backward)
    forward: Vec<Node>,
    backward: Vec<Node>,
}

pub(crate) fn project_orthogonal(r: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = r.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => u * v_t,
        _ => *r,
    }
}

pub(crate) fn antisymmetry_residual(m: &Matrix3<f64>) -> f64 {
    (m + m.transpose()).abs().max() / m.abs().max().max(1.0)
}

impl IntegratedMotion {
    pub fn build(
        anchor: f64,
        origin: Vector3<f64>,
        origin_velocity: Arc<OriginVelocityFn>,
        omega: Arc<AngularVelocityFn>,
        opts: &ObserverOptions,
    ) -> Result<Self> {
        if !(opts.step > 0.0 && opts.step.is_finite()) {
            return Err(KinematicsError::invalid("step", "must be positive and finite"));
        }
        if !(opts.span >= 0.0 && opts.span.is_finite()) {
            return Err(KinematicsError::invalid("span", "must be non-negative and finite"));
        }
        let mut motion = Self {
            anchor,
            step: opts.step,
            origin_velocity,
            omega,
            forward: Vec::new(),
            backward: Vec::new(),
        };
        let n = (opts.span / opts.step).ceil() as usize;
        let start = Node {
            q: origin,
            r: Matrix3::identity(),
        };
        for dir in [1.0, -1.0] {
            let mut nodes = Vec::with_capacity(n + 1);
            nodes.push(start);
            let mut node = start;
            for k in 0..n {
                let t = anchor + dir * k as f64 * opts.step;
                node = motion.rk4_checked(t, &node, dir * opts.step, opts.antisymmetry_tol)?;
                if opts.reorthonormalize_every > 0 && (k + 1) % opts.reorthonormalize_every == 0 {
                    node.r = project_orthogonal(&node.r);
                }
                nodes.push(node);
            }
            if dir > 0.0 {
                motion.forward = nodes;
            } else {
                motion.backward = nodes;
            }
        }
        Ok(motion)
    }

    fn rhs(&self, t: f64, node: &Node, tol: Option<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
        let w = (self.origin_velocity)(t, &node.q)?;
        let om = (self.omega)(t, &node.q)?;
        if let Some(tol) = tol {
            let residual = antisymmetry_residual(&om);
            if residual > tol || !residual.is_finite() {
                return Err(KinematicsError::NotAntisymmetric { t, residual });
            }
        }
        Ok((w, om * node.r))
    }

    fn rk4_impl(&self, t: f64, y: &Node, h: f64, tol: Option<f64>) -> Result<Node> {
        let add = |y: &Node, k: &(Vector3<f64>, Matrix3<f64>), a: f64| Node {
            q: y.q + k.0 * a,
            r: y.r + k.1 * a,
        };
        let k1 = self.rhs(t, y, tol)?;
        let k2 = self.rhs(t + 0.5 * h, &add(y, &k1, 0.5 * h), tol)?;
        let k3 = self.rhs(t + 0.5 * h, &add(y, &k2, 0.5 * h), tol)?;
        let k4 = self.rhs(t + h, &add(y, &k3, h), tol)?;
        let next = Node {
            q: y.q + (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (h / 6.0),
            r: y.r + (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (h / 6.0),
        };
        if !(next.q.iter().all(|c| c.is_finite()) && next.r.iter().all(|c| c.is_finite())) {
            return Err(KinematicsError::Integration {
                s: t + h,
                reason: "observer state became non-finite".into(),
            });
        }
        Ok(next)
    }

    fn rk4_checked(&self, t: f64, y: &Node, h: f64, tol: f64) -> Result<Node> {
        self.rk4_impl(t, y, h, Some(tol))
    }

    fn rk4(&self, t: f64, y: &Node, h: f64) -> Result<Node> {
        self.rk4_impl(t, y, h, None)
    }

    /// Origin position and rotation at `t`.
    pub fn state(&self, t: f64) -> Result<Node> {
        let offset = t - self.anchor;
        let (nodes, dir) = if offset >= 0.0 {
            (&self.forward, 1.0)
        } else {
            (&self.backward, -1.0)
        };
        let k = (offset.abs() / self.step).round() as usize;
        let last = nodes.len() - 1;
        if k <= last {
            let tk = self.anchor + dir * k as f64 * self.step;
            let delta = t - tk;
            if delta == 0.0 {
                return Ok(nodes[k]);
            }
            return self.rk4(tk, &nodes[k], delta);
        }
        // beyond the table: march from its end
        let mut tk = self.anchor + dir * last as f64 * self.step;
        let mut node = nodes[last];
        let remaining = t - tk;
        let n = (remaining.abs() / self.step).ceil().max(1.0) as usize;
        let h = remaining / n as f64;
        for _ in 0..n {
            node = self.rk4(tk, &node, h)?;
            tk += h;
        }
        Ok(node)
    }

    pub fn origin_velocity(&self, t: f64, q: &Vector3<f64>) -> Result<Vector3<f64>> {
        (self.origin_velocity)(t, q)
    }

    pub fn omega(&self, t: f64, q: &Vector3<f64>) -> Result<Matrix3<f64>> {
        (self.omega)(t, q)
    }
}
