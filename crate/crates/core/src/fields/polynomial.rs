//! Cubic polynomial test fields in `(t, x, y, z)` with seeded coefficients.

use std::sync::OnceLock;

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Field, FieldKind, FieldValue};
use crate::spacetime::WorldPoint;

const MAX_DEGREE: u32 = 3;

fn exponents() -> &'static [[u32; 4]] {
    static EXPONENTS: OnceLock<Vec<[u32; 4]>> = OnceLock::new();
    EXPONENTS.get_or_init(|| {
        let mut out = Vec::new();
        for total in 0..=MAX_DEGREE {
            for a in 0..=total {
                for b in 0..=total - a {
                    for c in 0..=total - a - b {
                        out.push([a, b, c, total - a - b - c]);
                    }
                }
            }
        }
        out
    })
}

/// A polynomial of total degree at most 3 in the chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Number of monomials of total degree at most 3 in four variables.
    pub fn n_terms() -> usize {
        exponents().len()
    }

    /// Coefficients in graded order: constant, then linear `t, x, y, z`
    /// style monomials, and so on. Missing trailing coefficients are zero.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        coeffs.resize(Self::n_terms(), 0.0);
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    /// Coefficients drawn uniformly from `[-1, 1]`, damped by `0.5^degree`
    /// so values stay moderate on a box of half-width 2.
    pub fn random(rng: &mut impl Rng) -> Self {
        let coeffs = exponents()
            .iter()
            .map(|e| {
                let degree: u32 = e.iter().sum();
                rng.gen_range(-1.0..1.0) * 0.5f64.powi(degree as i32)
            })
            .collect();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, c: &Vector4<f64>) -> f64 {
        let pw = powers(c);
        exponents()
            .iter()
            .zip(&self.coeffs)
            .map(|(e, k)| k * pw[0][e[0] as usize] * pw[1][e[1] as usize] * pw[2][e[2] as usize] * pw[3][e[3] as usize])
            .sum()
    }

    pub fn gradient(&self, c: &Vector4<f64>) -> Vector4<f64> {
        let pw = powers(c);
        let mut g = Vector4::zeros();
        for (e, k) in exponents().iter().zip(&self.coeffs) {
            for v in 0..4 {
                if e[v] == 0 {
                    continue;
                }
                let mut term = k * e[v] as f64;
                for w in 0..4 {
                    let p = if w == v { e[w] - 1 } else { e[w] };
                    term *= pw[w][p as usize];
                }
                g[v] += term;
            }
        }
        g
    }
}

fn powers(c: &Vector4<f64>) -> [[f64; 4]; 4] {
    std::array::from_fn(|v| [1.0, c[v], c[v] * c[v], c[v] * c[v] * c[v]])
}

/// One polynomial per stored component of a field kind.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialField {
    kind: FieldKind,
    components: Vec<Polynomial>,
}

impl PolynomialField {
    pub fn new(kind: FieldKind, mut components: Vec<Polynomial>) -> Self {
        components.resize(kind.len(), Polynomial::zero());
        Self { kind, components }
    }

    pub fn random(kind: FieldKind, rng: &mut impl Rng) -> Self {
        let components = (0..kind.len()).map(|_| Polynomial::random(rng)).collect();
        Self { kind, components }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn into_field(self) -> Field {
        let kind = self.kind;
        let eval_polys = self.components.clone();
        let jac_polys = self.components;
        Field::new(kind, move |x| {
            let c = x.coords();
            let vals: Vec<f64> = eval_polys.iter().map(|p| p.eval(&c)).collect();
            FieldValue::from_components(kind, &padded(&vals))
        })
        .with_jacobian(move |x: &WorldPoint| {
            let c = x.coords();
            let grads: Vec<Vector4<f64>> = jac_polys.iter().map(|p| p.gradient(&c)).collect();
            std::array::from_fn(|g| {
                let vals: Vec<f64> = grads.iter().map(|d| d[g]).collect();
                FieldValue::from_components(kind, &padded(&vals))
            })
        })
    }
}

fn padded(vals: &[f64]) -> [f64; 16] {
    let mut out = [0.0; 16];
    out[..vals.len()].copy_from_slice(vals);
    out
}

/// A reproducible cubic test field of the given kind.
pub fn random_polynomial_field(kind: FieldKind, seed: u64) -> PolynomialField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PolynomialField::random(kind, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;

    #[test]
    fn monomial_count() {
        assert_eq!(Polynomial::n_terms(), 35);
        assert_eq!(exponents()[0], [0, 0, 0, 0]);
    }

    #[test]
    fn evaluates_known_polynomial() {
        // p = 2 + 3x - t*y*z
        let mut coeffs = vec![0.0; 35];
        let idx = |e: [u32; 4]| exponents().iter().position(|x| *x == e).unwrap();
        coeffs[idx([0, 0, 0, 0])] = 2.0;
        coeffs[idx([0, 1, 0, 0])] = 3.0;
        coeffs[idx([1, 0, 1, 1])] = -1.0;
        let p = Polynomial::new(coeffs);
        let c = Vector4::new(2.0, 1.0, -1.0, 0.5);
        assert_abs_diff_eq!(p.eval(&c), 2.0 + 3.0 + 1.0, epsilon = 1e-14);
        let g = p.gradient(&c);
        assert_abs_diff_eq!(g, Vector4::new(0.5, 3.0, -1.0, 2.0), epsilon = 1e-14);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        for kind in FieldKind::ALL {
            let f = random_polynomial_field(kind, 11).into_field();
            let x = WorldPoint::new(1.3, Vector3::new(-0.7, 1.9, 0.4));
            let a = f.derivative(&x).unwrap();
            let n = f.fd_derivative(&x).unwrap();
            for g in 0..4 {
                assert!(a.partials[g].max_abs_diff(&n.partials[g]) < 1e-7, "{kind:?}");
            }
        }
    }

    #[test]
    fn same_seed_same_field() {
        assert_eq!(
            random_polynomial_field(FieldKind::Tensor2Mix, 3),
            random_polynomial_field(FieldKind::Tensor2Mix, 3)
        );
        assert_ne!(
            random_polynomial_field(FieldKind::Tensor2Mix, 3),
            random_polynomial_field(FieldKind::Tensor2Mix, 4)
        );
    }
}
