//! The vector objective `F = (F_1, …, F_m)` with gradients and the smoothness
//! and strong-convexity constants of each component.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::numerics::{self, Matrix};

/// Eigenvalue accuracy used when deriving `L_j` and `μ_j`.
const SPECTRAL_TOL: f64 = 1e-13;

/// `F_j(x) = ½‖Ax − b‖₂²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticComponent {
    a: Matrix,
    b: Vec<f64>,
    smoothness: f64,
    strong_convexity: f64,
}

impl QuadraticComponent {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(invalid(format!(
                "quadratic component: A has {} rows but b has {} entries",
                a.rows(),
                b.len()
            )));
        }
        if a.cols() == 0 {
            return Err(invalid("quadratic component: A has no columns"));
        }
        if !numerics::all_finite(&b) {
            return Err(invalid("quadratic component: b has non-finite entries"));
        }
        let (lo, hi) = numerics::spectral_bounds(&a.gram(), SPECTRAL_TOL)?;
        // round-off can push a singular AᵀA slightly negative
        let strong_convexity = if lo <= 1e-12 * hi.max(1.0) { 0.0 } else { lo };
        Ok(Self {
            a,
            b,
            smoothness: hi,
            strong_convexity,
        })
    }

    /// `½‖x − center‖²`, the building block of every preset.
    pub fn shifted_identity(center: &[f64]) -> Self {
        Self::new(Matrix::identity(center.len()), center.to_vec())
            .expect("identity quadratic is well formed")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn target(&self) -> &[f64] {
        &self.b
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        numerics::sub(&self.a.mul_vec(x), &self.b)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        0.5 * numerics::dot(&r, &r)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.a.tr_mul_vec(&self.residual(x))
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A user-supplied component given by value and gradient callbacks with
/// declared constants.
#[derive(Clone)]
pub struct CustomComponent {
    label: String,
    dim: usize,
    value: Arc<ValueFn>,
    gradient: Arc<GradientFn>,
    smoothness: f64,
    strong_convexity: f64,
}

impl CustomComponent {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        smoothness: f64,
        strong_convexity: f64,
    ) -> Result<Self> {
        if !(smoothness > 0.0 && smoothness.is_finite()) {
            return Err(invalid(format!("declared L_j = {smoothness} must be > 0")));
        }
        if !(0.0..=smoothness).contains(&strong_convexity) {
            return Err(invalid(format!(
                "declared mu_j = {strong_convexity} must lie in [0, L_j]"
            )));
        }
        Ok(Self {
            label: label.into(),
            dim,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            smoothness,
            strong_convexity,
        })
    }
}

impl fmt::Debug for CustomComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomComponent")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("smoothness", &self.smoothness)
            .field("strong_convexity", &self.strong_convexity)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Component {
    Quadratic(QuadraticComponent),
    Custom(CustomComponent),
}

impl Component {
    pub fn dim(&self) -> usize {
        match self {
            Component::Quadratic(q) => q.a.cols(),
            Component::Custom(c) => c.dim,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Component::Quadratic(q) => q.value(x),
            Component::Custom(c) => (c.value)(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Component::Quadratic(q) => q.gradient(x),
            Component::Custom(c) => (c.gradient)(x),
        }
    }

    /// `L_j`.
    pub fn smoothness(&self) -> f64 {
        match self {
            Component::Quadratic(q) => q.smoothness,
            Component::Custom(c) => c.smoothness,
        }
    }

    /// `μ_j` (0 when not strongly convex).
    pub fn strong_convexity(&self) -> f64 {
        match self {
            Component::Quadratic(q) => q.strong_convexity,
            Component::Custom(c) => c.strong_convexity,
        }
    }

    fn describe(&self, out: &mut String) {
        use std::fmt::Write;
        match self {
            Component::Quadratic(q) => {
                let _ = write!(out, "quad[{}x{}:", q.a.rows(), q.a.cols());
                for v in q.a.as_slice().iter().chain(&q.b) {
                    let _ = write!(out, "{:016x},", v.to_bits());
                }
                out.push(']');
            }
            Component::Custom(c) => {
                let _ = write!(out, "custom[{}:{}]", c.label, c.dim);
            }
        }
    }
}

impl From<QuadraticComponent> for Component {
    fn from(q: QuadraticComponent) -> Self {
        Component::Quadratic(q)
    }
}

impl From<CustomComponent> for Component {
    fn from(c: CustomComponent) -> Self {
        Component::Custom(c)
    }
}

/// `F = (F_1, …, F_m)` together with `L = max_j L_j` and `μ = min_j μ_j`.
#[derive(Debug, Clone)]
pub struct MultiObjective {
    components: Vec<Component>,
    dim: usize,
    smoothness: f64,
    strong_convexity: f64,
}

impl MultiObjective {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| invalid("a multiobjective needs at least one component"))?;
        let dim = first.dim();
        if let Some((j, c)) = components.iter().enumerate().find(|(_, c)| c.dim() != dim) {
            return Err(invalid(format!(
                "component {j} has dimension {}, expected {dim}",
                c.dim()
            )));
        }
        let smoothness = components
            .iter()
            .map(Component::smoothness)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(smoothness > 0.0) {
            return Err(invalid(format!("L = {smoothness} must be > 0")));
        }
        let strong_convexity = components
            .iter()
            .map(Component::strong_convexity)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            components,
            dim,
            smoothness,
            strong_convexity,
        })
    }

    pub fn quadratic(parts: Vec<QuadraticComponent>) -> Result<Self> {
        Self::new(parts.into_iter().map(Component::from).collect())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `m`.
    pub fn num_objectives(&self) -> usize {
        self.components.len()
    }

    /// `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `L = max_j L_j`.
    pub fn smoothness_constant(&self) -> f64 {
        self.smoothness
    }

    /// `μ = min_j μ_j`; zero unless every component is strongly convex.
    pub fn strong_convexity_constant(&self) -> f64 {
        self.strong_convexity
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(invalid(format!(
                "point has dimension {}, objective expects {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.components.iter().map(|c| c.value(x)).collect())
    }

    /// Row `j` is `∇F_j(x)`.
    pub fn gradients(&self, x: &[f64]) -> Result<Matrix> {
        self.check_dim(x)?;
        let mut data = Vec::with_capacity(self.dim * self.components.len());
        for (j, c) in self.components.iter().enumerate() {
            let g = c.gradient(x);
            if g.len() != self.dim {
                return Err(invalid(format!(
                    "gradient of component {j} has length {}, expected {}",
                    g.len(),
                    self.dim
                )));
            }
            data.extend(g);
        }
        Matrix::new(self.components.len(), self.dim, data)
    }

    /// Largest relative error between each analytic gradient and a central
    /// finite difference with the given step.
    pub fn gradient_check(&self, x: &[f64], step: f64) -> Result<f64> {
        let grads = self.gradients(x)?;
        let mut worst = 0.0_f64;
        let mut xp = x.to_vec();
        for (j, c) in self.components.iter().enumerate() {
            let g = grads.row(j);
            let mut fd = vec![0.0; self.dim];
            for i in 0..self.dim {
                xp[i] = x[i] + step;
                let up = c.value(&xp);
                xp[i] = x[i] - step;
                let down = c.value(&xp);
                xp[i] = x[i];
                fd[i] = (up - down) / (2.0 * step);
            }
            let err = numerics::norm2(&numerics::sub(g, &fd));
            let scale = numerics::norm2(g).max(1.0);
            worst = worst.max(err / scale);
        }
        Ok(worst)
    }

    /// Canonical text used for problem fingerprints.
    pub fn describe(&self) -> String {
        let mut s = String::from("F{");
        for c in &self.components {
            c.describe(&mut s);
        }
        s.push('}');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example_one_a() -> MultiObjective {
        MultiObjective::quadratic(vec![
            QuadraticComponent::shifted_identity(&[-0.6, -0.6]),
            QuadraticComponent::shifted_identity(&[-0.5, -0.5]),
        ])
        .unwrap()
    }

    fn example_four() -> MultiObjective {
        let a = Matrix::diagonal(&[1.0, 0.0]);
        MultiObjective::quadratic(vec![
            QuadraticComponent::new(a.clone(), vec![-1.1, 0.0]).unwrap(),
            QuadraticComponent::new(a, vec![-1.3, 0.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = example_one_a();
        let v = f.evaluate(&[-0.6, -0.6]).unwrap();
        assert_relative_eq!(v[0], 0.0);
        assert_relative_eq!(v[1], 0.01, epsilon = 1e-15);

        let v = example_four().evaluate(&[0.0, 0.0]).unwrap();
        assert_relative_eq!(v[0], 0.605, epsilon = 1e-15);
        assert_relative_eq!(v[1], 0.845, epsilon = 1e-15);

        let q = QuadraticComponent::new(
            Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap(),
            vec![5.0, 3.0],
        )
        .unwrap();
        assert_eq!(q.value(&[3.0, 1.0]), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let f = example_one_a();
        assert!(f.evaluate(&[0.0]).is_err());
        assert!(f.gradients(&[0.0, 0.0, 0.0]).is_err());
        let err = MultiObjective::quadratic(vec![
            QuadraticComponent::shifted_identity(&[0.0, 0.0]),
            QuadraticComponent::shifted_identity(&[0.0]),
        ]);
        assert!(err.is_err());
        assert!(MultiObjective::new(vec![]).is_err());
    }

    #[test]
    fn gradient_examples() {
        let f = example_one_a();
        let g = f.gradients(&[-0.6, -0.6]).unwrap();
        assert_eq!(g.row(0), &[0.0, 0.0]);
        let g = f.gradients(&[0.0, 0.0]).unwrap();
        assert_relative_eq!(g.row(0)[0], 0.6);
        assert_relative_eq!(g.row(0)[1], 0.6);

        let g = example_four().gradients(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(g.row(0)[0], 2.1, epsilon = 1e-15);
        assert_eq!(g.row(0)[1], 0.0);
    }

    #[test]
    fn constants_examples() {
        let f = example_one_a();
        assert_relative_eq!(f.smoothness_constant(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(f.strong_convexity_constant(), 1.0, epsilon = 1e-12);

        let f = example_four();
        assert_relative_eq!(f.smoothness_constant(), 1.0, epsilon = 1e-12);
        assert_eq!(f.strong_convexity_constant(), 0.0);

        let q = QuadraticComponent::new(Matrix::diagonal(&[2.0, 2.0]), vec![1.0, 1.0]).unwrap();
        let f = MultiObjective::quadratic(vec![q]).unwrap();
        assert_relative_eq!(f.smoothness_constant(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(f.strong_convexity_constant(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn mixed_problem_has_zero_mu() {
        let custom = CustomComponent::new(
            "linear",
            2,
            |x| x[0],
            |_| vec![1.0, 0.0],
            1.0,
            0.0,
        )
        .unwrap();
        let f = MultiObjective::new(vec![
            QuadraticComponent::shifted_identity(&[0.0, 0.0]).into(),
            custom.into(),
        ])
        .unwrap();
        assert_eq!(f.strong_convexity_constant(), 0.0);
        assert_eq!(f.smoothness_constant(), 1.0);
        assert!(CustomComponent::new("bad", 1, |_| 0.0, |_| vec![0.0], 0.0, 0.0).is_err());
        assert!(CustomComponent::new("bad", 1, |_| 0.0, |_| vec![0.0], 1.0, 2.0).is_err());
    }

    fn random_quadratic(rng: &mut ChaCha8Rng, rows: usize, n: usize) -> QuadraticComponent {
        let data = (0..rows * n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b = (0..rows).map(|_| rng.random_range(-2.0..2.0)).collect();
        QuadraticComponent::new(Matrix::new(rows, n, data).unwrap(), b).unwrap()
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = MultiObjective::quadratic(vec![
            random_quadratic(&mut rng, 3, 3),
            random_quadratic(&mut rng, 2, 3),
            random_quadratic(&mut rng, 4, 3),
        ])
        .unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(f.gradient_check(&x, 1e-6).unwrap() <= 1e-5);
        }
    }

    #[test]
    fn descent_lemma_sandwich_and_strong_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let q = random_quadratic(&mut rng, 3, 3);
            let c = Component::from(q.clone());
            let (l, mu) = (c.smoothness(), c.strong_convexity());
            for _ in 0..20 {
                let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                let fx = c.value(&x);
                let fy = c.value(&y);
                let lin = fx + numerics::dot(&c.gradient(&x), &numerics::sub(&y, &x));
                let d2 = numerics::dot(&numerics::sub(&y, &x), &numerics::sub(&y, &x));
                let tol = 1e-9 * (1.0 + fx.abs() + fy.abs());
                assert!(lin <= fy + tol);
                assert!(fy <= lin + 0.5 * l * d2 + tol);
                if mu > 0.0 {
                    assert!(fy + tol >= lin + 0.5 * mu * d2);
                }
            }
        }
    }
}
