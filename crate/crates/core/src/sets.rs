//! Compact convex feasible sets: ℓp balls and bounded halfspace polytopes.
//!
//! Every set answers membership queries, a linear-minimization oracle (LMO),
//! diameter queries and, for ℓp balls with `1 < p < ∞`, the constants
//! `(α, q)` of the uniform-convexity inclusion
//!
//! ```text
//! x + γ(y − x) + γ(1 − γ)(α/2)‖y − x‖^q z ∈ X   for x, y ∈ X, γ ∈ [0,1], ‖z‖ <= 1.
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::numerics::{self, Matrix, PNorm};
use crate::subproblem::lp::{simplex_solve, Constraint, LpProblem, LpStatus, VarBound};

/// Absolute membership tolerance used by every feasibility assertion.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// `{x : ‖x − center‖_p <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBall {
    p: PNorm,
    radius: f64,
    center: Vec<f64>,
}

impl NormBall {
    pub fn new(p: f64, radius: f64, center: Vec<f64>) -> Result<Self> {
        let p = PNorm::new(p)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("ball radius {radius} must be > 0")));
        }
        if center.is_empty() || !numerics::all_finite(&center) {
            return Err(invalid("ball center must be a non-empty finite vector"));
        }
        Ok(Self { p, radius, center })
    }

    pub fn unit(p: f64, dim: usize) -> Result<Self> {
        Self::new(p, 1.0, vec![0.0; dim])
    }

    pub fn p(&self) -> PNorm {
        self.p
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    fn lmo(&self, g: &[f64]) -> LmoResult {
        let n = g.len();
        let gmax = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let at_center = numerics::dot(g, &self.center);
        if gmax == 0.0 {
            return LmoResult {
                point: self.center.clone(),
                value: at_center,
                degenerate: true,
            };
        }
        let r = self.radius;
        let mut y = self.center.clone();
        match self.p {
            PNorm::Finite(p) if p == 1.0 => {
                // first coordinate attaining max |g_i|
                let i = g.iter().position(|v| v.abs() == gmax).unwrap_or(0);
                y[i] -= r * g[i].signum();
            }
            PNorm::Infinity => {
                for i in 0..n {
                    y[i] -= if g[i] > 0.0 { r } else if g[i] < 0.0 { -r } else { r };
                }
            }
            PNorm::Finite(p) => {
                let q = p / (p - 1.0);
                let gs: Vec<f64> = g.iter().map(|v| v / gmax).collect();
                let qn = PNorm::Finite(q).norm(&gs);
                for i in 0..n {
                    let mag = (gs[i].abs() / qn).powf(q - 1.0);
                    y[i] -= r * gs[i].signum() * mag;
                }
            }
        }
        let value = at_center - r * self.p.dual().norm(g);
        LmoResult {
            point: y,
            value,
            degenerate: false,
        }
    }

    fn euclidean_diameter(&self) -> f64 {
        let n = self.center.len() as f64;
        match self.p {
            PNorm::Finite(p) if p <= 2.0 => 2.0 * self.radius,
            PNorm::Finite(p) => 2.0 * self.radius * n.powf(0.5 - 1.0 / p),
            PNorm::Infinity => 2.0 * self.radius * n.sqrt(),
        }
    }

    fn uniform_convexity(&self) -> Option<UniformConvexityInfo> {
        let PNorm::Finite(p) = self.p else {
            return None;
        };
        if p <= 1.0 {
            return None;
        }
        let (alpha, q) = if p <= 2.0 { (p - 1.0, 2.0) } else { (2.0 / p, p) };
        // scaling a unit ball by R rescales α by R^(1 - q)
        Some(UniformConvexityInfo {
            alpha: alpha / self.radius.powf(q - 1.0),
            q,
            norm: self.p,
        })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.center.len();
        let dir = random_direction(rng, n, self.p);
        let rho = if rng.random_bool(0.5) {
            1.0
        } else {
            rng.random::<f64>().powf(1.0 / n as f64)
        };
        self.center
            .iter()
            .zip(&dir)
            .map(|(c, d)| c + self.radius * rho * d)
            .collect()
    }
}

/// Non-zero random vector normalized to unit length in `norm`.
fn random_direction<R: Rng>(rng: &mut R, n: usize, norm: PNorm) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let len = norm.norm(&v);
        if len > 1e-6 {
            return v.iter().map(|x| x / len).collect();
        }
    }
}

/// `{x : Ax <= b}`, bounded and non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspacePolytope {
    a: Matrix,
    b: Vec<f64>,
    vertices: Option<Vec<Vec<f64>>>,
    declared_diameter: Option<f64>,
    bbox: Vec<(f64, f64)>,
}

impl HalfspacePolytope {
    /// Validates dimensions and probes boundedness/non-emptiness by
    /// minimizing and maximizing every coordinate.
    pub fn new(a: Matrix, b: Vec<f64>, vertices: Option<Vec<Vec<f64>>>) -> Result<Self> {
        let n = a.cols();
        if n == 0 || a.rows() != b.len() {
            return Err(invalid(format!(
                "polytope: A is {}x{} but b has {} entries",
                a.rows(),
                n,
                b.len()
            )));
        }
        if !numerics::all_finite(&b) {
            return Err(invalid("polytope: b has non-finite entries"));
        }
        let mut bbox = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let lo = Self::lp_min(&a, &b, &e)?;
            e[i] = -1.0;
            let hi = -Self::lp_min(&a, &b, &e)?;
            bbox.push((lo, hi));
        }
        let poly = Self {
            a,
            b,
            vertices: None,
            declared_diameter: None,
            bbox,
        };
        if let Some(vs) = &vertices {
            if vs.is_empty() {
                return Err(invalid("polytope: empty vertex list"));
            }
            for (k, v) in vs.iter().enumerate() {
                if v.len() != n || !poly.contains(v, 1e-7) {
                    return Err(invalid(format!("polytope: vertex {k} is not in the set")));
                }
            }
        }
        Ok(Self { vertices, ..poly })
    }

    fn lp_min(a: &Matrix, b: &[f64], cost: &[f64]) -> Result<f64> {
        let n = a.cols();
        let mut lp = LpProblem::new(cost.to_vec(), vec![VarBound::Free; n]);
        for (row, rhs) in a.row_iter().zip(b) {
            lp.push(Constraint::le(row.to_vec(), *rhs));
        }
        let s = simplex_solve(&lp)?;
        match s.status {
            LpStatus::Optimal => Ok(s.objective),
            LpStatus::Unbounded => Err(invalid("polytope is unbounded")),
            LpStatus::Infeasible => Err(invalid("polytope is empty")),
        }
    }

    /// The ℓ1 ball `{x : ‖x − center‖₁ <= radius}` as `2^n` halfspaces
    /// `⟨s, x⟩ <= radius + ⟨s, center⟩`, `s ∈ {±1}^n`, with vertices
    /// ordered `center − r e_1, center + r e_1, center − r e_2, …`.
    pub fn l1_ball(radius: f64, center: Vec<f64>) -> Result<Self> {
        let n = center.len();
        if n == 0 || n > 16 {
            return Err(invalid("l1_ball supports dimensions 1..=16"));
        }
        if !(radius > 0.0) {
            return Err(invalid(format!("ball radius {radius} must be > 0")));
        }
        let mut rows = Vec::with_capacity(1 << n);
        let mut rhs = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let s: Vec<f64> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 })
                .collect();
            rhs.push(radius + numerics::dot(&s, &center));
            rows.push(s);
        }
        let mut vertices = Vec::with_capacity(2 * n);
        for i in 0..n {
            for sign in [-1.0, 1.0] {
                let mut v = center.clone();
                v[i] += sign * radius;
                vertices.push(v);
            }
        }
        Self::new(Matrix::from_rows(&rows)?, rhs, Some(vertices))
    }

    /// Axis-aligned box `lo <= x <= hi` with its `2^n` corners.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let n = lo.len();
        if n == 0 || n != hi.len() || n > 16 || lo.iter().zip(hi).any(|(l, h)| l > h) {
            return Err(invalid("axis_box needs matching bounds with lo <= hi"));
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            rows.push(e.clone());
            rhs.push(hi[i]);
            e[i] = -1.0;
            rows.push(e);
            rhs.push(-lo[i]);
        }
        let vertices = (0..(1usize << n))
            .map(|mask| {
                (0..n)
                    .map(|i| if mask & (1 << i) != 0 { hi[i] } else { lo[i] })
                    .collect()
            })
            .collect();
        Self::new(Matrix::from_rows(&rows)?, rhs, Some(vertices))
    }

    pub fn with_declared_diameter(mut self, d: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(invalid(format!("declared diameter {d} must be > 0")));
        }
        self.declared_diameter = Some(d);
        Ok(self)
    }

    pub fn constraints(&self) -> (&Matrix, &[f64]) {
        (&self.a, &self.b)
    }

    pub fn vertices(&self) -> Option<&[Vec<f64>]> {
        self.vertices.as_deref()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.a.cols()
            && self
                .a
                .row_iter()
                .zip(&self.b)
                .all(|(row, rhs)| numerics::dot(row, x) - rhs <= tol * numerics::norm2(row))
    }

    fn lmo(&self, g: &[f64]) -> Result<LmoResult> {
        let degenerate = g.iter().all(|v| *v == 0.0);
        if let Some(vs) = &self.vertices {
            let values: Vec<f64> = vs.iter().map(|v| numerics::dot(g, v)).collect();
            let best = values.iter().copied().fold(f64::INFINITY, f64::min);
            let slack = 1e-12 * (1.0 + best.abs());
            let k = values.iter().position(|v| *v <= best + slack).unwrap_or(0);
            return Ok(LmoResult {
                point: vs[k].clone(),
                value: values[k],
                degenerate,
            });
        }
        let n = self.a.cols();
        let mut lp = LpProblem::new(g.to_vec(), vec![VarBound::Free; n]);
        for (row, rhs) in self.a.row_iter().zip(&self.b) {
            lp.push(Constraint::le(row.to_vec(), *rhs));
        }
        let s = simplex_solve(&lp)?;
        if !s.is_optimal() {
            return Err(Error::SolverFailure {
                reason: format!("polytope LMO returned {:?}", s.status),
                last_gap: f64::NAN,
            });
        }
        Ok(LmoResult {
            value: numerics::dot(g, &s.x),
            point: s.x,
            degenerate,
        })
    }

    fn euclidean_diameter(&self) -> Result<f64> {
        if let Some(d) = self.declared_diameter {
            return Ok(d);
        }
        let vs = self.vertices.as_ref().ok_or_else(|| {
            Error::MissingData("polytope diameter needs vertices or a declared value".into())
        })?;
        let mut d = 0.0_f64;
        for (i, u) in vs.iter().enumerate() {
            for v in &vs[i + 1..] {
                d = d.max(numerics::dist2(u, v));
            }
        }
        Ok(d)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Option<Vec<f64>> {
        let vs = self.vertices.as_ref()?;
        // sparse random convex combination, sometimes on a face
        let k = rng.random_range(1..=vs.len().min(3));
        let mut w: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        let mut x = vec![0.0; self.a.cols()];
        for wi in w {
            let v = &vs[rng.random_range(0..vs.len())];
            numerics::axpy(wi, v, &mut x);
        }
        Some(x)
    }
}

/// Result of a linear-minimization oracle call.
#[derive(Debug, Clone, PartialEq)]
pub struct LmoResult {
    /// A minimizer of `⟨g, ·⟩` over the set.
    pub point: Vec<f64>,
    /// `⟨g, point⟩`.
    pub value: f64,
    /// `g` was the zero vector, so every feasible point is a minimizer.
    pub degenerate: bool,
}

/// Constants `(α, q)` of the uniform-convexity inclusion, valid in `norm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformConvexityInfo {
    pub alpha: f64,
    pub q: f64,
    pub norm: PNorm,
}

impl UniformConvexityInfo {
    /// `x + γ(y − x) + γ(1 − γ)(α/2)‖y − x‖^q z`.
    pub fn displaced_point(&self, x: &[f64], y: &[f64], gamma: f64, z: &[f64]) -> Vec<f64> {
        let d = numerics::sub(y, x);
        let bump = gamma * (1.0 - gamma) * 0.5 * self.alpha * self.norm.norm(&d).powf(self.q);
        x.iter()
            .zip(&d)
            .zip(z)
            .map(|((xi, di), zi)| xi + gamma * di + bump * zi)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformConvexityReport {
    pub trials: usize,
    pub violations: usize,
    /// Largest `‖·‖`-excess over the set seen (0 when none).
    pub worst_excess: f64,
    /// `(x, y, γ, z)` of the first violating trial.
    pub first_violation: Option<(Vec<f64>, Vec<f64>, f64, Vec<f64>)>,
}

impl UniformConvexityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Ball(NormBall),
    Polytope(HalfspacePolytope),
}

impl From<NormBall> for FeasibleSet {
    fn from(b: NormBall) -> Self {
        FeasibleSet::Ball(b)
    }
}

impl From<HalfspacePolytope> for FeasibleSet {
    fn from(p: HalfspacePolytope) -> Self {
        FeasibleSet::Polytope(p)
    }
}

impl FeasibleSet {
    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Ball(b) => b.center.len(),
            FeasibleSet::Polytope(p) => p.a.cols(),
        }
    }

    pub fn is_polytope(&self) -> bool {
        match self {
            FeasibleSet::Polytope(_) => true,
            FeasibleSet::Ball(b) => matches!(b.p, PNorm::Infinity) || b.p == PNorm::Finite(1.0),
        }
    }

    /// `x` lies in the set inflated by `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() || !numerics::all_finite(x) {
            return false;
        }
        match self {
            FeasibleSet::Ball(b) => b.p.norm(&numerics::sub(x, &b.center)) <= b.radius + tol,
            FeasibleSet::Polytope(p) => p.contains(x, tol),
        }
    }

    pub fn lmo(&self, g: &[f64]) -> Result<LmoResult> {
        if g.len() != self.dim() {
            return Err(invalid(format!(
                "lmo direction has dimension {}, set has {}",
                g.len(),
                self.dim()
            )));
        }
        if !numerics::all_finite(g) {
            return Err(invalid("lmo direction must be finite"));
        }
        match self {
            FeasibleSet::Ball(b) => Ok(b.lmo(g)),
            FeasibleSet::Polytope(p) => p.lmo(g),
        }
    }

    /// Support function `σ(g) = max_{y ∈ X} ⟨g, y⟩`, via the LMO.
    pub fn support(&self, g: &[f64]) -> Result<f64> {
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        Ok(-self.lmo(&neg)?.value)
    }

    /// Diameter in the set's own norm: `2R` for ℓp balls, Euclidean for
    /// polytopes.
    pub fn diameter(&self) -> Result<f64> {
        match self {
            FeasibleSet::Ball(b) => Ok(2.0 * b.radius),
            FeasibleSet::Polytope(p) => p.euclidean_diameter(),
        }
    }

    /// Diameter in the Euclidean ambient norm (the `D_X` of every rate bound).
    pub fn euclidean_diameter(&self) -> Result<f64> {
        match self {
            FeasibleSet::Ball(b) => Ok(b.euclidean_diameter()),
            FeasibleSet::Polytope(p) => p.euclidean_diameter(),
        }
    }

    pub fn uniform_convexity_params(&self) -> Option<UniformConvexityInfo> {
        match self {
            FeasibleSet::Ball(b) => b.uniform_convexity(),
            FeasibleSet::Polytope(_) => None,
        }
    }

    /// Axis-aligned bounding box, one `(lo, hi)` per coordinate.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        match self {
            FeasibleSet::Ball(b) => b
                .center
                .iter()
                .map(|c| (c - b.radius, c + b.radius))
                .collect(),
            FeasibleSet::Polytope(p) => p.bbox.clone(),
        }
    }

    /// Random feasible point; `None` for polytopes without vertices.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<Vec<f64>> {
        match self {
            FeasibleSet::Ball(b) => Some(b.sample(rng)),
            FeasibleSet::Polytope(p) => p.sample(rng),
        }
    }

    /// Samples the inclusion with the set's own constants.
    pub fn check_uniform_convexity_sample(
        &self,
        trials: usize,
        seed: u64,
    ) -> Result<UniformConvexityReport> {
        let info = self.uniform_convexity_params().ok_or_else(|| {
            Error::MissingData("set has no uniform-convexity constants".into())
        })?;
        self.check_uniform_convexity_with(&info, trials, seed)
    }

    /// Samples `x, y` in the set (half of them on the boundary), `γ ∈ [0,1]`
    /// and unit `z` in `info.norm`, and counts displaced points that leave the
    /// set by more than [`DEFAULT_MEMBERSHIP_TOL`].
    pub fn check_uniform_convexity_with(
        &self,
        info: &UniformConvexityInfo,
        trials: usize,
        seed: u64,
    ) -> Result<UniformConvexityReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        let mut report = UniformConvexityReport {
            trials,
            violations: 0,
            worst_excess: 0.0,
            first_violation: None,
        };
        for _ in 0..trials {
            let x = self
                .sample(&mut rng)
                .ok_or_else(|| Error::MissingData("cannot sample this set".into()))?;
            let y = self.sample(&mut rng).expect("sampled once already");
            let gamma = rng.random::<f64>();
            let z = random_direction(&mut rng, n, info.norm);
            let w = info.displaced_point(&x, &y, gamma, &z);
            if !self.contains(&w, DEFAULT_MEMBERSHIP_TOL) {
                report.violations += 1;
                let excess = match self {
                    FeasibleSet::Ball(b) => b.p.norm(&numerics::sub(&w, &b.center)) - b.radius,
                    FeasibleSet::Polytope(_) => f64::NAN,
                };
                report.worst_excess = report.worst_excess.max(excess);
                if report.first_violation.is_none() {
                    report.first_violation = Some((x, y, gamma, z));
                }
            }
        }
        Ok(report)
    }

    /// Canonical text used for problem fingerprints.
    pub fn describe(&self) -> String {
        let bits = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{:016x}", x.to_bits()))
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            FeasibleSet::Ball(b) => format!(
                "ball[p={};r={:016x};u={}]",
                b.p,
                b.radius.to_bits(),
                bits(&b.center)
            ),
            FeasibleSet::Polytope(p) => format!(
                "poly[{}x{};A={};b={}]",
                p.a.rows(),
                p.a.cols(),
                bits(p.a.as_slice()),
                bits(&p.b)
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(p: f64) -> FeasibleSet {
        NormBall::unit(p, 2).unwrap().into()
    }

    fn l1_poly() -> FeasibleSet {
        HalfspacePolytope::l1_ball(1.0, vec![0.0, 0.0]).unwrap().into()
    }

    #[test]
    fn contains_examples() {
        assert!(unit(2.0).contains(&[1.0, 0.0], 1e-9));
        assert!(!l1_poly().contains(&[0.6, 0.6], 1e-9));
        assert!(!unit(1.0).contains(&[0.6, 0.6], 1e-9));
        assert!(!unit(2.0).contains(&[0.71, 0.71], 1e-9));
        assert!(unit(2.0).contains(&[0.7, 0.7], 1e-9));
        assert!(!unit(2.0).contains(&[0.0, 0.0, 0.0], 1e-9));
    }

    #[test]
    fn lmo_examples() {
        let r = unit(2.0).lmo(&[1.0, 0.0]).unwrap();
        assert_eq!(r.point, vec![-1.0, 0.0]);
        assert_relative_eq!(r.value, -1.0);

        for set in [l1_poly(), unit(1.0)] {
            let r = set.lmo(&[1.0, 2.0]).unwrap();
            assert_eq!(r.point, vec![0.0, -1.0]);
            assert_relative_eq!(r.value, -2.0);
        }

        // ‖(1,1)‖_{3/2} = 2^{2/3}
        let r = unit(3.0).lmo(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(r.value, -(2.0_f64.powf(2.0 / 3.0)), epsilon = 1e-14);
        assert_relative_eq!(r.value, numerics::dot(&[1.0, 1.0], &r.point), epsilon = 1e-14);
        assert!(unit(3.0).contains(&r.point, 1e-12));
    }

    #[test]
    fn l3_lmo_matches_boundary_sampling() {
        // 10^6 points on the ℓ3 unit circle
        let set = unit(3.0);
        let g = [1.0, 1.0];
        let mut best = f64::INFINITY;
        for k in 0..1_000_000 {
            let t = k as f64 * std::f64::consts::TAU / 1e6;
            let (c, s) = (t.cos(), t.sin());
            let len = (c.abs().powi(3) + s.abs().powi(3)).cbrt();
            best = best.min((c + s) / len);
        }
        let r = set.lmo(&g).unwrap();
        assert!((r.value - best).abs() <= 1e-9);
    }

    #[test]
    fn lmo_degenerate_direction() {
        let r = unit(2.0).lmo(&[0.0, 0.0]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.point, vec![0.0, 0.0]);
        assert_eq!(r.value, 0.0);
        let r = l1_poly().lmo(&[0.0, 0.0]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.point, vec![-1.0, 0.0]);
    }

    #[test]
    fn lmo_rejects_bad_directions() {
        assert!(unit(2.0).lmo(&[1.0]).is_err());
        assert!(unit(2.0).lmo(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn polytope_lmo_without_vertices_uses_lp() {
        let with = HalfspacePolytope::l1_ball(1.0, vec![0.0, 0.0]).unwrap();
        let (a, b) = with.constraints();
        let without: FeasibleSet = HalfspacePolytope::new(a.clone(), b.to_vec(), None)
            .unwrap()
            .into();
        let r = without.lmo(&[1.0, 2.0]).unwrap();
        assert_relative_eq!(r.value, -2.0, epsilon = 1e-12);
        assert!(without.contains(&r.point, 1e-9));
        assert!(matches!(without.diameter(), Err(Error::MissingData(_))));
    }

    #[test]
    fn polytope_validation() {
        let unbounded = HalfspacePolytope::new(Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap(), vec![1.0], None);
        assert!(unbounded.is_err());
        let empty = HalfspacePolytope::new(
            Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap(),
            vec![0.0, -1.0],
            None,
        );
        assert!(empty.is_err());
        let bad_vertex = HalfspacePolytope::new(
            Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap(),
            vec![1.0, 1.0],
            Some(vec![vec![2.0]]),
        );
        assert!(bad_vertex.is_err());
    }

    #[test]
    fn diameter_examples() {
        assert_relative_eq!(l1_poly().diameter().unwrap(), 2.0);
        assert_relative_eq!(unit(1.0).euclidean_diameter().unwrap(), 2.0);
        assert_relative_eq!(unit(2.0).diameter().unwrap(), 2.0);
        assert_relative_eq!(
            unit(f64::INFINITY).euclidean_diameter().unwrap(),
            2.0 * 2.0_f64.sqrt()
        );
        let boxed: FeasibleSet = HalfspacePolytope::axis_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap().into();
        assert_relative_eq!(boxed.diameter().unwrap(), 2.0 * 2.0_f64.sqrt());
        let declared: FeasibleSet = HalfspacePolytope::axis_box(&[0.0], &[1.0])
            .unwrap()
            .with_declared_diameter(3.0)
            .unwrap()
            .into();
        assert_eq!(declared.diameter().unwrap(), 3.0);
    }

    #[test]
    fn uniform_convexity_params_examples() {
        let info = unit(2.0).uniform_convexity_params().unwrap();
        assert_eq!((info.alpha, info.q), (1.0, 2.0));
        let info = unit(3.0).uniform_convexity_params().unwrap();
        assert_relative_eq!(info.alpha, 2.0 / 3.0);
        assert_eq!(info.q, 3.0);
        let info = unit(1.5).uniform_convexity_params().unwrap();
        assert_eq!((info.alpha, info.q), (0.5, 2.0));
        assert!(unit(1.0).uniform_convexity_params().is_none());
        assert!(unit(f64::INFINITY).uniform_convexity_params().is_none());
        assert!(l1_poly().uniform_convexity_params().is_none());
        let big: FeasibleSet = NormBall::new(2.0, 2.0, vec![0.0, 0.0]).unwrap().into();
        assert_eq!(big.uniform_convexity_params().unwrap().alpha, 0.5);
    }

    #[test]
    fn displaced_point_examples() {
        let info = unit(2.0).uniform_convexity_params().unwrap();
        let w = info.displaced_point(&[1.0, 0.0], &[-1.0, 0.0], 0.5, &[0.0, 1.0]);
        assert_relative_eq!(w[0], 0.0);
        assert_relative_eq!(w[1], 0.5);
        assert!(unit(2.0).contains(&w, 1e-9));
        let x = [0.6, 0.8];
        let y = [-1.0, 0.0];
        assert_eq!(info.displaced_point(&x, &y, 0.0, &[0.0, 1.0]), x.to_vec());
        assert_eq!(info.displaced_point(&x, &y, 1.0, &[0.0, 1.0]), y.to_vec());
    }

    #[test]
    fn l2_and_l15_balls_pass_the_sampled_inclusion() {
        for p in [2.0, 1.5] {
            let r = unit(p).check_uniform_convexity_sample(10_000, 7).unwrap();
            assert!(r.passed(), "p = {p}: {r:?}");
        }
        let big: FeasibleSet = NormBall::new(2.0, 3.0, vec![1.0, -1.0]).unwrap().into();
        assert!(big.check_uniform_convexity_sample(10_000, 8).unwrap().passed());
    }

    #[test]
    fn inflated_alpha_is_detected() {
        let set = unit(2.0);
        let mut info = set.uniform_convexity_params().unwrap();
        info.alpha *= 4.0;
        let r = set.check_uniform_convexity_with(&info, 10_000, 7).unwrap();
        assert!(r.violations > 0);
    }

    #[test]
    fn l3_constant_two_thirds_has_a_counterexample() {
        // Symmetric points around the flat point (1, 0) of the ℓ3 sphere:
        // the chord midpoint sits t³/3 inside, the inclusion asks for α·t³.
        let set = unit(3.0);
        let info = set.uniform_convexity_params().unwrap();
        let t: f64 = 0.2;
        let a = (1.0 - t.powi(3)).cbrt();
        let w = info.displaced_point(&[a, t], &[a, -t], 0.5, &[1.0, 0.0]);
        assert!(!set.contains(&w, DEFAULT_MEMBERSHIP_TOL));

        let tight = UniformConvexityInfo {
            alpha: 1.0 / 3.0,
            ..info
        };
        assert!(set.contains(&tight.displaced_point(&[a, t], &[a, -t], 0.5, &[1.0, 0.0]), 1e-12));
        let r = set.check_uniform_convexity_with(&tight, 10_000, 3).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn support_is_consistent_with_lmo() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for set in [unit(2.0), unit(3.0), l1_poly(), unit(f64::INFINITY)] {
            for _ in 0..100 {
                let g: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
                let lmo = set.lmo(&g).unwrap();
                let neg: Vec<f64> = g.iter().map(|v| -v).collect();
                assert_relative_eq!(lmo.value, -set.support(&neg).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lmo_is_feasible_and_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for set in [unit(2.0), unit(3.0), unit(1.5), l1_poly(), unit(1.0), unit(f64::INFINITY)] {
            let samples: Vec<Vec<f64>> = (0..10_000).map(|_| set.sample(&mut rng).unwrap()).collect();
            for _ in 0..1_000 {
                let g: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
                let r = set.lmo(&g).unwrap();
                assert!(set.contains(&r.point, 1e-9));
                assert_relative_eq!(r.value, numerics::dot(&g, &r.point), epsilon = 1e-12);
                for s in samples.iter().step_by(97) {
                    assert!(r.value <= numerics::dot(&g, s) + 1e-8);
                }
            }
        }
    }

    #[test]
    fn lmo_matches_dense_boundary_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for set in [unit(2.0), unit(3.0), unit(1.5), l1_poly()] {
            let mut pts = Vec::new();
            for k in 0..20_000 {
                let t = k as f64 * std::f64::consts::TAU / 20_000.0;
                let (c, s) = (t.cos(), t.sin());
                let p = match &set {
                    FeasibleSet::Ball(b) => b.p.norm(&[c, s]),
                    FeasibleSet::Polytope(_) => c.abs() + s.abs(),
                };
                pts.push([c / p, s / p]);
            }
            for _ in 0..50 {
                let g = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let best = pts.iter().map(|p| g[0] * p[0] + g[1] * p[1]).fold(f64::INFINITY, f64::min);
                assert!((set.lmo(&g).unwrap().value - best).abs() <= 1e-3);
            }
        }
    }
}
