use crate::error::{invalid, Result};

fn check_constants(c0: f64, c1: f64, c2: f64, beta: f64) -> Result<()> {
    let ok = |v: f64| v > 0.0 && v.is_finite();
    if !(ok(c0) && ok(c1) && ok(c2) && ok(beta) && c1 < 1.0) {
        return Err(invalid(format!(
            "envelope constants need c0, c1, c2, beta > 0 and c1 < 1 (got {c0}, {c1}, {c2}, {beta})"
        )));
    }
    Ok(())
}

/// `k₀ = max{⌊log_{1−c1}((c1/c2)^{1/β} / c0)⌋ + 2, 1}`.
pub fn recursion_k0(c0: f64, c1: f64, c2: f64, beta: f64) -> Result<usize> {
    check_constants(c0, c1, c2, beta)?;
    let arg = (c1 / c2).powf(1.0 / beta) / c0;
    let lg = (arg.ln() / (1.0 - c1).ln()).floor() + 2.0;
    Ok(if lg < 1.0 { 1 } else { lg as usize })
}

/// Bound on `ĥ_k` for positive sequences with `ĥ_1 <= c0` and
/// `ĥ_{k+1} <= [1 − min{c1, c2 ĥ_k^β}] ĥ_k`:
/// `c0 (1 − c1)^{k−1}` for `k < k₀`, `((c1/c2) / (1 + c1 β (k − k₀)))^{1/β}`
/// for `k >= k₀`, and never more than `c0` at `k = 1`.
pub fn recursion_envelope(c0: f64, c1: f64, c2: f64, beta: f64, k: usize) -> Result<f64> {
    let k0 = recursion_k0(c0, c1, c2, beta)?;
    if k == 0 {
        return Err(invalid("the envelope starts at k = 1"));
    }
    if k < k0 {
        return Ok(c0 * (1.0 - c1).powi(k as i32 - 1));
    }
    let t = (k - k0) as f64;
    let power = ((c1 / c2) / (1.0 + c1 * beta * t)).powf(1.0 / beta);
    Ok(if k == 1 { power.min(c0) } else { power })
}

/// Rate constants for uniformly convex sets.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateConstants {
    pub alpha: f64,
    pub q: f64,
    pub mu: f64,
    pub l: f64,
    pub diameter: f64,
    /// Lower bound on `inf_k |θ̃(x^k)|`.
    pub c_lower: f64,
}

impl CertificateConstants {
    /// `ζ = (α c)^{2/q} / 2^{(4+q)/q}`.
    pub fn zeta(&self) -> f64 {
        (self.alpha * self.c_lower).powf(2.0 / self.q) / 2f64.powf((4.0 + self.q) / self.q)
    }

    /// Per-step factor `max{½, 1 − ζ/L}` of the `q = 2` bound.
    pub fn contraction_factor(&self) -> f64 {
        (1.0 - self.zeta() / self.l).max(0.5)
    }

    fn c0(&self) -> f64 {
        self.l * self.diameter * self.diameter / 2.0
    }

    /// Envelope with `c2 = (1/(2L))(α²μ/8)^{1/q}`, `β = (q−1)/q` (needs `μ > 0`).
    pub fn strongly_convex_envelope(&self, k: usize) -> Result<f64> {
        if !(self.mu > 0.0) {
            return Err(invalid("strongly convex envelope needs mu > 0"));
        }
        let c2 = (self.alpha * self.alpha * self.mu / 8.0).powf(1.0 / self.q) / (2.0 * self.l);
        recursion_envelope(self.c0(), 0.5, c2, (self.q - 1.0) / self.q, k)
    }

    /// `ĥ_k` bound from the `θ̃` lower bound: geometric for `q = 2`, the
    /// recursion envelope with `c2 = ζ/L`, `β = (q−2)/q` for `q > 2`.
    pub fn theta_tilde_envelope(&self, k: usize) -> Result<f64> {
        if !(self.c_lower > 0.0) {
            return Err(invalid("theta-tilde envelope needs c_lower > 0"));
        }
        if k == 0 {
            return Err(invalid("the envelope starts at k = 1"));
        }
        if self.q == 2.0 {
            return Ok(self.c0() * self.contraction_factor().powi(k as i32 - 1));
        }
        recursion_envelope(self.c0(), 0.5, self.zeta() / self.l, (self.q - 2.0) / self.q, k)
    }
}
