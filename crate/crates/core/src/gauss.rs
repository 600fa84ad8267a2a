//! Standard normal tails and `c_d² = E max_{j≤d} Z_j²`.
//!
//! `c_d` bounds the type-2 constant of `ℓ_∞^d` from below. It is computed
//! here by adaptive quadrature of `2t P(W ≥ t)` with
//! `P(W ≥ t) = 1 - (2Φ(t) - 1)^d`, truncated where the union bound
//! `P(W ≥ t) ≤ 2d(1 - Φ(t))` certifies a negligible remainder.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::constants::{h2, PINELIS_K_RANGE};
use crate::error::{domain, Result};
use crate::optimize::golden_section;
use crate::quad::adaptive_simpson;

/// Density, distribution function and upper tail at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub pdf: f64,
    pub cdf: f64,
    pub survival: f64,
}

pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `1 - Φ(z)`, computed from `erfc` without forming `1 - Φ`.
pub fn survival(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

pub fn cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

pub fn gaussian(z: f64) -> Gaussian {
    Gaussian { pdf: pdf(z), cdf: cdf(z), survival: survival(z) }
}

/// Reference tail together with its classical bounds at `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundSet {
    pub z: f64,
    pub survival: f64,
    /// `φ(z)/z`, only for `z > 0`.
    pub mills: Option<f64>,
    /// Komatsu: `2φ(z)/(z + √(z²+4))`.
    pub komatsu_lower: f64,
    /// `4φ(z)/(3z + √(z²+8))`.
    pub qi_upper: f64,
}

impl TailBoundSet {
    /// `komatsu ≤ survival ≤ qi ≤ mills` (mills only when present).
    pub fn is_ordered(&self) -> bool {
        let base = self.komatsu_lower <= self.survival && self.survival <= self.qi_upper;
        match self.mills {
            Some(m) => base && self.qi_upper <= m,
            None => base,
        }
    }
}

pub fn tail_bounds(z: f64) -> Result<TailBoundSet> {
    if !(z > -1.0) || !z.is_finite() {
        return domain(format!("tail bounds need z > -1, got {z}"));
    }
    let phi = pdf(z);
    Ok(TailBoundSet {
        z,
        survival: survival(z),
        mills: (z > 0.0).then(|| phi / z),
        komatsu_lower: 2.0 * phi / (z + (z * z + 4.0).sqrt()),
        qi_upper: 4.0 * phi / (3.0 * z + (z * z + 8.0).sqrt()),
    })
}

/// Pinelis' bound `2K (1 - Φ(z/v))` on `P(|Σ a_i ε_i| ≥ z)`, `v² = Σ a_i²`.
pub fn pinelis_tail(z: f64, v: f64, k_p: f64) -> Result<f64> {
    let (lo, hi) = PINELIS_K_RANGE;
    if !(lo..=hi).contains(&k_p) {
        return domain(format!("Pinelis constant must lie in [{lo}, {hi}], got {k_p}"));
    }
    if !(z > 0.0 && v > 0.0) {
        return domain(format!("Pinelis bound needs z > 0 and v > 0, got z={z}, v={v}"));
    }
    Ok(2.0 * k_p * survival(z / v))
}

/// `P(max_j |Z_j| ≥ t) = 1 - (1 - 2(1 - Φ(t)))^d`, free of cancellation
/// for large `d` and large `t`.
pub fn prob_max_exceeds(t: f64, d: f64) -> f64 {
    -(d * (-2.0 * survival(t)).ln_1p()).exp_m1()
}

/// Default per-panel tolerance of the `c_d²` quadrature.
pub const CD_PANEL_TOL: f64 = 1e-10;
/// Required certificate on the neglected tail beyond the truncation point.
pub const CD_TAIL_TOL: f64 = 1e-12;

/// Quadrature result for `c_d²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdIntegral {
    pub value: f64,
    /// Truncation point `T`.
    pub upper: f64,
    /// `4d(1 - Φ(T))`, a bound on `∫_T^∞ 2t P(W ≥ t) dt`.
    pub tail_bound: f64,
    /// Richardson error estimate of the truncated integral.
    pub error_estimate: f64,
}

/// `c_d²` with the default tolerance.
pub fn cd_squared(d: u64) -> f64 {
    cd_integral(d, CD_PANEL_TOL).value
}

pub fn cd_integral(d: u64, panel_tol: f64) -> CdIntegral {
    let df = d.max(1) as f64;
    let mut upper = (2.0 * df.max(3.0).ln()).sqrt() + 10.0;
    // ∫_T^∞ 2t · 2d φ(t)/t dt = 4d (1 - Φ(T))
    let mut tail_bound = 4.0 * df * survival(upper);
    while tail_bound > CD_TAIL_TOL {
        upper += 1.0;
        tail_bound = 4.0 * df * survival(upper);
    }
    let panels = (2.0 * upper).ceil() as usize;
    let r = adaptive_simpson(|t| 2.0 * t * prob_max_exceeds(t, df), 0.0, upper, panels, panel_tol);
    CdIntegral { value: r.value, upper, tail_bound, error_estimate: r.error_estimate }
}

/// Normalizing constant `√(2/π)` used in the `h₃` and lower-bound choices.
pub fn h3_c() -> f64 {
    (2.0 / PI).sqrt()
}

/// Correction in `c_d² ≤ 2 log d + h₃(d)`. Needs `log(cd) > 0`, i.e. `d ≥ 2`.
pub fn h3(d: f64) -> Result<f64> {
    let lc = (h3_c() * d).ln();
    if !(lc > 0.0) || !lc.is_finite() {
        return domain(format!("h3 needs log(cd) > 0, got d={d}"));
    }
    let x = 1.0 - (2.0 * lc).ln() / (2.0 * lc);
    Ok(-PI.ln() - lc.ln() + 8.0 / (3.0 * x.sqrt() + (x + 4.0 / lc).sqrt()))
}

/// `2 log d - log(2π) + 2√2 / √log(d/√(2π))`, valid for `d ≥ 3`.
pub fn cd_upper_corrected(d: u64) -> Result<f64> {
    if d < 3 {
        return domain(format!("corrected upper bound needs d >= 3, got {d}"));
    }
    let ln_d = (d as f64).ln();
    let inner = ln_d - 0.5 * (2.0 * PI).ln();
    Ok(2.0 * ln_d - (2.0 * PI).ln() + 2.0 * 2f64.sqrt() / inner.sqrt())
}

/// Lower bound on `c_d²` from a truncation point `t_o > 0`:
///
/// ```text
/// A/(1 + A) · {t_o² + 4/(1 + √(1 + 4/t_o²))},   A = 4d φ(t_o)/(t_o + √(t_o² + 4))
/// ```
pub fn cd_lower(d: u64, t_o: f64) -> Result<f64> {
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    if !(t_o > 0.0) || !t_o.is_finite() {
        return domain(format!("t_o must be positive, got {t_o}"));
    }
    let a = 4.0 * d as f64 * pdf(t_o) / (t_o + (t_o * t_o + 4.0).sqrt());
    let bracket = t_o * t_o + 4.0 / (1.0 + (1.0 + 4.0 / (t_o * t_o)).sqrt());
    Ok(a / (1.0 + a) * bracket)
}

/// Default `δ` in the parametric truncation point.
pub const DEFAULT_DELTA: f64 = 0.1;

/// `t_o² = 2 log(cd / (2 log(cd))^{(1+δ)/2})` with `c = √(2/π)`; `None`
/// when the expression is not positive.
pub fn cd_parametric_t0(d: f64, delta: f64) -> Option<f64> {
    let lc = (h3_c() * d).ln();
    if !(lc > 0.0) {
        return None;
    }
    let t2 = 2.0 * (lc - 0.5 * (1.0 + delta) * (2.0 * lc).ln());
    (t2 > 0.0 && t2.is_finite()).then(|| t2.sqrt())
}

/// The best lower bound found and where.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerChoice {
    pub value: f64,
    pub t_o: f64,
    /// The bound at the parametric `t_o(δ)`, when that point exists.
    pub parametric: Option<f64>,
}

/// Maximizes [`cd_lower`] over a log-spaced grid of `t_o`, refined by golden
/// section around the best grid point, and the parametric choice `t_o(δ)`.
pub fn cd_lower_best(d: u64, delta: f64) -> Result<LowerChoice> {
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    if !(delta > 0.0) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    let hi = (2.0 * (d as f64).max(3.0).ln()).sqrt() + 4.0;
    let lo = 1e-3_f64;
    let n = 2000;
    let grid = |i: usize| lo * (hi / lo).powf(i as f64 / n as f64);
    let mut best = LowerChoice { value: f64::NEG_INFINITY, t_o: lo, parametric: None };
    let mut best_i = 0;
    for i in 0..=n {
        let t = grid(i);
        let v = cd_lower(d, t)?;
        if v > best.value {
            best.value = v;
            best.t_o = t;
            best_i = i;
        }
    }
    let (a, b) = (grid(best_i.saturating_sub(1)), grid((best_i + 1).min(n)));
    let refined = golden_section(|t| -cd_lower(d, t).unwrap_or(f64::NEG_INFINITY), a, b, 1e-12);
    if -refined.value > best.value {
        best.value = -refined.value;
        best.t_o = refined.x;
    }
    if let Some(t) = cd_parametric_t0(d as f64, delta) {
        let v = cd_lower(d, t)?;
        best.parametric = Some(v);
        if v > best.value {
            best.value = v;
            best.t_o = t;
        }
    }
    Ok(best)
}

/// `c_d²` with every bound that applies at `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdBounds {
    pub d: u64,
    pub exact_sq: f64,
    pub lower_sq: f64,
    pub lower_t_o: f64,
    /// `2 log d`, attached for `d ≥ 3`.
    pub upper_simple_sq: Option<f64>,
    /// Attached for `d ≥ 3`.
    pub upper_corrected_sq: Option<f64>,
    /// `2 log d + h₃(d)`, attached for `d ≥ 2`.
    pub upper_h3_sq: Option<f64>,
    /// `2 log d + h₂(d)`, which also bounds `T₂(ℓ_∞^d)²`.
    pub upper_h2_sq: f64,
    /// `2 log(2d)`, the Hoeffding-based type-2 bound.
    pub upper_type2_sq: f64,
}

/// Slack allowed when comparing a bound against the quadrature value.
pub const CD_COMPARE_TOL: f64 = 1e-8;

impl CdBounds {
    pub fn uppers(&self) -> Vec<(&'static str, f64)> {
        let mut v = Vec::new();
        if let Some(x) = self.upper_simple_sq {
            v.push(("upper_simple_sq", x));
        }
        if let Some(x) = self.upper_corrected_sq {
            v.push(("upper_corrected_sq", x));
        }
        if let Some(x) = self.upper_h3_sq {
            v.push(("upper_h3_sq", x));
        }
        v.push(("upper_h2_sq", self.upper_h2_sq));
        v.push(("upper_type2_sq", self.upper_type2_sq));
        v
    }

    /// Names of the orderings that fail beyond [`CD_COMPARE_TOL`].
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lower_sq > self.exact_sq + CD_COMPARE_TOL {
            out.push(format!("lower_sq {} > exact_sq {}", self.lower_sq, self.exact_sq));
        }
        for (name, u) in self.uppers() {
            if self.exact_sq > u + CD_COMPARE_TOL {
                out.push(format!("exact_sq {} > {name} {u}", self.exact_sq));
            }
        }
        out
    }

    /// `lower_sq - 2 log d`, the implied value of the lower correction.
    pub fn h1_implicit(&self) -> f64 {
        self.lower_sq - 2.0 * (self.d as f64).ln()
    }
}

pub fn cd_bounds(d: u64, delta: f64) -> Result<CdBounds> {
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    let ln_d = (d as f64).ln();
    let lower = cd_lower_best(d, delta)?;
    Ok(CdBounds {
        d,
        exact_sq: cd_squared(d),
        lower_sq: lower.value,
        lower_t_o: lower.t_o,
        upper_simple_sq: (d >= 3).then_some(2.0 * ln_d),
        upper_corrected_sq: cd_upper_corrected(d).ok(),
        upper_h3_sq: if d >= 2 { Some(2.0 * ln_d + h3(d as f64)?) } else { None },
        upper_h2_sq: 2.0 * ln_d + h2(d as f64)?,
        upper_type2_sq: 2.0 * (2.0 * d as f64).ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_at_zero_and_symmetry() {
        let g = gaussian(0.0);
        assert!((g.pdf - 0.398_942_280_401_432_7).abs() < 1e-16);
        assert_eq!(g.cdf, 0.5);
        assert_eq!(g.survival, 0.5);
        for z in [0.3, 1.0, 2.5, 7.0] {
            assert_eq!(cdf(-z), survival(z));
            assert!((cdf(z) + survival(z) - 1.0).abs() < 1e-15);
        }
        assert!((survival(1.0) - 0.158_655_3).abs() < 1e-7);
    }

    #[test]
    fn tail_examples() {
        let t = tail_bounds(1.0).unwrap();
        assert!((t.komatsu_lower - 0.14954).abs() < 1e-5);
        assert!((t.qi_upper - 0.16131).abs() < 1e-5);
        assert!((t.mills.unwrap() - 0.24197).abs() < 1e-5);
        assert!(t.is_ordered());
        let t = tail_bounds(0.0).unwrap();
        assert!((t.komatsu_lower - pdf(0.0)).abs() < 1e-16);
        assert!((t.qi_upper - 2f64.sqrt() * pdf(0.0)).abs() < 1e-15);
        assert!(t.mills.is_none() && t.is_ordered());
        let t = tail_bounds(6.0).unwrap();
        let vals = [t.komatsu_lower, t.survival, t.qi_upper, t.mills.unwrap()];
        let max = vals.iter().cloned().fold(0.0, f64::max);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 1.25);
        assert!(tail_bounds(-1.0).is_err());
        assert!(tail_bounds(-0.5).unwrap().is_ordered());
    }

    #[test]
    fn pinelis_examples() {
        let p = pinelis_tail(2.0, 1.0, 3.22).unwrap();
        assert!((p - 6.44 * survival(2.0)).abs() < 1e-16);
        assert!((p - 0.14651).abs() < 1e-5);
        assert_eq!(pinelis_tail(4.0, 2.0, 3.22).unwrap(), p);
        assert!(pinelis_tail(2.0, 1.0, 3.3).is_err());
        assert!(pinelis_tail(2.0, 1.0, 3.1).is_err());
        assert!(pinelis_tail(0.0, 1.0, 3.2).is_err());
    }

    #[test]
    fn cd_small_dimensions() {
        assert!((cd_squared(1) - 1.0).abs() < 1e-9);
        assert!((cd_squared(2) - (1.0 + 2.0 / PI)).abs() < 1e-8);
    }

    #[test]
    fn cd_integral_certifies_tail() {
        for d in [1, 10, 1_000_000] {
            let r = cd_integral(d, CD_PANEL_TOL);
            assert!(r.tail_bound <= CD_TAIL_TOL);
            assert!(r.error_estimate < 1e-8);
        }
    }

    #[test]
    fn h3_sign_change() {
        assert!(h3(13.0).unwrap() > 0.0);
        assert!(h3(14.0).unwrap() < 0.0);
        assert!(h3(1.0).is_err());
        let ll = 1e6f64.ln().ln();
        let ratio = h3(1e6).unwrap() / -ll;
        assert!((0.5..=1.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn corrected_bound_threshold() {
        // ≤ 2 log d exactly when log d ≥ 8/log(2π)² + log(2π)/2
        let threshold = 8.0 / (2.0 * PI).ln().powi(2) + 0.5 * (2.0 * PI).ln();
        assert!((threshold - 3.28735).abs() < 1e-5);
        for d in 3..200u64 {
            let below = cd_upper_corrected(d).unwrap() <= 2.0 * (d as f64).ln();
            assert_eq!(below, (d as f64).ln() >= threshold, "d={d}");
        }
        assert!(cd_upper_corrected(27).unwrap() <= 2.0 * 27f64.ln());
        assert!(cd_upper_corrected(2).is_err());
    }

    #[test]
    fn lower_bound_domain() {
        assert!(cd_lower(1, 0.0).is_err());
        assert!(cd_lower(0, 1.0).is_err());
        assert!(cd_lower_best(10, 0.0).is_err());
        assert!(cd_parametric_t0(1.0, 0.1).is_none());
    }

    #[test]
    fn bounds_for_two_skip_simple() {
        let b = cd_bounds(2, DEFAULT_DELTA).unwrap();
        assert!(b.upper_simple_sq.is_none());
        assert!(b.upper_corrected_sq.is_none());
        assert!(b.upper_h3_sq.is_some());
        assert!(b.exact_sq > 2.0 * 2f64.ln());
        assert!(b.violations().is_empty(), "{:?}", b.violations());
        let b1 = cd_bounds(1, DEFAULT_DELTA).unwrap();
        assert!((b1.exact_sq - 1.0).abs() < 1e-9);
        assert!(b1.upper_h3_sq.is_none());
        assert!(b1.violations().is_empty(), "{:?}", b1.violations());
    }
}
