//! `r`-norms on `ℝ^d` and the smoothness of `V(f) = ‖f‖_r²`.
//!
//! For `2 ≤ r < ∞` the functional `V` is differentiable with gradient
//! `h(f) = 2 ‖f‖_r^{2-r} |f|^{r-2} f` and satisfies the two-sided bound
//!
//! ```text
//! V(f) + DV(f, g) ≤ V(f + g) ≤ V(f) + DV(f, g) + (r - 1) V(g)
//! ```
//!
//! where `DV(f, g) = <h(f), g>`. The upper constant `r - 1` is attained in
//! the limit along suitable directions, see [`sharpness_ratio`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Norm exponent `r ∈ [1, ∞]`. Infinity is its own variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RExponent {
    Finite(f64),
    Infinity,
}

impl RExponent {
    /// Accepts `r ≥ 1`; `f64::INFINITY` maps to [`RExponent::Infinity`].
    pub fn new(r: f64) -> Result<Self> {
        if r.is_nan() || r < 1.0 {
            return domain(format!("norm exponent must be >= 1, got {r}"));
        }
        if r == f64::INFINITY {
            Ok(RExponent::Infinity)
        } else {
            Ok(RExponent::Finite(r))
        }
    }

    pub const fn infinity() -> Self {
        RExponent::Infinity
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, RExponent::Infinity)
    }

    /// The exponent as a float (`f64::INFINITY` for the infinite case).
    pub fn value(self) -> f64 {
        match self {
            RExponent::Finite(r) => r,
            RExponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/r`, exactly zero at infinity.
    pub fn recip(self) -> f64 {
        match self {
            RExponent::Finite(r) => 1.0 / r,
            RExponent::Infinity => 0.0,
        }
    }

    /// The finite exponent of a smoothness operation, which needs `2 ≤ r < ∞`.
    pub fn smooth(self) -> Result<f64> {
        match self {
            RExponent::Finite(r) if r >= 2.0 => Ok(r),
            RExponent::Finite(r) => domain(format!("smoothness needs r >= 2, got {r}")),
            RExponent::Infinity => domain("smoothness is not defined for r = inf"),
        }
    }
}

impl fmt::Display for RExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RExponent::Finite(r) => write!(f, "{r}"),
            RExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for RExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(RExponent::Infinity),
            other => {
                let r: f64 = other.parse().map_err(|_| Error::Domain(format!("cannot parse norm exponent {s:?}")))?;
                RExponent::new(r)
            }
        }
    }
}

/// A nonempty vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return domain("vector must have at least one component");
        }
        if let Some(bad) = components.iter().find(|x| !x.is_finite()) {
            return domain(format!("vector component {bad} is not finite"));
        }
        Ok(RealVector(components))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        RealVector::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self + t·other`, dimensions already checked by the caller.
    fn axpy(&self, t: f64, other: &RealVector) -> RealVector {
        RealVector(self.0.iter().zip(&other.0).map(|(a, b)| a + t * b).collect())
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        RealVector::new(v)
    }
}

fn check_dims(f: &RealVector, g: &RealVector) -> Result<()> {
    if f.dim() != g.dim() {
        return domain(format!("dimension mismatch: {} vs {}", f.dim(), g.dim()));
    }
    Ok(())
}

/// `‖x‖_r` on a raw slice. Finite exponents are evaluated after scaling by
/// the largest magnitude so that neither overflow nor underflow occurs.
pub(crate) fn norm_slice(x: &[f64], r: RExponent) -> f64 {
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    match r {
        RExponent::Infinity => max,
        _ if max == 0.0 => 0.0,
        RExponent::Finite(1.0) => x.iter().map(|v| v.abs()).sum(),
        RExponent::Finite(2.0) => max * x.iter().map(|v| (v / max).powi(2)).sum::<f64>().sqrt(),
        RExponent::Finite(r) => {
            let s: f64 = x.iter().map(|v| (v.abs() / max).powf(r)).sum();
            max * s.powf(1.0 / r)
        }
    }
}

pub fn r_norm(x: &RealVector, r: RExponent) -> f64 {
    norm_slice(x.as_slice(), r)
}

/// `V(f) = ‖f‖_r²`.
pub fn v(f: &RealVector, r: RExponent) -> f64 {
    if r == RExponent::Finite(2.0) {
        let s: f64 = f.as_slice().iter().map(|x| x * x).sum();
        if s.is_finite() && s > f64::MIN_POSITIVE {
            return s;
        }
    }
    r_norm(f, r).powi(2)
}

/// Gradient `h(f)` of `V` at `f`, with `h(0) = 0`.
pub fn v_grad(f: &RealVector, r: RExponent) -> Result<RealVector> {
    let r = r.smooth()?;
    let norm = norm_slice(f.as_slice(), RExponent::Finite(r));
    if norm == 0.0 {
        return RealVector::zeros(f.dim());
    }
    // 2 ‖f‖^{2-r} |f_j|^{r-2} f_j = 2 ‖f‖ sgn(f_j) (|f_j| / ‖f‖)^{r-1}
    let h = f
        .as_slice()
        .iter()
        .map(|&x| if r == 2.0 { 2.0 * x } else { 2.0 * norm * x.signum() * (x.abs() / norm).powf(r - 1.0) })
        .map(|x| if x == 0.0 { 0.0 } else { x })
        .collect();
    Ok(RealVector(h))
}

/// `DV(f, g) = <h(f), g>`, the derivative of `t ↦ V(f + t g)` at zero.
pub fn dv(f: &RealVector, g: &RealVector, r: RExponent) -> Result<f64> {
    check_dims(f, g)?;
    let h = v_grad(f, r)?;
    Ok(h.0.iter().zip(g.as_slice()).map(|(a, b)| a * b).sum())
}

/// Slack on both sides of the smoothness sandwich.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichSlack {
    /// `V(f+g) - V(f) - DV(f,g)`, nonnegative by convexity.
    pub lower: f64,
    /// `V(f) + DV(f,g) + (r-1) V(g) - V(f+g)`.
    pub upper: f64,
}

pub fn sandwich_slack(f: &RealVector, g: &RealVector, r: RExponent) -> Result<SandwichSlack> {
    check_dims(f, g)?;
    let rv = r.smooth()?;
    let vf = v(f, r);
    let vg = v(g, r);
    let vfg = v(&f.axpy(1.0, g), r);
    let d = dv(f, g, r)?;
    Ok(SandwichSlack { lower: vfg - vf - d, upper: vf + d + (rv - 1.0) * vg - vfg })
}

/// Tolerance used when checking sandwich slacks in floating point.
pub fn slack_tolerance(f: &RealVector, g: &RealVector, r: RExponent) -> f64 {
    1e-9 * (1.0 + v(f, r) + v(g, r))
}

/// `(V(f + t g_o) - V(f) - DV(f, t g_o)) / V(t g_o)` for sign vectors `f`,
/// `g_o` with `<f, g_o> = 0`. Tends to `r - 1` as `t → 0`.
///
/// The numerator is a second-order quantity, so it is assembled from
/// per-coordinate `expm1`/`ln_1p` differences instead of subtracting norms.
pub fn sharpness_ratio(f: &RealVector, g_o: &RealVector, t: f64, r: RExponent) -> Result<f64> {
    check_dims(f, g_o)?;
    let rv = r.smooth()?;
    if t == 0.0 || !t.is_finite() {
        return domain("sharpness ratio needs a finite nonzero t");
    }
    let unit = |x: &f64| (x.abs() - 1.0).abs() <= 1e-12;
    if !f.as_slice().iter().all(unit) || !g_o.as_slice().iter().all(unit) {
        return domain("sharpness ratio needs |f_j| = |g_j| = 1");
    }
    let inner: f64 = f.as_slice().iter().zip(g_o.as_slice()).map(|(a, b)| a * b).sum();
    if inner.abs() > 1e-9 {
        return domain(format!("sharpness ratio needs <f, g> = 0, got {inner}"));
    }

    let d = f.dim() as f64;
    // |f_j + t g_j|^r - |f_j|^r = |1 + t s_j|^r - 1 with s_j = g_j / f_j
    let delta: f64 = f
        .as_slice()
        .iter()
        .zip(g_o.as_slice())
        .map(|(a, b)| {
            let u = t * (b / a);
            let log_abs = if u > -1.0 { u.ln_1p() } else { (1.0 + u).abs().ln() };
            (rv * log_abs).exp_m1()
        })
        .sum();
    // V = (Σ|.|^r)^{2/r}, Σ|f|^r = d
    let dv_increment = d.powf(2.0 / rv) * ((2.0 / rv) * (delta / d).ln_1p()).exp_m1();
    let tg = RealVector(g_o.as_slice().iter().map(|x| t * x).collect());
    let directional = dv(f, &tg, r)?;
    let vtg = t * t * d.powf(2.0 / rv);
    Ok((dv_increment - directional) / vtg)
}

/// Aggregate results of a randomized check of the smoothness lemma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessSummary {
    pub r: f64,
    pub trials: u64,
    /// Smallest `lower_slack / (1 + V(f) + V(g))` seen.
    pub min_lower_scaled: f64,
    /// Smallest `upper_slack / (1 + V(f) + V(g))` seen.
    pub min_upper_scaled: f64,
    /// Largest `|upper_slack| / (1 + V(f) + V(g))`; zero up to rounding at `r = 2`.
    pub max_abs_upper_scaled: f64,
    /// Largest relative gap between `DV` and a central difference quotient.
    pub max_dv_rel_err: f64,
    /// `|sharpness_ratio(t = 1e-4) - (r - 1)|` on a sign pattern in `ℝ^4`.
    pub sharpness_gap: f64,
    /// Whether that gap shrinks monotonically along `t = 10⁻¹, …, 10⁻⁵`.
    pub sharpness_monotone: bool,
}

/// Central-difference step relative to `‖f‖ + ‖g‖`.
pub const FD_STEP: f64 = 1e-6;

/// Relative error of `dv` against `(V(f + εĝ) - V(f - εĝ)) / 2ε` with
/// `ĝ = g/‖g‖` and `ε = FD_STEP (‖f‖ + ‖g‖)`. The error is measured
/// against `|DV| + ‖f‖‖g‖` so that orthogonal directions do not divide by zero.
pub fn dv_fd_rel_err(f: &RealVector, g: &RealVector, r: RExponent) -> Result<f64> {
    let exact = dv(f, g, r)?;
    let nf = r_norm(f, r);
    let ng = r_norm(g, r);
    if ng == 0.0 {
        return Ok(exact.abs());
    }
    let unit = RealVector(g.0.iter().map(|x| x / ng).collect());
    let eps = FD_STEP * (nf + ng);
    let fd = ng * (v(&f.axpy(eps, &unit), r) - v(&f.axpy(-eps, &unit), r)) / (2.0 * eps);
    Ok((fd - exact).abs() / (exact.abs() + nf * ng))
}

/// Runs `trials` random sandwich and gradient checks in dimensions
/// `1..=max_dim`, plus the sharpness limit. Deterministic in `seed`.
pub fn smoothness_suite(r: RExponent, max_dim: usize, trials: u64, seed: u64) -> Result<SmoothnessSummary> {
    let rv = r.smooth()?;
    if max_dim == 0 || trials == 0 {
        return domain("smoothness suite needs max_dim >= 1 and trials >= 1");
    }
    let key = crate::rng::StreamKey::new(seed, crate::simulate::RUN_LEMMA);
    let mut out = SmoothnessSummary {
        r: rv,
        trials,
        min_lower_scaled: f64::INFINITY,
        min_upper_scaled: f64::INFINITY,
        max_abs_upper_scaled: 0.0,
        max_dv_rel_err: 0.0,
        sharpness_gap: 0.0,
        sharpness_monotone: true,
    };
    for k in 0..trials {
        let mut rng = key.replicate(k);
        let d = 1 + (rng.next_u64() % max_dim as u64) as usize;
        let draw = |rng: &mut crate::rng::ReplicateRng, scale: f64| {
            let comps: Vec<f64> = (0..d)
                .map(|_| {
                    // roughly one coordinate in eight is exactly zero
                    if rng.next_u64().is_multiple_of(8) {
                        0.0
                    } else {
                        scale * (2.0 * rng.uniform() - 1.0)
                    }
                })
                .collect();
            RealVector(comps)
        };
        let scale = 10f64.powf(4.0 * rng.uniform() - 2.0);
        let f = draw(&mut rng, scale);
        let g_scale = scale * 10f64.powf(2.0 * rng.uniform() - 1.0);
        let g = draw(&mut rng, g_scale);
        let s = sandwich_slack(&f, &g, r)?;
        let scale = 1.0 + v(&f, r) + v(&g, r);
        out.min_lower_scaled = out.min_lower_scaled.min(s.lower / scale);
        out.min_upper_scaled = out.min_upper_scaled.min(s.upper / scale);
        out.max_abs_upper_scaled = out.max_abs_upper_scaled.max(s.upper.abs() / scale);
        out.max_dv_rel_err = out.max_dv_rel_err.max(dv_fd_rel_err(&f, &g, r)?);
    }
    let f = RealVector(vec![1.0; 4]);
    let g = RealVector(vec![1.0, 1.0, -1.0, -1.0]);
    out.sharpness_gap = (sharpness_ratio(&f, &g, 1e-4, r)? - (rv - 1.0)).abs();
    let gaps = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&t| sharpness_ratio(&f, &g, t, r).map(|x| (x - (rv - 1.0)).abs()))
        .collect::<Result<Vec<_>>>()?;
    out.sharpness_monotone = gaps.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    Ok(out)
}
