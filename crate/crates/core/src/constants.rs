//! Constants `K` in `E‖S_n - c‖² ≤ K Σ E‖X_i‖²` and their auxiliaries.
//!
//! Three routes are covered for `ℓ_∞^d`: the smoothness argument
//! ([`k_nem`], [`k_nem_case`]), Rademacher type 2 ([`k_type2_linf`]) and
//! truncation with a Bernstein moment bound ([`k_trbern`]). Closed forms that
//! only depend on `log d` also have `*_log` variants so that their limits
//! `K / log d` can be evaluated at astronomically large `d`.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::norm::RExponent;
use crate::optimize::{golden_section, Minimum};
use crate::special::ln_gamma;

/// Pinelis' constant as used in the `h₂` derivation.
pub const PINELIS_K: f64 = 3.22;
/// Published range for Pinelis' constant.
pub const PINELIS_K_RANGE: (f64, f64) = (3.18, 3.22);

/// `c = 4K/√(2π) = 12.88/√(2π)` from the type-2 upper bound.
pub fn h2_c() -> f64 {
    4.0 * PINELIS_K / (2.0 * PI).sqrt()
}

/// Published truncation/Bernstein coefficients (general/centered, symmetric).
pub const TRBERN_COEFF: f64 = 3.46;
pub const TRBERN_COEFF_SYMMETRIC: f64 = 2.9;
/// The `L` values at which the published coefficients are attained.
pub const TRBERN_L: f64 = 0.407;
pub const TRBERN_L_SYMMETRIC: f64 = 0.5;

/// Assumption on the summands: arbitrary mean, mean zero, or symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenteringCase {
    General,
    Centered,
    Symmetric,
}

impl CenteringCase {
    pub const ALL: [CenteringCase; 3] = [CenteringCase::General, CenteringCase::Centered, CenteringCase::Symmetric];

    pub fn as_str(self) -> &'static str {
        match self {
            CenteringCase::General => "general",
            CenteringCase::Centered => "centered",
            CenteringCase::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for CenteringCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CenteringCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "general" => Ok(CenteringCase::General),
            "centered" | "centred" => Ok(CenteringCase::Centered),
            "symmetric" => Ok(CenteringCase::Symmetric),
            _ => domain(format!("unknown centering case {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    Naive,
    Nemirovski,
    John,
    Type2,
    Type2Refined,
    TruncBernstein,
}

impl Approach {
    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Naive => "naive",
            Approach::Nemirovski => "nemirovski",
            Approach::John => "john",
            Approach::Type2 => "type2",
            Approach::Type2Refined => "type2_refined",
            Approach::TruncBernstein => "trunc_bernstein",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One computed constant with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub approach: Approach,
    pub case: CenteringCase,
    /// Integer dimension when known; `None` for rows evaluated from `log d` only.
    pub d: Option<u64>,
    pub log_d: f64,
    pub r: RExponent,
    pub k: f64,
    pub formula: &'static str,
}

fn check_dim(d: u64, min: u64) -> Result<f64> {
    if d < min {
        return domain(format!("dimension must be >= {min}, got {d}"));
    }
    Ok((d as f64).ln())
}

fn check_log_d(log_d: f64) -> Result<f64> {
    if !(log_d.is_finite() && log_d >= 0.0) {
        return domain(format!("log d must be finite and >= 0, got {log_d}"));
    }
    Ok(log_d)
}

/// `d^{2/r-1}` for `r ≤ 2` and `d^{1-2/r}` for `r ≥ 2`.
pub fn k_naive(d: u64, r: RExponent) -> Result<f64> {
    check_dim(d, 1)?;
    let two_over_r = 2.0 * r.recip();
    let exponent = if two_over_r >= 1.0 { two_over_r - 1.0 } else { 1.0 - two_over_r };
    Ok((d as f64).powf(exponent))
}

/// `K = dim B`, the bound available in every `d`-dimensional normed space.
pub fn k_john(d: u64) -> Result<f64> {
    check_dim(d, 1)?;
    Ok(d as f64)
}

/// Interior critical point `r_d = log d + √((log d - 2) log d)` of
/// `q ↦ (q - 1) d^{2/q}`; it exists only for `d ≥ 8`.
pub fn r_critical(d: u64) -> Result<f64> {
    if d <= 7 {
        return domain(format!("r_d needs d >= 8, got {d}"));
    }
    Ok(r_critical_log((d as f64).ln()))
}

fn r_critical_log(ln_d: f64) -> f64 {
    ln_d + ((ln_d - 2.0) * ln_d).sqrt()
}

/// Optimized smoothness constant and the exponent `q` where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NemConstant {
    pub k: f64,
    pub q_star: f64,
}

/// `(q - 1) d^{2/q - 2/r}`, the constant obtained by working in `ℓ_q`.
pub fn nem_objective(q: f64, ln_d: f64, r: RExponent) -> f64 {
    (q - 1.0) * ((2.0 / q - 2.0 * r.recip()) * ln_d).exp()
}

/// Upper end of the `q` search range: `r`, or `4 log d + 4` when `r = ∞`.
pub fn nem_q_upper(d: u64, r: RExponent) -> f64 {
    match r {
        RExponent::Finite(r) => r,
        RExponent::Infinity => 4.0 * (d as f64).ln() + 4.0,
    }
}

/// `K_Nem(d, r) = inf_{2 ≤ q ≤ r} (q - 1) d^{2/q - 2/r}`.
///
/// The calculus gives the minimizer directly (`q = 2` for `d ≤ 7`,
/// `min(r, r_d)` otherwise); a golden-section pass over the whole range
/// guards against the closed form being beaten by rounding at the boundary.
pub fn k_nem(d: u64, r: RExponent) -> Result<NemConstant> {
    let ln_d = check_dim(d, 1)?;
    if r.value() < 2.0 {
        return domain(format!("K_Nem needs r >= 2, got {r}"));
    }
    let upper = nem_q_upper(d, r);
    let q_seed = if d <= 7 { 2.0 } else { r_critical_log(ln_d).min(upper) };
    let k_seed = if d <= 7 { ((1.0 - 2.0 * r.recip()) * ln_d).exp() } else { nem_objective(q_seed, ln_d, r) };
    let refined = golden_section(|q| nem_objective(q, ln_d, r), 2.0, upper, 1e-10);
    if refined.value < k_seed * (1.0 - 1e-14) {
        return Ok(NemConstant { k: refined.value, q_star: refined.x });
    }
    Ok(NemConstant { k: k_seed, q_star: q_seed })
}

/// Table entry for the smoothness route on `ℓ_∞^d`: `2e log d - e` when
/// centered or symmetric, four times that in general. Requires `d ≥ 3`.
pub fn k_nem_case(d: u64, case: CenteringCase) -> Result<f64> {
    let ln_d = check_dim(d, 3)?;
    k_nem_case_log(ln_d, case)
}

pub fn k_nem_case_log(log_d: f64, case: CenteringCase) -> Result<f64> {
    let log_d = check_log_d(log_d)?;
    let centered = 2.0 * E * log_d - E;
    Ok(match case {
        CenteringCase::General => 4.0 * centered,
        CenteringCase::Centered | CenteringCase::Symmetric => centered,
    })
}

/// Haagerup's optimal Khintchine constant in `L_r`:
/// `B_r = √2 (Γ((r+1)/2)/√π)^{1/r}`.
pub fn haagerup_b(r: f64) -> Result<f64> {
    if !(r.is_finite() && r >= 2.0) {
        return domain(format!("B_r needs 2 <= r < inf, got {r}"));
    }
    let ln = (ln_gamma(0.5 * (r + 1.0)) - 0.5 * PI.ln()) / r;
    Ok(2f64.sqrt() * ln.exp())
}

/// Type-2 constant for `L_r` over a finite measure: `4 B_r²`.
pub fn k_type2_lr(r: f64) -> Result<f64> {
    Ok(4.0 * haagerup_b(r)?.powi(2))
}

/// Correction term in `T₂(ℓ_∞^d)² ≤ 2 log d + h₂(d)`.
pub fn h2(d: f64) -> Result<f64> {
    if !(d >= 1.0) || !d.is_finite() {
        return domain(format!("h2 needs d >= 1, got {d}"));
    }
    h2_log(d.ln())
}

/// [`h2`] evaluated from `log d`.
pub fn h2_log(log_d: f64) -> Result<f64> {
    let log_d = check_log_d(log_d)?;
    let c = h2_c();
    // lc = log(cd/2)
    let lc = (0.5 * c).ln() + log_d;
    // a = 2 log(cd / (2 √(2 log(cd/2))))
    let a = 2.0 * lc - (2.0 * lc).ln();
    Ok(2.0 * (0.5 * c).ln() - (2.0 * lc).ln() + 8.0 * (2.0 * lc).sqrt() / (3.0 * a.sqrt() + (a + 8.0).sqrt()))
}

/// Type-2 route on `ℓ_∞^d`: `8 log(2d)` or, refined, `8 log d + 4 h₂(d)`;
/// the symmetric case drops the symmetrization factor 4.
pub fn k_type2_linf(d: u64, case: CenteringCase, refined: bool) -> Result<f64> {
    let ln_d = check_dim(d, 1)?;
    k_type2_linf_log(ln_d, case, refined)
}

pub fn k_type2_linf_log(log_d: f64, case: CenteringCase, refined: bool) -> Result<f64> {
    let log_d = check_log_d(log_d)?;
    let general = if refined { 8.0 * log_d + 4.0 * h2_log(log_d)? } else { 8.0 * (LN_2 + log_d) };
    Ok(match case {
        CenteringCase::Symmetric => general / 4.0,
        _ => general,
    })
}

/// `e(L) = exp(1/L) - 1 - 1/L` for `L > 0`.
pub fn bern_e(l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return domain(format!("e(L) needs L > 0, got {l}"));
    }
    let x = 1.0 / l;
    if x < 1e-2 {
        // Σ_{m≥2} x^m / m!
        let mut term = x * x / 2.0;
        let mut sum = term;
        for m in 3..12 {
            term *= x / m as f64;
            sum += term;
        }
        return Ok(sum);
    }
    Ok(x.exp_m1() - x)
}

/// `2 √(L² e(L) + 4L)`, or `2 √(L² e(L) + 2L)` in the symmetric case:
/// the coefficient of `√log(2d)` after optimizing the truncation level.
pub fn trbern_coeff(l: f64, case: CenteringCase) -> Result<f64> {
    let e = bern_e(l)?;
    let linear = match case {
        CenteringCase::Symmetric => 2.0,
        _ => 4.0,
    };
    Ok(2.0 * (l * l * e + linear * l).sqrt())
}

/// Numerically optimal `L` for [`trbern_coeff`].
pub fn trbern_optimal_l(case: CenteringCase) -> Minimum {
    golden_section(|l| trbern_coeff(l, case).unwrap_or(f64::INFINITY), 0.05, 5.0, 1e-10)
}

/// The quantities in the truncation argument for given `L`, dimension and
/// `Γ = Σ E‖X_i‖_∞²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinParams {
    pub l: f64,
    pub e_of_l: f64,
    pub kappa_o: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl BernsteinParams {
    pub fn new(l: f64, log_d: f64, gamma: f64, case: CenteringCase) -> Result<Self> {
        let log_d = check_log_d(log_d)?;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return domain(format!("Gamma must be positive, got {gamma}"));
        }
        let e_of_l = bern_e(l)?;
        let log_2d = LN_2 + log_d;
        let (alpha, beta) = match case {
            CenteringCase::Symmetric => (l * log_2d, gamma * (l * e_of_l + 2.0)),
            _ => (2.0 * l * log_2d, gamma * (l * e_of_l + 4.0) / 2.0),
        };
        Ok(BernsteinParams { l, e_of_l, kappa_o: (beta / alpha).sqrt(), alpha, beta, gamma })
    }

    /// `α κ + β/κ + √Γ`, the bound on `√(E‖S_n‖_∞²)` at truncation level `κ`.
    pub fn bound_at(&self, kappa: f64) -> f64 {
        self.alpha * kappa + self.beta / kappa + self.gamma.sqrt()
    }

    /// The bound at the optimal level `κ_o = √(β/α)`, i.e. `2√(αβ) + √Γ`.
    pub fn optimal_bound(&self) -> f64 {
        self.bound_at(self.kappa_o)
    }
}

/// `(1 + 3.46 √log(2d))²`, or `(1 + 2.9 √log(2d))²` for symmetric summands.
pub fn k_trbern(d: u64, case: CenteringCase) -> Result<f64> {
    let ln_d = check_dim(d, 1)?;
    k_trbern_log(ln_d, case)
}

pub fn k_trbern_log(log_d: f64, case: CenteringCase) -> Result<f64> {
    let log_d = check_log_d(log_d)?;
    let coeff = match case {
        CenteringCase::Symmetric => TRBERN_COEFF_SYMMETRIC,
        _ => TRBERN_COEFF,
    };
    Ok((1.0 + coeff * (LN_2 + log_d).sqrt()).powi(2))
}

const TABLE_APPROACHES: [Approach; 4] =
    [Approach::Nemirovski, Approach::Type2, Approach::Type2Refined, Approach::TruncBernstein];

fn formula(approach: Approach, case: CenteringCase) -> &'static str {
    use Approach::*;
    use CenteringCase::*;
    match (approach, case) {
        (Nemirovski, General) => "8e log d - 4e",
        (Nemirovski, _) => "2e log d - e",
        (Type2, Symmetric) => "2 log(2d)",
        (Type2, _) => "8 log(2d)",
        (Type2Refined, Symmetric) => "2 log d + h2(d)",
        (Type2Refined, _) => "8 log d + 4 h2(d)",
        (TruncBernstein, Symmetric) => "(1 + 2.9 sqrt(log(2d)))^2",
        (TruncBernstein, _) => "(1 + 3.46 sqrt(log(2d)))^2",
        (Naive, _) => "d^|1 - 2/r|",
        (John, _) => "d",
    }
}

/// Closed-form `K(d, ∞)` for one table cell, from `log d`.
pub fn table_k_log(approach: Approach, case: CenteringCase, log_d: f64) -> Result<f64> {
    match approach {
        Approach::Nemirovski => k_nem_case_log(log_d, case),
        Approach::Type2 => k_type2_linf_log(log_d, case, false),
        Approach::Type2Refined => k_type2_linf_log(log_d, case, true),
        Approach::TruncBernstein => k_trbern_log(log_d, case),
        other => domain(format!("{other} has no ℓ_∞ table entry")),
    }
}

/// All twelve `K(d, ∞)` cells: four approaches times three cases.
pub fn table_rows(d: u64) -> Result<Vec<ConstantRow>> {
    check_dim(d, 3)?;
    let mut rows = Vec::with_capacity(12);
    for approach in TABLE_APPROACHES {
        for case in CenteringCase::ALL {
            let k = match approach {
                Approach::Nemirovski => k_nem_case(d, case)?,
                Approach::Type2 => k_type2_linf(d, case, false)?,
                Approach::Type2Refined => k_type2_linf(d, case, true)?,
                _ => k_trbern(d, case)?,
            };
            rows.push(ConstantRow {
                approach,
                case,
                d: Some(d),
                log_d: (d as f64).ln(),
                r: RExponent::Infinity,
                k,
                formula: formula(approach, case),
            });
        }
    }
    Ok(rows)
}

/// Same cells as [`table_rows`] for a dimension given only through `log d`.
pub fn table_rows_log(log_d: f64) -> Result<Vec<ConstantRow>> {
    let mut rows = Vec::with_capacity(12);
    for approach in TABLE_APPROACHES {
        for case in CenteringCase::ALL {
            rows.push(ConstantRow {
                approach,
                case,
                d: None,
                log_d,
                r: RExponent::Infinity,
                k: table_k_log(approach, case, log_d)?,
                formula: formula(approach, case),
            });
        }
    }
    Ok(rows)
}

/// Limits `K* = lim K(d, ∞)/log d` per approach and case, and the ratios
/// between routes in the centered case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRatios {
    pub trbern_over_nem: f64,
    pub type2_over_nem: f64,
    pub trbern_over_type2: f64,
    /// Rows nemirovski, type2, trunc_bernstein; columns general, centered, symmetric.
    pub k_star: [[f64; 3]; 3],
}

pub fn limit_ratios() -> LimitRatios {
    let nem = 2.0 * E;
    let type2 = 8.0;
    let trbern = TRBERN_COEFF * TRBERN_COEFF;
    LimitRatios {
        trbern_over_nem: trbern / nem,
        type2_over_nem: type2 / nem,
        trbern_over_type2: trbern / type2,
        k_star: [
            [4.0 * nem, nem, nem],
            [type2, type2, type2 / 4.0],
            [trbern, trbern, TRBERN_COEFF_SYMMETRIC * TRBERN_COEFF_SYMMETRIC],
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(r: f64) -> RExponent {
        RExponent::new(r).unwrap()
    }

    #[test]
    fn naive_and_john() {
        assert_eq!(k_naive(9, fin(1.0)).unwrap(), 9.0);
        for d in [1, 5, 1000] {
            assert_eq!(k_naive(d, fin(2.0)).unwrap(), 1.0);
            assert_eq!(k_john(d).unwrap(), d as f64);
            assert!((k_naive(d, fin(1.0)).unwrap() - d as f64).abs() < 1e-12 * d as f64);
        }
        assert!((k_naive(4, RExponent::Infinity).unwrap() - 4.0).abs() < 1e-15);
        assert!(k_naive(0, fin(2.0)).is_err());
        assert!(k_john(0).is_err());
    }

    #[test]
    fn critical_exponent() {
        let r8 = r_critical(8).unwrap();
        assert!((r8 - 2.4858).abs() < 1e-3);
        for d in [8u64, 55, 1000, 10_000_000] {
            let ln = (d as f64).ln();
            let rd = r_critical(d).unwrap();
            assert!(2.0 * ln - 2.0 < rd && rd < 2.0 * ln, "d={d}");
        }
        assert!(r_critical(7).is_err());
    }

    #[test]
    fn nem_examples() {
        let k = k_nem(7, RExponent::Infinity).unwrap();
        assert!((k.k - 7.0).abs() < 1e-12 && k.q_star == 2.0);
        let k = k_nem(8, fin(2.4)).unwrap();
        assert!((k.k - 1.4).abs() < 1e-12 && (k.q_star - 2.4).abs() < 1e-12);
        let k = k_nem(1_000_000, RExponent::Infinity).unwrap();
        assert!((66.96..=72.40).contains(&k.k), "{}", k.k);
        assert!(k_nem(8, fin(1.5)).is_err());
    }

    #[test]
    fn nem_case_examples() {
        let ln3 = 3f64.ln();
        assert!((k_nem_case(3, CenteringCase::Centered).unwrap() - 3.2543).abs() < 1e-4);
        assert_eq!(k_nem_case(3, CenteringCase::Centered).unwrap(), 2.0 * E * ln3 - E);
        assert!((k_nem_case(3, CenteringCase::General).unwrap() - 13.017).abs() < 1e-3);
        for d in [3, 10, 12345] {
            assert_eq!(
                k_nem_case(d, CenteringCase::Symmetric).unwrap(),
                k_nem_case(d, CenteringCase::Centered).unwrap()
            );
        }
        assert!(k_nem_case(2, CenteringCase::Centered).is_err());
    }

    #[test]
    fn haagerup_examples() {
        assert!((haagerup_b(2.0).unwrap() - 1.0).abs() < 1e-14);
        let b4 = 2f64.sqrt() * 0.75f64.powf(0.25);
        assert!((haagerup_b(4.0).unwrap() - b4).abs() < 1e-14);
        assert!((haagerup_b(4.0).unwrap() - 1.31607).abs() < 1e-5);
        let ratio = haagerup_b(1e4).unwrap() / 1e4f64.sqrt();
        assert!((ratio - (-0.5f64).exp()).abs() < 1e-3);
        assert!(haagerup_b(1.9).is_err());
        assert!(haagerup_b(f64::INFINITY).is_err());
        assert!((k_type2_lr(2.0).unwrap() - 4.0).abs() < 1e-13);
        assert!((k_type2_lr(4.0).unwrap() - 4.0 * b4 * b4).abs() < 1e-12);
        assert!((k_type2_lr(4.0).unwrap() - 6.9282).abs() < 1e-4);
    }

    #[test]
    fn type2_lr_is_weaker_than_smoothness() {
        for r in [2.0, 3.0, 10.0, 100.0, 1e4] {
            assert!(k_type2_lr(r).unwrap() > r - 1.0);
        }
    }

    #[test]
    fn type2_linf_examples() {
        assert!((k_type2_linf(1, CenteringCase::Centered, false).unwrap() - 8.0 * LN_2).abs() < 1e-14);
        assert!((k_type2_linf(1000, CenteringCase::Centered, false).unwrap() - 8.0 * 2000f64.ln()).abs() < 1e-12);
        for d in [1, 3, 77, 1_000_000] {
            for refined in [false, true] {
                let c = k_type2_linf(d, CenteringCase::Centered, refined).unwrap();
                let g = k_type2_linf(d, CenteringCase::General, refined).unwrap();
                let s = k_type2_linf(d, CenteringCase::Symmetric, refined).unwrap();
                assert_eq!(c, g);
                assert_eq!(s, c / 4.0);
            }
        }
    }

    #[test]
    fn h2_closed_form_at_one() {
        // direct transcription of the correction term at d = 1
        let c = 12.88 / (2.0 * PI).sqrt();
        let lc = (c / 2.0).ln();
        let a = 2.0 * (c / (2.0 * (2.0 * lc).sqrt())).ln();
        let want =
            2.0 * (c / 2.0).ln() - (2.0 * lc).ln() + 8.0 * (2.0 * lc).sqrt() / (3.0 * a.sqrt() + (a + 8.0).sqrt());
        assert!((h2(1.0).unwrap() - want).abs() < 1e-13);
        assert!(h2(0.5).is_err());
    }

    #[test]
    fn bern_e_examples() {
        assert!((bern_e(1.0).unwrap() - (E - 2.0)).abs() < 1e-15);
        assert!((bern_e(0.5).unwrap() - (E * E - 3.0)).abs() < 1e-13);
        let want = (1.0f64 / 0.407).exp() - 1.0 - 1.0 / 0.407;
        assert!((bern_e(0.407).unwrap() - want).abs() < 1e-13);
        assert!((bern_e(0.407).unwrap() - 8.213).abs() < 1e-3);
        assert!(bern_e(0.0).is_err());
        assert!(bern_e(-1.0).is_err());
        // series branch joins the direct branch smoothly
        let x = 0.0099;
        assert!((bern_e(1.0 / x).unwrap() - (x.exp_m1() - x)).abs() < 1e-17);
    }

    #[test]
    fn bern_e_is_decreasing() {
        let mut prev = f64::INFINITY;
        let mut l = 0.05;
        while l < 1e6 {
            let e = bern_e(l).unwrap();
            assert!(e < prev && e > 0.0, "L={l}");
            prev = e;
            l *= 1.1;
        }
        assert!(prev < 1e-11);
    }

    #[test]
    fn trbern_examples() {
        let c = trbern_coeff(0.407, CenteringCase::Centered).unwrap();
        assert!((c - 3.4575).abs() < 1e-4 && c <= 3.46);
        let s = trbern_coeff(0.5, CenteringCase::Symmetric).unwrap();
        assert!((s - 2.8964).abs() < 1e-4 && s <= 2.9);
        assert!(trbern_coeff(0.0, CenteringCase::General).is_err());
        let k1 = k_trbern(1, CenteringCase::Centered).unwrap();
        assert!((k1 - (1.0 + 3.46 * LN_2.sqrt()).powi(2)).abs() < 1e-13);
        assert!((k1 - 15.0594).abs() < 1e-3);
        assert!((k_trbern(1000, CenteringCase::Centered).unwrap() - 111.07).abs() < 1e-2);
        // (1 + 2.9 √log 2000)² evaluated directly
        let want = (1.0 + 2.9 * 2000f64.ln().sqrt()).powi(2);
        let got = k_trbern(1000, CenteringCase::Symmetric).unwrap();
        assert!((got - want).abs() < 1e-12 && (got - 80.914).abs() < 1e-3);
        assert_eq!(k_trbern(50, CenteringCase::General).unwrap(), k_trbern(50, CenteringCase::Centered).unwrap());
    }

    #[test]
    fn bernstein_params_reproduce_coefficient() {
        for case in CenteringCase::ALL {
            for (l, log_d, gamma) in [(0.407, 3.0, 1.0), (0.5, 10.0, 7.5), (1.3, 0.0, 0.2)] {
                let p = BernsteinParams::new(l, log_d, gamma, case).unwrap();
                let coeff = trbern_coeff(l, case).unwrap();
                let want = (1.0 + coeff * (LN_2 + log_d).sqrt()) * gamma.sqrt();
                assert!((p.optimal_bound() - want).abs() < 1e-12 * want);
                assert!((p.kappa_o - (p.beta / p.alpha).sqrt()).abs() < 1e-15);
                assert!((p.e_of_l - bern_e(l).unwrap()).abs() < 1e-15);
                // κ_o minimizes α κ + β/κ
                for f in [0.5, 0.9, 1.1, 2.0] {
                    assert!(p.bound_at(p.kappa_o * f) >= p.optimal_bound());
                }
            }
        }
    }

    #[test]
    fn table_has_twelve_rows() {
        let rows = table_rows(3).unwrap();
        assert_eq!(rows.len(), 12);
        let nem_c =
            rows.iter().find(|r| r.approach == Approach::Nemirovski && r.case == CenteringCase::Centered).unwrap();
        assert_eq!(nem_c.k, 2.0 * E * 3f64.ln() - E);
        assert!(table_rows(2).is_err());
    }

    #[test]
    fn limit_values() {
        let l = limit_ratios();
        assert!((l.trbern_over_nem - 2.20205).abs() < 1e-5);
        assert!((l.type2_over_nem - 1.47152).abs() < 1e-5);
        assert!((l.trbern_over_type2 - 1.49645).abs() < 1e-5);
        let centered = [l.k_star[0][1], l.k_star[1][1], l.k_star[2][1]];
        for (got, want) in centered.iter().zip([5.4366, 8.0, 11.9716]) {
            assert!((got - want).abs() < 1e-4);
        }
    }

    #[test]
    fn parse_case() {
        assert_eq!("Centered".parse::<CenteringCase>().unwrap(), CenteringCase::Centered);
        assert!("other".parse::<CenteringCase>().is_err());
    }
}
