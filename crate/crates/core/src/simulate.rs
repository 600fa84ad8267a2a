//! Exact enumeration and seeded Monte Carlo for the ratio
//!
//! ```text
//! E‖S_n - c‖_r² / Σ E‖X_i‖_r²
//! ```
//!
//! over a handful of finite laws that are extremal for the inequality.
//! `c` is `E S_n` in the general case and zero otherwise; both the centering
//! and the denominator are known in closed form, so only the numerator is
//! random.
//!
//! Monte Carlo replicates draw from per-replicate streams (see [`crate::rng`])
//! and are reduced in fixed chunks in index order, so estimates are
//! bit-identical however rayon schedules the work.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    h2, k_john, k_naive, k_nem, k_nem_case, k_trbern, k_type2_linf, Approach, CenteringCase, PINELIS_K,
};
use crate::error::{domain, Error, Result};
use crate::gauss::pinelis_tail;
use crate::norm::{norm_slice, RExponent, RealVector};
use crate::rng::{ReplicateRng, StreamKey};

/// Largest number of random signs enumerated exactly.
pub const ENUMERATION_BITS: u32 = 22;

/// Replicates per reduction chunk.
const CHUNK: u64 = 1024;

/// Run identifiers separating the stream families of different operations.
pub const RUN_ESTIMATE: u64 = 0;
pub const RUN_LEMMA: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// `X_i = ε_i b_{i mod d}` with Rademacher signs and the standard basis.
    RademacherBasis,
    /// `X_i` uniform on `{-1, 1}^d`.
    UniformHypercube,
    /// Independent coordinates with `P(X_ij = 1) = p = 1 - P(X_ij = -1)`.
    AsymBernoulli { p: f64 },
    /// `X_i = ε_i x_i` for fixed vectors `x_i`.
    FixedVectors { vectors: Vec<RealVector> },
}

impl DistributionSpec {
    pub fn asym_bernoulli(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(DistributionSpec::AsymBernoulli { p })
    }

    pub fn fixed_vectors(vectors: Vec<RealVector>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return domain("fixed_vectors needs at least one vector");
        };
        let dim = first.dim();
        if vectors.iter().any(|v| v.dim() != dim) {
            return domain("fixed_vectors must all have the same dimension");
        }
        Ok(DistributionSpec::FixedVectors { vectors })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistributionSpec::RademacherBasis => "rademacher_basis",
            DistributionSpec::UniformHypercube => "uniform_hypercube",
            DistributionSpec::AsymBernoulli { .. } => "asym_bernoulli",
            DistributionSpec::FixedVectors { .. } => "fixed_vectors",
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            DistributionSpec::AsymBernoulli { p } => *p == 0.5,
            _ => true,
        }
    }

    /// `E X_ij`, the same for every summand and coordinate.
    pub fn coordinate_mean(&self) -> f64 {
        match self {
            DistributionSpec::AsymBernoulli { p } => 2.0 * p - 1.0,
            _ => 0.0,
        }
    }

    /// Checks that the law is well formed for dimension `d` and `n` summands
    /// and that it is admissible in the given case.
    pub fn validate(&self, case: CenteringCase, d: usize, n: usize) -> Result<()> {
        if d == 0 || n == 0 {
            return domain(format!("d and n must be positive, got d={d}, n={n}"));
        }
        match self {
            DistributionSpec::AsymBernoulli { p } => check_p(*p)?,
            DistributionSpec::FixedVectors { vectors } => {
                if vectors.is_empty() {
                    return domain("fixed_vectors needs at least one vector");
                }
                if vectors.len() != n || vectors.iter().any(|v| v.dim() != d) {
                    return domain(format!(
                        "fixed_vectors has {} vectors of dim {}, expected n={n}, d={d}",
                        vectors.len(),
                        vectors[0].dim()
                    ));
                }
            }
            _ => {}
        }
        match case {
            CenteringCase::Symmetric if !self.is_symmetric() => domain(format!("{} is not symmetric", self.name())),
            CenteringCase::Centered if self.coordinate_mean() != 0.0 => {
                domain(format!("{} is not centered", self.name()))
            }
            _ => Ok(()),
        }
    }

    /// Number of independent binary draws per realization of `S_n`.
    pub fn enumeration_bits(&self, d: usize, n: usize) -> usize {
        match self {
            DistributionSpec::RademacherBasis | DistributionSpec::FixedVectors { .. } => n,
            _ => n.saturating_mul(d),
        }
    }

    /// `Σ_i E‖X_i‖_r²` in closed form.
    pub fn denominator(&self, d: usize, n: usize, r: RExponent) -> f64 {
        match self {
            DistributionSpec::RademacherBasis => n as f64,
            DistributionSpec::UniformHypercube | DistributionSpec::AsymBernoulli { .. } => {
                // ‖(±1, …, ±1)‖_r² = d^{2/r}
                n as f64 * (2.0 * r.recip() * (d as f64).ln()).exp()
            }
            DistributionSpec::FixedVectors { vectors } => {
                vectors.iter().map(|v| norm_slice(v.as_slice(), r).powi(2)).sum()
            }
        }
    }

    /// Centering vector component: `E S_n` in the general case, else zero.
    fn centering(&self, case: CenteringCase, n: usize) -> f64 {
        match case {
            CenteringCase::General => n as f64 * self.coordinate_mean(),
            _ => 0.0,
        }
    }

    /// Writes the realization of `S_n` encoded by `bits` (bit `k` set means
    /// the `k`-th draw is `+1`) into `sum`.
    fn realize(&self, bits: u64, d: usize, n: usize, sum: &mut [f64]) {
        sum.iter_mut().for_each(|x| *x = 0.0);
        let sign = |k: usize| if bits >> k & 1 == 1 { 1.0 } else { -1.0 };
        match self {
            DistributionSpec::RademacherBasis => {
                for i in 0..n {
                    sum[i % d] += sign(i);
                }
            }
            DistributionSpec::UniformHypercube | DistributionSpec::AsymBernoulli { .. } => {
                for i in 0..n {
                    for (j, s) in sum.iter_mut().enumerate() {
                        *s += sign(i * d + j);
                    }
                }
            }
            DistributionSpec::FixedVectors { vectors } => {
                for (i, v) in vectors.iter().enumerate() {
                    let e = sign(i);
                    for (s, x) in sum.iter_mut().zip(v.as_slice()) {
                        *s += e * x;
                    }
                }
            }
        }
    }

    fn sample(&self, rng: &mut ReplicateRng, d: usize, n: usize, sum: &mut [f64]) {
        sum.iter_mut().for_each(|x| *x = 0.0);
        match self {
            DistributionSpec::RademacherBasis => {
                for i in 0..n {
                    sum[i % d] += rng.sign();
                }
            }
            DistributionSpec::UniformHypercube => {
                for _ in 0..n {
                    for s in sum.iter_mut() {
                        *s += rng.sign();
                    }
                }
            }
            DistributionSpec::AsymBernoulli { p } => {
                for _ in 0..n {
                    for s in sum.iter_mut() {
                        *s += if rng.uniform() < *p { 1.0 } else { -1.0 };
                    }
                }
            }
            DistributionSpec::FixedVectors { vectors } => {
                for v in vectors {
                    let e = rng.sign();
                    for (s, x) in sum.iter_mut().zip(v.as_slice()) {
                        *s += e * x;
                    }
                }
            }
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.5..1.0).contains(&p) {
        return domain(format!("p must lie in [1/2, 1), got {p}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCConfig {
    pub d: usize,
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
}

impl MCConfig {
    pub fn new(d: usize, n: usize, reps: u64, seed: u64) -> Result<Self> {
        if d == 0 || n == 0 {
            return domain(format!("d and n must be positive, got d={d}, n={n}"));
        }
        if reps == 0 {
            return domain("reps must be >= 1");
        }
        Ok(MCConfig { d, n, reps, seed })
    }
}

/// Estimated or exact value of `E‖S_n - c‖_r² / Σ E‖X_i‖_r²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub stderr: f64,
    pub case: CenteringCase,
    pub exact: bool,
    pub numerator: f64,
    pub denominator: f64,
}

/// Running mean and centered second moment.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }

    fn stderr(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2.max(0.0) / (self.count - 1.0) / self.count).sqrt()
    }
}

fn centered_norm_sq(sum: &mut [f64], c: f64, r: RExponent) -> f64 {
    if c != 0.0 {
        sum.iter_mut().for_each(|x| *x -= c);
    }
    norm_slice(sum, r).powi(2)
}

/// Monte Carlo estimate over `cfg.reps` independent replicates.
pub fn estimate_ratio(
    dist: &DistributionSpec,
    case: CenteringCase,
    cfg: &MCConfig,
    r: RExponent,
) -> Result<RatioEstimate> {
    dist.validate(case, cfg.d, cfg.n)?;
    if cfg.reps == 0 {
        return domain("reps must be >= 1");
    }
    let (d, n) = (cfg.d, cfg.n);
    let c = dist.centering(case, n);
    let key = StreamKey::new(cfg.seed, RUN_ESTIMATE);
    let chunks = cfg.reps.div_ceil(CHUNK);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut sum = vec![0.0; d];
            let mut m = Moments::default();
            let end = ((chunk + 1) * CHUNK).min(cfg.reps);
            for k in chunk * CHUNK..end {
                let mut rng = key.replicate(k);
                dist.sample(&mut rng, d, n, &mut sum);
                m.push(centered_norm_sq(&mut sum, c, r));
            }
            m
        })
        .collect();
    let m = partial.into_iter().fold(Moments::default(), Moments::merge);
    let denominator = dist.denominator(d, n, r);
    Ok(RatioEstimate {
        ratio: m.mean / denominator,
        stderr: m.stderr() / denominator,
        case,
        exact: false,
        numerator: m.mean,
        denominator,
    })
}

/// Exact expectation by enumerating every outcome of the underlying signs.
pub fn exact_ratio(
    dist: &DistributionSpec,
    case: CenteringCase,
    d: usize,
    n: usize,
    r: RExponent,
) -> Result<RatioEstimate> {
    dist.validate(case, d, n)?;
    let bits = dist.enumeration_bits(d, n);
    if bits > ENUMERATION_BITS as usize {
        return Err(Error::Resource(format!(
            "exact enumeration needs 2^{bits} outcomes, budget is 2^{ENUMERATION_BITS}"
        )));
    }
    let c = dist.centering(case, n);
    let weight = outcome_weights(dist, bits);
    let total = 1u64 << bits;
    let chunk = 1u64 << 12;
    let partial: Vec<f64> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let mut sum = vec![0.0; d];
            let mut acc = 0.0;
            for mask in ci * chunk..((ci + 1) * chunk).min(total) {
                dist.realize(mask, d, n, &mut sum);
                acc += weight(mask) * centered_norm_sq(&mut sum, c, r);
            }
            acc
        })
        .collect();
    let numerator: f64 = partial.iter().sum();
    let denominator = dist.denominator(d, n, r);
    Ok(RatioEstimate { ratio: numerator / denominator, stderr: 0.0, case, exact: true, numerator, denominator })
}

/// Probability of each sign pattern.
fn outcome_weights(dist: &DistributionSpec, bits: usize) -> Box<dyn Fn(u64) -> f64 + Sync> {
    match dist {
        DistributionSpec::AsymBernoulli { p } if *p != 0.5 => {
            // table[k] = p^k (1-p)^{bits-k}
            let table: Vec<f64> = (0..=bits).map(|k| p.powi(k as i32) * (1.0 - p).powi((bits - k) as i32)).collect();
            Box::new(move |mask| table[mask.count_ones() as usize])
        }
        _ => {
            let w = 0.5f64.powi(bits as i32);
            Box::new(move |_| w)
        }
    }
}

/// `E‖Y - EY‖_∞² / E‖Y‖_∞² = 4((1-p)² p^d + p²(1 - p^d))` for one vector
/// with independent `±1` coordinates and `P(+1) = p`.
pub fn asym_ratio(p: f64, d: u64) -> Result<f64> {
    check_p(p)?;
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    let ln_pd = d as f64 * p.ln();
    let pd = ln_pd.exp();
    let one_minus_pd = -ln_pd.exp_m1();
    Ok(4.0 * ((1.0 - p).powi(2) * pd + p * p * one_minus_pd))
}

/// How a type-2 ratio is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Exact,
    MonteCarlo { reps: u64, seed: u64 },
}

/// `E‖Σ ε_i x_i‖_∞² / Σ ‖x_i‖_∞²` for fixed vectors.
pub fn type2_ratio(vectors: &[RealVector], how: Evaluation) -> Result<RatioEstimate> {
    let dist = DistributionSpec::fixed_vectors(vectors.to_vec())?;
    let (d, n) = (vectors[0].dim(), vectors.len());
    match how {
        Evaluation::Exact => exact_ratio(&dist, CenteringCase::Symmetric, d, n, RExponent::Infinity),
        Evaluation::MonteCarlo { reps, seed } => {
            let cfg = MCConfig::new(d, n, reps, seed)?;
            estimate_ratio(&dist, CenteringCase::Symmetric, &cfg, RExponent::Infinity)
        }
    }
}

/// Upper bounds on `T₂(ℓ_∞^d)²`: `2 log(2d)` and `2 log d + h₂(d)`.
pub fn type2_bounds(d: usize) -> Result<(f64, f64)> {
    let df = d as f64;
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    Ok((2.0 * (2.0 * df).ln(), 2.0 * df.ln() + h2(df)?))
}

/// One admissible constant for a (case, d, r) triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub approach: Approach,
    pub k: f64,
    pub ratio: f64,
    /// `K - ratio + 4 stderr`; negative means violated.
    pub margin: f64,
    pub pass: bool,
}

/// Constants known to be valid for the given case, dimension and norm.
pub fn applicable_bounds(case: CenteringCase, d: usize, r: RExponent) -> Result<Vec<(Approach, f64)>> {
    let du = d as u64;
    let general = if case == CenteringCase::General { 4.0 } else { 1.0 };
    let mut out = Vec::new();
    if r.value() >= 2.0 {
        let nem = if r.is_infinite() && du >= 3 { k_nem_case(du, case)? } else { general * k_nem(du, r)?.k };
        out.push((Approach::Nemirovski, nem));
    }
    if r.is_infinite() {
        out.push((Approach::Type2, k_type2_linf(du, case, false)?));
        out.push((Approach::Type2Refined, k_type2_linf(du, case, true)?));
        out.push((Approach::TruncBernstein, k_trbern(du, case)?));
        out.push((Approach::John, general * k_john(du)?));
    } else {
        out.push((Approach::Naive, general * k_naive(du, r)?));
    }
    Ok(out)
}

/// Compares a ratio against every applicable constant with a slack of four
/// standard errors (zero for exact ratios) plus rounding.
pub fn check_master_inequality(est: &RatioEstimate, d: usize, r: RExponent) -> Result<Vec<BoundCheck>> {
    Ok(applicable_bounds(est.case, d, r)?
        .into_iter()
        .map(|(approach, k)| {
            let margin = k - est.ratio + 4.0 * est.stderr;
            BoundCheck { approach, k, ratio: est.ratio, margin, pass: margin >= -1e-12 * k }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub z: f64,
    /// Exact `P(|Σ a_i ε_i| ≥ z)`.
    pub probability: f64,
    /// `2 exp(-z²/(2v²))`.
    pub hoeffding: f64,
    /// `2K(1 - Φ(z/v))` with `K = 3.22`, for `z > 0`.
    pub pinelis: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfRow {
    pub t: f64,
    /// `E exp(t Σ a_i ε_i)` by enumeration.
    pub enumerated: f64,
    /// `Π cosh(t a_i)`.
    pub product: f64,
    /// `exp(t² v² / 2)`.
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingReport {
    pub v: f64,
    pub tails: Vec<TailRow>,
    pub mgf: Vec<MgfRow>,
}

impl HoeffdingReport {
    pub fn all_pass(&self) -> bool {
        self.tails.iter().all(|r| r.pass) && self.mgf.iter().all(|r| r.pass)
    }
}

/// Checks the Hoeffding and Pinelis tail bounds and the sub-Gaussian moment
/// bound for `Σ a_i ε_i` against exact enumeration.
pub fn hoeffding_check(a: &[f64], z_grid: &[f64], t_grid: &[f64]) -> Result<HoeffdingReport> {
    if a.is_empty() {
        return domain("coefficient list must be nonempty");
    }
    if a.len() > ENUMERATION_BITS as usize {
        return Err(Error::Resource(format!(
            "{} coefficients exceed the enumeration budget of {ENUMERATION_BITS}",
            a.len()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return domain("coefficients must be finite");
    }
    let v2: f64 = a.iter().map(|x| x * x).sum();
    let v = v2.sqrt();
    let total = 1u64 << a.len();
    let w = 0.5f64.powi(a.len() as i32);
    let sums: Vec<f64> = (0..total)
        .map(|mask| a.iter().enumerate().map(|(i, x)| if mask >> i & 1 == 1 { *x } else { -*x }).sum())
        .collect();
    let scale = a.iter().map(|x| x.abs()).sum::<f64>();

    let mut tails = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        // borderline outcomes count as exceeding, which only makes the check stricter
        let cut = z - 1e-12 * scale;
        let probability = w * sums.iter().filter(|s| s.abs() >= cut).count() as f64;
        let hoeffding = 2.0 * (-z * z / (2.0 * v2)).exp();
        let pinelis = if z > 0.0 && v > 0.0 { Some(pinelis_tail(z, v, PINELIS_K)?) } else { None };
        let pass = probability <= hoeffding && pinelis.is_none_or(|p| probability <= p);
        tails.push(TailRow { z, probability, hoeffding, pinelis, pass });
    }

    let mut mgf = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let enumerated = w * sums.iter().map(|s| (t * s).exp()).sum::<f64>();
        let product: f64 = a.iter().map(|x| (t * x).cosh()).product();
        let bound = (0.5 * t * t * v2).exp();
        let pass = product <= bound * (1.0 + 1e-12) && enumerated <= bound * (1.0 + 1e-12);
        mgf.push(MgfRow { t, enumerated, product, bound, pass });
    }
    Ok(HoeffdingReport { v, tails, mgf })
}

/// A finite real law given by atoms and their probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteLaw {
    pub atoms: Vec<(f64, f64)>,
}

impl FiniteLaw {
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(x, p)| x * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms.iter().map(|(x, p)| p * (x - m).powi(2)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub l: f64,
    /// `E exp(Z/(κL))`.
    pub moment: f64,
    /// `1 + σ² e(L)/κ²`.
    pub linear_bound: f64,
    /// `exp(σ² e(L)/κ²)`.
    pub exp_bound: f64,
    pub pass: bool,
}

/// Exact exponential moments of a bounded centered law against the
/// Bernstein-type bounds, for every `L` in the grid.
pub fn bernstein_moment_check(law: &FiniteLaw, kappa: f64, l_grid: &[f64]) -> Result<Vec<MomentRow>> {
    if law.atoms.is_empty() || law.atoms.len() > 64 {
        return domain(format!("law needs 1..=64 atoms, got {}", law.atoms.len()));
    }
    if !(kappa > 0.0) {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    let total: f64 = law.atoms.iter().map(|(_, p)| p).sum();
    if law.atoms.iter().any(|(x, p)| !x.is_finite() || !(*p >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return domain("atoms must be finite with probabilities summing to 1");
    }
    if law.atoms.iter().any(|(x, _)| x.abs() > kappa) {
        return domain(format!("law is not bounded by kappa = {kappa}"));
    }
    let mean = law.mean();
    if mean.abs() > 1e-12 * kappa {
        return domain(format!("law must have mean zero, got {mean}"));
    }
    let sigma2 = law.variance();
    l_grid
        .iter()
        .map(|&l| {
            let e = crate::constants::bern_e(l)?;
            let moment: f64 = law.atoms.iter().map(|(x, p)| p * (x / (kappa * l)).exp()).sum();
            let s = sigma2 * e / (kappa * kappa);
            let linear_bound = 1.0 + s;
            let exp_bound = s.exp();
            let tol = 1e-12 * linear_bound;
            Ok(MomentRow {
                l,
                moment,
                linear_bound,
                exp_bound,
                pass: moment <= linear_bound + tol && linear_bound <= exp_bound + tol,
            })
        })
        .collect()
}
