//! Admissible `N`-windows, bound ratios, the θ-region and exponent fits,
//! plus the seeded sweep harness in [`sweep`].

use serde::{Deserialize, Serialize};

use crate::character::CompositeCharacter;
use crate::error::{Error, Result};
use crate::modular::{is_prime, odd_primes_in};
use crate::smooth_sums::s_chi;
use crate::weights::SmoothWeight;

pub mod sweep;

pub use sweep::{sweep, CharacterSelection, PrimeRange, SweepConfig, SweepOutput, SweepSummary};

/// Multipliers on the two ends of `M₁ ≤ N ≤ M₁ min{M₂^{2/3}, M₃²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub c_lo: f64,
    pub c_hi: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self { c_lo: 1.0, c_hi: 1.0 }
    }
}

/// The four size conditions behind the admissible window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SizeCondition {
    /// `M₁ ≪ N`: enough terms in the `n`-sum
    EnoughTerms,
    /// `N ≪ M₁M₃²`, i.e. `Q ≪ M₃`
    ModulusBelowThird,
    /// `N ≪ M₁M₂²`, i.e. `Q ≪ M₂`
    ModulusBelowSecond,
    /// `N ≪ M₁M₂^{2/3}`: enough terms in the sum after Cauchy
    EnoughTermsAfterCauchy,
}

impl SizeCondition {
    pub fn name(self) -> &'static str {
        match self {
            Self::EnoughTerms => "N >= M1",
            Self::ModulusBelowThird => "N <= M1*M3^2",
            Self::ModulusBelowSecond => "N <= M1*M2^2",
            Self::EnoughTermsAfterCauchy => "N <= M1*M2^(2/3)",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeReport {
    pub admissible: bool,
    pub lower: f64,
    pub upper: f64,
    /// Upper condition giving `upper`.
    pub binding: SizeCondition,
    pub violated: Vec<SizeCondition>,
}

fn check_triple(m1: u64, m2: u64, m3: u64) -> Result<()> {
    for p in [m1, m2, m3] {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
    }
    if m1 == m2 || m1 == m3 || m2 == m3 {
        return Err(Error::InvalidArgument(format!("primes {m1}, {m2}, {m3} not distinct")));
    }
    Ok(())
}

/// Checks `c_lo M₁ ≤ N ≤ c_hi M₁ min{M₂^{2/3}, M₃²}` and names the conditions involved.
pub fn validate_range(m1: u64, m2: u64, m3: u64, n: f64, window: Window) -> Result<RangeReport> {
    check_triple(m1, m2, m3)?;
    let (a, b, c) = (m1 as f64, m2 as f64, m3 as f64);
    let uppers = [
        (SizeCondition::ModulusBelowThird, window.c_hi * a * c * c),
        (SizeCondition::ModulusBelowSecond, window.c_hi * a * b * b),
        (SizeCondition::EnoughTermsAfterCauchy, window.c_hi * a * b.powf(2.0 / 3.0)),
    ];
    let lower = window.c_lo * a;
    let mut violated = Vec::new();
    if n < lower {
        violated.push(SizeCondition::EnoughTerms);
    }
    for &(cond, u) in &uppers {
        if n > u {
            violated.push(cond);
        }
    }
    let &(binding, upper) = uppers
        .iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("three bounds");
    Ok(RangeReport {
        admissible: violated.is_empty(),
        lower,
        upper,
        binding,
        violated,
    })
}

/// `√(M₂M₃) + M₁^{¼}M₂^{½}N^{¼} + M₃^{½}N^{¾}`.
pub fn bound_value(m1: u64, m2: u64, m3: u64, n: f64) -> f64 {
    let (a, b, c) = (m1 as f64, m2 as f64, m3 as f64);
    (b * c).sqrt() + a.powf(0.25) * b.sqrt() * n.powf(0.25) + c.sqrt() * n.powf(0.75)
}

/// `log Mᵢ / log M`.
pub fn thetas(m1: u64, m2: u64, m3: u64) -> [f64; 3] {
    let l = [m1, m2, m3].map(|p| (p as f64).ln());
    let t = l[0] + l[1] + l[2];
    l.map(|x| x / t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumRecord {
    pub m1: u64,
    pub m2: u64,
    pub m3: u64,
    pub k1: u64,
    pub k2: u64,
    pub k3: u64,
    pub labels: String,
    pub n: f64,
    pub abs_s: f64,
    pub bound: f64,
    pub ratio: f64,
    /// `Σ W(n/N)`, the trivial bound for `|S_χ(N)|`
    pub trivial_bound: f64,
    pub trivial_ratio: f64,
    pub theta: [f64; 3],
    pub ms: f64,
}

/// `|S_χ(N)|` against the three-term bound with `ε = 0`.
pub fn bound_ratio(m: [u64; 3], k: [u64; 3], n: f64, window: Window) -> Result<SumRecord> {
    let rep = validate_range(m[0], m[1], m[2], n, window)?;
    if !rep.admissible {
        let names: Vec<_> = rep.violated.iter().map(|c| c.name()).collect();
        return Err(Error::SizeCondition(format!("N = {n}: {}", names.join(", "))));
    }
    let chi = CompositeCharacter::from_exponents(&[(m[0], k[0]), (m[1], k[1]), (m[2], k[2])])?;
    Ok(record_for(&chi, n))
}

pub(crate) fn record_for(chi: &CompositeCharacter, n: f64) -> SumRecord {
    let w = SmoothWeight::w();
    let m: Vec<u64> = chi.components().iter().map(|c| c.p()).collect();
    let k = chi.exponents();
    let s = s_chi(chi, n, &w);
    let trivial_bound: f64 = ((n.ceil() as i64).max(1)..=(2.0 * n).floor() as i64)
        .map(|x| w.value(x as f64 / n))
        .sum();
    let abs_s = s.norm();
    let bound = bound_value(m[0], m[1], m[2], n);
    SumRecord {
        m1: m[0],
        m2: m[1],
        m3: m[2],
        k1: k[0],
        k2: k[1],
        k3: k[2],
        labels: chi.label(),
        n,
        abs_s,
        bound,
        ratio: abs_s / bound,
        trivial_bound,
        trivial_ratio: if trivial_bound > 0.0 { abs_s / trivial_bound } else { 0.0 },
        theta: thetas(m[0], m[1], m[2]),
        ms: 0.0,
    }
}

/// Inequalities defining the region of subconvex saving `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThetaInequality {
    /// `2δ ≤ θ₁`
    FirstAboveTwiceDelta,
    /// `θ₁ ≤ ½ − δ`
    FirstBelowHalf,
    /// `θ₃ ≤ ¼ − δ`
    ThirdBelowQuarter,
    /// `½ + 3δ ≤ θ₁ + 2θ₃`
    FirstPlusTwiceThird,
}

impl ThetaInequality {
    pub fn name(self) -> &'static str {
        match self {
            Self::FirstAboveTwiceDelta => "2d <= t1",
            Self::FirstBelowHalf => "t1 <= 1/2 - d",
            Self::ThirdBelowQuarter => "t3 <= 1/4 - d",
            Self::FirstPlusTwiceThird => "1/2 + 3d <= t1 + 2 t3",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaReport {
    pub ok: bool,
    pub failed: Vec<ThetaInequality>,
    pub delta_max: f64,
}

pub const THETA_TOL: f64 = 1e-12;

fn check_theta(theta: [f64; 3]) -> Result<()> {
    if theta.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidArgument(format!("negative exponent in {theta:?}")));
    }
    let s: f64 = theta.iter().sum();
    if (s - 1.0).abs() > THETA_TOL {
        return Err(Error::InvalidArgument(format!("exponents sum to {s}, not 1")));
    }
    Ok(())
}

/// Largest `δ` allowed by the four inequalities (may be negative).
pub fn delta_max(theta: [f64; 3]) -> Result<f64> {
    check_theta(theta)?;
    let [t1, _, t3] = theta;
    Ok((t1 / 2.0)
        .min(0.5 - t1)
        .min(0.25 - t3)
        .min((t1 + 2.0 * t3 - 0.5) / 3.0))
}

/// Evaluates each inequality with slack [`THETA_TOL`].
pub fn theta_region_check(theta: [f64; 3], delta: f64) -> Result<ThetaReport> {
    check_theta(theta)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("saving δ = {delta} must be positive")));
    }
    let [t1, _, t3] = theta;
    let checks = [
        (ThetaInequality::FirstAboveTwiceDelta, 2.0 * delta <= t1 + THETA_TOL),
        (ThetaInequality::FirstBelowHalf, t1 <= 0.5 - delta + THETA_TOL),
        (ThetaInequality::ThirdBelowQuarter, t3 <= 0.25 - delta + THETA_TOL),
        (ThetaInequality::FirstPlusTwiceThird, 0.5 + 3.0 * delta <= t1 + 2.0 * t3 + THETA_TOL),
    ];
    let failed: Vec<_> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok(ThetaReport {
        ok: failed.is_empty(),
        failed,
        delta_max: delta_max(theta)?,
    })
}

/// `θ₁ + min{⅔θ₂, 2θ₃} ≥ ½`: the window `[M₁, M₁ min{M₂^{2/3}, M₃²}]` reaches `√M`.
pub fn window_reaches_root(theta: [f64; 3]) -> bool {
    theta[0] + (2.0 * theta[1] / 3.0).min(2.0 * theta[2]) >= 0.5
}

/// Least-squares line through `(log M, log value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// standard error of the slope
    pub slope_se: f64,
    pub points: usize,
}

/// Fits `log value = slope · log M + intercept`; `M` must strictly increase.
pub fn exponent_fit(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 5 {
        return Err(Error::InvalidArgument(format!("{} points, need at least 5", points.len())));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidArgument("moduli must strictly increase".into()));
    }
    if points.iter().any(|p| !(p.0 > 0.0) || !(p.1 > 0.0)) {
        return Err(Error::InvalidArgument("moduli and values must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidArgument("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(Fit {
        slope,
        intercept,
        r2,
        slope_se: (sse / (n - 2.0) / sxx).sqrt(),
        points: points.len(),
    })
}

/// Distinct odd primes near `M^{θᵢ}`, taking the next prime up on collision.
pub fn ray_triple(theta: [f64; 3], modulus: f64) -> Result<[u64; 3]> {
    check_theta(theta)?;
    let mut out = [0u64; 3];
    for i in 0..3 {
        let target = modulus.powf(theta[i]).round().max(3.0) as u64;
        let near = odd_primes_in(target.saturating_sub(target / 4 + 2), target + target / 4 + 2)
            .into_iter()
            .min_by_key(|&p| p.abs_diff(target))
            .unwrap_or(3);
        let mut p = near;
        while out[..i].contains(&p) || !is_prime(p) {
            p += 2;
        }
        out[i] = p;
    }
    Ok(out)
}
