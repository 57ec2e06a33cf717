//! The sum `T(m₁, m₂, q₁, q₂)` left after Cauchy's inequality, its Poisson
//! dual with modulus `q₁q₂M₁`, and the complete sum `𝔠(m₁, m₂, n, q₁, q₂)`
//! with its CRT split into an `M₁`-part and a `q₁q₂`-part.

use num_complex::Complex64;
use serde::Serialize;

use super::integrals::{integral_k, integral_l_table, JEvaluator, SpectralOptions};
use super::Instance;
use crate::character::PrimeCharacter;
use crate::complete_sums::frak_s;
use crate::error::{Error, Result};
use crate::modular::{gcd, mod_inverse, reduce};
use crate::phase::e_ratio;
use crate::weights::SmoothWeight;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `−M₂ M̄₃ mᵢ mod qᵢ`, the class of `n` in `T`.
fn congruence_class(m: i64, q: u64, m2: u64, m3: u64) -> Result<u64> {
    if q == 1 {
        return Ok(0);
    }
    let inv = mod_inverse(m3 as i128, q)? as i128;
    Ok(reduce(-(m2 as i128) * inv * m as i128, q))
}

/// Joint class mod `lcm(q₁, q₂)`, or `None` when the two congruences
/// are incompatible.
fn joint_class(m1v: i64, m2v: i64, q1: u64, q2: u64, m2: u64, m3: u64) -> Result<Option<(u64, u64)>> {
    let c1 = congruence_class(m1v, q1, m2, m3)?;
    let c2 = congruence_class(m2v, q2, m2, m3)?;
    let l = q1 / gcd(q1, q2) * q2;
    Ok((0..l).find(|x| x % q1 == c1 && x % q2 == c2).map(|x| (x, l)))
}

fn check_moduli(q1: u64, q2: u64, m1: u64, m3: u64) -> Result<()> {
    if gcd(q1 * q2, m1) != 1 {
        return Err(Error::NotCoprime(q1 * q2, m1));
    }
    if gcd(q1 * q2, m3) != 1 {
        return Err(Error::NotCoprime(q1 * q2, m3));
    }
    Ok(())
}

/// `Σ_{a mod q₁q₂M₁, a ≡ −M₂M̄₃mᵢ (qᵢ)} χ̄₁(M₂m₁+M₃a) χ₁(M₂m₂+M₃a) e(na/(q₁q₂M₁))`.
pub fn charsum_c3_literal(
    m1v: i64,
    m2v: i64,
    n: i64,
    q1: u64,
    q2: u64,
    chi1: &PrimeCharacter,
    m2: u64,
    m3: u64,
) -> Result<Complex64> {
    let m1 = chi1.p();
    check_moduli(q1, q2, m1, m3)?;
    let c1 = congruence_class(m1v, q1, m2, m3)?;
    let c2 = congruence_class(m2v, q2, m2, m3)?;
    let l = q1 * q2 * m1;
    let mut s = zero();
    for a in 0..l {
        if a % q1 != c1 || a % q2 != c2 {
            continue;
        }
        let x1 = m2 as i128 * m1v as i128 + m3 as i128 * a as i128;
        let x2 = m2 as i128 * m2v as i128 + m3 as i128 * a as i128;
        s += chi1.eval(x1).conj() * chi1.eval(x2) * e_ratio(n as i128 * a as i128, l);
    }
    Ok(s)
}

/// The factors of `𝔠(m₁, m₂, n, q₁, q₂)` after splitting `a mod q₁q₂M₁`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct C3Split {
    /// `e(−νM₂m₂/M₁)` with `ν = (q₁q₂M₃)⁻¹ n mod M₁`
    pub eta: Complex64,
    /// `𝔖_{χ₁}(M₂(m₁ − m₂), ν)`
    pub frak: Complex64,
    /// `Σ_{b mod q₁q₂, b ≡ cᵢ (qᵢ)} e(M̄₁ n b/(q₁q₂))`, at most `(q₁, q₂)` terms
    pub q_part: Complex64,
    pub q_terms: u64,
    pub value: Complex64,
}

/// [`charsum_c3_literal`] through the CRT split:
/// `η · 𝔖_{χ₁}(M₂(m₁−m₂), ν) · Σ_b e(M̄₁nb/(q₁q₂))`.
pub fn charsum_c3_split(
    m1v: i64,
    m2v: i64,
    n: i64,
    q1: u64,
    q2: u64,
    chi1: &PrimeCharacter,
    m2: u64,
    m3: u64,
) -> Result<C3Split> {
    let m1 = chi1.p();
    check_moduli(q1, q2, m1, m3)?;
    let nu = reduce(mod_inverse((q1 * q2 * m3) as i128, m1)? as i128 * n as i128, m1);
    let eta = e_ratio(-(nu as i128) * m2 as i128 * m2v as i128, m1);
    let frak = frak_s(chi1, m2 as i128 * (m1v as i128 - m2v as i128), nu as i128);
    let c1 = congruence_class(m1v, q1, m2, m3)?;
    let c2 = congruence_class(m2v, q2, m2, m3)?;
    let qq = q1 * q2;
    let inv1 = mod_inverse(m1 as i128, qq)? as i128;
    let mut q_part = zero();
    let mut q_terms = 0;
    for b in 0..qq {
        if b % q1 == c1 && b % q2 == c2 {
            q_part += e_ratio(inv1 * n as i128 * b as i128, qq);
            q_terms += 1;
        }
    }
    Ok(C3Split {
        eta,
        frak,
        q_part,
        q_terms,
        value: eta * frak * q_part,
    })
}

/// `𝔠(m₁, m₂, n, q₁, q₂)` evaluated through [`charsum_c3_split`].
pub fn charsum_c3(
    m1v: i64,
    m2v: i64,
    n: i64,
    q1: u64,
    q2: u64,
    chi1: &PrimeCharacter,
    m2: u64,
    m3: u64,
) -> Result<Complex64> {
    Ok(charsum_c3_split(m1v, m2v, n, q1, q2, chi1, m2, m3)?.value)
}

/// Direct and dual evaluations of one `T(m₁, m₂, q₁, q₂)`.
#[derive(Debug, Clone, Serialize)]
pub struct TSumCheck {
    pub compatible: bool,
    pub r: f64,
    pub z_cutoff: i64,
    pub direct: Complex64,
    pub dual: Complex64,
    pub dual_half: Complex64,
    pub residual: f64,
}

/// Evaluators for `𝓙(m₁, ·, q₁)` and `𝓙(m₂, ·, q₂)`.
pub fn t_evaluators(
    inst: &Instance,
    m1v: i64,
    m2v: i64,
    q1: u64,
    q2: u64,
    opts: &SpectralOptions,
) -> (JEvaluator, JEvaluator) {
    let (vw, ww) = (SmoothWeight::v(), SmoothWeight::w());
    (
        JEvaluator::new(&inst.scales, m1v as f64, q1, &vw, &ww, opts),
        JEvaluator::new(&inst.scales, m2v as f64, q2, &vw, &ww, opts),
    )
}

/// `T` summed directly over `n ≡ cᵢ (qᵢ)` in the support of `U(n/R)`.
pub fn t_sum_direct(
    inst: &Instance,
    m1v: i64,
    m2v: i64,
    q1: u64,
    q2: u64,
    r: f64,
    j1: &JEvaluator,
    j2: &JEvaluator,
) -> Result<Complex64> {
    let (m1, m2, m3) = (inst.m1(), inst.m2(), inst.m3());
    check_moduli(q1, q2, m1, m3)?;
    let Some((c, l)) = joint_class(m1v, m2v, q1, q2, m2, m3)? else {
        return Ok(zero());
    };
    let uw = SmoothWeight::u();
    let (_, hi) = uw.support();
    let n_hi = (hi * r).ceil() as i64;
    let mut s = zero();
    for n in -n_hi..=n_hi {
        if reduce(n as i128, l) != c {
            continue;
        }
        let u = uw.value(n as f64 / r);
        if u == 0.0 {
            continue;
        }
        let x1 = m2 as i128 * m1v as i128 + m3 as i128 * n as i128;
        let x2 = m2 as i128 * m2v as i128 + m3 as i128 * n as i128;
        let chars = inst.chi1.eval(x1).conj() * inst.chi1.eval(x2);
        if chars.re == 0.0 && chars.im == 0.0 {
            continue;
        }
        s += chars * integral_k(j1, j2, n as f64) * u;
    }
    Ok(s)
}

/// `R/(q₁q₂M₁) Σ_{|z| ≤ z_max} 𝔠(m₁,m₂,z,q₁,q₂) 𝓛(m₁,m₂,z,q₁,q₂)`; the
/// second value keeps only `|z| ≤ z_max/2`.
pub fn t_sum_dual(
    inst: &Instance,
    m1v: i64,
    m2v: i64,
    q1: u64,
    q2: u64,
    r: f64,
    z_max: i64,
    j1: &JEvaluator,
    j2: &JEvaluator,
) -> Result<(Complex64, Complex64)> {
    let (m1, m2, m3) = (inst.m1(), inst.m2(), inst.m3());
    check_moduli(q1, q2, m1, m3)?;
    if joint_class(m1v, m2v, q1, q2, m2, m3)?.is_none() {
        return Ok((zero(), zero()));
    }
    let table = integral_l_table(j1, j2, r, m1, &SmoothWeight::u(), z_max, 2048.0);
    let mut full = zero();
    let mut half = zero();
    for z in -z_max..=z_max {
        let c = charsum_c3(m1v, m2v, z, q1, q2, &inst.chi1, m2, m3)?;
        let term = c * table[(z + z_max) as usize];
        full += term;
        if z.abs() <= z_max / 2 {
            half += term;
        }
    }
    let f = r / (q1 * q2 * m1) as f64;
    Ok((full * f, half * f))
}

/// `T(m₁, m₂, q₁, q₂)` both ways, with the dual cutoff `10 log²M · N/R`.
pub fn t_sum_check(
    inst: &Instance,
    m1v: i64,
    m2v: i64,
    q1: u64,
    q2: u64,
    r: f64,
    opts: &SpectralOptions,
) -> Result<TSumCheck> {
    let s = &inst.scales;
    check_moduli(q1, q2, s.m1, s.m3)?;
    let compatible = joint_class(m1v, m2v, q1, q2, s.m2, s.m3)?.is_some();
    let z_cutoff = (10.0 * s.log2_m() * s.n_size / r).ceil() as i64;
    if !compatible {
        return Ok(TSumCheck {
            compatible,
            r,
            z_cutoff,
            direct: zero(),
            dual: zero(),
            dual_half: zero(),
            residual: 0.0,
        });
    }
    let (j1, j2) = t_evaluators(inst, m1v, m2v, q1, q2, opts);
    let direct = t_sum_direct(inst, m1v, m2v, q1, q2, r, &j1, &j2)?;
    let (dual, dual_half) = t_sum_dual(inst, m1v, m2v, q1, q2, r, z_cutoff, &j1, &j2)?;
    Ok(TSumCheck {
        compatible,
        r,
        z_cutoff,
        direct,
        dual,
        dual_half,
        residual: (direct - dual).norm(),
    })
}
