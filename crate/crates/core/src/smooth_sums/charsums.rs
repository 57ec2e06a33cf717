//! Complete character sums produced by the two Poisson steps: closed forms
//! and their literal definitions.

use num_complex::Complex64;

use crate::character::PrimeCharacter;
use crate::error::{Error, Result};
use crate::modular::{gcd, mod_inverse, reduce, valuation};
use crate::phase::e_ratio;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `e(k/L)` for `k = 0..L`.
pub fn roots_of_unity(l: u64) -> Vec<Complex64> {
    (0..l).map(|k| e_ratio(k as i128, l)).collect()
}

/// `G(t) = Σ_{c mod L} χ(c) e(ct/L)` for every `t mod L`, where `L` is a
/// multiple of the modulus of `χ`.
pub fn additive_twist_table(chars: &[&PrimeCharacter], l: u64) -> Vec<Complex64> {
    let roots = roots_of_unity(l);
    let vals: Vec<Complex64> = (0..l)
        .map(|c| chars.iter().fold(Complex64::new(1.0, 0.0), |acc, ch| acc * ch.eval_u(c)))
        .collect();
    (0..l)
        .map(|t| {
            let mut s = zero();
            for (c, v) in vals.iter().enumerate() {
                if v.re != 0.0 || v.im != 0.0 {
                    s += v * roots[((c as u64 * t) % l) as usize];
                }
            }
            s
        })
        .collect()
}

/// `Σ_{c mod qM₁M₃} χ₃(c) e(−ac/(qM₁) − bc/M₁ + mc/(qM₁M₃))`.
pub fn charsum_c1_literal(m: i64, q: u64, a: i64, b: i64, chi3: &PrimeCharacter, m1: u64) -> Complex64 {
    let m3 = chi3.p();
    let l = q * m1 * m3;
    // the phase numerator over L
    let t = m as i128 - (a as i128 + q as i128 * b as i128) * m3 as i128;
    let mut s = zero();
    for c in 1..l {
        let v = chi3.eval_u(c);
        if v.re != 0.0 || v.im != 0.0 {
            s += v * e_ratio(c as i128 * t, l);
        }
    }
    s
}

/// Closed form of [`charsum_c1_literal`]: zero unless
/// `(a + qb)M₃ ≡ m (mod qM₁)` and `(m, M₃) = 1`, in which case it equals
/// `qM₁ ε₃ √M₃ χ₃(qM₁) χ̄₃(m)`.
pub fn charsum_c1(m: i64, q: u64, a: i64, b: i64, chi3: &PrimeCharacter, m1: u64) -> Result<Complex64> {
    let m3 = chi3.p();
    if gcd(q, m3) != 1 {
        return Err(Error::NotCoprime(q, m3));
    }
    let l = q * m1;
    let lhs = reduce((a as i128 + q as i128 * b as i128) * m3 as i128, l);
    if lhs != reduce(m as i128, l) || m.rem_euclid(m3 as i64) == 0 {
        return Ok(zero());
    }
    Ok(chi3.gauss_sign()
        * ((l as f64) * (m3 as f64).sqrt())
        * chi3.eval(l as i128)
        * chi3.eval(m as i128).conj())
}

/// `Σ_{a mod qM₁M₂} χ₁χ₂(a) e(M̄₃ma/(qM₁) + na/(qM₁M₂))`, with `M̄₃` the
/// inverse of `M₃` modulo `qM₁`.
pub fn charsum_c2_literal(
    m: i64,
    n: i64,
    q: u64,
    chi1: &PrimeCharacter,
    chi2: &PrimeCharacter,
    m3: u64,
) -> Result<Complex64> {
    let (m1, m2) = (chi1.p(), chi2.p());
    let inv3 = mod_inverse(m3 as i128, q * m1)? as i128;
    let l = q * m1 * m2;
    let t = inv3 * m as i128 * m2 as i128 + n as i128;
    let mut s = zero();
    for a in 1..l {
        let v = chi1.eval_u(a) * chi2.eval_u(a);
        if v.re != 0.0 || v.im != 0.0 {
            s += v * e_ratio(a as i128 * t, l);
        }
    }
    Ok(s)
}

/// Closed form of [`charsum_c2_literal`]. With `q = q′M₁^r`, `M₁ ∤ q′`, it
/// vanishes unless `q′M₁^r | M₂m + M₃n`; otherwise it is
/// `ε₂√M₂ χ₂(qM₁) χ̄₂(n) · q′ ε₁ √M₁ M₁^r χ₁(q′M₂M₃) χ̄₁((M₂m + M₃n)/M₁^r)`.
pub fn charsum_c2(
    m: i64,
    n: i64,
    q: u64,
    chi1: &PrimeCharacter,
    chi2: &PrimeCharacter,
    m3: u64,
) -> Result<Complex64> {
    let (m1, m2) = (chi1.p(), chi2.p());
    if gcd(q, m2) != 1 {
        return Err(Error::NotCoprime(q, m2));
    }
    if gcd(q, m3) != 1 {
        return Err(Error::NotCoprime(q, m3));
    }
    let r = valuation(q, m1);
    let m1r = m1.pow(r);
    let q_prime = q / m1r;
    let lin = m2 as i128 * m as i128 + m3 as i128 * n as i128;
    if lin.rem_euclid(q as i128) != 0 {
        return Ok(zero());
    }
    let part2 = chi2.gauss_sign()
        * (m2 as f64).sqrt()
        * chi2.eval((q * m1) as i128)
        * chi2.eval(n as i128).conj();
    let part1 = chi1.gauss_sign()
        * (q_prime as f64 * (m1 as f64).sqrt() * m1r as f64)
        * chi1.eval((q_prime * m2 * m3) as i128)
        * chi1.eval(lin / m1r as i128).conj();
    Ok(part2 * part1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c1_vanishing_and_magnitude() {
        let chi3 = PrimeCharacter::new(7, 2).unwrap();
        // (a + qb)M₃ = (1 + 2)·7 = 21 ≡ 3 mod 6
        let v = charsum_c1(3, 2, 1, 1, &chi3, 3).unwrap();
        assert!((v.norm() - 6.0 * 7f64.sqrt()).abs() < 1e-10);
        assert_eq!(charsum_c1(4, 2, 1, 1, &chi3, 3).unwrap(), zero());
        assert!(charsum_c1_literal(4, 2, 1, 1, &chi3, 3).norm() < 1e-10);
        assert!(charsum_c1(3, 7, 1, 1, &chi3, 3).is_err());
    }

    #[test]
    fn c1_matches_literal_scan() {
        for k3 in 1..6 {
            let chi3 = PrimeCharacter::new(7, k3).unwrap();
            for q in 1..=4u64 {
                for a in 0..q as i64 {
                    for b in 0..3 {
                        for m in -50..50 {
                            let lit = charsum_c1_literal(m, q, a, b, &chi3, 3);
                            let closed = charsum_c1(m, q, a, b, &chi3, 3).unwrap();
                            assert!((lit - closed).norm() < 1e-8, "q={q} a={a} b={b} m={m}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn c2_matches_literal_scan() {
        for k1 in 1..2 {
            for k2 in 1..4 {
                let chi1 = PrimeCharacter::new(3, k1).unwrap();
                let chi2 = PrimeCharacter::new(5, k2).unwrap();
                for q in [1u64, 2, 3, 4, 6, 9] {
                    for m in -20..20 {
                        for n in -20..20 {
                            let lit = charsum_c2_literal(m, n, q, &chi1, &chi2, 7).unwrap();
                            let closed = charsum_c2(m, n, q, &chi1, &chi2, 7).unwrap();
                            assert!((lit - closed).norm() < 1e-8, "q={q} m={m} n={n}: {lit} vs {closed}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn c2_generic_magnitude() {
        let chi1 = PrimeCharacter::new(3, 1).unwrap();
        let chi2 = PrimeCharacter::new(5, 1).unwrap();
        // q = 2, M₂m + M₃n = 5 + 21 = 26: even and prime to 3
        let v = charsum_c2(1, 3, 2, &chi1, &chi2, 7).unwrap();
        assert!((v.norm() - 2.0 * 15f64.sqrt()).abs() < 1e-10);
        assert_eq!(charsum_c2(1, 2, 2, &chi1, &chi2, 7).unwrap(), zero());
        assert!(charsum_c2(1, 1, 5, &chi1, &chi2, 7).is_err());
    }

    #[test]
    fn twist_table_matches_literal() {
        let chi3 = PrimeCharacter::new(7, 3).unwrap();
        let l = 2 * 3 * 7;
        let g = additive_twist_table(&[&chi3], l);
        for (a, b) in [(1i64, 0i64), (1, 2), (0, 1)] {
            for m in -10..10 {
                let t = (m as i128 - (a as i128 + 2 * b as i128) * 7).rem_euclid(l as i128) as usize;
                let lit = charsum_c1_literal(m, 2, a, b, &chi3, 3);
                assert!((g[t] - lit).norm() < 1e-10);
            }
        }
    }
}
