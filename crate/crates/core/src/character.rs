//! Dirichlet characters of odd prime and squarefree composite modulus.
//!
//! A character mod `p` is stored as an exponent `k` against the smallest
//! primitive root `g`: `χ(g^t) = e(kt/(p-1))`. Values are tabulated once
//! per character so evaluation inside hot loops is a table lookup.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modular::{gcd, lcm, mul_mod, primitive_root, reduce};
use crate::phase::e_ratio;

/// Discrete logarithm table for one prime, shared by all its characters.
#[derive(Debug)]
pub struct DlogTable {
    pub p: u64,
    pub g: u64,
    /// `dlog[a]` for `1 <= a < p`; `dlog[0]` is unused.
    dlog: Vec<u32>,
}

impl DlogTable {
    pub fn new(p: u64) -> Result<Self> {
        let g = primitive_root(p)?;
        let mut dlog = vec![0u32; p as usize];
        let mut v = 1u64;
        for t in 0..(p - 1) {
            dlog[v as usize] = t as u32;
            v = mul_mod(v, g, p);
        }
        Ok(Self { p, g, dlog })
    }

    #[inline]
    pub fn log(&self, a: u64) -> Option<u32> {
        let a = a % self.p;
        (a != 0).then(|| self.dlog[a as usize])
    }
}

#[derive(Clone)]
pub struct PrimeCharacter {
    table: Arc<DlogTable>,
    k: u64,
    values: Arc<Vec<Complex64>>,
}

impl fmt::Debug for PrimeCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeCharacter({})", self.label())
    }
}

impl PartialEq for PrimeCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.k == other.k
    }
}

impl PrimeCharacter {
    pub fn new(p: u64, k: u64) -> Result<Self> {
        let table = Arc::new(DlogTable::new(p)?);
        Self::with_table(table, k)
    }

    pub fn with_table(table: Arc<DlogTable>, k: u64) -> Result<Self> {
        let p = table.p;
        if k >= p - 1 {
            return Err(Error::BadExponent { p, k });
        }
        let mut values = vec![Complex64::new(0.0, 0.0); p as usize];
        for a in 1..p {
            let t = table.dlog[a as usize] as u64;
            values[a as usize] = e_ratio((k as i128) * (t as i128), p - 1);
        }
        Ok(Self {
            table,
            k,
            values: Arc::new(values),
        })
    }

    /// The quadratic character (Legendre symbol) mod `p`.
    pub fn quadratic(p: u64) -> Result<Self> {
        Self::new(p, (p.saturating_sub(1)) / 2)
    }

    pub fn p(&self) -> u64 {
        self.table.p
    }

    pub fn generator(&self) -> u64 {
        self.table.g
    }

    pub fn exponent(&self) -> u64 {
        self.k
    }

    pub fn dlog(&self) -> &Arc<DlogTable> {
        &self.table
    }

    /// Prime modulus: primitive exactly when nonprincipal.
    pub fn is_primitive(&self) -> bool {
        self.k != 0
    }

    pub fn order(&self) -> u64 {
        let p1 = self.p() - 1;
        p1 / gcd(self.k, p1)
    }

    #[inline]
    pub fn eval(&self, n: i128) -> Complex64 {
        self.values[reduce(n, self.p()) as usize]
    }

    #[inline]
    pub fn eval_u(&self, n: u64) -> Complex64 {
        self.values[(n % self.p()) as usize]
    }

    pub fn conj(&self) -> Self {
        let p1 = self.p() - 1;
        let k = (p1 - self.k) % p1;
        let values = self.values.iter().map(|v| v.conj()).collect();
        Self {
            table: self.table.clone(),
            k,
            values: Arc::new(values),
        }
    }

    /// `"p:g:k"`.
    pub fn label(&self) -> String {
        format!("{}:{}:{}", self.p(), self.generator(), self.k)
    }

    /// `g_χ = Σ_{a ∈ F_p*} χ(a) e(a/p)`.
    pub fn gauss_sum(&self) -> Complex64 {
        let p = self.p();
        (1..p).map(|a| self.values[a as usize] * e_ratio(a as i128, p)).sum()
    }

    /// `ε = g_χ/√p`, unimodular for primitive χ.
    pub fn gauss_sign(&self) -> Complex64 {
        self.gauss_sum() / (self.p() as f64).sqrt()
    }
}

/// All characters mod `p` in exponent order, or only the `p − 2`
/// primitive ones.
pub fn enumerate_characters(p: u64, primitive_only: bool) -> Result<Vec<PrimeCharacter>> {
    let table = Arc::new(DlogTable::new(p)?);
    let start = u64::from(primitive_only);
    (start..p - 1)
        .map(|k| PrimeCharacter::with_table(table.clone(), k))
        .collect()
}

/// Checks `χ̄(a) g_χ = Σ_b χ(b) e(ab/p)` to `1e-9`.
pub fn twisted_gauss_relation_check(chi: &PrimeCharacter, a: i128) -> bool {
    let p = chi.p();
    let lhs = chi.eval(a).conj() * chi.gauss_sum();
    let rhs: Complex64 = (1..p)
        .map(|b| chi.eval_u(b) * e_ratio(a * b as i128, p))
        .sum();
    (lhs - rhs).norm() < 1e-9
}

/// Product of prime-modulus characters with pairwise distinct moduli.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeCharacter {
    components: Vec<PrimeCharacter>,
    modulus: u64,
}

impl CompositeCharacter {
    pub fn new(components: Vec<PrimeCharacter>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("no character components".into()));
        }
        let mut modulus = 1u64;
        for c in &components {
            if gcd(modulus, c.p()) != 1 {
                return Err(Error::InvalidArgument(format!(
                    "repeated prime {} in composite character",
                    c.p()
                )));
            }
            modulus = modulus
                .checked_mul(c.p())
                .ok_or_else(|| Error::InvalidArgument("modulus overflows 64 bits".into()))?;
        }
        Ok(Self {
            components,
            modulus,
        })
    }

    /// Build from `(p, k)` pairs.
    pub fn from_exponents(parts: &[(u64, u64)]) -> Result<Self> {
        let comps = parts
            .iter()
            .map(|&(p, k)| PrimeCharacter::new(p, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn components(&self) -> &[PrimeCharacter] {
        &self.components
    }

    #[inline]
    pub fn eval(&self, n: i128) -> Complex64 {
        self.components
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, c| acc * c.eval(n))
    }

    pub fn conductor(&self) -> u64 {
        self.components
            .iter()
            .filter(|c| c.exponent() != 0)
            .map(|c| c.p())
            .product()
    }

    pub fn is_primitive(&self) -> bool {
        self.components.iter().all(PrimeCharacter::is_primitive)
    }

    pub fn is_principal(&self) -> bool {
        self.components.iter().all(|c| c.exponent() == 0)
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(|c| c.order() <= 2)
    }

    pub fn order(&self) -> u64 {
        self.components.iter().fold(1, |acc, c| lcm(acc, c.order()))
    }

    pub fn conj(&self) -> Self {
        Self {
            components: self.components.iter().map(PrimeCharacter::conj).collect(),
            modulus: self.modulus,
        }
    }

    /// Component labels joined by `,`.
    pub fn label(&self) -> String {
        self.components
            .iter()
            .map(PrimeCharacter::label)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.exponent()).collect()
    }
}

/// Every character mod `p1 p2 ...` whose components are all primitive.
pub fn enumerate_primitive_composites(primes: &[u64]) -> Result<Vec<CompositeCharacter>> {
    let per_prime = primes
        .iter()
        .map(|&p| enumerate_characters(p, true))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Vec<PrimeCharacter>> = vec![Vec::new()];
    for chars in per_prime {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                chars.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(CompositeCharacter::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::mod_pow;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn legendre_euler(a: u64, p: u64) -> f64 {
        match mod_pow(a as i128, (p - 1) / 2, p) {
            0 => 0.0,
            1 => 1.0,
            _ => -1.0,
        }
    }

    #[test]
    fn evaluate_examples() {
        let principal = PrimeCharacter::new(7, 0).unwrap();
        assert!((principal.eval(3) - 1.0).norm() < 1e-15);
        let quad = PrimeCharacter::new(5, 2).unwrap();
        assert_eq!(quad.generator(), 2);
        assert!((quad.eval(4).re - legendre_euler(4, 5)).abs() < 1e-15);
        for k in 0..4 {
            let chi = PrimeCharacter::new(5, k).unwrap();
            assert_eq!(chi.eval(10), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn quadratic_is_legendre() {
        for p in crate::modular::odd_primes_in(3, 97) {
            let chi = PrimeCharacter::quadratic(p).unwrap();
            for a in 0..p {
                let v = chi.eval(a as i128);
                assert!((v.re - legendre_euler(a, p)).abs() < 1e-12);
                assert!(v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_arguments_reduce() {
        let chi = PrimeCharacter::new(11, 3).unwrap();
        assert_eq!(chi.eval(-1), chi.eval(10));
        assert_eq!(chi.eval(-23), chi.eval(10));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_characters(3, true).unwrap().len(), 1);
        assert_eq!(enumerate_characters(5, true).unwrap().len(), 3);
        let all = enumerate_characters(5, false).unwrap();
        assert_eq!(all.len(), 4);
        let col: Complex64 = all.iter().map(|c| c.eval(2)).sum();
        assert!(col.norm() < 1e-12);
        let col1: Complex64 = all.iter().map(|c| c.eval(1)).sum();
        assert!((col1 - 4.0).norm() < 1e-12);
    }

    #[test]
    fn gauss_sum_examples() {
        for p in [5u64, 7, 13] {
            let g0 = PrimeCharacter::new(p, 0).unwrap().gauss_sum();
            assert!((g0 + 1.0).norm() < 1e-12);
        }
        let g = PrimeCharacter::quadratic(5).unwrap().gauss_sum();
        let direct: f64 = (1..5u64)
            .map(|a| legendre_euler(a, 5) * (std::f64::consts::TAU * a as f64 / 5.0).cos())
            .sum();
        assert!((g.re - direct).abs() < 1e-12);
        assert!((g - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        for chi in enumerate_characters(13, true).unwrap() {
            assert!((chi.gauss_sum().norm() - 13f64.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn twisted_relation_examples() {
        let chi = PrimeCharacter::new(11, 1).unwrap();
        assert!(twisted_gauss_relation_check(&chi, 1));
        assert!(twisted_gauss_relation_check(&chi, 0));
        for chi in enumerate_characters(11, true).unwrap() {
            for a in 0..11 {
                assert!(twisted_gauss_relation_check(&chi, a));
            }
        }
    }

    #[test]
    fn multiplicativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3u64, 5, 7, 31, 97] {
            for chi in enumerate_characters(p, false).unwrap() {
                for _ in 0..10_000 {
                    let a: i64 = rng.gen_range(-10_000..10_000);
                    let b: i64 = rng.gen_range(-10_000..10_000);
                    let lhs = chi.eval(a as i128 * b as i128);
                    let rhs = chi.eval(a as i128) * chi.eval(b as i128);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn orthogonality_and_gauss_norm() {
        for p in crate::modular::odd_primes_in(3, 97) {
            for chi in enumerate_characters(p, true).unwrap() {
                let s: Complex64 = (0..p).map(|n| chi.eval_u(n)).sum();
                assert!(s.norm() < 1e-10, "p={p}");
                assert!((chi.gauss_sum().norm_sqr() - p as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let chi = PrimeCharacter::new(13, 5).unwrap();
        let bar = chi.conj();
        assert_eq!(bar.exponent(), 7);
        for n in -30..30 {
            assert!((bar.eval(n) - chi.eval(n).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn composite_properties() {
        let chi = CompositeCharacter::from_exponents(&[(3, 1), (5, 1), (7, 2)]).unwrap();
        assert_eq!(chi.modulus(), 105);
        assert!(chi.is_primitive());
        assert_eq!(chi.conductor(), 105);
        let ord = chi.order();
        assert_eq!(ord, 12);
        for n in 0..210i128 {
            let v = chi.eval(n);
            if gcd(n as u64, 105) > 1 {
                assert_eq!(v, Complex64::new(0.0, 0.0));
            } else {
                assert!((v.powu(ord as u32) - 1.0).norm() < 1e-10);
            }
        }
        let imprim = CompositeCharacter::from_exponents(&[(3, 0), (5, 2), (7, 0)]).unwrap();
        assert_eq!(imprim.conductor(), 5);
        assert!(!imprim.is_primitive());
        assert!(CompositeCharacter::from_exponents(&[(3, 1), (3, 1)]).is_err());
        assert_eq!(chi.label(), "3:2:1,5:2:1,7:3:2");
        assert_eq!(enumerate_primitive_composites(&[3, 5, 7]).unwrap().len(), 15);
    }
}
