//! Exact integer arithmetic: modular powers and inverses, CRT, primitive
//! roots, multiplicative functions, Ramanujan sums and 64-bit primality.
//!
//! Every product is formed in 128 bits, so moduli up to `2^63` are safe.

use crate::error::{Error, Result};

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// `base^exp mod m`. Returns 0 when `m == 1`.
pub fn mod_pow(base: i128, mut exp: u64, m: u64) -> u64 {
    assert!(m >= 1, "modulus must be positive");
    if m == 1 {
        return 0;
    }
    let mut b = reduce(base, m);
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// The inverse of `a` modulo `m` (the residue written with a bar, `ā`).
pub fn mod_inverse(a: i128, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus 0".into()));
    }
    if m == 1 {
        return Ok(0);
    }
    let (mut old_r, mut r) = (reduce(a, m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(reduce(old_s, m))
}

/// Combine `x ≡ residues[i] (mod moduli[i])` into a single residue modulo
/// the product. Returns `(x, product)`.
pub fn crt_combine(residues: &[i128], moduli: &[u64]) -> Result<(u64, u64)> {
    if residues.len() != moduli.len() {
        return Err(Error::InvalidArgument(
            "residue and modulus lists differ in length".into(),
        ));
    }
    let mut x = 0u64;
    let mut prod = 1u64;
    for (&r, &m) in residues.iter().zip(moduli) {
        if m == 0 {
            return Err(Error::InvalidArgument("modulus 0".into()));
        }
        if gcd(prod, m) != 1 {
            return Err(Error::NotCoprime(prod, m));
        }
        let r = reduce(r, m);
        // x + prod * t ≡ r (mod m)
        let inv = mod_inverse(prod as i128, m)?;
        let diff = reduce(r as i128 - x as i128, m);
        let t = mul_mod(diff, inv, m);
        let new_prod = prod
            .checked_mul(m)
            .ok_or_else(|| Error::InvalidArgument("CRT modulus overflows 64 bits".into()))?;
        x = ((x as u128 + prod as u128 * t as u128) % new_prod as u128) as u64;
        prod = new_prod;
    }
    Ok((x, prod))
}

/// Deterministic Miller–Rabin; the first twelve primes as witnesses cover
/// every 64-bit integer.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = mod_pow(a as i128, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Trial-division factorization; fine for the small arguments this crate
/// feeds it (moduli and divisor-sum indices).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn moebius(n: u64) -> i64 {
    assert!(n >= 1);
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Smallest generator of `(Z/pZ)*`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let factors: Vec<u64> = factorize(p - 1).into_iter().map(|(f, _)| f).collect();
    (2..p)
        .find(|&g| factors.iter().all(|&f| mod_pow(g as i128, (p - 1) / f, p) != 1))
        .ok_or(Error::NotOddPrime(p))
}

/// `c_q(n) = Σ_{d | (q, n)} d μ(q/d)`, the sum of `e(an/q)` over reduced
/// residues `a mod q`.
pub fn ramanujan_sum(q: u64, n: i64) -> i64 {
    assert!(q >= 1);
    let g = gcd(q, n.unsigned_abs());
    divisors(g)
        .into_iter()
        .map(|d| d as i64 * moebius(q / d))
        .sum()
}

/// Odd primes in `[lo, hi]`.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| n % 2 == 1 && is_prime(n)).collect()
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    assert!(n != 0 && p > 1);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}
