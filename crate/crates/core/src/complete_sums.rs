//! Complete character sums over `F_p`:
//!
//! ```text
//! S_χ(m, n) = Σ_{x ∈ F_p*} χ(x) χ̄(m + x) e(nx/p)
//! ```
//!
//! its two-variable Gauss-sum rewrite, the empirical square-root ratio, and a
//! brute-force Newton-polygon nondegeneracy checker for Laurent polynomials in
//! two variables.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::character::{enumerate_characters, PrimeCharacter};
use crate::error::{Error, Result};
use crate::modular::{mod_inverse, mod_pow, reduce};
use crate::phase::e_ratio;

/// `S_χ(m, n)`. The summand with `m + x ≡ 0` vanishes (`χ̄(0) = 0`).
pub fn frak_s(chi: &PrimeCharacter, m: i128, n: i128) -> Complex64 {
    let p = chi.p();
    let bar = chi.conj();
    (1..p)
        .map(|x| {
            let x = x as i128;
            chi.eval(x) * bar.eval(m + x) * e_ratio(n * x, p)
        })
        .sum()
}

/// `(1/g_χ) Σ_{x ∈ F_p*²} χ(x₁)χ(x₂) e((n x₁ + m x₂ + x₁x₂)/p)`, valid for
/// `mn ≢ 0`.
pub fn frak_s_via_gauss(chi: &PrimeCharacter, m: i128, n: i128) -> Result<Complex64> {
    let p = chi.p();
    if reduce(m, p) == 0 || reduce(n, p) == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-sum rewrite needs m n ≢ 0 (mod p)".into(),
        ));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for x1 in 1..p as i128 {
        let c1 = chi.eval(x1);
        for x2 in 1..p as i128 {
            let f = n * x1 + m * x2 + x1 * x2;
            total += c1 * chi.eval(x2) * e_ratio(f, p);
        }
    }
    Ok(total / chi.gauss_sum())
}

/// `max |S_χ(m,n)|/√p` over primitive χ mod `p` and `mn ≢ 0`.
pub fn deligne_ratio(p: u64) -> Result<f64> {
    let chars = enumerate_characters(p, true)?;
    let sqrt_p = (p as f64).sqrt();
    // χ(x)χ̄(m+x) needs only the value tables, so fold e(nx/p) into a
    // per-m DFT over n.
    let phases: Vec<Complex64> = (0..p).map(|t| e_ratio(t as i128, p)).collect();
    let best = chars
        .par_iter()
        .map(|chi| {
            let bar = chi.conj();
            let mut best = 0.0f64;
            let mut prod = vec![Complex64::new(0.0, 0.0); p as usize];
            for m in 1..p {
                for x in 1..p {
                    prod[x as usize] = chi.eval_u(x) * bar.eval_u(m + x);
                }
                for n in 1..p {
                    let mut s = Complex64::new(0.0, 0.0);
                    for x in 1..p {
                        s += prod[x as usize] * phases[((n * x) % p) as usize];
                    }
                    best = best.max(s.norm() / sqrt_p);
                }
            }
            best
        })
        .collect::<Vec<_>>();
    Ok(best.into_iter().fold(0.0, f64::max))
}

/// A Laurent polynomial in two variables over `F_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPolynomial2 {
    p: u64,
    terms: Vec<((i64, i64), u64)>,
}

impl LaurentPolynomial2 {
    /// Coefficients are reduced mod `p`; zero terms dropped and repeated
    /// exponents merged.
    pub fn new(p: u64, terms: &[((i64, i64), i128)]) -> Result<Self> {
        if p < 2 || !crate::modular::is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let mut merged: Vec<((i64, i64), u64)> = Vec::new();
        for &(exp, c) in terms {
            let c = reduce(c, p);
            match merged.iter_mut().find(|(e, _)| *e == exp) {
                Some(slot) => slot.1 = (slot.1 + c) % p,
                None => merged.push((exp, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0);
        merged.sort_unstable();
        Ok(Self { p, terms: merged })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &[((i64, i64), u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn monomial(&self, x1: u64, x2: u64, i: i64, j: i64) -> u64 {
        let p = self.p;
        let pow = |x: u64, e: i64| {
            if e >= 0 {
                mod_pow(x as i128, e as u64, p)
            } else {
                mod_pow(mod_inverse(x as i128, p).unwrap() as i128, e.unsigned_abs(), p)
            }
        };
        crate::modular::mul_mod(pow(x1, i), pow(x2, j), p)
    }

    /// Value of `∂f_S/∂x₁` and `∂f_S/∂x₂` at `(x₁, x₂) ∈ F_p*²`, where
    /// `f_S` keeps only the listed terms.
    fn gradient(&self, subset: &[((i64, i64), u64)], x1: u64, x2: u64) -> (u64, u64) {
        let p = self.p;
        let mut d1 = 0u64;
        let mut d2 = 0u64;
        for &((i, j), c) in subset {
            if i != 0 {
                let coeff = crate::modular::mul_mod(c, reduce(i as i128, p), p);
                let m = self.monomial(x1, x2, i - 1, j);
                d1 = (d1 + crate::modular::mul_mod(coeff, m, p)) % p;
            }
            if j != 0 {
                let coeff = crate::modular::mul_mod(c, reduce(j as i128, p), p);
                let m = self.monomial(x1, x2, i, j - 1);
                d2 = (d2 + crate::modular::mul_mod(coeff, m, p)) % p;
            }
        }
        (d1, d2)
    }
}

/// One face of the Newton polygon that avoids the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Face {
    /// The face's extreme points: one for a vertex, two for an edge.
    pub vertices: Vec<(i64, i64)>,
    /// A point of `F_p*²` where both partials of `f_τ` vanish, if any.
    pub singular_point: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    pub dim: u8,
    /// Faces not containing the origin, in hull order.
    pub faces: Vec<Face>,
    pub degenerate_faces: Vec<Face>,
}

impl NondegeneracyReport {
    pub fn is_nondegenerate(&self) -> bool {
        self.degenerate_faces.is_empty()
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; strictly convex vertices in counterclockwise
/// order.
fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn on_segment(a: (i64, i64), b: (i64, i64), p: (i64, i64)) -> bool {
    cross(a, b, p) == 0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Newton-polygon nondegeneracy of `f` over the torus `F_p*²`: for every
/// face τ of `conv(supp f ∪ {0})` not containing the origin, search the
/// torus for a common zero of `∂f_τ/∂x₁` and `∂f_τ/∂x₂`.
pub fn nondegeneracy_check(f: &LaurentPolynomial2) -> Result<NondegeneracyReport> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut pts: Vec<(i64, i64)> = f.terms.iter().map(|&(e, _)| e).collect();
    pts.push((0, 0));
    let hull = convex_hull(pts);
    let origin = (0, 0);

    let dim = match hull.len() {
        1 => 0u8,
        2 => 1,
        _ => 2,
    };

    let mut candidates: Vec<Vec<(i64, i64)>> = hull.iter().map(|&v| vec![v]).collect();
    if dim == 2 {
        for i in 0..hull.len() {
            candidates.push(vec![hull[i], hull[(i + 1) % hull.len()]]);
        }
    }
    // For a segment the only proper faces are its endpoints; the segment
    // itself always contains the origin.

    let mut faces = Vec::new();
    let mut degenerate = Vec::new();
    for verts in candidates {
        let contains_origin = match verts.as_slice() {
            [v] => *v == origin,
            [a, b] => on_segment(*a, *b, origin),
            _ => unreachable!(),
        };
        if contains_origin {
            continue;
        }
        let subset: Vec<((i64, i64), u64)> = f
            .terms
            .iter()
            .copied()
            .filter(|&(e, _)| match verts.as_slice() {
                [v] => e == *v,
                [a, b] => on_segment(*a, *b, e),
                _ => false,
            })
            .collect();
        let mut singular = None;
        'scan: for x1 in 1..f.p {
            for x2 in 1..f.p {
                if f.gradient(&subset, x1, x2) == (0, 0) {
                    singular = Some((x1, x2));
                    break 'scan;
                }
            }
        }
        let face = Face {
            vertices: verts,
            singular_point: singular,
        };
        if singular.is_some() {
            degenerate.push(face.clone());
        }
        faces.push(face);
    }
    Ok(NondegeneracyReport {
        dim,
        faces,
        degenerate_faces: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::odd_primes_in;

    /// Independent of `frak_s`: phases from `f64` cos/sin, character from
    /// the exponent table.
    fn frak_s_oracle(chi: &PrimeCharacter, m: i64, n: i64) -> Complex64 {
        let p = chi.p() as i64;
        let mut s = Complex64::new(0.0, 0.0);
        for x in 1..p {
            let y = (m + x).rem_euclid(p);
            if y == 0 {
                continue;
            }
            let ang = std::f64::consts::TAU * ((n * x).rem_euclid(p)) as f64 / p as f64;
            s += chi.eval(x as i128) * chi.eval(y as i128).conj() * Complex64::cis(ang);
        }
        s
    }

    #[test]
    fn degenerate_arguments_have_exact_values() {
        for p in [5u64, 7, 11] {
            for chi in enumerate_characters(p, true).unwrap() {
                assert!((frak_s(&chi, 0, 0) - (p as f64 - 1.0)).norm() < 1e-9);
                for t in 1..p as i128 {
                    assert!((frak_s(&chi, t, 0) + 1.0).norm() < 1e-9);
                    assert!((frak_s(&chi, 0, t) + 1.0).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn frak_s_matches_oracle() {
        for chi in enumerate_characters(13, true).unwrap() {
            for m in 0..13 {
                for n in 0..13 {
                    let d = frak_s(&chi, m as i128, n as i128) - frak_s_oracle(&chi, m, n);
                    assert!(d.norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn gauss_rewrite_examples() {
        for chi in enumerate_characters(5, true).unwrap() {
            let d = frak_s_via_gauss(&chi, 1, 1).unwrap() - frak_s(&chi, 1, 1);
            assert!(d.norm() < 1e-10);
        }
        for chi in enumerate_characters(7, true).unwrap() {
            for m in 1..7 {
                for n in 1..7 {
                    let d = frak_s_via_gauss(&chi, m, n).unwrap() - frak_s(&chi, m, n);
                    assert!(d.norm() < 1e-8);
                }
            }
        }
        let quad = PrimeCharacter::quadratic(11).unwrap();
        let v = frak_s_via_gauss(&quad, 3, 4).unwrap();
        assert!(v.norm() <= 2.0 * 11f64.sqrt());
        assert!(frak_s_via_gauss(&quad, 0, 4).is_err());
        assert!(frak_s_via_gauss(&quad, 3, 11).is_err());
    }

    #[test]
    fn gauss_rewrite_on_generic_domain() {
        for p in odd_primes_in(3, 31) {
            for chi in enumerate_characters(p, true).unwrap() {
                for m in 1..p as i128 {
                    for n in 1..p as i128 {
                        let d = frak_s_via_gauss(&chi, m, n).unwrap() - frak_s(&chi, m, n);
                        assert!(d.norm() < 1e-8, "p={p} m={m} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn modulus_multiset_invariant_under_conjugation() {
        for p in odd_primes_in(3, 31) {
            for chi in enumerate_characters(p, true).unwrap() {
                let bar = chi.conj();
                let collect = |c: &PrimeCharacter| {
                    let mut v: Vec<f64> = (0..p as i128)
                        .flat_map(|m| (0..p as i128).map(move |n| (m, n)))
                        .map(|(m, n)| frak_s(c, m, n).norm())
                        .collect();
                    v.sort_by(f64::total_cmp);
                    v
                };
                for (a, b) in collect(&chi).iter().zip(collect(&bar)) {
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn deligne_ratio_small() {
        let r3 = deligne_ratio(3).unwrap();
        assert!(r3.is_finite() && r3 <= 2.0 / 3f64.sqrt());
        // frozen from the independent numpy oracle
        let r29 = deligne_ratio(29).unwrap();
        assert!((r29 - 1.9842392590599252).abs() < 1e-9, "{r29}");
    }

    #[test]
    fn nondegeneracy_generic_f() {
        let (m, n) = (3, 5);
        let f = LaurentPolynomial2::new(7, &[((1, 0), n), ((0, 1), m), ((1, 1), 1)]).unwrap();
        let rep = nondegeneracy_check(&f).unwrap();
        assert_eq!(rep.dim, 2);
        // three vertices away from 0 and the two edges through e1+e2
        assert_eq!(rep.faces.len(), 5);
        assert!(rep.is_nondegenerate());
    }

    #[test]
    fn nondegeneracy_segment() {
        let f = LaurentPolynomial2::new(5, &[((1, 1), 1)]).unwrap();
        let rep = nondegeneracy_check(&f).unwrap();
        assert_eq!(rep.dim, 1);
        assert_eq!(rep.faces.len(), 1);
        assert!(rep.is_nondegenerate());
    }

    #[test]
    fn nondegeneracy_sum_of_squares() {
        // hand enumeration: faces {(2,0)}, {(0,2)}, [(2,0),(0,2)]; on each the
        // x₁ or x₂ partial is 2x_i ≠ 0 on F_5*²
        let f = LaurentPolynomial2::new(5, &[((2, 0), 1), ((0, 2), 1)]).unwrap();
        let rep = nondegeneracy_check(&f).unwrap();
        assert_eq!(rep.dim, 2);
        assert_eq!(rep.faces.len(), 3);
        assert!(rep.is_nondegenerate());
    }

    #[test]
    fn nondegeneracy_detects_degenerate_edge() {
        // f_τ = x₁ + x₂ on the edge: ∂₁ = ∂₂ = 1, never zero. x₁² − 2x₁x₂ + x₂²
        // = (x₁ − x₂)² has both partials vanishing on the diagonal.
        let f = LaurentPolynomial2::new(7, &[((2, 0), 1), ((1, 1), -2), ((0, 2), 1)]).unwrap();
        let rep = nondegeneracy_check(&f).unwrap();
        assert!(!rep.is_nondegenerate());
        assert_eq!(rep.degenerate_faces.len(), 1);
        assert_eq!(rep.degenerate_faces[0].vertices.len(), 2);
    }

    #[test]
    fn zero_polynomial_rejected() {
        let f = LaurentPolynomial2::new(5, &[((1, 0), 5)]).unwrap();
        assert_eq!(nondegeneracy_check(&f), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn constant_polynomial_is_dim_zero() {
        let f = LaurentPolynomial2::new(5, &[((0, 0), 2)]).unwrap();
        let rep = nondegeneracy_check(&f).unwrap();
        assert_eq!(rep.dim, 0);
        assert!(rep.faces.is_empty());
    }
}
