//! Smooth approximation of the delta symbol `δ(n, 0)` by additive
//! characters with moduli `q ≲ Q`, and its variant that first detects
//! `K | n` with characters mod `K`.
//!
//! ```text
//! δ(n,0) = (c_Q/Q²) Σ_q Σ*_{a mod q} e(an/q) h(q/Q, n/Q²)
//! h(x,y) = Σ_j (1/(xj)) (ω(xj) − ω(|y|/(xj)))
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{divisors, gcd};
use crate::phase::e_ratio;
use crate::weights::BumpOmega;

/// `h(x, y)`, enumerated over the finite set of `j` where `ω` is nonzero.
pub fn h(x: f64, y: f64) -> f64 {
    assert!(x > 0.0, "h needs x > 0");
    let om = BumpOmega::get();
    let mut s = 0.0;
    // ω(xj) ≠ 0 needs 1/(2x) < j < 1/x
    let j_lo = (0.5 / x).floor() as i64 + 1;
    let j_hi = (1.0 / x).ceil() as i64 - 1;
    for j in j_lo.max(1)..=j_hi {
        let xj = x * j as f64;
        s += om.value(xj) / xj;
    }
    let ay = y.abs();
    if ay > 0.0 {
        // ω(|y|/(xj)) ≠ 0 needs |y|/x < j < 2|y|/x
        let r = ay / x;
        let j_lo = r.floor() as i64 + 1;
        let j_hi = (2.0 * r).ceil() as i64 - 1;
        for j in j_lo.max(1)..=j_hi {
            let xj = x * j as f64;
            s -= om.value(ay / xj) / xj;
        }
    }
    s
}

/// `Q / Σ_r ω(r/Q)`.
pub fn c_q(q: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::InvalidArgument(format!("Q must exceed 1, got {q}")));
    }
    let om = BumpOmega::get();
    let lo = (q / 2.0).ceil() as u64;
    let hi = q.floor() as u64;
    let s: f64 = (lo.max(1)..=hi).map(|r| om.value(r as f64 / q)).sum();
    if s <= 0.0 {
        return Err(Error::DegenerateNormalization(q));
    }
    Ok(q / s)
}

/// Largest modulus that can carry a nonzero `h(q/Q, y)`.
fn q_max(q_size: f64, y: f64) -> u64 {
    (q_size * 1f64.max(2.0 * y.abs())).floor() as u64
}

/// Möbius function on `0..=n` by a linear sieve.
fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    if n >= 1 {
        mu[0] = 0;
    }
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// `c_q(n)` for all `1 ≤ q ≤ qmax` at once: `Σ_{d | n, d | q} d μ(q/d)`.
fn ramanujan_column(n: i64, qmax: u64) -> Vec<i64> {
    let qmax = qmax as usize;
    let mu = mobius_table(qmax);
    let mut c = vec![0i64; qmax + 1];
    let ds: Vec<u64> = if n == 0 {
        (1..=qmax as u64).collect()
    } else {
        divisors(n.unsigned_abs())
    };
    for d in ds {
        let d = d as usize;
        if d > qmax {
            continue;
        }
        let mut q = d;
        while q <= qmax {
            c[q] += d as i64 * mu[q / d] as i64;
            q += d;
        }
    }
    c
}

/// The delta approximator for fixed `Q` and divisibility modulus `K`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaApproximator {
    pub q_size: f64,
    pub k: u64,
    pub c_q: f64,
}

impl DeltaApproximator {
    pub fn new(q_size: f64, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be positive".into()));
        }
        Ok(Self {
            q_size,
            k,
            c_q: c_q(q_size)?,
        })
    }

    /// `h(q/Q, n/(KQ²))`.
    pub fn weight(&self, q: u64, n: f64) -> f64 {
        h(
            q as f64 / self.q_size,
            n / (self.k as f64 * self.q_size * self.q_size),
        )
    }

    /// Moduli `q` for which the weight at `n` can be nonzero.
    pub fn q_max(&self, n: f64) -> u64 {
        q_max(self.q_size, n / (self.k as f64 * self.q_size * self.q_size))
    }

    /// `(c_Q/Q²) Σ_q c_q(n) h(q/Q, n/Q²)`, ignoring `K`.
    pub fn delta(&self, n: i64) -> f64 {
        let qq = self.q_size * self.q_size;
        let y = n as f64 / qq;
        let qmax = q_max(self.q_size, y);
        let col = ramanujan_column(n, qmax);
        let mut s = 0.0;
        for q in 1..=qmax {
            let c = col[q as usize];
            if c != 0 {
                s += c as f64 * h(q as f64 / self.q_size, y);
            }
        }
        self.c_q / qq * s
    }

    /// The `K`-modified expansion. The `b`-sum over residues mod `K` is
    /// evaluated term by term; when it vanishes (`K ∤ n`) the whole
    /// expression is zero, otherwise the `a`-sum is the Ramanujan sum
    /// `c_q(n/K)` since `e(an/(qK)) = e(a(n/K)/q)`.
    pub fn delta_mod(&self, n: i64) -> f64 {
        let k = self.k as i64;
        let b_sum: Complex64 = (0..k).map(|b| e_ratio((b * n) as i128, self.k)).sum();
        if n.rem_euclid(k) != 0 {
            debug_assert!(b_sum.norm() < 1e-9 * k as f64);
            return 0.0;
        }
        let kqq = self.k as f64 * self.q_size * self.q_size;
        let y = n as f64 / kqq;
        let qmax = q_max(self.q_size, y);
        let col = ramanujan_column(n / k, qmax);
        let mut s = 0.0;
        for q in 1..=qmax {
            let c = col[q as usize];
            if c != 0 {
                s += c as f64 * h(q as f64 / self.q_size, y);
            }
        }
        // b_sum is exactly K here
        self.c_q / kqq * (k as f64 * s)
    }

    /// Every sum written out: `Σ_q Σ*_a Σ_b e(an/(qK)) e(bn/K) h(...)`.
    /// Cost grows like `Σ φ(q) K`; meant for small `|n|`.
    pub fn delta_mod_literal(&self, n: i64) -> Complex64 {
        let kqq = self.k as f64 * self.q_size * self.q_size;
        let y = n as f64 / kqq;
        let qmax = q_max(self.q_size, y);
        let b_sum: Complex64 = (0..self.k as i64)
            .map(|b| e_ratio((b * n) as i128, self.k))
            .sum();
        let mut s = Complex64::new(0.0, 0.0);
        for q in 1..=qmax {
            let w = h(q as f64 / self.q_size, y);
            if w == 0.0 {
                continue;
            }
            let mut a_sum = Complex64::new(0.0, 0.0);
            for a in 1..=q {
                if gcd(a, q) == 1 {
                    a_sum += e_ratio(a as i128 * n as i128, q * self.k);
                }
            }
            s += a_sum * b_sum * w;
        }
        s * (self.c_q / kqq)
    }
}

/// `delta_approx(n, Q)`.
pub fn delta_approx(n: i64, q_size: f64) -> Result<f64> {
    Ok(DeltaApproximator::new(q_size, 1)?.delta(n))
}

/// `delta_approx_mod(n, Q, K)`.
pub fn delta_approx_mod(n: i64, q_size: f64, k: u64) -> Result<f64> {
    Ok(DeltaApproximator::new(q_size, k)?.delta_mod(n))
}

/// Grid for [`h_property_scan`]: `x = i/x_steps` for `1 ≤ i ≤ x_steps`,
/// `y = j·y_max/y_steps` for `|j| ≤ y_steps`.
#[derive(Debug, Clone, Copy)]
pub struct HGrid {
    pub x_steps: usize,
    pub y_steps: usize,
    pub y_max: f64,
    /// distance kept from the edge `|y| = x/2` of the flat region
    pub margin: f64,
    pub fd_step: f64,
}

impl Default for HGrid {
    fn default() -> Self {
        Self {
            x_steps: 100,
            y_steps: 50,
            y_max: 2.0,
            margin: 0.01,
            fd_step: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HReport {
    pub points: usize,
    pub flat_points: usize,
    /// max `|∂h/∂y|` over the flat region
    pub max_flat_dy: f64,
    /// max `x |h|`
    pub max_x_h: f64,
    /// max `x² |∂h/∂x|`
    pub max_x2_dx: f64,
}

/// Finite-difference scan of `h` over the grid.
pub fn h_property_scan(grid: &HGrid) -> HReport {
    let d = grid.fd_step;
    let mut rep = HReport {
        points: 0,
        flat_points: 0,
        max_flat_dy: 0.0,
        max_x_h: 0.0,
        max_x2_dx: 0.0,
    };
    for i in 1..=grid.x_steps {
        let x = i as f64 / grid.x_steps as f64;
        for j in -(grid.y_steps as i64)..=grid.y_steps as i64 {
            let y = j as f64 * grid.y_max / grid.y_steps as f64;
            rep.points += 1;
            rep.max_x_h = rep.max_x_h.max(x * h(x, y).abs());
            let dx = (h(x + d, y) - h(x - d, y)) / (2.0 * d);
            rep.max_x2_dx = rep.max_x2_dx.max(x * x * dx.abs());
            if y.abs() <= x / 2.0 - grid.margin {
                rep.flat_points += 1;
                let dy = (h(x, y + d) - h(x, y - d)) / (2.0 * d);
                rep.max_flat_dy = rep.max_flat_dy.max(dy.abs());
            }
        }
    }
    rep
}
