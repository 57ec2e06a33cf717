//! The oscillatory integrals attached to the Poisson steps.
//!
//! ```text
//! 𝓘(x,v,q) = ∫ h(q/Q, v/N − u) V(u) e(−αxu) du,        α = N/(qM₁M₃)
//! 𝓙(x,y,q) = ∫ 𝓘(x,Nv,q) W(v) e(−βyv) dv,              β = N/(qM₁M₂)
//! 𝓛(x₁,x₂,z,q₁,q₂) = ∫ 𝓙(x₁,Ry,q₁) conj 𝓙(x₂,Ry,q₂) U(y) e(−γyz) dy,   γ = R/(q₁q₂M₁)
//! ```
//!
//! Single values come from adaptive Gauss–Legendre quadrature. Whole tables
//! (every integer frequency in a range) come from the trapezoid rule on a
//! grid whose spacing makes the phase `e(−αxu_j)` an exact root of unity,
//! so that one FFT per row yields all frequencies. The integrands are
//! smooth and compactly supported, so the trapezoid rule converges faster
//! than any power of the grid spacing.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Scales;
use crate::delta::h;
use crate::error::{Error, Result};
use crate::phase::e;
use crate::quad::{integrate, QuadOptions};
use crate::weights::SmoothWeight;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `𝓘(x, v, q)` by adaptive quadrature over `u ∈ [1/2, 3]`.
pub fn integral_i(x: f64, v: f64, q: f64, s: &Scales, vw: &SmoothWeight, tol: f64) -> Result<Complex64> {
    let alpha = s.n_size / (q * (s.m1 * s.m3) as f64);
    let hx = q / s.q_size;
    let (lo, hi) = vw.support();
    let cycles = (hi - lo) * alpha * x.abs();
    let opts = QuadOptions {
        abs_tol: tol,
        max_intervals: 200_000,
        initial_panels: 8 + (2.0 * cycles).ceil() as usize,
    };
    let r = integrate(lo, hi, opts, |u| {
        let w = vw.value(u);
        if w == 0.0 {
            return zero();
        }
        e(-alpha * x * u) * (h(hx, v / s.n_size - u) * w)
    })?;
    Ok(r.value)
}

/// `𝓙(x, y, q)` by nested adaptive quadrature: the outer `v`-integral over
/// `[1, 2]` calls [`integral_i`] at each node.
pub fn integral_j(
    x: f64,
    y: f64,
    q: f64,
    s: &Scales,
    vw: &SmoothWeight,
    ww: &SmoothWeight,
    tol: f64,
) -> Result<Complex64> {
    let beta = s.n_size / (q * (s.m1 * s.m2) as f64);
    let alpha = s.n_size / (q * (s.m1 * s.m3) as f64);
    let (lo, hi) = ww.support();
    let cycles = (hi - lo) * (alpha * x.abs() + beta * y.abs());
    let opts = QuadOptions {
        abs_tol: tol,
        max_intervals: 20_000,
        initial_panels: 8 + (2.0 * cycles).ceil() as usize,
    };
    let inner_tol = tol * 1e-2;
    let mut failure = None;
    let r = integrate(lo, hi, opts, |v| {
        let w = ww.value(v);
        if w == 0.0 || failure.is_some() {
            return zero();
        }
        match integral_i(x, s.n_size * v, q, s, vw, inner_tol) {
            Ok(i) => i * w * e(-beta * y * v),
            Err(err) => {
                failure = Some(err);
                zero()
            }
        }
    })?;
    match failure {
        Some(err) => Err(err),
        None => Ok(r.value),
    }
}

/// Grid density for the trapezoid tables.
#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// samples per unit length needed to resolve `h(x, ·)` at `x = 1`;
    /// the features of `h(x, ·)` scale like `x`
    pub h_samples: f64,
    /// floor on samples per unit length, set by the features of `V` and `W`
    pub min_samples: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            h_samples: 2048.0,
            min_samples: 1024.0,
        }
    }
}

impl SpectralOptions {
    fn samples_per_unit(&self, q: u64, q_size: f64) -> f64 {
        let x = q as f64 / q_size;
        self.min_samples.max(self.h_samples / x)
    }
}

/// Smallest integer `≥ x` with no prime factor above 5 (FFT-friendly).
fn smooth_ceil(x: f64) -> u64 {
    let mut n = x.ceil().max(1.0) as u64;
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// Common grid for one modulus `q`: spacing `d = 1/D` with `D = N·c`, so
/// that `v = n/N` is a node for every integer `n`, and `αd = 1/P_u`,
/// `βd = 1/P_v` with integer periods.
#[derive(Debug, Clone, Copy)]
struct Grid {
    per_unit: u64,
    c: u64,
    p_u: usize,
    p_v: usize,
}

impl Grid {
    fn new(s: &Scales, q: u64, x_max: i64, y_max: i64, opts: &SpectralOptions) -> Result<Self> {
        let n_int = s.n_size.round();
        if (s.n_size - n_int).abs() > 1e-9 || n_int < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "spectral tables need an integer length, got {}",
                s.n_size
            )));
        }
        let n_int = n_int as u64;
        let need = opts.samples_per_unit(q, s.q_size) / n_int as f64;
        // keep every wanted frequency below a quarter of the sampling rate
        let need_u = (4 * x_max + 2) as f64 / (q * s.m1 * s.m3) as f64;
        let need_v = (4 * y_max + 2) as f64 / (q * s.m1 * s.m2) as f64;
        let c = smooth_ceil(need.max(need_u).max(need_v));
        Ok(Self {
            per_unit: n_int * c,
            c,
            p_u: (q * s.m1 * s.m3 * c) as usize,
            p_v: (q * s.m1 * s.m2 * c) as usize,
        })
    }

    fn d(&self) -> f64 {
        1.0 / self.per_unit as f64
    }
}

/// `h(q/Q, s·d)` for `s` in `[lo, lo + len)`.
struct HTable {
    lo: i64,
    values: Vec<f64>,
}

impl HTable {
    fn new(hx: f64, d: f64, lo: i64, hi: i64) -> Self {
        let values = (lo..=hi).map(|i| h(hx, i as f64 * d)).collect();
        Self { lo, values }
    }

    #[inline]
    fn at(&self, i: i64) -> f64 {
        self.values[(i - self.lo) as usize]
    }
}

/// Index range `(lo, hi)` of grid nodes strictly inside a support.
fn interior(support: (f64, f64), per_unit: u64) -> (i64, i64) {
    let lo = (support.0 * per_unit as f64).floor() as i64 + 1;
    let hi = (support.1 * per_unit as f64).ceil() as i64 - 1;
    (lo, hi)
}

/// Trapezoid tables for one modulus `q`:
/// `𝓘(x, n, q)` at every integer `n` in the support of `W(n/N)` and
/// `𝓙(x, y, q)` for `|x| ≤ x_max`, `|y| ≤ y_max`.
#[derive(Debug, Clone)]
pub struct QTables {
    pub q: u64,
    pub x_max: i64,
    pub y_max: i64,
    pub n_lo: i64,
    pub n_hi: i64,
    /// `[n - n_lo][x + x_max]`
    i_rows: Vec<Vec<Complex64>>,
    /// `[(x + x_max)·(2y_max+1) + y + y_max]`
    j: Vec<Complex64>,
    pub per_unit: u64,
}

impl QTables {
    pub fn build(
        s: &Scales,
        q: u64,
        x_max: i64,
        y_max: i64,
        vw: &SmoothWeight,
        ww: &SmoothWeight,
        opts: &SpectralOptions,
    ) -> Result<Self> {
        let grid = Grid::new(s, q, x_max, y_max, opts)?;
        let d = grid.d();
        let (ju_lo, ju_hi) = interior(vw.support(), grid.per_unit);
        let (kv_lo, kv_hi) = interior(ww.support(), grid.per_unit);
        let hx = q as f64 / s.q_size;
        let htab = HTable::new(hx, d, kv_lo - ju_hi, kv_hi - ju_lo);
        let vvals: Vec<f64> = (ju_lo..=ju_hi).map(|j| vw.value(j as f64 * d)).collect();

        let mut planner = FftPlanner::<f64>::new();
        let fft_u: Arc<dyn Fft<f64>> = planner.plan_fft_forward(grid.p_u);
        let fft_v: Arc<dyn Fft<f64>> = planner.plan_fft_forward(grid.p_v);
        let width = (2 * x_max + 1) as usize;
        let rows = (kv_hi - kv_lo + 1) as usize;
        // 𝓘(x, N v_k, q), stored per x so the second pass reads contiguously
        let mut cols = vec![zero(); width * rows];
        let n_lo = (ww.support().0 * s.n_size).floor() as i64 + 1;
        let n_hi = (ww.support().1 * s.n_size).ceil() as i64 - 1;
        let mut i_rows = vec![Vec::new(); (n_hi - n_lo + 1).max(0) as usize];
        let mut buf = vec![zero(); grid.p_u];
        let mut scratch = vec![zero(); fft_u.get_inplace_scratch_len()];
        for k in kv_lo..=kv_hi {
            buf.iter_mut().for_each(|b| *b = zero());
            for j in ju_lo..=ju_hi {
                let w = vvals[(j - ju_lo) as usize];
                if w != 0.0 {
                    let hv = htab.at(k - j);
                    if hv != 0.0 {
                        buf[j as usize % grid.p_u].re += hv * w;
                    }
                }
            }
            fft_u.process_with_scratch(&mut buf, &mut scratch);
            let row = (k - kv_lo) as usize;
            for x in -x_max..=x_max {
                let idx = x.rem_euclid(grid.p_u as i64) as usize;
                cols[(x + x_max) as usize * rows + row] = buf[idx] * d;
            }
            // v_k = n/N exactly when k = n·c
            if k % grid.c as i64 == 0 {
                let n = k / grid.c as i64;
                if (n_lo..=n_hi).contains(&n) {
                    i_rows[(n - n_lo) as usize] =
                        (0..width).map(|xi| cols[xi * rows + row]).collect();
                }
            }
        }

        let wvals: Vec<f64> = (kv_lo..=kv_hi).map(|k| ww.value(k as f64 * d)).collect();
        let height = (2 * y_max + 1) as usize;
        let mut j = vec![zero(); width * height];
        let mut vbuf = vec![zero(); grid.p_v];
        let mut vscratch = vec![zero(); fft_v.get_inplace_scratch_len()];
        for xi in 0..width {
            vbuf.iter_mut().for_each(|b| *b = zero());
            let col = &cols[xi * rows..(xi + 1) * rows];
            for (r, (c, w)) in col.iter().zip(&wvals).enumerate() {
                let k = kv_lo + r as i64;
                vbuf[k as usize % grid.p_v] += c * *w;
            }
            fft_v.process_with_scratch(&mut vbuf, &mut vscratch);
            for y in -y_max..=y_max {
                let idx = y.rem_euclid(grid.p_v as i64) as usize;
                j[xi * height + (y + y_max) as usize] = vbuf[idx] * d;
            }
        }
        Ok(Self {
            q,
            x_max,
            y_max,
            n_lo,
            n_hi,
            i_rows,
            j,
            per_unit: grid.per_unit,
        })
    }

    /// `𝓘(x, n, q)` for an integer `n` in `[n_lo, n_hi]`.
    #[inline]
    pub fn i_at(&self, x: i64, n: i64) -> Complex64 {
        self.i_rows[(n - self.n_lo) as usize][(x + self.x_max) as usize]
    }

    #[inline]
    pub fn j_at(&self, x: i64, y: i64) -> Complex64 {
        let height = (2 * self.y_max + 1) as usize;
        self.j[(x + self.x_max) as usize * height + (y + self.y_max) as usize]
    }
}

/// `𝓘(x, n, q)` for every integer `|x| ≤ x_max` at one integer `n`, by a
/// single trapezoid FFT on the same grid as [`QTables`].
pub fn integral_i_row(
    s: &Scales,
    q: u64,
    n: i64,
    x_max: i64,
    vw: &SmoothWeight,
    opts: &SpectralOptions,
) -> Result<Vec<Complex64>> {
    let grid = Grid::new(s, q, x_max, 0, opts)?;
    let d = grid.d();
    let (ju_lo, ju_hi) = interior(vw.support(), grid.per_unit);
    let k = n * grid.c as i64;
    let hx = q as f64 / s.q_size;
    let mut buf = vec![zero(); grid.p_u];
    for j in ju_lo..=ju_hi {
        let w = vw.value(j as f64 * d);
        if w != 0.0 {
            buf[j as usize % grid.p_u].re += h(hx, (k - j) as f64 * d) * w;
        }
    }
    FftPlanner::<f64>::new().plan_fft_forward(grid.p_u).process(&mut buf);
    Ok((-x_max..=x_max)
        .map(|x| buf[x.rem_euclid(grid.p_u as i64) as usize] * d)
        .collect())
}

/// `𝓙(x, ·, q)` for one fixed `x`, evaluable at any real second argument.
/// The values `𝓘(x, Nv_k, q)` are precomputed on a uniform `v`-grid by a
/// trapezoid sum in `u`.
#[derive(Debug, Clone)]
pub struct JEvaluator {
    pub x: f64,
    pub q: u64,
    beta: f64,
    d: f64,
    k_lo: i64,
    /// `𝓘(x, N v_k, q) W(v_k)`
    weighted: Vec<Complex64>,
}

impl JEvaluator {
    pub fn new(
        s: &Scales,
        x: f64,
        q: u64,
        vw: &SmoothWeight,
        ww: &SmoothWeight,
        opts: &SpectralOptions,
    ) -> Self {
        let per_unit = opts.samples_per_unit(q, s.q_size).ceil() as u64;
        let d = 1.0 / per_unit as f64;
        let alpha = s.alpha(q);
        let (ju_lo, ju_hi) = interior(vw.support(), per_unit);
        let (kv_lo, kv_hi) = interior(ww.support(), per_unit);
        let hx = q as f64 / s.q_size;
        let htab = HTable::new(hx, d, kv_lo - ju_hi, kv_hi - ju_lo);
        let phased: Vec<Complex64> = (ju_lo..=ju_hi)
            .map(|j| {
                let u = j as f64 * d;
                e(-alpha * x * u) * vw.value(u)
            })
            .collect();
        // linear convolution of the h-table with the phased V samples
        let la = htab.values.len();
        let lb = phased.len();
        let len = (la + lb - 1).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut a: Vec<Complex64> = htab.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        a.resize(len, zero());
        let mut b = phased;
        b.resize(len, zero());
        fwd.process(&mut a);
        fwd.process(&mut b);
        for (ai, bi) in a.iter_mut().zip(&b) {
            *ai *= bi;
        }
        inv.process(&mut a);
        let scale = d / len as f64;
        // conv[i] pairs htab index (k - j) - lo with phased index j - ju_lo
        let weighted = (kv_lo..=kv_hi)
            .map(|k| {
                let i = (k - htab.lo - ju_lo) as usize;
                a[i] * scale * ww.value(k as f64 * d)
            })
            .collect();
        Self {
            x,
            q,
            beta: s.beta(q),
            d,
            k_lo: kv_lo,
            weighted,
        }
    }

    /// `𝓙(x, y, q)` by the trapezoid sum over the stored `v`-grid.
    pub fn eval(&self, y: f64) -> Complex64 {
        let mut acc = zero();
        for (r, w) in self.weighted.iter().enumerate() {
            let v = (self.k_lo + r as i64) as f64 * self.d;
            acc += w * e(-self.beta * y * v);
        }
        acc * self.d
    }
}

/// `𝓚(x₁,x₂,y,q₁,q₂) = 𝓙(x₁,y,q₁) conj 𝓙(x₂,y,q₂)`.
pub fn integral_k(j1: &JEvaluator, j2: &JEvaluator, y: f64) -> Complex64 {
    j1.eval(y) * j2.eval(y).conj()
}

/// `𝓛(x₁,x₂,z,q₁,q₂)` by adaptive quadrature in `y` over the support of `U`.
pub fn integral_l(
    j1: &JEvaluator,
    j2: &JEvaluator,
    z: f64,
    r: f64,
    m1: u64,
    uw: &SmoothWeight,
    tol: f64,
) -> Result<Complex64> {
    let gamma = r / (j1.q * j2.q * m1) as f64;
    let (lo, hi) = uw.support();
    let freq = gamma * z.abs() + r * (j1.beta + j2.beta) * 2.0;
    let opts = QuadOptions {
        abs_tol: tol / 2.0,
        max_intervals: 50_000,
        initial_panels: 8 + (2.0 * (hi - lo) * freq).ceil() as usize,
    };
    let mut total = zero();
    for (a, b) in [(-hi, -lo), (lo, hi)] {
        total += integrate(a, b, opts, |y| integral_k(j1, j2, r * y) * uw.value(y) * e(-gamma * y * z))?.value;
    }
    Ok(total)
}

/// `𝓛(x₁,x₂,z,q₁,q₂)` for every integer `|z| ≤ z_max` by one FFT of the
/// trapezoid samples of `𝓚(·, Ry) U(y)`.
pub fn integral_l_table(
    j1: &JEvaluator,
    j2: &JEvaluator,
    r: f64,
    m1: u64,
    uw: &SmoothWeight,
    z_max: i64,
    samples_per_unit: f64,
) -> Vec<Complex64> {
    let l = j1.q * j2.q * m1;
    let gamma = r / l as f64;
    // spacing d = 1/(γP): e(−γ z y_i) = e(−zi/P)
    let osc = 2.0 * r * (j1.beta + j2.beta);
    let want = samples_per_unit.max(32.0 * osc);
    let p = ((want / gamma).ceil() as usize).max((4 * z_max + 2) as usize);
    let d = 1.0 / (gamma * p as f64);
    let (lo, hi) = uw.support();
    let i_hi = (hi / d).ceil() as i64;
    let mut buf = vec![zero(); p];
    for i in -i_hi..=i_hi {
        let y = i as f64 * d;
        let u = uw.value(y);
        if u == 0.0 || y.abs() < lo {
            continue;
        }
        buf[i.rem_euclid(p as i64) as usize] += integral_k(j1, j2, r * y) * u;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(p).process(&mut buf);
    (-z_max..=z_max)
        .map(|z| buf[z.rem_euclid(p as i64) as usize] * d)
        .collect()
}
