//! `S_χ(N)` rebuilt four ways, following the delta-symbol argument:
//!
//! 1. directly;
//! 2. as the double sum over `(n, m)` with `δ(n − m, 0)` expanded through
//!    the `K = M₁` modified delta symbol, every inner sum written out;
//! 3. after Poisson summation in `m` (dual variable `ℓ`, modulus `qM₁M₃`);
//! 4. after Poisson summation in `n` (dual variable `y`, modulus `qM₁M₂`).
//!
//! The last form is further split into the `M₁ ∤ q` part `S₀`, the
//! `M₁ | q` part, and the moduli sharing a factor with `M₂M₃`, for which
//! no closed form of the character sums is available and the literal
//! complete sums are used.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::charsums::{additive_twist_table, charsum_c1, charsum_c2};
use super::integrals::{integral_i_row, QTables, SpectralOptions};
use super::{s_chi, Instance, Scales};
use crate::delta::DeltaApproximator;
use crate::error::{Error, Result};
use crate::modular::{gcd, mod_inverse, reduce, valuation};
use crate::phase::e_ratio;
use crate::weights::SmoothWeight;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub spectral: SpectralOptions,
    /// tolerance between the direct sum and the expanded double sum
    pub exact_tol: f64,
    /// tolerance for each Poisson step, before the tail allowance
    pub poisson_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            spectral: SpectralOptions::default(),
            exact_tol: 1e-7,
            poisson_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepResidual {
    pub from: String,
    pub to: String,
    pub abs: f64,
    /// `abs / max(|S_direct|, 1)`
    pub relative: f64,
    pub tolerance: f64,
    /// change of the later step when its dual cutoff is halved
    pub tail_allowance: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HalvingCheck {
    pub step: String,
    pub relative_shift: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// Intermediate values of every step for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineTrace {
    pub label: String,
    pub m1: u64,
    pub m2: u64,
    pub m3: u64,
    pub n_size: f64,
    pub q_size: f64,
    pub k: u64,
    pub c_q: f64,
    pub q_max: u64,
    pub m_cutoff: i64,
    pub n_cutoff: i64,
    pub direct: Complex64,
    pub delta_expanded: Complex64,
    pub poisson_m: Complex64,
    pub poisson_m_half: Complex64,
    pub poisson_n: Complex64,
    pub poisson_n_half: Complex64,
    pub eta: Complex64,
    /// `Σ` over `q` prime to `M₁M₂M₃`
    pub s0: Complex64,
    /// same sum over generic `q` divisible by `M₁`
    pub s_r_positive: Complex64,
    /// `η c_Q N/√M · S₀`
    pub main_term: Complex64,
    /// `η c_Q N/√M · S_{r≥1}`
    pub r_positive_term: Complex64,
    /// contribution of `q` sharing a factor with `M₂M₃`
    pub nongeneric_term: Complex64,
    /// `|poisson_n − main − r_positive − nongeneric|`
    pub decomposition_residual: f64,
    /// `|S_direct − main_term|`
    pub main_term_deviation: f64,
    /// `|S₀|` against `√(#frequencies) · √T`
    pub cauchy_lhs: f64,
    pub cauchy_rhs: f64,
    pub residuals: Vec<StepResidual>,
    pub halving: Vec<HalvingCheck>,
}

impl PipelineTrace {
    pub fn ok(&self) -> bool {
        self.residuals.iter().all(|r| r.ok) && self.halving.iter().all(|h| h.ok)
    }

    /// First violated tolerance, as an error naming the step.
    pub fn check(&self) -> Result<()> {
        for r in &self.residuals {
            if !r.ok {
                return Err(Error::Tolerance {
                    step: format!("{} -> {}", r.from, r.to),
                    residual: r.relative,
                    tolerance: r.tolerance + r.tail_allowance,
                });
            }
        }
        for h in &self.halving {
            if !h.ok {
                return Err(Error::Tolerance {
                    step: format!("halved cutoff in {}", h.step),
                    residual: h.relative_shift,
                    tolerance: h.tolerance,
                });
            }
        }
        Ok(())
    }
}

/// Result of [`poisson_m_verify`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoissonCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

fn check_sizes(s: &Scales) -> Result<()> {
    if (s.m1 as f64) > s.n_size {
        return Err(Error::SizeCondition(format!(
            "need M1 <= N, got M1 = {} and N = {}",
            s.m1, s.n_size
        )));
    }
    Ok(())
}

/// Integer interior of a weight's support scaled by `N`.
fn support_range(w: &SmoothWeight, n_size: f64) -> (i64, i64) {
    let (lo, hi) = w.support();
    ((lo * n_size).floor() as i64 + 1, (hi * n_size).ceil() as i64 - 1)
}

/// Both sides of Poisson summation in `m` for fixed `(q, a, b, n)`:
/// `Σ_m χ₃(m) e(−am/(qM₁) − bm/M₁) h(q/Q, (n−m)/N) V(m/N)` against
/// `N/(qM₁M₃) Σ_{|ℓ| ≤ cutoff} 𝔠(ℓ, q, a, b) 𝓘(ℓ, n, q)`.
pub fn poisson_m_verify(
    inst: &Instance,
    q: u64,
    a: i64,
    b: i64,
    n: i64,
    opts: &SpectralOptions,
) -> Result<PoissonCheck> {
    let s = &inst.scales;
    let vw = SmoothWeight::v();
    let (m1, m3) = (s.m1, s.m3);
    let hx = q as f64 / s.q_size;
    let (mlo, mhi) = support_range(&vw, s.n_size);
    let mut lhs = zero();
    for m in mlo..=mhi {
        let c = inst.chi3.eval(m as i128);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let hv = crate::delta::h(hx, (n - m) as f64 / s.n_size);
        if hv == 0.0 {
            continue;
        }
        let num = -(a as i128) * m as i128 - (b as i128) * q as i128 * m as i128;
        lhs += c * e_ratio(num, q * m1) * (hv * vw.value(m as f64 / s.n_size));
    }
    let x_max = s.m_cutoff().ceil() as i64;
    let row = integral_i_row(s, q, n, x_max, &vw, opts)?;
    let l = q * m1 * m3;
    let generic = gcd(q, m3) == 1;
    let table = if generic {
        Vec::new()
    } else {
        additive_twist_table(&[&inst.chi3], l)
    };
    let mut rhs = zero();
    for x in -x_max..=x_max {
        let c = if generic {
            charsum_c1(x, q, a, b, &inst.chi3, m1)?
        } else {
            let t = x as i128 - (a as i128 + q as i128 * b as i128) * m3 as i128;
            table[reduce(t, l) as usize]
        };
        if c.re != 0.0 || c.im != 0.0 {
            rhs += c * row[(x + x_max) as usize];
        }
    }
    rhs *= s.n_size / l as f64;
    Ok(PoissonCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

/// The literal expanded double sum: every pair `(n, m)` weighted by the
/// modified delta expansion of `δ(n − m, 0)`.
fn delta_expanded(inst: &Instance, delta: &DeltaApproximator, ww: &SmoothWeight, vw: &SmoothWeight) -> Complex64 {
    let s = &inst.scales;
    let (nlo, nhi) = support_range(ww, s.n_size);
    let (mlo, mhi) = support_range(vw, s.n_size);
    let mut cache: HashMap<i64, Complex64> = HashMap::new();
    let mut total = zero();
    for n in nlo..=nhi {
        let wn = ww.value(n as f64 / s.n_size);
        let cn = inst.chi12(n as i128);
        if wn == 0.0 || (cn.re == 0.0 && cn.im == 0.0) {
            continue;
        }
        for m in mlo..=mhi {
            let vm = vw.value(m as f64 / s.n_size);
            let cm = inst.chi3.eval(m as i128);
            if vm == 0.0 || (cm.re == 0.0 && cm.im == 0.0) {
                continue;
            }
            let dv = *cache.entry(n - m).or_insert_with(|| delta.delta_mod_literal(n - m));
            total += cn * cm * dv * (wn * vm);
        }
    }
    total
}

/// Per-instance accumulators.
#[derive(Default, Clone)]
struct Acc {
    iii: Complex64,
    iii_half: Complex64,
    iv: Complex64,
    iv_half: Complex64,
    s0: Complex64,
    s_r: Complex64,
    nongeneric: Complex64,
    /// `A(y)` for the Cauchy step, keyed by `y + y_max`
    cauchy: Vec<Complex64>,
}

/// Unit residues `t mod qM₁` with `(t, q) = 1`, i.e. the pairs `(a, b)`
/// through `t = a + qb`.
fn units_mod_q(q: u64, m1: u64) -> Vec<u64> {
    (0..q * m1).filter(|&t| gcd(t, q) == 1).collect()
}

/// Run the pipeline for several character triples sharing `(M₁,M₂,M₃,N)`.
pub fn pipeline_reconstruct_many(insts: &[Instance], opts: &PipelineOptions) -> Result<Vec<PipelineTrace>> {
    let Some(first) = insts.first() else {
        return Ok(Vec::new());
    };
    let s = first.scales;
    for inst in insts {
        if inst.scales != s {
            return Err(Error::InvalidArgument("instances must share moduli and length".into()));
        }
    }
    check_sizes(&s)?;
    let (m1, m2, m3) = (s.m1, s.m2, s.m3);
    let delta = DeltaApproximator::new(s.q_size, m1)?;
    let (vw, ww) = (SmoothWeight::v(), SmoothWeight::w());
    let x_max = s.m_cutoff().ceil() as i64;
    let y_max = s.n_cutoff().ceil() as i64;
    let (x_half, y_half) = (x_max / 2, y_max / 2);
    // |n − m| < 2N on the supports, so h(q/Q, ·) vanishes for q > 4Q
    let q_max = s.q_limit(2.0);
    let (nlo, nhi) = support_range(&ww, s.n_size);
    let width_y = (2 * y_max + 1) as usize;
    let mut accs = vec![
        Acc {
            cauchy: vec![zero(); width_y],
            ..Acc::default()
        };
        insts.len()
    ];

    for q in 1..=q_max {
        let tables = QTables::build(&s, q, x_max, y_max, &vw, &ww, &opts.spectral)?;
        let l3 = q * m1 * m3;
        let l2 = q * m1 * m2;
        let units = units_mod_q(q, m1);
        let generic3 = gcd(q, m3) == 1;
        let generic2 = gcd(q, m2) == 1;
        let inv3 = if generic3 { Some(mod_inverse(m3 as i128, q * m1)?) } else { None };
        let r = valuation(q, m1);
        let q_prime = q / m1.pow(r);
        let pre3 = c_q_factor(delta.c_q, s.n_size, l3);
        let pre4 = pre3 * s.n_size / l2 as f64;
        for (inst, acc) in insts.iter().zip(accs.iter_mut()) {
            let g3 = if generic3 { Vec::new() } else { additive_twist_table(&[&inst.chi3], l3) };
            let h12 = if generic2 && generic3 {
                Vec::new()
            } else {
                additive_twist_table(&[&inst.chi1, &inst.chi2], l2)
            };
            // per ℓ: the admissible residues t and the m-side sum 𝔠(ℓ, q, t)
            let coeffs: Vec<Vec<(u64, Complex64)>> = (-x_max..=x_max)
                .map(|x| -> Result<Vec<(u64, Complex64)>> {
                    if let Some(inv) = inv3 {
                        let t = reduce(inv as i128 * x as i128, q * m1);
                        if gcd(t, q) != 1 {
                            return Ok(Vec::new());
                        }
                        let (a, b) = ((t % q) as i64, (t / q) as i64);
                        let c = charsum_c1(x, q, a, b, &inst.chi3, m1)?;
                        Ok(if c.re == 0.0 && c.im == 0.0 { Vec::new() } else { vec![(t, c)] })
                    } else {
                        Ok(units
                            .iter()
                            .map(|&t| (t, g3[reduce(x as i128 - (t * m3) as i128, l3) as usize]))
                            .filter(|(_, c)| c.norm() > 1e-12)
                            .collect())
                    }
                })
                .collect::<Result<_>>()?;

            // step (iii)
            for n in nlo..=nhi {
                let wn = ww.value(n as f64 / s.n_size);
                let cn = inst.chi12(n as i128);
                if wn == 0.0 || (cn.re == 0.0 && cn.im == 0.0) {
                    continue;
                }
                let mut inner = zero();
                let mut inner_half = zero();
                for (xi, list) in coeffs.iter().enumerate() {
                    let x = xi as i64 - x_max;
                    let iv = tables.i_at(x, n);
                    for &(t, c) in list {
                        let term = c * e_ratio(t as i128 * n as i128, q * m1) * iv;
                        inner += term;
                        if x.abs() <= x_half {
                            inner_half += term;
                        }
                    }
                }
                acc.iii += cn * wn * inner * pre3;
                acc.iii_half += cn * wn * inner_half * pre3;
            }

            // step (iv)
            let closed = generic2 && generic3;
            let chi_q = inst.chi1.eval(q_prime as i128) * inst.chi2.eval(q as i128) * inst.chi3.eval(q as i128);
            let mut sum = zero();
            let mut sum_half = zero();
            let mut cell_sum = zero();
            for (xi, list) in coeffs.iter().enumerate() {
                let x = xi as i64 - x_max;
                if list.is_empty() {
                    continue;
                }
                for y in -y_max..=y_max {
                    let mut c = zero();
                    if closed {
                        let (_, c1) = list[0];
                        c = c1 * charsum_c2(x, y, q, &inst.chi1, &inst.chi2, m3)?;
                    } else {
                        for &(t, c1) in list {
                            c += c1 * h12[reduce((t * m2) as i128 + y as i128, l2) as usize];
                        }
                    }
                    if c.re == 0.0 && c.im == 0.0 {
                        continue;
                    }
                    let jv = tables.j_at(x, y);
                    let term = c * jv;
                    sum += term;
                    if y.abs() <= y_half {
                        sum_half += term;
                    }
                    if closed {
                        let lin = (m2 as i128) * x as i128 + (m3 as i128) * y as i128;
                        let coef = inst.chi1.eval(lin / m1.pow(r) as i128).conj()
                            * inst.chi2.eval(y as i128).conj()
                            * inst.chi3.eval(x as i128).conj();
                        let p = coef * jv;
                        cell_sum += p;
                        if r == 0 {
                            acc.cauchy[(y + y_max) as usize] += chi_q * p;
                        }
                    }
                }
            }
            acc.iv += sum * pre4;
            acc.iv_half += sum_half * pre4;
            if closed {
                if r == 0 {
                    acc.s0 += chi_q * cell_sum;
                } else {
                    acc.s_r += chi_q * cell_sum;
                }
            } else {
                acc.nongeneric += sum * pre4;
            }
        }
    }

    let mut traces = Vec::with_capacity(insts.len());
    for (inst, acc) in insts.iter().zip(accs) {
        let chi = inst.composite();
        let direct = s_chi(&chi, s.n_size, &ww);
        let expanded = delta_expanded(inst, &delta, &ww, &vw);
        let eta = inst.eta();
        let norm = delta.c_q * s.n_size / (s.modulus() as f64).sqrt();
        let main = eta * norm * acc.s0;
        let r_term = eta * norm * acc.s_r;
        let scale = direct.norm().max(1.0);
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / scale;
        let allowance_m = rel(acc.iii, acc.iii_half);
        let allowance_n = rel(acc.iv, acc.iv_half);
        let mk = |from: &str, to: &str, a: Complex64, b: Complex64, tol: f64, allow: f64| {
            let relative = rel(a, b);
            StepResidual {
                from: from.into(),
                to: to.into(),
                abs: (a - b).norm(),
                relative,
                tolerance: tol,
                tail_allowance: allow,
                ok: relative < tol + allow,
            }
        };
        let residuals = vec![
            mk("direct", "delta_expanded", direct, expanded, opts.exact_tol, 0.0),
            mk("delta_expanded", "poisson_m", expanded, acc.iii, opts.poisson_tol, allowance_m),
            mk("poisson_m", "poisson_n", acc.iii, acc.iv, opts.poisson_tol, allowance_n),
        ];
        let halving = vec![
            HalvingCheck {
                step: "poisson_m".into(),
                relative_shift: allowance_m,
                tolerance: opts.poisson_tol,
                ok: allowance_m <= opts.poisson_tol,
            },
            HalvingCheck {
                step: "poisson_n".into(),
                relative_shift: allowance_n,
                tolerance: opts.poisson_tol,
                ok: allowance_n <= opts.poisson_tol,
            },
        ];
        let t: f64 = acc.cauchy.iter().map(|a| a.norm_sqr()).sum();
        traces.push(PipelineTrace {
            label: inst.label(),
            m1,
            m2,
            m3,
            n_size: s.n_size,
            q_size: s.q_size,
            k: m1,
            c_q: delta.c_q,
            q_max,
            m_cutoff: x_max,
            n_cutoff: y_max,
            direct,
            delta_expanded: expanded,
            poisson_m: acc.iii,
            poisson_m_half: acc.iii_half,
            poisson_n: acc.iv,
            poisson_n_half: acc.iv_half,
            eta,
            s0: acc.s0,
            s_r_positive: acc.s_r,
            main_term: main,
            r_positive_term: r_term,
            nongeneric_term: acc.nongeneric,
            decomposition_residual: (acc.iv - main - r_term - acc.nongeneric).norm(),
            main_term_deviation: (direct - main).norm(),
            cauchy_lhs: acc.s0.norm(),
            cauchy_rhs: (width_y as f64).sqrt() * t.sqrt(),
            residuals,
            halving,
        });
    }
    Ok(traces)
}

/// `(c_Q/N) · N/(qM₁M₃)`.
fn c_q_factor(c_q: f64, n_size: f64, l3: u64) -> f64 {
    c_q / n_size * (n_size / l3 as f64)
}

/// Full trace for one instance.
pub fn pipeline_reconstruct(inst: &Instance, opts: &PipelineOptions) -> Result<PipelineTrace> {
    let mut v = pipeline_reconstruct_many(std::slice::from_ref(inst), opts)?;
    Ok(v.remove(0))
}
