//! Smooth compactly supported weights built from one primitive, the
//! exponential bump `exp(-1/((t-a)(b-t)))` on `(a, b)`.
//!
//! * [`BumpOmega`]: the unit-mass bump on `[1/2, 1]` behind the delta symbol.
//! * [`SmoothWeight`]: `W` (bump on `[1, 2]`, peak 1), `V` (plateau, equal to
//!   1 on `[1, 2]`, support `[1/2, 3]`), `U` (dyadic piece `ψ(t) − ψ(2t)`),
//!   the cutoff `ψ` itself, and the `√2`-spaced dyadic block weight.
//!
//! Values and the first four derivatives are available through truncated
//! Taylor arithmetic ([`Jet`]), so nothing here relies on finite differences.

use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

use crate::quad::{integrate_real, GaussLegendre, QuadOptions};

/// Truncated Taylor series `Σ c_k δ^k`, `k < 5`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; 5]);

impl Jet {
    pub const ZERO: Jet = Jet([0.0; 5]);

    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0, 0.0])
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut c = [0.0; 5];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|i| self.0[i] * o.0[k - i]).sum();
        }
        Jet(c)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.map(|v| v * s))
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a += b;
        }
        Jet(c)
    }

    pub fn recip(&self) -> Jet {
        let a = &self.0;
        let mut b = [0.0; 5];
        b[0] = 1.0 / a[0];
        for k in 1..5 {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Jet(b)
    }

    pub fn exp(&self) -> Jet {
        let a = &self.0;
        let mut b = [0.0; 5];
        b[0] = a[0].exp();
        for k in 1..5 {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        Jet(b)
    }

    /// Compose with `t ↦ c·t`: the k-th coefficient picks up `c^k`.
    pub fn chain_scale(&self, c: f64) -> Jet {
        let mut out = self.0;
        let mut pow = 1.0;
        for v in out.iter_mut() {
            *v *= pow;
            pow *= c;
        }
        Jet(out)
    }

    /// Derivatives `f, f', f'', f''', f''''`.
    pub fn derivatives(&self) -> [f64; 5] {
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        let mut d = self.0;
        for (v, f) in d.iter_mut().zip(fact) {
            *v *= f;
        }
        d
    }
}

/// `exp(-1/((t-lo)(hi-t)))` on `(lo, hi)`, zero outside.
#[inline]
pub fn raw_bump(t: f64, lo: f64, hi: f64) -> f64 {
    if t <= lo || t >= hi {
        return 0.0;
    }
    (-1.0 / ((t - lo) * (hi - t))).exp()
}

/// Taylor jet of [`raw_bump`] at `t`.
pub fn raw_bump_jet(t: f64, lo: f64, hi: f64) -> Jet {
    if t <= lo || t >= hi {
        return Jet::ZERO;
    }
    let g0 = (t - lo) * (hi - t);
    // exp(-1/g) underflows to zero well before 1/g reaches 745
    if g0 < 1.0 / 740.0 {
        return Jet::ZERO;
    }
    let g = Jet([g0, (hi - t) - (t - lo), -1.0, 0.0, 0.0]);
    g.recip().scale(-1.0).exp()
}

/// `∫_lo^t raw_bump / ∫_lo^hi raw_bump`: a C^∞ step from 0 to 1 on
/// `[lo, hi]`, tabulated on a uniform grid of cumulative integrals.
#[derive(Debug)]
pub struct SmoothStep {
    lo: f64,
    hi: f64,
    step: f64,
    cumulative: Vec<f64>,
    total: f64,
    rule: GaussLegendre,
}

impl SmoothStep {
    const PANELS: usize = 512;

    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(hi > lo);
        let rule = GaussLegendre::new(20);
        let step = (hi - lo) / Self::PANELS as f64;
        let mut cumulative = Vec::with_capacity(Self::PANELS + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..Self::PANELS {
            let a = lo + step * i as f64;
            acc += rule.integrate_real(a, a + step, |t| raw_bump(t, lo, hi));
            cumulative.push(acc);
        }
        Self {
            lo,
            hi,
            step,
            total: acc,
            cumulative,
            rule,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.lo {
            return 0.0;
        }
        if t >= self.hi {
            return 1.0;
        }
        let i = (((t - self.lo) / self.step) as usize).min(Self::PANELS - 1);
        let a = self.lo + self.step * i as f64;
        let partial = self
            .rule
            .integrate_real(a, t, |s| raw_bump(s, self.lo, self.hi));
        ((self.cumulative[i] + partial) / self.total).clamp(0.0, 1.0)
    }

    pub fn jet(&self, t: f64) -> Jet {
        if t <= self.lo {
            return Jet::ZERO;
        }
        if t >= self.hi {
            return Jet::constant(1.0);
        }
        let b = raw_bump_jet(t, self.lo, self.hi).0;
        let z = self.total;
        Jet([
            self.value(t),
            b[0] / z,
            b[1] / (2.0 * z),
            b[2] / (3.0 * z),
            b[3] / (4.0 * z),
        ])
    }

    /// Unnormalized mass `∫ raw_bump`.
    pub fn mass(&self) -> f64 {
        self.total
    }
}

fn step_half_one() -> &'static SmoothStep {
    static S: OnceLock<SmoothStep> = OnceLock::new();
    S.get_or_init(|| SmoothStep::new(0.5, 1.0))
}

fn step_two_three() -> &'static SmoothStep {
    static S: OnceLock<SmoothStep> = OnceLock::new();
    S.get_or_init(|| SmoothStep::new(2.0, 3.0))
}

fn step_one_two() -> &'static SmoothStep {
    static S: OnceLock<SmoothStep> = OnceLock::new();
    S.get_or_init(|| SmoothStep::new(1.0, 2.0))
}

fn step_sqrt2_two() -> &'static SmoothStep {
    static S: OnceLock<SmoothStep> = OnceLock::new();
    S.get_or_init(|| SmoothStep::new(SQRT_2, 2.0))
}

/// `ω(t) = c_ω exp(-1/((t-1/2)(1-t)))` with `∫ ω = 1`.
#[derive(Debug, Clone, Copy)]
pub struct BumpOmega {
    c_omega: f64,
}

impl BumpOmega {
    pub fn get() -> &'static BumpOmega {
        static OMEGA: OnceLock<BumpOmega> = OnceLock::new();
        OMEGA.get_or_init(|| {
            // the bump peaks at e^-16, so the absolute tolerance is tiny
            let opts = QuadOptions {
                abs_tol: 1e-22,
                max_intervals: 10_000,
                initial_panels: 16,
            };
            let mass = integrate_real(0.5, 1.0, opts, |t| raw_bump(t, 0.5, 1.0))
                .expect("bump mass quadrature");
            BumpOmega { c_omega: 1.0 / mass }
        })
    }

    pub fn normalization(&self) -> f64 {
        self.c_omega
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.5 || t >= 1.0 {
            return 0.0;
        }
        self.c_omega * (-1.0 / ((t - 0.5) * (1.0 - t))).exp()
    }

    pub fn jet(&self, t: f64) -> Jet {
        raw_bump_jet(t, 0.5, 1.0).scale(self.c_omega)
    }

    pub fn support(&self) -> (f64, f64) {
        (0.5, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WeightKind {
    /// bump on `[1, 2]` with peak value 1
    W,
    /// 1 on `[1, 2]`, supported in `[1/2, 3]`
    V,
    /// `ψ(|t|) − ψ(2|t|)`, supported in `1/2 ≤ |t| ≤ 2`
    U,
    /// `ψ(t)`: 1 on `[0, 1]`, 0 beyond 2
    Cutoff,
    /// `Ψ(t) − Ψ(√2 t)` with `Ψ` falling on `[√2, 2]`; support `[1, 2]`
    DyadicBlock,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothWeight {
    pub kind: WeightKind,
    pub amplitude: f64,
}

impl SmoothWeight {
    pub fn new(kind: WeightKind) -> Self {
        Self {
            kind,
            amplitude: 1.0,
        }
    }

    pub fn w() -> Self {
        Self::new(WeightKind::W)
    }

    pub fn v() -> Self {
        Self::new(WeightKind::V)
    }

    pub fn u() -> Self {
        Self::new(WeightKind::U)
    }

    pub fn cutoff() -> Self {
        Self::new(WeightKind::Cutoff)
    }

    pub fn dyadic_block() -> Self {
        Self::new(WeightKind::DyadicBlock)
    }

    pub fn scaled(self, c: f64) -> Self {
        Self {
            amplitude: self.amplitude * c,
            ..self
        }
    }

    /// Closed support, as `(lo, hi)` of `|t|` for `U`.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            WeightKind::W => (1.0, 2.0),
            WeightKind::V => (0.5, 3.0),
            WeightKind::U => (0.5, 2.0),
            WeightKind::Cutoff => (0.0, 2.0),
            WeightKind::DyadicBlock => (1.0, 2.0),
        }
    }

    /// Largest absolute value.
    pub fn sup(&self) -> f64 {
        self.amplitude.abs()
    }

    pub fn value(&self, t: f64) -> f64 {
        let v = match self.kind {
            WeightKind::W => {
                if t <= 1.0 || t >= 2.0 {
                    0.0
                } else {
                    (4.0 - 1.0 / ((t - 1.0) * (2.0 - t))).exp()
                }
            }
            WeightKind::V => {
                if t <= 0.5 || t >= 3.0 {
                    0.0
                } else if (1.0..=2.0).contains(&t) {
                    1.0
                } else if t < 1.0 {
                    step_half_one().value(t)
                } else {
                    1.0 - step_two_three().value(t)
                }
            }
            WeightKind::U => {
                let a = t.abs();
                psi(a) - psi(2.0 * a)
            }
            WeightKind::Cutoff => {
                if t < 0.0 {
                    0.0
                } else {
                    psi(t)
                }
            }
            WeightKind::DyadicBlock => big_psi(t) - big_psi(SQRT_2 * t),
        };
        self.amplitude * v
    }

    /// Derivatives of order 0..=4 at `t`.
    pub fn derivatives(&self, t: f64) -> [f64; 5] {
        let jet = match self.kind {
            WeightKind::W => raw_bump_jet(t, 1.0, 2.0).scale(4f64.exp()),
            WeightKind::V => {
                if t <= 0.5 || t >= 3.0 {
                    Jet::ZERO
                } else if (1.0..=2.0).contains(&t) {
                    Jet::constant(1.0)
                } else if t < 1.0 {
                    step_half_one().jet(t)
                } else {
                    Jet::constant(1.0).add(&step_two_three().jet(t).scale(-1.0))
                }
            }
            WeightKind::U => {
                let sign = if t < 0.0 { -1.0 } else { 1.0 };
                let a = t.abs();
                psi_jet(a)
                    .add(&psi_jet(2.0 * a).chain_scale(2.0).scale(-1.0))
                    .chain_scale(sign)
            }
            WeightKind::Cutoff => {
                if t < 0.0 {
                    Jet::ZERO
                } else {
                    psi_jet(t)
                }
            }
            WeightKind::DyadicBlock => big_psi_jet(t)
                .add(&big_psi_jet(SQRT_2 * t).chain_scale(SQRT_2).scale(-1.0)),
        };
        let mut d = jet.derivatives();
        d[0] = self.value(t) / if self.amplitude == 0.0 { 1.0 } else { self.amplitude };
        d.map(|v| v * self.amplitude)
    }
}

/// 1 on `[0, 1]`, falls to 0 on `[1, 2]`.
fn psi(t: f64) -> f64 {
    1.0 - step_one_two().value(t)
}

fn psi_jet(t: f64) -> Jet {
    Jet::constant(1.0).add(&step_one_two().jet(t).scale(-1.0))
}

/// 1 up to `√2`, 0 from 2 on.
fn big_psi(t: f64) -> f64 {
    1.0 - step_sqrt2_two().value(t)
}

fn big_psi_jet(t: f64) -> Jet {
    Jet::constant(1.0).add(&step_sqrt2_two().jet(t).scale(-1.0))
}
