//! Smooth character sums `S_χ(N) = Σ χ(n) W(n/N)` to a modulus
//! `M = M₁M₂M₃`, and step-by-step numerical verification of their
//! transformation by the delta symbol and Poisson summation.

pub mod cauchy;
pub mod charsums;
pub mod integrals;
pub mod pipeline;

use num_complex::Complex64;
use serde::Serialize;

use crate::character::{CompositeCharacter, PrimeCharacter};
use crate::error::{Error, Result};
use crate::weights::SmoothWeight;


pub use cauchy::{charsum_c3, charsum_c3_literal, charsum_c3_split, t_evaluators, t_sum_check, t_sum_direct, t_sum_dual, C3Split, TSumCheck};
pub use charsums::{charsum_c1, charsum_c1_literal, charsum_c2, charsum_c2_literal};
pub use integrals::{integral_i, integral_i_row, integral_j, integral_k, integral_l, integral_l_table, JEvaluator, QTables, SpectralOptions};
pub use pipeline::{pipeline_reconstruct, pipeline_reconstruct_many, poisson_m_verify, PipelineOptions, PipelineTrace, PoissonCheck};


/// `Σ_{n ≥ 1} χ(n) W(n/N)` over the integer support of `W`.
pub fn s_chi(chi: &CompositeCharacter, n_size: f64, w: &SmoothWeight) -> Complex64 {
    if !(n_size > 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    let (lo, hi) = w.support();
    let start = ((lo * n_size).ceil() as i64).max(1);
    let end = (hi * n_size).floor() as i64;
    let mut s = Complex64::new(0.0, 0.0);
    for n in start..=end {
        let wv = w.value(n as f64 / n_size);
        if wv != 0.0 {
            s += chi.eval(n as i128) * wv;
        }
    }
    s
}

/// Length and modulus data shared by the integral transforms; no characters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scales {
    pub n_size: f64,
    pub q_size: f64,
    pub m1: u64,
    pub m2: u64,
    pub m3: u64,
}

impl Scales {
    /// `Q = √(N/M₁)`.
    pub fn new(m1: u64, m2: u64, m3: u64, n_size: f64) -> Self {
        Self {
            n_size,
            q_size: (n_size / m1 as f64).sqrt(),
            m1,
            m2,
            m3,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.m1 * self.m2 * self.m3
    }

    pub fn log2_m(&self) -> f64 {
        (self.modulus() as f64).ln().powi(2)
    }

    /// Frequency scale of the `u`-transform: `N/(qM₁M₃)`.
    pub fn alpha(&self, q: u64) -> f64 {
        self.n_size / (q * self.m1 * self.m3) as f64
    }

    /// Frequency scale of the `v`-transform: `N/(qM₁M₂)`.
    pub fn beta(&self, q: u64) -> f64 {
        self.n_size / (q * self.m1 * self.m2) as f64
    }

    /// `10·QM₁M₃·log²M/N`: range kept in the dual sum after Poisson in `m`.
    pub fn m_cutoff(&self) -> f64 {
        10.0 * self.q_size * (self.m1 * self.m3) as f64 * self.log2_m() / self.n_size
    }

    /// `10·QM₁M₂·log²M/N`: range kept after Poisson in `n`.
    pub fn n_cutoff(&self) -> f64 {
        10.0 * self.q_size * (self.m1 * self.m2) as f64 * self.log2_m() / self.n_size
    }

    /// Largest `q` with `h(q/Q, y)` possibly nonzero for `|y| ≤ y_max`.
    pub fn q_limit(&self, y_max: f64) -> u64 {
        (self.q_size * 1f64.max(2.0 * y_max)).floor() as u64
    }
}

/// Three primitive characters to distinct prime moduli and a length `N`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub chi1: PrimeCharacter,
    pub chi2: PrimeCharacter,
    pub chi3: PrimeCharacter,
    pub scales: Scales,
}

impl Instance {
    pub fn new(chi1: PrimeCharacter, chi2: PrimeCharacter, chi3: PrimeCharacter, n_size: f64) -> Result<Self> {
        let (m1, m2, m3) = (chi1.p(), chi2.p(), chi3.p());
        if m1 == m2 || m1 == m3 || m2 == m3 {
            return Err(Error::InvalidArgument(format!(
                "moduli must be distinct primes, got {m1}, {m2}, {m3}"
            )));
        }
        for c in [&chi1, &chi2, &chi3] {
            if !c.is_primitive() {
                return Err(Error::PrincipalCharacter);
            }
        }
        if !(n_size > 0.0) {
            return Err(Error::InvalidArgument(format!("N must be positive, got {n_size}")));
        }
        Ok(Self {
            scales: Scales::new(m1, m2, m3, n_size),
            chi1,
            chi2,
            chi3,
        })
    }

    /// Instance from exponents against the smallest primitive roots.
    pub fn from_exponents(m: [u64; 3], k: [u64; 3], n_size: f64) -> Result<Self> {
        Self::new(
            PrimeCharacter::new(m[0], k[0])?,
            PrimeCharacter::new(m[1], k[1])?,
            PrimeCharacter::new(m[2], k[2])?,
            n_size,
        )
    }

    pub fn m1(&self) -> u64 {
        self.scales.m1
    }

    pub fn m2(&self) -> u64 {
        self.scales.m2
    }

    pub fn m3(&self) -> u64 {
        self.scales.m3
    }

    pub fn composite(&self) -> CompositeCharacter {
        CompositeCharacter::new(vec![self.chi1.clone(), self.chi2.clone(), self.chi3.clone()])
            .expect("distinct primes checked at construction")
    }

    pub fn label(&self) -> String {
        self.composite().label()
    }

    /// `χ₁χ₂(n)`.
    pub fn chi12(&self, n: i128) -> Complex64 {
        self.chi1.eval(n) * self.chi2.eval(n)
    }

    /// `χ(n) = χ₁χ₂χ₃(n)`.
    pub fn chi(&self, n: i128) -> Complex64 {
        self.chi12(n) * self.chi3.eval(n)
    }

    /// `η = ε₁ε₂ε₃ χ₂χ₃(M₁) χ₁(M₂M₃)`.
    pub fn eta(&self) -> Complex64 {
        let (m1, m2, m3) = (self.m1() as i128, self.m2() as i128, self.m3() as i128);
        self.chi1.gauss_sign()
            * self.chi2.gauss_sign()
            * self.chi3.gauss_sign()
            * self.chi2.eval(m1)
            * self.chi3.eval(m1)
            * self.chi1.eval(m2 * m3)
    }
}
