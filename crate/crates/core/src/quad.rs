//! Gauss–Legendre rules and globally adaptive bisection quadrature.
//!
//! The panel rule is a fixed `n`-point Gauss–Legendre rule; the error of a
//! panel is estimated by comparing it against the sum over its two halves.
//! The panel with the largest estimate is split until the total estimate
//! falls under the absolute tolerance.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(c + h * x) * *w;
        }
        s * h
    }

    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(c + h * x) * w)
            .sum::<f64>()
            * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// The shared 15-point panel rule.
pub fn gl15() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(15))
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_intervals: usize,
    /// Initial uniform split of `[a, b]`; useful for oscillatory integrands.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_intervals: 20_000,
            initial_panels: 8,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn evaluate_panel<F: FnMut(f64) -> Complex64>(rule: &GaussLegendre, a: f64, b: f64, f: &mut F) -> Panel {
    let m = 0.5 * (a + b);
    let whole = rule.integrate(a, b, &mut *f);
    let left = rule.integrate(a, m, &mut *f);
    let right = rule.integrate(m, b, &mut *f);
    let value = left + right;
    Panel {
        a,
        b,
        value,
        error: (value - whole).norm(),
    }
}

/// Adaptive integral of a complex integrand over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> Complex64>(a: f64, b: f64, opts: QuadOptions, mut f: F) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            intervals: 0,
        });
    }
    let rule = gl15();
    let n0 = opts.initial_panels.max(1);
    let step = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::new();
    for i in 0..n0 {
        let lo = a + step * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + step };
        heap.push(evaluate_panel(rule, lo, hi, &mut f));
    }
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= opts.abs_tol {
            let value = heap.iter().map(|p| p.value).sum();
            return Ok(QuadResult {
                value,
                error: total_err,
                intervals: heap.len(),
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureNoConvergence {
                lo: a,
                hi: b,
                error: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at f64 resolution
            return Err(Error::QuadratureNoConvergence {
                lo: a,
                hi: b,
                error: total_err,
                intervals: heap.len() + 1,
            });
        }
        heap.push(evaluate_panel(rule, worst.a, mid, &mut f));
        heap.push(evaluate_panel(rule, mid, worst.b, &mut f));
    }
}

pub fn integrate_real<F: FnMut(f64) -> f64>(a: f64, b: f64, opts: QuadOptions, mut f: F) -> Result<f64> {
    integrate(a, b, opts, |x| Complex64::new(f(x), 0.0)).map(|r| r.value.re)
}
