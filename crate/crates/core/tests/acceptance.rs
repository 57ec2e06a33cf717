//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use charsum_core::character::{enumerate_characters, enumerate_primitive_composites, twisted_gauss_relation_check, CompositeCharacter, PrimeCharacter};
use charsum_core::complete_sums::{deligne_ratio, frak_s};
use charsum_core::delta::{c_q, h, h_property_scan, DeltaApproximator, HGrid};
use charsum_core::experiments::sweep::select_characters;
use charsum_core::experiments::{
    delta_max, exponent_fit, ray_triple, sweep, theta_region_check, CharacterSelection, PrimeRange, SweepConfig,
};
use charsum_core::lfunction::{l_value_family, HurwitzKernel};
use charsum_core::modular::{gcd, odd_primes_in};
use charsum_core::smooth_sums::{
    charsum_c1, charsum_c1_literal, charsum_c2, charsum_c2_literal, charsum_c3, charsum_c3_literal, pipeline_reconstruct_many,
    s_chi, Instance, PipelineOptions,
};
use charsum_core::weights::SmoothWeight;

/// Largest `|𝔖_χ(m, n)|/√p` over primitive `χ` and `mn ≢ 0`, `29 ≤ p ≤ 97`, by brute force.
const DELIGNE_MAX_FROZEN: f64 = 1.9970414844467335;
/// Largest bound ratio over the quadratic-character sweep, by brute force.
const BOUND_RATIO_FROZEN: f64 = 0.12325592683156046;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn delta_identity() -> Outcome {
    let mut worst = (0.0f64, 0i64, 0.0f64, 0u64);
    for q_size in [5.0, 10.0, 31.62] {
        for k in [1u64, 3, 7] {
            let d = DeltaApproximator::new(q_size, k).map_err(|e| e.to_string())?;
            for n in -10_000i64..=10_000 {
                let exact = if n == 0 { 1.0 } else { 0.0 };
                let err = (d.delta_mod(n) - exact).abs();
                if err > worst.0 {
                    worst = (err, n, q_size, k);
                }
            }
        }
    }
    ensure(worst.0 < 1e-8, || format!("error {:e} at n={} Q={} K={}", worst.0, worst.1, worst.2, worst.3))?;
    Ok(format!("max error {:.2e} (n={}, Q={}, K={})", worst.0, worst.1, worst.2, worst.3))
}

fn h_support_and_flat() -> Outcome {
    let mut checked = 0;
    let mut outside = 0;
    for i in 1..=100 {
        let x = 3.0 * i as f64 / 100.0;
        for j in 0..100 {
            let y = -2.0 + 4.0 * j as f64 / 99.0;
            checked += 1;
            if x > 1f64.max(2.0 * y.abs()) {
                outside += 1;
                let v = h(x, y);
                ensure(v == 0.0, || format!("h({x}, {y}) = {v:e} outside the support"))?;
            }
        }
    }
    let rep = h_property_scan(&HGrid::default());
    ensure(rep.flat_points > 0, || "empty flat region".into())?;
    ensure(rep.max_flat_dy < 1e-6, || format!("|dh/dy| = {:e} on the flat region", rep.max_flat_dy))?;
    Ok(format!(
        "{checked} grid points, {outside} outside the support all exactly 0; max |dh/dy| {:.2e} over {} flat points",
        rep.max_flat_dy, rep.flat_points
    ))
}

fn c_q_decay() -> Outcome {
    let mut prev = f64::INFINITY;
    let mut parts = Vec::new();
    for q_size in [20.0f64, 40.0, 80.0, 160.0] {
        let dev = (c_q(q_size).map_err(|e| e.to_string())? - 1.0).abs();
        ensure(dev < q_size.powi(-3), || format!("|c_Q - 1| = {dev:e} at Q={q_size}"))?;
        ensure(dev <= prev, || format!("|c_Q - 1| grew at Q={q_size}"))?;
        prev = dev;
        parts.push(format!("Q={q_size}: {dev:.1e}"));
    }
    Ok(parts.join(", "))
}

fn complete_sum_values() -> Outcome {
    let mut chars = 0;
    for p in odd_primes_in(3, 97) {
        for chi in enumerate_characters(p, true).map_err(|e| e.to_string())? {
            chars += 1;
            let v = frak_s(&chi, 0, 0);
            ensure((v - (p - 1) as f64).norm() < 1e-9, || format!("{}: S(0,0) = {v}", chi.label()))?;
            for x in 1..p as i128 {
                let a = frak_s(&chi, x, 0);
                let b = frak_s(&chi, 0, x);
                ensure((a + 1.0).norm() < 1e-9 && (b + 1.0).norm() < 1e-9, || {
                    format!("{}: S({x},0) = {a}, S(0,{x}) = {b}", chi.label())
                })?;
            }
        }
    }
    let mut best = (0.0f64, 0u64);
    for p in odd_primes_in(29, 97) {
        let r = deligne_ratio(p).map_err(|e| e.to_string())?;
        if r > best.0 {
            best = (r, p);
        }
    }
    ensure(best.0 <= DELIGNE_MAX_FROZEN * (1.0 + 1e-12), || {
        format!("ratio {} at p={} exceeds {DELIGNE_MAX_FROZEN}", best.0, best.1)
    })?;
    Ok(format!("{chars} characters exact; max ratio {} at p={} (frozen {DELIGNE_MAX_FROZEN})", best.0, best.1))
}

fn gauss_relations() -> Outcome {
    let mut worst = 0.0f64;
    let mut chars = 0;
    for p in odd_primes_in(3, 97) {
        for chi in enumerate_characters(p, true).map_err(|e| e.to_string())? {
            chars += 1;
            let dev = (chi.gauss_sum().norm() - (p as f64).sqrt()).abs();
            worst = worst.max(dev);
            ensure(dev < 1e-9, || format!("{}: ||g| - sqrt p| = {dev:e}", chi.label()))?;
            for a in 0..p as i128 {
                ensure(twisted_gauss_relation_check(&chi, a), || format!("{}: twisted relation fails at a={a}", chi.label()))?;
            }
        }
    }
    Ok(format!("{chars} characters, max ||g| - sqrt p| {worst:.1e}"))
}

/// Moduli scanned for the closed forms; at least `4Q` for every pipeline run here.
const Q_SCAN: u64 = 8;

fn closed_form_sums() -> Outcome {
    let mut counts = [0usize; 3];
    let mut worst = [0.0f64; 3];
    for (m1, m2, m3) in [(3u64, 5u64, 7u64), (5, 7, 11)] {
        // C1 needs only χ₃
        for chi3 in enumerate_characters(m3, true).map_err(|e| e.to_string())? {
            for q in (1..=Q_SCAN).filter(|&q| gcd(q, m3) == 1) {
                for a in 0..q as i64 {
                    for b in 0..m1 as i64 {
                        for m in -60..=60 {
                            let lit = charsum_c1_literal(m, q, a, b, &chi3, m1);
                            let closed = charsum_c1(m, q, a, b, &chi3, m1).map_err(|e| e.to_string())?;
                            let d = (lit - closed).norm();
                            worst[0] = worst[0].max(d);
                            counts[0] += 1;
                            ensure(d < 1e-8, || format!("C1 {m1},{m2},{m3} q={q} a={a} b={b} m={m}: {d:e}"))?;
                        }
                    }
                }
            }
        }
        let c1s = enumerate_characters(m1, true).map_err(|e| e.to_string())?;
        let c2s = enumerate_characters(m2, true).map_err(|e| e.to_string())?;
        for chi1 in &c1s {
            for chi2 in &c2s {
                for q in (1..=Q_SCAN).filter(|&q| gcd(q, m2 * m3) == 1) {
                    for m in -12..=12 {
                        for n in -12..=12 {
                            let lit = charsum_c2_literal(m, n, q, chi1, chi2, m3).map_err(|e| e.to_string())?;
                            let closed = charsum_c2(m, n, q, chi1, chi2, m3).map_err(|e| e.to_string())?;
                            let d = (lit - closed).norm();
                            worst[1] = worst[1].max(d);
                            counts[1] += 1;
                            ensure(d < 1e-8, || format!("C2 {m1},{m2},{m3} q={q} m={m} n={n}: {d:e}"))?;
                        }
                    }
                }
            }
            for q1 in (1..=Q_SCAN).filter(|&q| gcd(q, m1 * m3) == 1) {
                for q2 in (1..=Q_SCAN).filter(|&q| gcd(q, m1 * m3) == 1) {
                    for a in -3..=3 {
                        for b in -3..=3 {
                            for n in -8..=8 {
                                let lit = charsum_c3_literal(a, b, n, q1, q2, chi1, m2, m3).map_err(|e| e.to_string())?;
                                let split = charsum_c3(a, b, n, q1, q2, chi1, m2, m3).map_err(|e| e.to_string())?;
                                let d = (lit - split).norm();
                                worst[2] = worst[2].max(d);
                                counts[2] += 1;
                                ensure(d < 1e-8, || format!("C3 {m1},{m2},{m3} q=({q1},{q2}) m=({a},{b}) n={n}: {d:e}"))?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "C1 {} cases (max {:.1e}), C2 {} (max {:.1e}), C3 {} (max {:.1e}), q <= {Q_SCAN}",
        counts[0], worst[0], counts[1], worst[1], counts[2], worst[2]
    ))
}

fn pipeline() -> Outcome {
    let ks = [[1u64, 1, 1], [1, 2, 3], [1, 3, 5], [1, 1, 4]];
    let opts = PipelineOptions::default();
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for n_size in [9.0, 12.0, 15.0] {
        let insts: Vec<Instance> = ks
            .iter()
            .map(|&k| Instance::from_exponents([3, 5, 7], k, n_size))
            .collect::<charsum_core::Result<_>>()
            .map_err(|e| e.to_string())?;
        match pipeline_reconstruct_many(&insts, &opts) {
            Ok(traces) => {
                for t in &traces {
                    let worst_step = t.residuals.iter().map(|r| r.relative).fold(0.0, f64::max);
                    let worst_shift = t.halving.iter().map(|h| h.relative_shift).fold(0.0, f64::max);
                    lines.push(format!(
                        "N={n_size} {}: max step residual {worst_step:.1e}, max halving shift {worst_shift:.1e}, {}",
                        t.label,
                        if t.ok() { "ok" } else { "VIOLATED" }
                    ));
                    if !t.ok() {
                        failed.push(format!("N={n_size} {}", t.label));
                    }
                }
            }
            Err(e) => {
                lines.push(format!("N={n_size}: {e}"));
                failed.push(format!("N={n_size}"));
            }
        }
    }
    for l in &lines {
        println!("         {l}");
    }
    if failed.is_empty() {
        Ok(format!("{} traces within tolerance", lines.len()))
    } else {
        Err(format!("failing: {}", failed.join(", ")))
    }
}

fn bound_regression() -> Outcome {
    let mut cfg = SweepConfig::new(
        PrimeRange { min: 3, max: 50 },
        PrimeRange { min: 3, max: 200 },
        PrimeRange { min: 3, max: 50 },
    );
    cfg.characters = CharacterSelection::Quadratic;
    cfg.n_per_triple = 3;
    let out = sweep(&cfg).map_err(|e| e.to_string())?;
    let s = &out.summary;
    ensure(s.failures.is_empty(), || format!("{} records failed", s.failures.len()))?;
    ensure(s.invariant_violations == 0, || format!("{} records above the trivial bound", s.invariant_violations))?;
    let limit = BOUND_RATIO_FROZEN * 1.05;
    let w = &s.worst[0];
    ensure(s.max_ratio <= limit, || format!("max ratio {} > {limit}", s.max_ratio))?;
    Ok(format!(
        "{} triples, {} records, max ratio {} at ({},{},{}) N={:.3} (limit {limit:.6})",
        s.triples, s.records, s.max_ratio, w.m1, w.m2, w.m3, w.n
    ))
}

fn l_values() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for primes in [[3u64, 5, 7], [3, 5, 11]] {
        let chars = enumerate_primitive_composites(&primes).map_err(|e| e.to_string())?;
        let recs = l_value_family(&chars).map_err(|e| e.to_string())?;
        for r in &recs {
            worst = worst.max(r.discrepancy);
            ensure(r.discrepancy < 1e-8, || format!("{}: methods differ by {:e}", r.label, r.discrepancy))?;
        }
        count += recs.len();
        if primes[2] == 7 {
            for (chi, r) in chars.iter().zip(&recs) {
                let conj = chi.conj();
                let j = chars.iter().position(|c| *c == conj).ok_or("conjugate missing")?;
                let d = (recs[j].hurwitz - r.hurwitz.conj()).norm().max((recs[j].smoothed - r.smoothed.conj()).norm());
                ensure(d < 1e-9, || format!("{}: conjugation off by {d:e}", r.label))?;
            }
        }
    }
    Ok(format!("{count} characters, max discrepancy {worst:.1e}"))
}

fn theta_example() -> Outcome {
    let theta = [5.0 / 12.0, 5.0 / 12.0, 1.0 / 6.0];
    let delta = 1.0 / 12.0;
    let rep = theta_region_check(theta, delta).map_err(|e| e.to_string())?;
    ensure(rep.ok, || format!("delta = 1/12 rejected: {:?}", rep.failed))?;
    let dm = delta_max(theta).map_err(|e| e.to_string())?;
    ensure((dm - delta).abs() <= 1e-12, || format!("delta_max = {dm}"))?;
    let above = theta_region_check(theta, delta + 1e-11).map_err(|e| e.to_string())?;
    ensure(!above.ok, || "a larger delta was accepted".into())?;
    let exponent = 0.25 - dm / 2.0;
    ensure((exponent - 5.0 / 24.0).abs() <= 1e-12, || format!("exponent {exponent}"))?;
    Ok(format!("delta_max = {dm}, exponent 1/4 - delta/2 = {exponent}"))
}

fn subconvex_exponent_report() -> Outcome {
    let theta = [5.0 / 12.0, 5.0 / 12.0, 1.0 / 6.0];
    let mut l_points = Vec::new();
    let mut s_points = Vec::new();
    for e in [3.0, 3.5, 4.0, 4.5, 5.0] {
        let m = ray_triple(theta, 10f64.powf(e)).map_err(|e| e.to_string())?;
        let modulus = m[0] * m[1] * m[2];
        let kernel = HurwitzKernel::new(modulus).map_err(|e| e.to_string())?;
        let root = (modulus as f64).sqrt();
        let (mut lmax, mut smax) = (0.0f64, 0.0f64);
        for k in select_characters(m, CharacterSelection::Sample(8), 2024) {
            let chi = CompositeCharacter::new(
                (0..3).map(|i| PrimeCharacter::new(m[i], k[i])).collect::<charsum_core::Result<_>>().map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            lmax = lmax.max(kernel.eval(&chi).map_err(|e| e.to_string())?.norm());
            smax = smax.max(s_chi(&chi, root, &SmoothWeight::w()).norm() / root.sqrt());
        }
        l_points.push((modulus as f64, lmax));
        s_points.push((modulus as f64, smax));
    }
    let fl = exponent_fit(&l_points).map_err(|e| e.to_string())?;
    let fs = exponent_fit(&s_points).map_err(|e| e.to_string())?;
    Ok(format!(
        "reported only: max |L| slope {:.3} +/- {:.3} (r2 {:.2}), max |S|/sqrt N slope {:.3} +/- {:.3}; subconvex target 5/24 = {:.4}",
        fl.slope,
        fl.slope_se,
        fl.r2,
        fs.slope,
        fs.slope_se,
        5.0 / 24.0
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "delta identity exactness", budget: Duration::from_secs(30), run: delta_identity },
        Criterion { id: 2, name: "h support and flat region", budget: Duration::from_secs(5), run: h_support_and_flat },
        Criterion { id: 3, name: "c_Q decay", budget: Duration::from_secs(1), run: c_q_decay },
        Criterion { id: 4, name: "complete sum exact values and Deligne ratio", budget: Duration::from_secs(180), run: complete_sum_values },
        Criterion { id: 5, name: "Gauss sum relations", budget: Duration::from_secs(30), run: gauss_relations },
        Criterion { id: 6, name: "closed-form character sums", budget: Duration::from_secs(120), run: closed_form_sums },
        Criterion { id: 7, name: "pipeline reconstruction", budget: Duration::from_secs(300), run: pipeline },
        Criterion { id: 8, name: "bound ratio regression", budget: Duration::from_secs(600), run: bound_regression },
        Criterion { id: 9, name: "L-value cross-method", budget: Duration::from_secs(60), run: l_values },
        Criterion { id: 10, name: "theta region example", budget: Duration::from_secs(1), run: theta_example },
        Criterion { id: 11, name: "subconvex exponent (reported fit)", budget: Duration::from_secs(120), run: subconvex_exponent_report },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = t0.elapsed();
        let res = match res {
            Ok(d) if elapsed > c.budget => Err(format!("{d}; over budget")),
            r => r,
        };
        let (tag, detail) = match &res {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "{tag} [{:>2}] {} ({:.1} s of {} s): {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        if res.is_err() {
            failures += 1;
        }
    }
    println!("acceptance: {failures} failing");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
