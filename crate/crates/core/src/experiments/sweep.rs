//! Seeded sweep over prime triples, characters and an `N`-grid.
//!
//! Records are computed on a work-stealing pool and sorted into a canonical
//! order before anything is written, so output bytes depend only on the
//! configuration and seed.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{exponent_fit, record_for, validate_range, Fit, SumRecord, Window};
use crate::character::CompositeCharacter;
use crate::error::{Error, Result};
use crate::modular::odd_primes_in;

/// Inclusive prime range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRange {
    pub min: u64,
    pub max: u64,
}

impl PrimeRange {
    pub fn primes(&self) -> Vec<u64> {
        if self.max < self.min {
            return Vec::new();
        }
        odd_primes_in(self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterSelection {
    /// every primitive triple
    All,
    /// the quadratic character at each prime
    Quadratic,
    /// a seeded sample of this many triples
    Sample(usize),
    /// `All` when `M₂ ≤ 50`, otherwise `Sample(8)`
    Auto,
}

fn default_n_per_triple() -> usize {
    3
}

fn default_selection() -> CharacterSelection {
    CharacterSelection::Auto
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub m1: PrimeRange,
    pub m2: PrimeRange,
    pub m3: PrimeRange,
    #[serde(default = "default_n_per_triple")]
    pub n_per_triple: usize,
    #[serde(default)]
    pub window: Window,
    #[serde(default = "default_selection")]
    pub characters: CharacterSelection,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// fill the `ms` column with wall time (breaks byte-stability)
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub jsonl: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(m1: PrimeRange, m2: PrimeRange, m3: PrimeRange) -> Self {
        Self {
            m1,
            m2,
            m3,
            n_per_triple: default_n_per_triple(),
            window: Window::default(),
            characters: default_selection(),
            seed: 0,
            workers: default_workers(),
            timing: false,
            csv: None,
            jsonl: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("sweep config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_triple == 0 {
            return Err(Error::InvalidArgument("n_per_triple must be positive".into()));
        }
        if !(self.window.c_lo > 0.0) || !(self.window.c_hi > 0.0) {
            return Err(Error::InvalidArgument("window constants must be positive".into()));
        }
        if let CharacterSelection::Sample(0) = self.characters {
            return Err(Error::InvalidArgument("sample size must be positive".into()));
        }
        Ok(())
    }

    /// Ordered triples of pairwise distinct primes.
    pub fn triples(&self) -> Vec<[u64; 3]> {
        let (a, b, c) = (self.m1.primes(), self.m2.primes(), self.m3.primes());
        let mut out = Vec::new();
        for &x in &a {
            for &y in &b {
                for &z in &c {
                    if x != y && x != z && y != z {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        out
    }
}

/// Log-spaced points on the admissible window; empty when the window is empty.
pub fn n_grid(m: [u64; 3], count: usize, window: Window) -> Vec<f64> {
    let Ok(rep) = validate_range(m[0], m[1], m[2], m[0] as f64, window) else {
        return Vec::new();
    };
    let (lo, hi) = (rep.lower, rep.upper);
    if hi < lo {
        return Vec::new();
    }
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

fn stream_id(m: [u64; 3]) -> u64 {
    (m[0] << 42) ^ (m[1] << 21) ^ m[2]
}

/// Character exponent triples for one prime triple.
pub fn select_characters(m: [u64; 3], selection: CharacterSelection, seed: u64) -> Vec<[u64; 3]> {
    let sel = match selection {
        CharacterSelection::Auto if m[1] <= 50 => CharacterSelection::All,
        CharacterSelection::Auto => CharacterSelection::Sample(8),
        s => s,
    };
    let sizes = m.map(|p| p - 2);
    let total = (sizes[0] * sizes[1] * sizes[2]) as usize;
    let decode = |i: usize| {
        let i = i as u64;
        [1 + i / (sizes[1] * sizes[2]), 1 + (i / sizes[2]) % sizes[1], 1 + i % sizes[2]]
    };
    match sel {
        CharacterSelection::Quadratic => vec![m.map(|p| (p - 1) / 2)],
        CharacterSelection::All => (0..total).map(decode).collect(),
        CharacterSelection::Sample(n) if n >= total => (0..total).map(decode).collect(),
        CharacterSelection::Sample(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream_id(m));
            let mut idx = sample(&mut rng, total, n).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(decode).collect()
        }
        CharacterSelection::Auto => unreachable!(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub triples: usize,
    pub records: usize,
    pub failures: Vec<String>,
    /// records with `|S| > Σ W(n/N)`, which cannot happen
    pub invariant_violations: usize,
    pub max_ratio: f64,
    pub worst: Vec<SumRecord>,
    /// slope of `log max |S|/√N` against `log M`, when at least five moduli occur
    pub fit: Option<Fit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutput {
    pub records: Vec<SumRecord>,
    pub summary: SweepSummary,
}

struct Task {
    m: [u64; 3],
    k: [u64; 3],
    grid: Vec<f64>,
}

fn run_task(task: &Task, timing: bool) -> Result<Vec<SumRecord>> {
    let parts: Vec<(u64, u64)> = task.m.iter().copied().zip(task.k).collect();
    let chi = CompositeCharacter::from_exponents(&parts)?;
    Ok(task
        .grid
        .iter()
        .map(|&n| {
            let t0 = Instant::now();
            let mut r = record_for(&chi, n);
            if timing {
                r.ms = t0.elapsed().as_secs_f64() * 1e3;
            }
            r
        })
        .collect())
}

/// Runs the sweep and writes any configured outputs.
pub fn sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let triples = config.triples();
    let mut tasks = Vec::new();
    for &m in &triples {
        let grid = n_grid(m, config.n_per_triple, config.window);
        if grid.is_empty() {
            continue;
        }
        for k in select_characters(m, config.characters, config.seed) {
            tasks.push(Task { m, k, grid: grid.clone() });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<std::result::Result<Vec<SumRecord>, String>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| run_task(t, config.timing).map_err(|e| format!("{:?} {:?}: {e}", t.m, t.k)))
            .collect()
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(v) => records.extend(v),
            Err(e) => failures.push(e),
        }
    }
    records.sort_by(|a, b| {
        (a.m1, a.m2, a.m3, a.k1, a.k2, a.k3)
            .cmp(&(b.m1, b.m2, b.m3, b.k1, b.k2, b.k3))
            .then(a.n.total_cmp(&b.n))
    });
    failures.sort();
    let summary = summarize(triples.len(), &records, failures);
    if let Some(path) = &config.csv {
        write_csv(path, &records)?;
    }
    if let Some(path) = &config.jsonl {
        write_jsonl(path, &records)?;
    }
    Ok(SweepOutput { records, summary })
}

fn summarize(triples: usize, records: &[SumRecord], failures: Vec<String>) -> SweepSummary {
    let invariant_violations = records
        .iter()
        .filter(|r| r.abs_s > r.trivial_bound * (1.0 + 1e-12) + 1e-12)
        .count();
    let mut by_ratio: Vec<&SumRecord> = records.iter().collect();
    by_ratio.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
    let worst: Vec<SumRecord> = by_ratio.iter().take(5).map(|r| (*r).clone()).collect();
    let max_ratio = worst.first().map_or(0.0, |r| r.ratio);
    let mut per_modulus: std::collections::BTreeMap<u64, f64> = Default::default();
    for r in records {
        let e = per_modulus.entry(r.m1 * r.m2 * r.m3).or_insert(0.0);
        *e = e.max(r.abs_s / r.n.sqrt());
    }
    let pts: Vec<(f64, f64)> = per_modulus
        .into_iter()
        .filter(|&(_, v)| v > 0.0)
        .map(|(m, v)| (m as f64, v))
        .collect();
    SweepSummary {
        triples,
        records: records.len(),
        failures,
        invariant_violations,
        max_ratio,
        worst,
        fit: exponent_fit(&pts).ok(),
    }
}

/// Column order of the sweep CSV.
pub const CSV_HEADER: [&str; 14] = [
    "m1", "m2", "m3", "k1", "k2", "k3", "N", "abs_S", "bound", "ratio", "theta1", "theta2", "theta3", "ms",
];

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv_to<W: Write>(out: W, records: &[SumRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in records {
        w.write_record([
            r.m1.to_string(),
            r.m2.to_string(),
            r.m3.to_string(),
            r.k1.to_string(),
            r.k2.to_string(),
            r.k3.to_string(),
            r.n.to_string(),
            r.abs_s.to_string(),
            r.bound.to_string(),
            r.ratio.to_string(),
            r.theta[0].to_string(),
            r.theta[1].to_string(),
            r.theta[2].to_string(),
            r.ms.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_jsonl_to<W: Write>(mut out: W, records: &[SumRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(io_err)?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err)?;
    }
    Ok(std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?))
}

pub fn write_csv(path: &Path, records: &[SumRecord]) -> Result<()> {
    write_csv_to(create(path)?, records)
}

pub fn write_jsonl(path: &Path, records: &[SumRecord]) -> Result<()> {
    write_jsonl_to(create(path)?, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        let r = PrimeRange { min: 3, max: 13 };
        let mut c = SweepConfig::new(r, r, r);
        c.characters = CharacterSelection::Sample(2);
        c.seed = 7;
        c
    }

    #[test]
    fn empty_range_gives_empty_output() {
        let mut c = small();
        c.m2 = PrimeRange { min: 20, max: 22 };
        let out = sweep(&c).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.summary.max_ratio, 0.0);
    }

    #[test]
    fn deterministic_across_workers() {
        let mut a = small();
        let mut b = small();
        a.workers = 1;
        b.workers = 3;
        let (ra, rb) = (sweep(&a).unwrap(), sweep(&b).unwrap());
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        write_csv_to(&mut ca, &ra.records).unwrap();
        write_csv_to(&mut cb, &rb.records).unwrap();
        assert_eq!(ca, cb);
        assert!(!ra.records.is_empty());
        assert_eq!(ra.summary.invariant_violations, 0);
    }

    #[test]
    fn sampling_depends_on_seed_only() {
        let m = [53, 59, 61];
        let a = select_characters(m, CharacterSelection::Sample(8), 1);
        assert_eq!(a, select_characters(m, CharacterSelection::Sample(8), 1));
        assert_ne!(a, select_characters(m, CharacterSelection::Sample(8), 2));
        assert_eq!(a.len(), 8);
        assert!(a.iter().all(|k| k.iter().zip(m).all(|(&k, p)| (1..p - 1).contains(&k))));
        assert_eq!(select_characters([3, 5, 7], CharacterSelection::Auto, 0).len(), 15);
        assert_eq!(select_characters(m, CharacterSelection::Auto, 0).len(), 8);
        assert_eq!(select_characters([3, 5, 7], CharacterSelection::Quadratic, 0), vec![[1, 2, 3]]);
    }

    #[test]
    fn grid_is_inside_window() {
        let g = n_grid([5, 7, 3], 3, Window::default());
        assert_eq!(g.len(), 3);
        assert!((g[0] - 5.0).abs() < 1e-12);
        assert!((g[2] - 5.0 * 7f64.powf(2.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn config_json() {
        let c = SweepConfig::from_json(
            r#"{"m1":{"min":3,"max":7},"m2":{"min":3,"max":11},"m3":{"min":3,"max":7},"characters":"quadratic"}"#,
        )
        .unwrap();
        assert_eq!(c.n_per_triple, 3);
        assert_eq!(c.characters, CharacterSelection::Quadratic);
        assert!(SweepConfig::from_json(r#"{"m1":{"min":3,"max":7}}"#).is_err());
        let s = SweepConfig::from_json(
            r#"{"m1":{"min":3,"max":7},"m2":{"min":3,"max":11},"m3":{"min":3,"max":7},"characters":{"sample":4}}"#,
        )
        .unwrap();
        assert_eq!(s.characters, CharacterSelection::Sample(4));
    }
}
