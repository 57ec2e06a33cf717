use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use charsum_core::character::{enumerate_characters, CompositeCharacter, PrimeCharacter};
use charsum_core::complete_sums::{deligne_ratio, frak_s};
use charsum_core::delta::DeltaApproximator;
use charsum_core::experiments::sweep::{write_csv_to, write_jsonl_to};
use charsum_core::experiments::{
    sweep, theta_region_check, CharacterSelection, PrimeRange, SweepConfig,
};
use charsum_core::lfunction::l_value_family;
use charsum_core::smooth_sums::{pipeline_reconstruct, Instance, PipelineOptions};
use charsum_core::Error;

#[derive(Parser)]
#[command(name = "charsum-lab", version, about = "Smooth character sums, the delta method and L(1/2, χ) experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// RNG seed for sampled character families
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args, Clone, Copy)]
struct Triple {
    #[arg(long)]
    m1: u64,
    #[arg(long)]
    m2: u64,
    #[arg(long)]
    m3: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Rebuild S_χ(N) through the delta expansion and both Poisson steps
    VerifyIdentities {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = 1)]
        k1: u64,
        #[arg(long, default_value_t = 1)]
        k2: u64,
        #[arg(long, default_value_t = 1)]
        k3: u64,
        /// length N (an integer)
        #[arg(long = "N", alias = "n")]
        n_size: f64,
        /// also write the full step-by-step trace as JSON to this path
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check the K-modified delta expansion against δ(n, 0)
    DeltaCheck {
        #[arg(long = "Q", alias = "q")]
        q_size: f64,
        #[arg(long = "K", alias = "k", default_value_t = 1)]
        k: u64,
        /// check |n| ≤ nmax
        #[arg(long = "nmax", alias = "range", default_value_t = 10_000)]
        nmax: i64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Evaluate Σ_x χ(x) χ̄(m + x) e(nx/p)
    FrakS {
        #[arg(long)]
        p: u64,
        /// exponent of χ_p
        #[arg(long = "chi", alias = "k")]
        k: u64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
    },
    /// Largest |𝔖_χ(m, n)|/√p per prime, with the degenerate values checked
    DeligneScan {
        #[arg(long, default_value_t = 3)]
        pmin: u64,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
    },
    /// L(1/2, χ) by both methods
    Lvalue {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = 1)]
        k1: u64,
        #[arg(long, default_value_t = 1)]
        k2: u64,
        #[arg(long, default_value_t = 1)]
        k3: u64,
        /// every primitive character of modulus m1·m2·m3
        #[arg(long)]
        all_chars: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Bound-ratio sweep over prime triples
    Sweep {
        /// JSON sweep configuration
        #[arg(long)]
        config: Option<PathBuf>,
        /// M₁ range as lo:hi
        #[arg(long, value_parser = parse_range)]
        m1_range: Option<PrimeRange>,
        #[arg(long, value_parser = parse_range)]
        m2_range: Option<PrimeRange>,
        #[arg(long, value_parser = parse_range)]
        m3_range: Option<PrimeRange>,
        /// all | quadratic | auto | sample:COUNT
        #[arg(long, value_parser = parse_selection)]
        chars: Option<CharacterSelection>,
        #[arg(long)]
        n_per_triple: Option<usize>,
        /// also write the summary as JSON here
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Test (θ₁, θ₂, θ₃) and δ against the subconvexity region
    ThetaCheck {
        #[arg(long)]
        theta1: f64,
        #[arg(long)]
        theta2: f64,
        #[arg(long)]
        theta3: f64,
        #[arg(long)]
        delta: f64,
    },
}

fn parse_range(s: &str) -> Result<PrimeRange, String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    Ok(PrimeRange {
        min: a.trim().parse().map_err(|e| format!("{e}"))?,
        max: b.trim().parse().map_err(|e| format!("{e}"))?,
    })
}

fn parse_selection(s: &str) -> Result<CharacterSelection, String> {
    match s {
        "all" => Ok(CharacterSelection::All),
        "quadratic" => Ok(CharacterSelection::Quadratic),
        "auto" => Ok(CharacterSelection::Auto),
        _ => s
            .strip_prefix("sample:")
            .and_then(|n| n.parse().ok())
            .map(CharacterSelection::Sample)
            .ok_or_else(|| format!("unknown selection {s}")),
    }
}

enum Failure {
    Invariant(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Tolerance { .. } => Failure::Invariant(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn sink(global: &Global) -> io::Result<Box<dyn Write>> {
    Ok(match &global.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Rows as CSV with the given header, or one JSON object per row.
fn emit<T: Serialize>(global: &Global, header: &[&str], rows: &[T], cells: impl Fn(&T) -> Vec<String>) -> Outcome {
    let mut out = sink(global)?;
    match global.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(header).map_err(|e| Failure::Input(e.to_string()))?;
            for r in rows {
                w.write_record(cells(r)).map_err(|e| Failure::Input(e.to_string()))?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for r in rows {
                serde_json::to_writer(&mut out, r).map_err(|e| Failure::Input(e.to_string()))?;
                out.write_all(b"\n")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    if let Some(w) = g.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    match cli.command {
        Command::VerifyIdentities { triple, k1, k2, k3, n_size, trace } => {
            let inst = Instance::from_exponents([triple.m1, triple.m2, triple.m3], [k1, k2, k3], n_size)?;
            let t = pipeline_reconstruct(&inst, &PipelineOptions::default())?;
            if let Some(path) = trace {
                let mut f = BufWriter::new(File::create(path)?);
                serde_json::to_writer_pretty(&mut f, &t).map_err(|e| Failure::Input(e.to_string()))?;
                writeln!(f)?;
                f.flush()?;
            }
            #[derive(Serialize)]
            struct Row<'a> {
                from: &'a str,
                to: &'a str,
                relative: f64,
                tolerance: f64,
                ok: bool,
            }
            let rows: Vec<Row> = t
                .residuals
                .iter()
                .map(|r| Row {
                    from: &r.from,
                    to: &r.to,
                    relative: r.relative,
                    tolerance: r.tolerance + r.tail_allowance,
                    ok: r.ok,
                })
                .collect();
            emit(g, &["from", "to", "relative", "tolerance", "ok"], &rows, |r| {
                vec![r.from.into(), r.to.into(), r.relative.to_string(), r.tolerance.to_string(), r.ok.to_string()]
            })?;
            t.check()?;
            Ok(())
        }
        Command::DeltaCheck { q_size, k, nmax, tol } => {
            let d = DeltaApproximator::new(q_size, k)?;
            #[derive(Serialize)]
            struct Row {
                n: i64,
                value: f64,
                expected: f64,
                abs_err: f64,
            }
            let rows: Vec<Row> = (-nmax..=nmax)
                .map(|n| {
                    let value = d.delta_mod(n);
                    let expected = if n == 0 { 1.0 } else { 0.0 };
                    Row { n, value, expected, abs_err: (value - expected).abs() }
                })
                .collect();
            emit(g, &["n", "value", "expected", "abs_err"], &rows, |r| {
                vec![r.n.to_string(), r.value.to_string(), r.expected.to_string(), r.abs_err.to_string()]
            })?;
            let worst = rows.iter().max_by(|a, b| a.abs_err.total_cmp(&b.abs_err));
            if let Some(w) = worst.filter(|w| w.abs_err >= tol) {
                return Err(Failure::Invariant(format!("max error {:e} at n = {}", w.abs_err, w.n)));
            }
            Ok(())
        }
        Command::FrakS { p, k, m, n } => {
            let chi = PrimeCharacter::new(p, k)?;
            let v = frak_s(&chi, m as i128, n as i128);
            #[derive(Serialize)]
            struct Row {
                chi_label: String,
                m: i64,
                n: i64,
                re: f64,
                im: f64,
                abs_over_sqrt_p: f64,
            }
            let row = Row { chi_label: chi.label(), m, n, re: v.re, im: v.im, abs_over_sqrt_p: v.norm() / (p as f64).sqrt() };
            emit(g, &["chi_label", "m", "n", "re", "im", "abs_over_sqrt_p"], &[row], |r| {
                vec![r.chi_label.clone(), r.m.to_string(), r.n.to_string(), r.re.to_string(), r.im.to_string(), r.abs_over_sqrt_p.to_string()]
            })
        }
        Command::DeligneScan { pmin, pmax } => {
            #[derive(Serialize)]
            struct Row {
                p: u64,
                ratio: f64,
            }
            let mut rows = Vec::new();
            let mut off = Vec::new();
            for p in charsum_core::modular::odd_primes_in(pmin, pmax) {
                let mut ok = true;
                for chi in enumerate_characters(p, true)? {
                    let pm1 = (p - 1) as f64;
                    ok &= (frak_s(&chi, 0, 0).re - pm1).abs() < 1e-9;
                    for x in 1..p as i128 {
                        ok &= (frak_s(&chi, x, 0) + 1.0).norm() < 1e-9;
                        ok &= (frak_s(&chi, 0, x) + 1.0).norm() < 1e-9;
                    }
                }
                if !ok {
                    off.push(p);
                }
                rows.push(Row { p, ratio: deligne_ratio(p)? });
            }
            emit(g, &["p", "ratio"], &rows, |r| vec![r.p.to_string(), r.ratio.to_string()])?;
            if !off.is_empty() {
                return Err(Failure::Invariant(format!("degenerate complete sums off their exact values for p in {off:?}")));
            }
            Ok(())
        }
        Command::Lvalue { triple, k1, k2, k3, all_chars, tol } => {
            let primes = [triple.m1, triple.m2, triple.m3];
            let chars = if all_chars {
                charsum_core::character::enumerate_primitive_composites(&primes)?
            } else {
                vec![CompositeCharacter::from_exponents(&[(primes[0], k1), (primes[1], k2), (primes[2], k3)])?]
            };
            let recs = l_value_family(&chars)?;
            emit(g, &["chi_label", "re", "im", "abs", "convexity_ratio", "xcheck_err"], &recs, |r| {
                vec![
                    r.label.clone(),
                    r.hurwitz.re.to_string(),
                    r.hurwitz.im.to_string(),
                    r.hurwitz.norm().to_string(),
                    r.convexity_ratio.to_string(),
                    r.discrepancy.to_string(),
                ]
            })?;
            if let Some(bad) = recs.iter().find(|r| r.discrepancy >= tol) {
                return Err(Failure::Invariant(format!("{}: methods differ by {:e}", bad.label, bad.discrepancy)));
            }
            Ok(())
        }
        Command::Sweep { config, m1_range, m2_range, m3_range, chars, n_per_triple, summary } => {
            let mut cfg = match &config {
                Some(path) => SweepConfig::from_json(&std::fs::read_to_string(path)?)?,
                None => {
                    let (Some(a), Some(b), Some(c)) = (m1_range, m2_range, m3_range) else {
                        return Err(Failure::Input("give --config or all of --m1-range, --m2-range, --m3-range".into()));
                    };
                    SweepConfig::new(a, b, c)
                }
            };
            if let Some(r) = m1_range {
                cfg.m1 = r;
            }
            if let Some(r) = m2_range {
                cfg.m2 = r;
            }
            if let Some(r) = m3_range {
                cfg.m3 = r;
            }
            if let Some(c) = chars {
                cfg.characters = c;
            }
            if let Some(n) = n_per_triple {
                cfg.n_per_triple = n;
            }
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            if let Some(w) = g.workers {
                cfg.workers = w;
            }
            let out = sweep(&cfg)?;
            let mut w = sink(g)?;
            match g.format {
                Format::Csv => write_csv_to(&mut w, &out.records)?,
                Format::Jsonl => write_jsonl_to(&mut w, &out.records)?,
            }
            let text = serde_json::to_string_pretty(&out.summary).map_err(|e| Failure::Input(e.to_string()))?;
            match summary {
                Some(p) => std::fs::write(p, text + "\n")?,
                None => eprintln!(
                    "{} triples, {} records, max ratio {}, {} failures",
                    out.summary.triples,
                    out.summary.records,
                    out.summary.max_ratio,
                    out.summary.failures.len()
                ),
            }
            for f in &out.summary.failures {
                eprintln!("record failed: {f}");
            }
            if out.summary.invariant_violations > 0 {
                return Err(Failure::Invariant(format!(
                    "{} records exceed the trivial bound",
                    out.summary.invariant_violations
                )));
            }
            Ok(())
        }
        Command::ThetaCheck { theta1, theta2, theta3, delta } => {
            let r = theta_region_check([theta1, theta2, theta3], delta)?;
            #[derive(Serialize)]
            struct Row {
                ok: bool,
                failed: Vec<&'static str>,
                delta_max: f64,
            }
            let row = Row { ok: r.ok, failed: r.failed.iter().map(|f| f.name()).collect(), delta_max: r.delta_max };
            emit(g, &["ok", "failed", "delta_max"], &[row], |r| {
                vec![r.ok.to_string(), r.failed.join(";"), r.delta_max.to_string()]
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
