//! Front end for the `hecke` binary: flag parsing, sweeps over norm bands,
//! CSV/JSON output and the verification report.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use gaussian_hecke::experiments::{
    estimate_c0, first_moment, moduli_in_band, nonvanishing_count, one_level_density,
    prime_power_table, second_moment, AdmissibleTestFunction, DensityRecord, DensityRoute, Family,
    LemmaRow, MomentRecord, TestFunctionKind,
};
use gaussian_hecke::hecke::{GaussCache, CACHE_DIR_ENV};
use gaussian_hecke::lvalues::{AfeBuckets, PairBuckets};
use gaussian_hecke::residue::{build_modulus, characters, psi_star};
use gaussian_hecke::verify::{run_suite, SuiteConfig};
use gaussian_hecke::zi::{primary_decompose, Factorization};
use gaussian_hecke::GaussInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// factor `--q` into primary primes
    Factor,
    /// list the characters mod `--q`
    Chars,
    /// central values for the family mod `--q`
    Lvalue,
    /// first moment over a norm band
    Moment1,
    /// second moment over a norm band
    Moment2,
    /// non-vanishing counts over a norm band
    Nonvanish,
    /// one-level density over a norm band
    Density,
    /// run the invariant suite
    Verify,
    /// estimate the constant in the harmonic sum over primary elements
    C0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestFn {
    Fejer,
    Cosine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Direct,
    Orthogonality,
}

#[derive(Debug, Parser)]
#[command(
    name = "hecke",
    version,
    about = "Moments and low-lying zeros of Hecke L-functions over Q(i)"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// modulus or element for factor, chars and lvalue, e.g. `3-6i`
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// AFE parameter for lvalue (default N(q))
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub qnorm_min: u64,
    #[arg(long, default_value_t = 1000)]
    pub qnorm_max: u64,
    /// keep only prime moduli
    #[arg(long)]
    pub primes_only: bool,
    /// let moment sweeps include composite moduli
    #[arg(long)]
    pub include_composite: bool,
    #[arg(long, default_value_t = 1.5)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value_t = TestFn::Fejer)]
    pub testfn: TestFn,
    #[arg(long, value_enum, default_value_t = Route::Orthogonality)]
    pub route: Route,
    /// non-vanishing threshold on |L(1/2)|
    #[arg(long, default_value_t = 1e-8)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Gauss-sum cache directory; HECKE_CACHE_DIR takes precedence
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// record wall-clock seconds instead of 0
    #[arg(long)]
    pub timings: bool,
}

/// Validated run parameters.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub q: Option<GaussInt>,
    pub x: Option<f64>,
    pub qnorm_min: u64,
    pub qnorm_max: u64,
    pub primes_only: bool,
    pub include_composite: bool,
    pub test_function: AdmissibleTestFunction,
    pub route: DensityRoute,
    pub threshold: f64,
    pub out_path: Option<PathBuf>,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub workers: usize,
    pub seed: u64,
    pub timings: bool,
}

/// Rejected flag combination; maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let q = match &cli.q {
            Some(text) => Some(text.parse::<GaussInt>().map_err(|e| usage(e.to_string()))?),
            None => None,
        };
        if matches!(
            cli.command,
            Command::Factor | Command::Chars | Command::Lvalue
        ) && q.is_none()
        {
            return Err(usage(format!("{:?} needs --q", cli.command).to_lowercase()));
        }
        if cli.qnorm_min > cli.qnorm_max {
            return Err(usage(format!(
                "--qnorm-min {} exceeds --qnorm-max {}",
                cli.qnorm_min, cli.qnorm_max
            )));
        }
        let kind = match cli.testfn {
            TestFn::Fejer => TestFunctionKind::Fejer,
            TestFn::Cosine => TestFunctionKind::Cosine,
        };
        let test_function =
            AdmissibleTestFunction::new(kind, cli.sigma).map_err(|e| usage(e.to_string()))?;
        let workers = match cli.workers {
            Some(0) => return Err(usage("--workers must be at least 1")),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        if cli.threshold.is_nan() || cli.threshold < 0.0 {
            return Err(usage("--threshold must be non-negative"));
        }
        let cache_dir = match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Some(PathBuf::from(d)),
            _ => cli.cache_dir,
        };
        Ok(RunConfig {
            command: cli.command,
            q,
            x: cli.x,
            qnorm_min: cli.qnorm_min,
            qnorm_max: cli.qnorm_max,
            primes_only: cli.primes_only,
            include_composite: cli.include_composite,
            test_function,
            route: match cli.route {
                Route::Direct => DensityRoute::Direct,
                Route::Orthogonality => DensityRoute::Orthogonality,
            },
            threshold: cli.threshold,
            out_path: cli.out,
            format: cli.format,
            cache_dir,
            workers,
            seed: cli.seed,
            timings: cli.timings,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// some verification check failed
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

#[derive(Serialize)]
struct FactorRecord {
    unit_re: i64,
    unit_im: i64,
    prime_re: i64,
    prime_im: i64,
    prime_norm: u64,
    exponent: u32,
}

#[derive(Serialize)]
struct CharRecord {
    index: usize,
    exponents: String,
    odd: bool,
    primitive: bool,
    gauss_re: Option<f64>,
    gauss_im: Option<f64>,
}

#[derive(Serialize)]
struct LvalueRecord {
    index: usize,
    exponents: String,
    l_re: f64,
    l_im: f64,
    l_abs: f64,
    a_chi: f64,
    x: f64,
    truncation_norm: u64,
    est_tail: f64,
}

#[derive(Serialize)]
struct NonvanishRecord {
    qnorm: u64,
    q_re: i64,
    q_im: i64,
    psi_star: u64,
    count: u64,
    threshold: f64,
    normalized: f64,
}

#[derive(Serialize)]
struct C0Record {
    x: f64,
    sample: f64,
    estimate: f64,
    spread: f64,
}

fn join(exps: &[u32]) -> String {
    exps.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn write_records<T: Serialize>(records: &[T], format: Format, out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot write {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, records)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    cache: Option<GaussCache>,
}

impl Runner<'_> {
    fn wall(&self, t: f64) -> f64 {
        if self.cfg.timings {
            t
        } else {
            0.0
        }
    }

    fn q(&self) -> GaussInt {
        self.cfg.q.expect("checked in from_cli")
    }

    fn band(&self, moment_sweep: bool) -> Result<Vec<GaussInt>> {
        let primes = self.cfg.primes_only || (moment_sweep && !self.cfg.include_composite);
        let qs = moduli_in_band(self.cfg.qnorm_min.max(3), self.cfg.qnorm_max, primes)?;
        let mut keep = Vec::with_capacity(qs.len());
        for q in qs {
            if psi_star(q)? == 0 {
                eprintln!("skipping {q}: no primitive odd characters");
                continue;
            }
            keep.push(q);
        }
        for &q in &keep {
            let f = Factorization::of(q)?;
            if f.factors.len() != 1 || f.factors[0].1 != 1 {
                eprintln!("note: {q} is composite");
            }
        }
        Ok(keep)
    }

    fn factor(&self) -> Result<()> {
        let z = self.q();
        let f = Factorization::of(z)?;
        let rows: Vec<FactorRecord> = f
            .factors
            .iter()
            .map(|&(p, e)| FactorRecord {
                unit_re: f.unit.re,
                unit_im: f.unit.im,
                prime_re: p.re,
                prime_im: p.im,
                prime_norm: p.norm().unwrap_or(0),
                exponent: e,
            })
            .collect();
        write_records(&rows, self.cfg.format, self.cfg.out_path.as_deref())
    }

    fn chars(&self) -> Result<()> {
        let q = self.q();
        let (_, primary) = primary_decompose(q)?;
        if primary != q {
            return Err(usage(format!(
                "{q} is not primary; its primary associate is {primary}"
            )));
        }
        let m = build_modulus(q)?;
        let family = Family::new(q, self.cache.as_ref())?;
        let mut lifted = family.characters().iter().peekable();
        let mut rows = Vec::new();
        for c in characters(&m, false, false) {
            let g = match lifted.peek() {
                Some(h) if h.base().index() == c.index() => lifted.next().map(|h| h.gauss_sum()),
                _ => None,
            };
            rows.push(CharRecord {
                index: c.index(),
                exponents: join(c.exponents()),
                odd: c.is_odd(),
                primitive: c.is_primitive(),
                gauss_re: g.map(|z| z.re),
                gauss_im: g.map(|z| z.im),
            });
        }
        write_records(&rows, self.cfg.format, self.cfg.out_path.as_deref())
    }

    fn lvalue(&self) -> Result<()> {
        let family = Family::new(self.q(), self.cache.as_ref())?;
        let m = family.modulus();
        let x = self.cfg.x.unwrap_or(m.norm() as f64);
        let afe = AfeBuckets::new(m, x)?;
        let pairs = PairBuckets::new(m)?;
        let rows: Vec<LvalueRecord> = family
            .characters()
            .par_iter()
            .map(|c| {
                let cv = afe.central_value(c);
                LvalueRecord {
                    index: c.base().index(),
                    exponents: join(c.base().exponents()),
                    l_re: cv.value.re,
                    l_im: cv.value.im,
                    l_abs: cv.value.norm(),
                    a_chi: pairs.a_chi(c),
                    x,
                    truncation_norm: cv.truncation_norm.max(pairs.truncation_norm()),
                    est_tail: cv.est_tail + pairs.est_tail(),
                }
            })
            .collect();
        write_records(&rows, self.cfg.format, self.cfg.out_path.as_deref())
    }

    fn moments(&self, second: bool) -> Result<()> {
        let rows: Vec<MomentRecord> = self
            .band(true)?
            .par_iter()
            .map(|&q| -> Result<MomentRecord> {
                let family = Family::new(q, self.cache.as_ref())?;
                let mut row = if second {
                    second_moment(&family)?
                } else {
                    first_moment(&family)?
                };
                row.wall_time = self.wall(row.wall_time);
                Ok(MomentRecord::from(&row))
            })
            .collect::<Result<_>>()?;
        write_records(&rows, self.cfg.format, self.cfg.out_path.as_deref())
    }

    fn nonvanish(&self) -> Result<()> {
        let rows: Vec<NonvanishRecord> = self
            .band(true)?
            .par_iter()
            .map(|&q| -> Result<NonvanishRecord> {
                let family = Family::new(q, self.cache.as_ref())?;
                let count = nonvanishing_count(&family, self.cfg.threshold)?;
                let n = family.modulus().norm();
                Ok(NonvanishRecord {
                    qnorm: n,
                    q_re: q.re,
                    q_im: q.im,
                    psi_star: family.psi_star(),
                    count,
                    threshold: self.cfg.threshold,
                    normalized: count as f64 * (n as f64).ln() / family.psi_star() as f64,
                })
            })
            .collect::<Result<_>>()?;
        write_records(&rows, self.cfg.format, self.cfg.out_path.as_deref())
    }

    fn density(&self) -> Result<()> {
        let f = &self.cfg.test_function;
        let qs = self.band(false)?;
        let top = (self.cfg.qnorm_max as f64).powf(f.sigma()).floor() as u64;
        let table = prime_power_table(top);
        let rows: Vec<DensityRecord> = qs
            .par_iter()
            .map(|&q| -> Result<DensityRecord> {
                let r = one_level_density(q, f, &table, self.cfg.route, self.cache.as_ref())?;
                Ok(DensityRecord {
                    qnorm: q.norm()?,
                    q_re: q.re,
                    q_im: q.im,
                    sigma: r.sigma,
                    testfn: r.testfn.name().to_string(),
                    psi_star: r.psi_star,
                    s_tilde: r.s_tilde,
                    density: r.density,
                    wall_s: self.wall(r.wall_time),
                })
            })
            .collect::<Result<_>>()?;
        write_records(&rows, self.cfg.format, self.cfg.out_path.as_deref())
    }

    fn verify(&self) -> Result<Status> {
        let rows: Vec<LemmaRow> = run_suite(&SuiteConfig::new(self.cfg.seed))?;
        let mut table = io::stderr().lock();
        for r in &rows {
            writeln!(
                table,
                "{:<4} {:<26} {:<28} observed {:<12.4e} bound {:.1e}",
                if r.pass { "PASS" } else { "FAIL" },
                r.check_name,
                r.param,
                r.observed,
                r.bound
            )?;
        }
        let failed = rows.iter().filter(|r| !r.pass).count();
        writeln!(table, "{} checks, {} failed", rows.len(), failed)?;
        write_records(&rows, self.cfg.format, self.cfg.out_path.as_deref())?;
        Ok(if failed == 0 {
            Status::Pass
        } else {
            Status::Fail
        })
    }

    fn c0(&self) -> Result<()> {
        let est = estimate_c0()?;
        let rows: Vec<C0Record> = est
            .grid
            .iter()
            .zip(&est.samples)
            .map(|(&x, &sample)| C0Record {
                x,
                sample,
                estimate: est.value,
                spread: est.spread,
            })
            .collect();
        write_records(&rows, self.cfg.format, self.cfg.out_path.as_deref())
    }
}

/// Execute one command. Output goes to `out_path`, or stdout when unset.
pub fn run(cfg: &RunConfig) -> Result<Status> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()?;
    let runner = Runner {
        cfg,
        cache: cfg.cache_dir.as_ref().map(GaussCache::new),
    };
    pool.install(|| {
        match cfg.command {
            Command::Factor => runner.factor()?,
            Command::Chars => runner.chars()?,
            Command::Lvalue => runner.lvalue()?,
            Command::Moment1 => runner.moments(false)?,
            Command::Moment2 => runner.moments(true)?,
            Command::Nonvanish => runner.nonvanish()?,
            Command::Density => runner.density()?,
            Command::Verify => return runner.verify(),
            Command::C0 => runner.c0()?,
        }
        Ok(Status::Pass)
    })
}

/// Parse `args`, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                2
            } else {
                1
            }
        }
    }
}
