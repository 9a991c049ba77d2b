//! `gevreykit` command-line front end.
//!
//! Exit codes: 0 success (and, for `verify`, every row passing), 1 a
//! verification failure, 2 bad input or a domain error, 3 an integration ray
//! obstructed by a pole of the continued Borel transform.

mod parse;
mod verdict;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gevreykit::borel::{borel_sum, BorelSumConfig};
use gevreykit::engine::{
    counterexample, verify_gevrey, verify_gevrey_with, EstimateReport, GevreyExpansion,
    DEFAULT_TOLERANCE,
};
use gevreykit::quad::{QuadratureConfig, Scheme};
use gevreykit::sector::{ADeltaProfile, MDeltaProfile, Sector};
use gevreykit::series::{bernoulli_numbers, binet_taylor_coeffs, stirling_coeffs, CoefficientSequence, SequenceKind};
use gevreykit::stirling::{binet_remainder, stirling_table, stirling_table_csv, BinetConfig};
use gevreykit::{Complex64, Error};

#[derive(Parser)]
#[command(name = "gevreykit", version, about = "Gevrey expansions: coefficients, Borel sums, estimate checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format (defaults depend on the command).
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative tolerance for verification.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Quadrature node budget.
    #[arg(long, global = true)]
    quad_nodes: Option<usize>,
    /// Quadrature scheme.
    #[arg(long, global = true, value_parser = ["tanh-sinh", "gauss-laguerre"])]
    quad_scheme: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coefficients with indices 0..=n.
    Coeffs {
        /// bernoulli, binet or stirling.
        kind: String,
        #[arg(long)]
        n: usize,
    },
    /// Borel-Pade-Laplace sum of a coefficient file at z.
    BorelSum {
        file: PathBuf,
        /// Evaluation point as re,im.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Approximant orders m,n.
        #[arg(long)]
        orders: Option<String>,
        /// Integration ray angle in radians.
        #[arg(long, allow_hyphen_values = true)]
        ray: Option<f64>,
    },
    /// Compare actual remainders with the estimate family of an expansion file.
    Verify {
        expansion: PathBuf,
        /// binet, counterexample:DELTA or file:PATH.
        #[arg(long)]
        sampler: String,
        /// Polar grid r1:r2:count@angle; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        grid: Vec<String>,
        /// Largest truncation order.
        #[arg(long)]
        n: usize,
        /// Sector alpha,beta (radians); defaults depend on the sampler.
        #[arg(long, allow_hyphen_values = true)]
        sector: Option<String>,
    },
    /// Classify a sector and an M(delta) profile under the uniqueness criteria.
    Uniqueness {
        m_profile: PathBuf,
        /// Optional a(delta) profile.
        #[arg(long)]
        a_profile: Option<PathBuf>,
        /// Sector alpha,beta (radians).
        #[arg(long, allow_hyphen_values = true, default_value = "-1.5707963267948966,1.5707963267948966")]
        sector: String,
        /// Gevrey order.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
    /// Optimal truncation, closed-form bound and actual error per |z|.
    StirlingTable {
        /// Comma-separated moduli.
        #[arg(long, default_value = "2,5,10,20")]
        radii: String,
    },
}

enum Failure {
    Input(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Input("requested format is not available for this command".into()))
    }
}

fn quad(cli: &Cli) -> Result<QuadratureConfig, Failure> {
    let mut q = QuadratureConfig::default();
    if let Some(n) = cli.quad_nodes {
        if n < 2 {
            return Err(Failure::Input("--quad-nodes must be at least 2".into()));
        }
        q.nodes = n;
    }
    if let Some(s) = &cli.quad_scheme {
        q.scheme = s.parse::<Scheme>()?;
    }
    Ok(q)
}

fn tolerance(cli: &Cli) -> Result<f64, Failure> {
    let t = cli.tol.unwrap_or(DEFAULT_TOLERANCE);
    if t > 0.0 {
        Ok(t)
    } else {
        Err(Failure::Input(format!("--tol must be positive, got {t}")))
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn cmd_coeffs(cli: &Cli, kind: &str, n: usize) -> Outcome {
    let kind: SequenceKind = kind.parse()?;
    let seq = match kind {
        SequenceKind::Bernoulli => {
            let b = bernoulli_numbers(n.div_ceil(2));
            CoefficientSequence::new(kind, b.values()[..=n].to_vec())?
        }
        SequenceKind::BinetTaylor => binet_taylor_coeffs(n),
        SequenceKind::Stirling => stirling_coeffs(n),
        SequenceKind::User => {
            return Err(Failure::Input("kind must be bernoulli, binet or stirling".into()))
        }
    };
    let text = match format_or(cli, Format::Json, &[Format::Json, Format::Csv])? {
        Format::Json => {
            let mut s = seq.to_json()?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("index,numerator,denominator\n");
            for (i, v) in seq.values().iter().enumerate() {
                let _ = writeln!(s, "{i},{},{}", v.numer(), v.denom());
            }
            s
        }
    };
    emit(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_borel_sum(cli: &Cli, file: &Path, z: &str, orders: Option<&str>, ray: Option<f64>) -> Outcome {
    let p = CoefficientSequence::from_json(&read(file)?)?;
    let z = parse::complex(z)?;
    let cfg = BorelSumConfig {
        orders: orders.map(parse::orders).transpose()?,
        ray_angle: ray,
        quad: quad(cli)?,
    };
    format_or(cli, Format::Json, &[Format::Json])?;
    let s = borel_sum(&p, z, &cfg)?;
    emit(cli, &json(&s)?)?;
    Ok(ExitCode::SUCCESS)
}

/// `re_z,im_z,re_p,im_p` rows.
fn read_samples(path: &Path) -> Result<Vec<(Complex64, Complex64)>, Failure> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("re_z") || line.starts_with('#') {
            continue;
        }
        let v = parse::reals(line).map_err(|e| format!("{}:{}: {e}", path.display(), i + 1))?;
        if v.len() != 4 {
            return Err(Failure::Input(format!("{}:{}: expected re_z,im_z,re_p,im_p", path.display(), i + 1)));
        }
        out.push((Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])));
    }
    if out.is_empty() {
        return Err(Failure::Input(format!("{} holds no samples", path.display())));
    }
    Ok(out)
}

fn cmd_verify(
    cli: &Cli,
    expansion: &Path,
    sampler: &str,
    grid_specs: &[String],
    n: usize,
    sector: Option<&str>,
) -> Outcome {
    let e = GevreyExpansion::from_json(&read(expansion)?)?;
    let tol = tolerance(cli)?;
    let mut grid = Vec::new();
    for g in grid_specs {
        grid.extend(parse::grid(g)?);
    }
    let explicit = sector.map(parse::pair).transpose()?;
    let sector_or = |alpha: f64, beta: f64| -> Result<Sector, Failure> {
        let (a, b) = explicit.unwrap_or((alpha, beta));
        Ok(Sector::new(a, b)?)
    };
    let report: EstimateReport = if sampler == "binet" {
        if grid.is_empty() {
            return Err(Failure::Input("--grid is required for the binet sampler".into()));
        }
        let cfg = BinetConfig {
            quad: quad(cli)?,
            phi: None,
        };
        let s = sector_or(-FRAC_PI_4, FRAC_PI_4)?;
        verify_gevrey_with(
            |z, n| binet_remainder(z, n, &cfg).map(|q| q.value.norm()).unwrap_or(f64::NAN),
            &e,
            &s,
            &grid,
            n,
            tol,
        )?
    } else if let Some(d) = sampler.strip_prefix("counterexample:") {
        let delta: f64 = d.parse().map_err(|_| format!("bad delta {d:?}"))?;
        if grid.is_empty() {
            return Err(Failure::Input("--grid is required for the counterexample sampler".into()));
        }
        let ce = counterexample(|_| Complex64::new(1.0, 0.0), 1.0, delta, 1)?;
        let s = sector_or(-FRAC_PI_2 + delta, FRAC_PI_2 - delta)?;
        verify_gevrey(|z| ce.sample(z), &e, &s, &grid, n, tol)?
    } else if let Some(path) = sampler.strip_prefix("file:") {
        if !grid.is_empty() {
            return Err(Failure::Input("the file sampler takes its grid from the file; drop --grid".into()));
        }
        let samples = read_samples(Path::new(path))?;
        let points: Vec<Complex64> = samples.iter().map(|s| s.0).collect();
        let s = sector_or(-FRAC_PI_2, FRAC_PI_2)?;
        let lookup = |z: Complex64| {
            samples
                .iter()
                .find(|s| s.0 == z)
                .map(|s| s.1)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        };
        verify_gevrey(lookup, &e, &s, &points, n, tol)?
    } else {
        return Err(Failure::Input(format!(
            "unknown sampler {sampler:?}; use binet, counterexample:DELTA or file:PATH"
        )));
    };
    let text = match format_or(cli, Format::Csv, &[Format::Json, Format::Csv])? {
        Format::Csv => report.to_csv(),
        Format::Json => json(&report)?,
    };
    emit(cli, &text)?;
    let failures = report.failures().count();
    eprintln!(
        "{}: {} rows, {} failures, {} skipped, max ratio {:.6e}",
        if report.pass { "pass" } else { "FAIL" },
        report.rows.len(),
        failures,
        report.skipped.len(),
        report.max_ratio()
    );
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_uniqueness(cli: &Cli, m_profile: &Path, a_profile: Option<&Path>, sector: &str, k: f64) -> Outcome {
    let m: MDeltaProfile = serde_json::from_str(&read(m_profile)?).map_err(Error::from)?;
    m.validate()?;
    let a: Option<ADeltaProfile> = match a_profile {
        Some(p) => Some(serde_json::from_str(&read(p)?).map_err(Error::from)?),
        None => None,
    };
    let (alpha, beta) = parse::pair(sector)?;
    let s = Sector::new(alpha, beta)?;
    format_or(cli, Format::Json, &[Format::Json])?;
    let v = verdict::classify(&s, k, &m, a.as_ref())?;
    emit(cli, &json(&v)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_stirling_table(cli: &Cli, radii: &str) -> Outcome {
    let radii = parse::reals(radii)?;
    let cfg = BinetConfig {
        quad: quad(cli)?,
        phi: None,
    };
    let rows = stirling_table(&radii, &cfg)?;
    let text = match format_or(cli, Format::Csv, &[Format::Json, Format::Csv])? {
        Format::Csv => stirling_table_csv(&rows),
        Format::Json => json(&rows)?,
    };
    emit(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("GEVREYKIT_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| format!("GEVREYKIT_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("cannot size thread pool: {e}"))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    configure_threads()?;
    match &cli.command {
        Command::Coeffs { kind, n } => cmd_coeffs(cli, kind, *n),
        Command::BorelSum { file, z, orders, ray } => cmd_borel_sum(cli, file, z, orders.as_deref(), *ray),
        Command::Verify { expansion, sampler, grid, n, sector } => {
            cmd_verify(cli, expansion, sampler, grid, *n, sector.as_deref())
        }
        Command::Uniqueness { m_profile, a_profile, sector, k } => {
            cmd_uniqueness(cli, m_profile, a_profile.as_deref(), sector, *k)
        }
        Command::StirlingTable { radii } => cmd_stirling_table(cli, radii),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::RayObstructed { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
