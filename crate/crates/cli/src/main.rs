//! `meanper`: config-driven runner for the expansion pipeline.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meanper_core::config::{ConfigError, ExperimentConfig};
use meanper_core::expansion::{
    coeff_norm_general, coeff_norm_interpolating, convergence_report, extract_general, extract_interpolating,
    residual_mean_periodic, summability_diagnostic, synthesize_general, synthesized_stream, ConvergenceReport,
    SummabilityReport,
};
use meanper_core::functionals::verify_monomial_identity;
use meanper_core::variety::{analytic_test, geometric_test, origin_radii, CountingProfile, CriterionReport};
use meanper_core::zeros::find_zeros;
use meanper_core::{
    AnalyticFunctional, EntireFunctionSpec, Error, ExpansionCoefficients, MultiplicityVariety, TaylorStream, Verdict,
    YoungSpec, C64,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "meanper",
    version,
    about = "Exponential-polynomial expansions of mean-periodic functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the zero variety and test whether it is interpolating.
    Analyze(Common),
    /// Extract expansion coefficients of `f`.
    Decompose(Common),
    /// Re-synthesise `f` on the grid and report per-packet convergence.
    Reconstruct(Common),
    /// Check the monomial identity and mean-periodicity residuals.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides `radius`.
    #[arg(long)]
    radius: Option<f64>,
    /// Overrides `K`, the largest packet index kept.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Overrides the residual and reconstruction tolerances.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Structural(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Structural(_) => 2,
            Self::Numerical(_) => 3,
            Self::Config(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Structural(m) | Self::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoZeros { .. } | Error::EmptyVariety => Self::Structural(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

struct Run {
    cfg: ExperimentConfig,
    phi: EntireFunctionSpec,
    theta: YoungSpec,
    out: PathBuf,
}

impl Run {
    fn load(args: &Common) -> Outcome<Self> {
        let text = fs::read_to_string(&args.config)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", args.config.display())))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text).map_err(ConfigError::from)?;
        if let Some(r) = args.radius {
            cfg.radius = r;
        }
        if let Some(k) = args.k {
            cfg.k = Some(k);
        }
        if let Some(t) = args.tol {
            if !(t > 0.0) {
                return Err(Failure::Config(format!("--tol must be positive, got {t}")));
            }
            cfg.tolerances.residual = t;
            cfg.tolerances.reconstruction = t;
        }
        cfg.validate()?;
        fs::create_dir_all(&args.out)
            .map_err(|e| Failure::Config(format!("cannot create {}: {e}", args.out.display())))?;
        Ok(Self {
            phi: cfg.phi_spec()?,
            theta: cfg.theta_spec()?,
            cfg,
            out: args.out.clone(),
        })
    }

    fn write(&self, key: &str, default: &str, contents: &str) -> Outcome<()> {
        let path = self.out.join(self.cfg.output_name(key, default));
        fs::write(&path, contents).map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", path.display())))
    }

    fn write_json<T: Serialize>(&self, key: &str, default: &str, value: &T) -> Outcome<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
        text.push('\n');
        self.write(key, default, &text)
    }

    fn variety(&self) -> Outcome<MultiplicityVariety> {
        let v = find_zeros(&self.phi, self.cfg.radius, self.cfg.tolerances.zero)?;
        self.write("zeros", "zeros.csv", &v.to_csv())?;
        Ok(v)
    }

    fn k_max(&self, v: &MultiplicityVariety) -> Outcome<usize> {
        match self.cfg.k {
            None => Ok(v.len() - 1),
            Some(k) if k < v.len() => Ok(k),
            Some(k) => Err(Failure::Config(format!(
                "K = {k} but only {} zeros lie within radius {}",
                v.len(),
                self.cfg.radius
            ))),
        }
    }

    fn f(&self) -> Outcome<TaylorStream> {
        match self.cfg.f_spec()? {
            Some(spec) => Ok(TaylorStream::catalog(spec)),
            None => Err(Failure::Config("f: required by this command".into())),
        }
    }

    fn f_value(&self, z: C64) -> Outcome<C64> {
        Ok(self.cfg.f_spec()?.map_or(C64::new(f64::NAN, f64::NAN), |s| s.value(z)))
    }
}

#[derive(Serialize)]
struct VerdictFile {
    radius: f64,
    zeros: usize,
    total_multiplicity: usize,
    verdict: Verdict,
    criteria: Vec<CriterionReport>,
}

fn classify(run: &Run, v: &MultiplicityVariety) -> Outcome<VerdictFile> {
    let geometric = geometric_test(v, &run.theta, &run.cfg.m_grid)?;
    let analytic = analytic_test(&run.phi, v, &run.theta, &run.cfg.m_grid)?;
    let verdict = if geometric.verdict == Verdict::Pass && analytic.verdict == Verdict::Pass {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(VerdictFile {
        radius: run.cfg.radius,
        zeros: v.len(),
        total_multiplicity: v.multiplicities().iter().sum(),
        verdict,
        criteria: vec![geometric.n0.report(), geometric.nzz.report(), analytic.report()],
    })
}

fn analyze(run: &Run) -> Outcome<String> {
    let v = run.variety()?;
    let profile = CountingProfile::new(&v, C64::new(0.0, 0.0), &origin_radii(&v));
    run.write("counting", "counting.csv", &profile.to_csv())?;
    let report = classify(run, &v)?;
    run.write_json("verdict", "verdict.json", &report)?;
    Ok(format!("{} zeros, verdict {:?}", v.len(), report.verdict))
}

fn norms_csv(run: &Run, c: &ExpansionCoefficients, d: Option<&ExpansionCoefficients>) -> Outcome<String> {
    let mut out = String::from("p,flavor,norm\n");
    for &p in &run.cfg.norm_p {
        let _ = writeln!(out, "{p},general,{}", coeff_norm_general(c, &run.theta, p)?);
        if let Some(d) = d {
            let _ = writeln!(out, "{p},interpolating,{}", coeff_norm_interpolating(d, &run.theta, p)?);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct SummabilityFile {
    p: f64,
    general: SummabilityReport,
    interpolating: Option<SummabilityReport>,
}

fn doubling_counts(len: usize) -> Vec<usize> {
    let mut counts = vec![len];
    while counts[0] > 1 {
        counts.insert(0, counts[0].div_ceil(2));
    }
    counts
}

fn decompose(run: &Run) -> Outcome<String> {
    let v = run.variety()?;
    let k_max = run.k_max(&v)?;
    let f = run.f()?;
    let verdict = classify(run, &v)?.verdict;
    let p0 = run.cfg.norm_p.first().copied().unwrap_or(1.0);

    let c = extract_general(&v, &f, k_max)?;
    run.write(
        "coefficients_general",
        "coefficients_general.csv",
        &c.to_csv(&run.theta, p0)?,
    )?;
    let d = if verdict == Verdict::Pass {
        let d = extract_interpolating(&run.phi, &v, &f, k_max)?;
        run.write(
            "coefficients_interpolating",
            "coefficients_interpolating.csv",
            &d.to_csv(&run.theta, p0)?,
        )?;
        Some(d)
    } else {
        None
    };
    run.write("norms", "norms.csv", &norms_csv(run, &c, d.as_ref())?)?;

    let counts = doubling_counts(c.len());
    let tol = run.cfg.tolerances.residual;
    let summability = run
        .cfg
        .norm_p
        .iter()
        .map(|&p| {
            Ok(SummabilityFile {
                p,
                general: summability_diagnostic(&c, &run.theta, p, &counts, tol)?,
                interpolating: d
                    .as_ref()
                    .map(|d| summability_diagnostic(d, &run.theta, p, &counts, tol))
                    .transpose()?,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    run.write_json("summability", "summability.json", &summability)?;

    Ok(format!(
        "{} packets, interpolating coefficients {}",
        k_max + 1,
        if d.is_some() {
            "written"
        } else {
            "skipped (verdict Inconclusive)"
        }
    ))
}

#[derive(Serialize)]
struct ConvergenceFile {
    packets: usize,
    max_error: f64,
    tolerance: f64,
    within_tolerance: bool,
    points: Vec<ConvergenceReport>,
}

fn reconstruct(run: &Run) -> Outcome<String> {
    let v = run.variety()?;
    let k_max = run.k_max(&v)?;
    let f = run.f()?;
    let c = extract_general(&v, &f, k_max)?;
    let mut csv = String::from("z_re,z_im,f_re,f_im,fhat_re,fhat_im,abs_error\n");
    let mut points = Vec::new();
    let mut max_error: f64 = 0.0;
    for z in run.cfg.grid.points() {
        let exact = run.f_value(z)?;
        let (approx, partials) = synthesize_general(&c, z)?;
        let err = (exact - approx).norm();
        max_error = max_error.max(err);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            z.re, z.im, exact.re, exact.im, approx.re, approx.im, err
        );
        points.push(convergence_report(z, &partials));
    }
    run.write("reconstruction", "reconstruction.csv", &csv)?;
    let tolerance = run.cfg.tolerances.reconstruction;
    run.write_json(
        "convergence",
        "convergence.json",
        &ConvergenceFile {
            packets: c.len(),
            max_error,
            tolerance,
            within_tolerance: max_error <= tolerance,
            points,
        },
    )?;
    Ok(format!("{} packets, max |f - fhat| = {max_error:e}", c.len()))
}

#[derive(Serialize)]
struct VerifyFile {
    monomial_identity_max: f64,
    residual_f: f64,
    residual_synthesized: f64,
    tolerance: f64,
    pass: bool,
}

fn verify(run: &Run) -> Outcome<String> {
    let v = run.variety()?;
    let k_max = run.k_max(&v)?;
    let f = run.f()?;
    let t = AnalyticFunctional::from_spec(run.phi.clone())?;
    let mut monomial: f64 = 0.0;
    for p in &v.points()[..=k_max] {
        for l in 0..p.mult {
            monomial = monomial.max(verify_monomial_identity(&t, &run.phi, p.alpha, l)?);
        }
    }
    let grid = run.cfg.grid.points();
    let residual_f = residual_mean_periodic(&t, &f, &grid)?;
    let c = extract_general(&v, &f, k_max)?;
    let residual_synthesized = residual_mean_periodic(&t, &synthesized_stream(&c)?, &grid)?;
    let tolerance = run.cfg.tolerances.residual;
    let worst = monomial.max(residual_f).max(residual_synthesized);
    let pass = worst <= tolerance;
    run.write_json(
        "verify",
        "verify.json",
        &VerifyFile {
            monomial_identity_max: monomial,
            residual_f,
            residual_synthesized,
            tolerance,
            pass,
        },
    )?;
    if pass {
        Ok(format!("largest residual {worst:e}"))
    } else {
        Err(Failure::Numerical(format!(
            "residual {worst:e} exceeds tolerance {tolerance:e}"
        )))
    }
}

fn configure_threads() {
    let Some(n) = std::env::var("MEANPER_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
    else {
        return;
    };
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn dispatch(command: &Command) -> Outcome<String> {
    let (args, body): (&Common, fn(&Run) -> Outcome<String>) = match command {
        Command::Analyze(a) => (a, analyze),
        Command::Decompose(a) => (a, decompose),
        Command::Reconstruct(a) => (a, reconstruct),
        Command::Verify(a) => (a, verify),
    };
    let run = Run::load(args)?;
    body(&run)
}

fn out_dir(command: &Command) -> &Path {
    match command {
        Command::Analyze(a) | Command::Decompose(a) | Command::Reconstruct(a) | Command::Verify(a) => &a.out,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match dispatch(&cli.command) {
        Ok(summary) => {
            println!("{summary}; outputs in {}", out_dir(&cli.command).display());
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("meanper: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
