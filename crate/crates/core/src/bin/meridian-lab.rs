use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use meridian_lab::classify::{classify_surface, Category, ClassificationVerdict};
use meridian_lab::config::{load_tolerances, SurfaceConfig};
use meridian_lab::error::Error;
use meridian_lab::ode::{fmt17, OdeCase, OdeRequest};
use meridian_lab::oracle::{compare_laplacians, DEFAULT_FD_STEP};
use meridian_lab::verify::{run_criterion, Suite, SuiteReport};

/// Bound reported next to the closed-vs-difference Laplacian defect.
const LAPLACIAN_TOL: f64 = 1e-4;

#[derive(Parser)]
#[command(name = "meridian-lab", version, about = "Meridian surfaces in Minkowski 4-space: Gauss map classification and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (default 1).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Tolerance ladder JSON; MERIDIAN_LAB_TOL takes precedence.
    #[arg(long, global = true)]
    tol_file: Option<PathBuf>,

    /// Add wall-clock timings to reports.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the surface described by a config.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run an acceptance suite: all, harmonic, first, second or oracle.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Integrate one of the classifying ODEs and write the samples as CSV.
    SolveOde {
        /// first_elliptic, first_hyperbolic, second_elliptic or second_hyperbolic.
        case: String,
        /// Parameter override `name=value` (f0, phi0, p0, df0, d2f0, c, step, u0, u1).
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        /// Read parameters from a JSON object; `--set` applies on top.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write the immersion on the config grid as CSV.
    Sample {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Serialize)]
struct LaplacianSummary {
    h: f64,
    max_defect: f64,
    tolerance: f64,
    points: usize,
}

#[derive(Serialize)]
struct Timing {
    build_s: f64,
    classify_s: f64,
    laplacian_s: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a SurfaceConfig,
    verdict: ClassificationVerdict,
    laplacian: LaplacianSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

enum Failure {
    Error(Error),
    Exit(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn classify(cli: &Cli, config: &Path) -> Result<u8, Failure> {
    let tol = load_tolerances(cli.tol_file.as_deref())?;
    let cfg = SurfaceConfig::from_path(config)?;
    let t0 = Instant::now();
    let surface = cfg.build()?;
    let grid = cfg.sample_grid(&surface)?;
    let t1 = Instant::now();
    let verdict = classify_surface(&surface, &grid, &tol)?;
    let t2 = Instant::now();
    let cmp = compare_laplacians(&surface, &grid, DEFAULT_FD_STEP)?;
    let t3 = Instant::now();
    let code = if verdict.category == Category::None { 2 } else { 0 };
    let report = Report {
        config: &cfg,
        verdict,
        laplacian: LaplacianSummary { h: cmp.h, max_defect: cmp.max_defect, tolerance: LAPLACIAN_TOL, points: cmp.reports.len() },
        timing: cli.timing.then(|| Timing {
            build_s: (t1 - t0).as_secs_f64(),
            classify_s: (t2 - t1).as_secs_f64(),
            laplacian_s: (t3 - t2).as_secs_f64(),
        }),
    };
    write_output(cli.out.as_deref(), &to_json(&report))?;
    Ok(code)
}

fn verify(cli: &Cli, suite_name: &str) -> Result<u8, Failure> {
    let Some(suite) = Suite::parse(suite_name) else {
        return Err(Error::config("suite", format!("unknown suite {suite_name:?} (expected all, harmonic, first, second, oracle)")).into());
    };
    let mut criteria = Vec::new();
    let mut table = String::new();
    for &id in suite.criteria() {
        let t = Instant::now();
        let outcome = run_criterion(id);
        let mut line = outcome.summary_line();
        if cli.timing {
            let _ = write!(line, " [{:.2} s]", t.elapsed().as_secs_f64());
        }
        eprintln!("{line}");
        let _ = writeln!(table, "{line}");
        for c in &outcome.checks {
            let _ = writeln!(table, "    {} {} = {:e} ({})", if c.passed { "ok  " } else { "FAIL" }, c.label, c.value, c.bound);
        }
        criteria.push(outcome);
    }
    let report = SuiteReport { suite, passed: criteria.iter().all(|c| c.passed), criteria };
    match &cli.out {
        Some(path) => {
            write_output(Some(path), &to_json(&report))?;
            write_output(None, &table)?;
        }
        None => write_output(None, &format!("{table}{}", to_json(&report)))?,
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn solve_ode(cli: &Cli, case_name: &str, sets: &[String], config: Option<&Path>) -> Result<u8, Failure> {
    let Some(case) = OdeCase::parse(case_name) else {
        return Err(Error::config("case", format!("unknown case {case_name:?}")).into());
    };
    let mut req = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            meridian_lab::config::parse_json::<OdeRequest>(&text)?
        }
        None => OdeRequest::default(),
    };
    for s in sets {
        let Some((name, value)) = s.split_once('=') else {
            return Err(Error::config("--set", format!("expected name=value, got {s:?}")).into());
        };
        req.set(name.trim(), value)?;
    }
    let t = Instant::now();
    let sol = match req.solve(case) {
        Ok(sol) => sol,
        Err(Error::Ode(e)) => {
            eprintln!("error: {e}");
            if let Some(u) = e.u_stop() {
                eprintln!("u_stop = {}", fmt17(u));
            }
            return Err(Failure::Exit(3));
        }
        Err(e) => return Err(e.into()),
    };
    write_output(cli.out.as_deref(), &sol.to_csv())?;
    let mut summary = format!("case = {}, samples = {}, residual_max = {:e}", case.as_str(), sol.u.len(), sol.residual_max);
    if let Some(r) = sol.first_integral_residual {
        let _ = write!(summary, ", first_integral_residual = {r:e}");
    }
    eprintln!("{summary}");
    if cli.timing {
        eprintln!("solve_s = {:.3}", t.elapsed().as_secs_f64());
    }
    Ok(0)
}

fn sample(cli: &Cli, config: &Path) -> Result<u8, Failure> {
    let cfg = SurfaceConfig::from_path(config)?;
    let surface = cfg.build()?;
    let grid = cfg.sample_grid(&surface)?;
    let mut out = format!(
        "# kind={} nu={} nv={} margin={} samples={}\nu,v,x1,x2,x3,x4\n",
        cfg.kind.as_str(),
        cfg.grid.nu,
        cfg.grid.nv,
        cfg.grid.margin,
        grid.len()
    );
    for (u, v) in grid.points() {
        let z = surface.immersion(u, v)?;
        let _ = writeln!(out, "{},{},{},{},{},{}", fmt17(u), fmt17(v), fmt17(z.0[0]), fmt17(z.0[1]), fmt17(z.0[2]), fmt17(z.0[3]));
    }
    write_output(cli.out.as_deref(), &out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let result = match &cli.command {
        Command::Classify { config } => classify(&cli, config),
        Command::Verify { suite } => verify(&cli, suite),
        Command::SolveOde { case, set, config } => solve_ode(&cli, case, set, config.as_deref()),
        Command::Sample { config } => sample(&cli, config),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Exit(code)) => ExitCode::from(code),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
