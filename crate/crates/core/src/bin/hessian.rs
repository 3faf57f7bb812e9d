use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode as ProcessExit;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hessian_core::constructions::{
    warped_metric_check, warped_potential_value, IntegralStatus, WarpedSpec,
};
use hessian_core::monge_ampere::{solve, Cone, ConeProblem, Window};
use hessian_core::report::{
    analyze, dual_report, flatness_report, run_suite, to_json_string, Bound, ExitCode, PotentialFile,
    SuiteConfig, Verdict, TOOL, VERSION,
};
use hessian_core::sampling::DEFAULT_SEED;
use hessian_core::{Error, Result};

#[derive(Parser)]
#[command(name = "hessian", version, about = "Hessian metrics from potentials on affine charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Sampling {
    /// Number of points drawn from the file's box.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Metric, curvature and Koszul form at every sample of a potential file.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Run the golden suite; exit 0 iff every check passes.
    VerifyPaper {
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Light-cone potential to use instead of the standard one.
        #[arg(long, hide = true)]
        cone_potential: Option<String>,
    },
    /// Solve det Hess u = exp(4u) on a window of a 2D cone.
    ChengYau {
        #[arg(long)]
        cone: Cone,
        /// `a,b,c,d` for [a,b] x [c,d]; defaults to a window inside the cone.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<Window>,
        #[arg(long, default_value_t = 33)]
        resolution: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Flat or not, by Gaussian curvature in 2D and |R| otherwise.
    Flatness {
        file: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Dual coordinates, Euler fields and the duality identities.
    Legendre {
        file: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Check the warped-product metric identity over a base potential.
    Warp {
        #[arg(long)]
        base: PathBuf,
        /// f(t)
        #[arg(long)]
        warp_expr: String,
        /// F with f(F(t)) = t, also in the variable t
        #[arg(long)]
        inverse_expr: String,
        #[arg(long, default_value = "-1,1")]
        t_range: String,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[command(flatten)]
        sampling: Sampling,
    },
}

fn write_json_file<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, to_json_string(value)?)?;
    }
    Ok(())
}

fn status(passed: bool) -> ExitCode {
    if passed {
        ExitCode::Success
    } else {
        ExitCode::CheckFailed
    }
}

fn print_verdicts(out: &mut impl Write, verdicts: &[Verdict]) -> io::Result<()> {
    for v in verdicts {
        writeln!(out, "{}", v.line())?;
    }
    Ok(())
}

fn cmd_analyze(file: &Path, s: &Sampling) -> Result<ExitCode> {
    let started = Instant::now();
    let pf = PotentialFile::read(file)?;
    let report = analyze(&pf, s.samples, s.seed)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{} (dimension {}), {} points, {} excluded", report.chart.name, pf.chart.dim(), report.points.len(), report.excluded.len())?;
    for p in &report.points {
        let c = &p.curvature;
        write!(out, "  #{} {:?} sig ({},{}) det {:.6e} scalar {:.6e}", p.index, p.point, p.signature.positive, p.signature.negative, p.determinant, c.scalar)?;
        if let Some(k) = c.gaussian {
            write!(out, " K {k:.6e}")?;
        }
        writeln!(out)?;
    }
    for e in &report.excluded {
        writeln!(out, "  #{} {:?} excluded: |det| = {:.3e}", e.index, e.point, e.determinant.abs())?;
    }
    print_verdicts(&mut out, &report.verdicts)?;
    for v in &report.classification {
        writeln!(out, "  {} {}", if v.passed { "yes" } else { "no " }, v.line().split_once(' ').map_or("", |x| x.1))?;
    }
    write_json_file(&s.json, &report)?;
    eprintln!("analyze finished in {:.3} s", started.elapsed().as_secs_f64());
    Ok(status(report.passed()))
}

fn cmd_verify(config: SuiteConfig, json: &Option<PathBuf>) -> Result<ExitCode> {
    let started = Instant::now();
    let report = run_suite(&config);
    let mut out = io::stdout().lock();
    for c in &report.checks {
        writeln!(out, "{}", c.line())?;
    }
    writeln!(out, "{} passed, {} failed", report.passed, report.failed)?;
    write_json_file(json, &report)?;
    eprintln!("verify-paper finished in {:.3} s", started.elapsed().as_secs_f64());
    Ok(status(report.all_passed()))
}

#[derive(Serialize)]
struct ChengYauReport {
    tool: &'static str,
    version: &'static str,
    problem: ConeProblem,
    iterations: usize,
    converged: bool,
    residual_norm: f64,
    min_eigenvalue: f64,
    max_error: f64,
    trace: Vec<f64>,
}

fn cmd_cheng_yau(
    cone: Cone,
    window: Option<Window>,
    resolution: usize,
    csv: &Option<PathBuf>,
    json: &Option<PathBuf>,
) -> Result<ExitCode> {
    let problem = ConeProblem::new(cone, window.unwrap_or(cone.default_window()), resolution)?;
    let sol = match solve(&problem) {
        Ok(s) => s,
        Err(Error::Solver { iterations, reason, trace }) => {
            eprintln!("Newton iteration trace:");
            for (k, r) in trace.iter().enumerate() {
                eprintln!("  {k:>3}  {r:.6e}");
            }
            return Err(Error::Solver { iterations, reason, trace });
        }
        Err(e) => return Err(e),
    };
    let max_error = sol.max_error()?;
    let mut out = io::stdout().lock();
    writeln!(out, "cone {cone}, window {:?}, m = {resolution}", problem.window)?;
    for (k, r) in sol.trace.iter().enumerate() {
        writeln!(out, "  newton {k:>2}  residual {r:.6e}")?;
    }
    writeln!(out, "iterations {}", sol.iterations)?;
    writeln!(out, "min Hessian eigenvalue {:.6e}", sol.min_eigenvalue)?;
    writeln!(out, "L-inf error vs exact solution {max_error:.6e}")?;
    if let Some(path) = csv {
        let mut w = BufWriter::new(File::create(path)?);
        sol.write_csv(&mut w)?;
        w.flush()?;
    }
    write_json_file(
        json,
        &ChengYauReport {
            tool: TOOL,
            version: VERSION,
            problem,
            iterations: sol.iterations,
            converged: sol.converged,
            residual_norm: sol.residual_norm,
            min_eigenvalue: sol.min_eigenvalue,
            max_error,
            trace: sol.trace.clone(),
        },
    )?;
    Ok(status(sol.converged))
}

fn cmd_flatness(file: &Path, s: &Sampling) -> Result<ExitCode> {
    let pf = PotentialFile::read(file)?;
    let r = flatness_report(&pf, s.samples, s.seed)?;
    let mut out = io::stdout().lock();
    for p in &r.samples {
        writeln!(out, "  #{} {:?} {} {:.6e}", p.index, p.point, r.measure, p.curvature)?;
    }
    for p in &r.excluded {
        writeln!(out, "  {p:?} excluded (degenerate)")?;
    }
    writeln!(
        out,
        "{}: {} (max |{}| = {:.3e}, tolerance {:.1e})",
        r.chart.name,
        if r.flat { "flat" } else { "not flat" },
        r.measure,
        r.max_abs_curvature,
        r.tolerance
    )?;
    write_json_file(&s.json, &r)?;
    Ok(ExitCode::Success)
}

fn cmd_legendre(file: &Path, s: &Sampling) -> Result<ExitCode> {
    let pf = PotentialFile::read(file)?;
    let r = dual_report(&pf, s.samples, s.seed)?;
    let mut out = io::stdout().lock();
    for p in &r.points {
        writeln!(out, "  #{} {:?} -> dual {:?}", p.index, p.point, p.dual_coordinates)?;
    }
    print_verdicts(&mut out, &r.verdicts)?;
    write_json_file(&s.json, &r)?;
    Ok(status(r.passed()))
}

#[derive(Serialize)]
struct WarpPoint {
    point: Vec<f64>,
    metric_residual: f64,
    y: Vec<f64>,
    perspective: f64,
    integral: IntegralStatus,
}

#[derive(Serialize)]
struct WarpReport {
    tool: &'static str,
    version: &'static str,
    base: String,
    warp: String,
    inverse: String,
    epsilon: f64,
    points: Vec<WarpPoint>,
    verdicts: Vec<Verdict>,
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidArgument(format!("t-range `{s}` must be `lo,hi` with lo <= hi"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a <= b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_warp(
    base: &Path,
    warp: &str,
    inverse: &str,
    t_range: &str,
    epsilon: f64,
    s: &Sampling,
) -> Result<ExitCode> {
    let pf = PotentialFile::read(base)?;
    let (t0, t1) = parse_range(t_range)?;
    let spec = WarpedSpec::parse(pf.chart.clone(), warp, inverse)?;
    let ts: Vec<f64> = (0..5).map(|k| t0 + (t1 - t0) * k as f64 / 4.0).collect();
    let mut points = Vec::new();
    for (_, x) in pf.samples(s.samples, s.seed)? {
        for &t in &ts {
            let mut xt = x.clone();
            xt.push(t);
            let check = warped_metric_check(&spec, &xt)?;
            let y = spec.to_y(&xt)?;
            let value = warped_potential_value(&spec, &y, epsilon.min(0.5 * y[y.len() - 1]))?;
            points.push(WarpPoint {
                point: xt,
                metric_residual: check.residual,
                y,
                perspective: value.perspective,
                integral: value.integral.status,
            });
        }
    }
    let verdicts = vec![
        Verdict::new(
            "metric_identity",
            points.iter().map(|p| p.metric_residual).fold(0.0, f64::max),
            Bound::AtMost { tolerance: 1e-8 },
        ),
        Verdict::new("warp_inverse", spec.inverse_residual(&ts)?, Bound::AtMost { tolerance: 1e-10 }),
    ];
    let mut out = io::stdout().lock();
    for p in &points {
        let integral = match p.integral {
            IntegralStatus::Convergent { limit } => format!("integral {limit:.6e}"),
            IntegralStatus::DivergentIntegral { partial } => format!("integral diverges (partial {partial:.3e})"),
        };
        writeln!(out, "  {:?} residual {:.3e} {integral}", p.point, p.metric_residual)?;
    }
    print_verdicts(&mut out, &verdicts)?;
    let passed = verdicts.iter().all(|v| v.passed);
    write_json_file(
        &s.json,
        &WarpReport {
            tool: TOOL,
            version: VERSION,
            base: pf.potential.clone(),
            warp: warp.to_string(),
            inverse: inverse.to_string(),
            epsilon,
            points,
            verdicts,
        },
    )?;
    Ok(status(passed))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze { file, sampling } => cmd_analyze(&file, &sampling),
        Command::VerifyPaper {
            tolerance_scale,
            seed,
            json,
            cone_potential,
        } => cmd_verify(
            SuiteConfig {
                tolerance_scale,
                seed,
                cone_potential,
            },
            &json,
        ),
        Command::ChengYau {
            cone,
            window,
            resolution,
            csv,
            json,
        } => cmd_cheng_yau(cone, window, resolution, &csv, &json),
        Command::Flatness { file, sampling } => cmd_flatness(&file, &sampling),
        Command::Legendre { file, sampling } => cmd_legendre(&file, &sampling),
        Command::Warp {
            base,
            warp_expr,
            inverse_expr,
            t_range,
            epsilon,
            sampling,
        } => cmd_warp(&base, &warp_expr, &inverse_expr, &t_range, epsilon, &sampling),
    }
}

fn main() -> ProcessExit {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ProcessExit::from(if e.use_stderr() { ExitCode::Usage as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ProcessExit::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ProcessExit::from(e.exit_code() as u8)
        }
    }
}
