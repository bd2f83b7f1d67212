//! `grid-extremal`: command-line front end.
//!
//! Exit codes: 0 success, 1 a verification suite failed, 2 usage error,
//! 3 numeric failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use grid_extremal::asymptotics::{self, Route};
use grid_extremal::config::HarnessConfig;
use grid_extremal::equilibrium::{c_closed, c_integral, c_taylor, cdf, mu_alpha, potential};
use grid_extremal::grid_poly::{ChebPoly, Grid};
use grid_extremal::ratio_extremal::{analyze_structure, degree_budget, solve_ratio_extremal_with, StructureReport};
use grid_extremal::verify::{Suite, Verifier};
use grid_extremal::{json, solve_monic_min, Error, MinMaxSolution};

#[derive(Parser, Debug)]
#[command(name = "grid-extremal", version, about = "Extremal polynomials on the equispaced grid and their limits")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Output format; csv is available for `sweep` only.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON file with harness settings; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps and extremal scans (default: all cores).
    #[arg(long, env = "GRID_EXTREMAL_WORKERS", global = true)]
    workers: Option<usize>,
    /// Samples per grid gap in the extremal-point scan [default: 8].
    #[arg(long, global = true)]
    points_per_gap: Option<usize>,
    /// Override a named tolerance, e.g. `--tol ratio_tolerance=0.08`. Names:
    /// ratio_tolerance, monic_tolerance, saturated_mass_tolerance, log2_slack,
    /// refine_tol, support_threshold, ordering_slack.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol, global = true)]
    tol: Vec<(String, f64)>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ConstantRoute {
    Closed,
    Taylor,
    Integral,
    All,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SweepRoute {
    Ratio,
    Monic,
    Both,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SuiteArg {
    Identities,
    Structure,
    Convergence,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The growth constant C(alpha).
    Constant {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = ConstantRoute::Closed)]
        route: ConstantRoute,
        /// Terms of the power series.
        #[arg(long, default_value_t = 30)]
        terms: usize,
    },
    /// Density, CDF and potential of the constrained equilibrium measure.
    Measure {
        #[arg(long)]
        alpha: f64,
        /// Number of Chebyshev-spaced sample points (the edges +-r are added).
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// The polynomial of degree <= floor(alpha n) maximizing sup norm over grid norm.
    Extremal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        /// Degree budget overriding floor(alpha n).
        #[arg(long)]
        degree: Option<usize>,
        /// Include the Chebyshev coefficients.
        #[arg(long)]
        emit_poly: bool,
        /// Include the zero-structure report.
        #[arg(long)]
        structure: bool,
    },
    /// The monic polynomial of degree floor(alpha n) with least grid norm.
    Chebyshev {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Finite-n values over a list of n, extrapolated in 1/n.
    Sweep {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value_t = SweepRoute::Ratio)]
        route: SweepRoute,
        /// Use degree round(c sqrt n) instead of floor(alpha n).
        #[arg(long)]
        cr: Option<f64>,
        /// With csv output: emit (1/n, value) plot data instead of the table.
        #[arg(long)]
        plot_data: bool,
    },
    /// Run acceptance checks.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = value.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((name.trim().to_string(), v))
}

enum Failure {
    Usage(String),
    Numeric(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage_error() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

type CmdResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn harness_config(run: &RunConfig) -> Result<HarnessConfig, Failure> {
    let mut cfg = match &run.config {
        Some(p) => HarnessConfig::load(p)?,
        None => HarnessConfig::default(),
    };
    if let Some(m) = run.points_per_gap {
        cfg.points_per_gap = m;
    }
    for (name, v) in &run.tol {
        cfg.set_tolerance(name, *v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = harness_config(&cli.run)?;
    if let Some(w) = cli.run.workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::Numeric(format!("cannot start worker pool: {e}")))?;
    }
    let is_sweep = matches!(cli.command, Command::Sweep { .. });
    if cli.run.format == Format::Csv && !is_sweep {
        return Err(Failure::Usage("csv output is available for `sweep` only".into()));
    }
    let mut verify_failed = false;
    let text = match cli.command {
        Command::Constant { alpha, route, terms } => cmd_constant(alpha, route, terms),
        Command::Measure { alpha, points } => cmd_measure(alpha, points),
        Command::Extremal {
            n,
            alpha,
            degree,
            emit_poly,
            structure,
        } => cmd_extremal(n, alpha, degree, emit_poly, structure, &cfg),
        Command::Chebyshev { n, alpha, degree } => cmd_chebyshev(n, alpha, degree),
        Command::Sweep {
            alpha,
            n_list,
            route,
            cr,
            plot_data,
        } => cmd_sweep(alpha, &n_list, route, cr, plot_data, cli.run.format, &cfg),
        Command::Verify { suite } => cmd_verify(suite, &cfg, &mut verify_failed),
    }?;
    emit(&text, cli.run.out.as_ref())?;
    if verify_failed {
        Err(Failure::Verify)
    } else {
        Ok(())
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> CmdResult {
    let mut s = json::to_string_pretty(v).map_err(|e| Failure::Numeric(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn check_alpha(alpha: f64) -> Result<(), Failure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Failure::Usage(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

fn degree_for(n: usize, alpha: f64, degree: Option<usize>) -> Result<usize, Failure> {
    match degree {
        Some(d) => Ok(d),
        None => {
            check_alpha(alpha)?;
            Ok(degree_budget(n, alpha))
        }
    }
}

#[derive(Serialize)]
struct ConstantOut {
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    taylor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integral: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_difference: Option<f64>,
}

fn cmd_constant(alpha: f64, route: ConstantRoute, terms: usize) -> CmdResult {
    let mut out = ConstantOut {
        alpha,
        closed: None,
        taylor: None,
        terms: None,
        integral: None,
        max_abs_difference: None,
    };
    match route {
        ConstantRoute::Closed => out.closed = Some(c_closed(alpha)?),
        ConstantRoute::Taylor => {
            out.taylor = Some(c_taylor(alpha, terms)?);
            out.terms = Some(terms);
        }
        ConstantRoute::Integral => out.integral = Some(c_integral(alpha)?),
        ConstantRoute::All => {
            let c = c_closed(alpha)?;
            let t = c_taylor(alpha, terms)?;
            let i = c_integral(alpha)?;
            out.closed = Some(c);
            out.taylor = Some(t);
            out.terms = Some(terms);
            out.integral = Some(i);
            out.max_abs_difference = Some((c - t).abs().max((c - i).abs()).max((t - i).abs()));
        }
    }
    to_json(&out)
}

#[derive(Serialize)]
struct MeasureRow {
    x: f64,
    density: f64,
    cdf: f64,
    potential: f64,
}

#[derive(Serialize)]
struct MeasureOut {
    alpha: f64,
    r: f64,
    rows: Vec<MeasureRow>,
}

fn cmd_measure(alpha: f64, points: usize) -> CmdResult {
    if points < 2 {
        return Err(Failure::Usage(format!("--points must be at least 2, got {points}")));
    }
    let m = mu_alpha(alpha)?;
    let mut xs: Vec<f64> = (0..points)
        .map(|k| {
            let x = -(std::f64::consts::PI * k as f64 / (points - 1) as f64).cos();
            // Snap the centre so odd counts sample x = 0 exactly.
            if x.abs() < 1e-15 {
                0.0
            } else {
                x
            }
        })
        .collect();
    xs.push(-m.r);
    xs.push(m.r);
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let rows = xs
        .into_iter()
        .map(|x| {
            Ok(MeasureRow {
                x,
                density: m.density(x),
                cdf: cdf(&m.measure, x)?,
                potential: potential(&m.measure, x)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    to_json(&MeasureOut { alpha, r: m.r, rows })
}

#[derive(Serialize)]
struct ExtremalOut<'a> {
    n: usize,
    alpha: f64,
    degree_budget: usize,
    x_star: f64,
    ratio: f64,
    log_ratio_over_n: f64,
    zeros: &'a [f64],
    outside_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poly: Option<&'a ChebPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    structure: Option<StructureReport>,
}

fn cmd_extremal(
    n: usize,
    alpha: f64,
    degree: Option<usize>,
    emit_poly: bool,
    structure: bool,
    cfg: &HarnessConfig,
) -> CmdResult {
    let d = degree_for(n, alpha, degree)?;
    let s = solve_ratio_extremal_with(n, d, alpha, cfg.ratio_options())?;
    to_json(&ExtremalOut {
        n: s.n,
        alpha: s.alpha,
        degree_budget: s.degree_budget,
        x_star: s.x_star,
        ratio: s.ratio,
        log_ratio_over_n: s.log_ratio_over_n,
        zeros: &s.zeros.zeros,
        outside_zero: s.outside_zero,
        poly: emit_poly.then_some(&s.poly),
        structure: structure.then(|| analyze_structure(&s)),
    })
}

#[derive(Serialize)]
struct ChebyshevOut {
    n: usize,
    degree: usize,
    active_set_size: usize,
    #[serde(flatten)]
    solution: MinMaxSolution,
}

fn cmd_chebyshev(n: usize, alpha: f64, degree: Option<usize>) -> CmdResult {
    let d = degree_for(n, alpha, degree)?;
    let g = Grid::new(n)?;
    let solution = solve_monic_min(&g, d)?;
    to_json(&ChebyshevOut {
        n,
        degree: d,
        active_set_size: solution.active_set.len(),
        solution,
    })
}

fn cmd_sweep(
    alpha: Option<f64>,
    n_list: &[usize],
    route: SweepRoute,
    cr: Option<f64>,
    plot_data: bool,
    format: Format,
    cfg: &HarnessConfig,
) -> CmdResult {
    if n_list.is_empty() {
        return Err(Failure::Usage("empty --n-list".into()));
    }
    if let Some(c) = cr {
        let rep = asymptotics::cr_regime(c, n_list, cfg)?;
        return match format {
            Format::Json => to_json(&rep),
            Format::Csv => Ok(asymptotics::cr_csv(&rep)),
        };
    }
    let alpha = alpha.ok_or_else(|| Failure::Usage("--alpha is required unless --cr is given".into()))?;
    check_alpha(alpha)?;
    let route = match route {
        SweepRoute::Ratio => Route::Ratio,
        SweepRoute::Monic => Route::Monic,
        SweepRoute::Both => Route::Both,
    };
    let rep = asymptotics::sweep(alpha, n_list, route, cfg)?;
    match (format, plot_data) {
        (Format::Json, _) => to_json(&rep),
        (Format::Csv, false) => Ok(asymptotics::sweep_csv(&rep)),
        (Format::Csv, true) => Ok(asymptotics::plot_data_csv(&rep)),
    }
}

fn cmd_verify(suite: SuiteArg, cfg: &HarnessConfig, failed: &mut bool) -> CmdResult {
    let suite = match suite {
        SuiteArg::Identities => Suite::Identities,
        SuiteArg::Structure => Suite::Structure,
        SuiteArg::Convergence => Suite::Convergence,
        SuiteArg::All => Suite::All,
    };
    let report = Verifier::new(*cfg).run_suite(suite);
    for c in &report.checks {
        eprintln!("{c}");
    }
    *failed = !report.passed;
    to_json(&report)
}
