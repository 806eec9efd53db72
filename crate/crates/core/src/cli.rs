//! `navsim` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed (oracle table, convergence or a
//! residual expectation), 2 configuration or I/O problem, 3 numerical abort.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{self, Convergence, SmoothMotion, CONVERGENCE_STEPS};
use crate::config::{CliConfig, ConfigError, Overrides};
use crate::error::NavError;
use crate::navigator::{self, RunResult};
use crate::report;
use crate::updates::Algorithm;

/// Caps the number of concurrent runs in `compare`.
pub const THREADS_ENV: &str = "NAVSIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "navsim", version, about = "Strapdown velocity/position update accuracy simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one algorithm pair and write the error series as CSV.
    Run(RunArgs),
    /// Run every configured algorithm and rank them by position error.
    Compare(CompareArgs),
    /// Check single-step errors against their closed forms and the
    /// sculling/scrolling convergence order.
    OracleCheck,
    /// Print assumption residuals along the truth trajectory.
    Residuals(ScenarioArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Override the update interval (s).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Override the flight duration (s).
    #[arg(long)]
    pub duration: Option<f64>,
}

impl ScenarioArgs {
    fn overrides(&self) -> Overrides {
        Overrides { dt_s: self.dt, duration_s: self.duration }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// CSV destination; defaults to `output.series_csv`, then stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Algorithm to run; defaults to the first one in the config.
    #[arg(long)]
    pub alg: Option<Algorithm>,
    /// Also write an SVG of the horizontal position error.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Ranking CSV destination; defaults to `output.ranking_csv`.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write an SVG of the horizontal position error.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug)]
pub enum Failure {
    Check(String),
    Config(String),
    Numerical(NavError),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Check(m) | Failure::Config(m) => f.write_str(m),
            Failure::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<NavError> for Failure {
    fn from(e: NavError) -> Self {
        match e {
            NavError::InvalidScenario(_) | NavError::InvalidArgument(_) | NavError::MixedScenarios => {
                Failure::Config(e.to_string())
            }
            e => Failure::Numerical(e),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("cannot write output: {e}"))
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Config(format!("cannot write {}: {e}", path.display()))
}

fn write_file(path: &Path, contents: impl FnOnce(&mut fs::File) -> io::Result<()>) -> Result<(), Failure> {
    let mut f = fs::File::create(path).map_err(|e| io_failure(path, e))?;
    contents(&mut f).map_err(|e| io_failure(path, e))
}

/// Parses `std::env::args` and runs the command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    match execute(&cli.command, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = stdout.flush();
            eprintln!("navsim: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

/// Runs `command`, writing its report to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Run(a) => cmd_run(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::OracleCheck => cmd_oracle_check(out),
        Command::Residuals(a) => cmd_residuals(a, out),
    }
}

type CmdResult = Result<(), Failure>;

/// Next to `--out` when given, else `output.plot_svg`.
fn plot_path(cfg: &CliConfig, cli_out: Option<&Path>) -> Result<PathBuf, Failure> {
    cli_out
        .map(|p| p.with_extension("svg"))
        .or_else(|| cfg.output.plot_svg.as_ref().map(|p| cfg.resolve(p)))
        .ok_or_else(|| Failure::Config("plotting needs --out or output.plot_svg".into()))
}

fn write_plot(path: &Path, results: &[RunResult], title: &str) -> Result<(), Failure> {
    let svg = report::horizontal_error_svg(results, title).map_err(|e| Failure::Config(format!("plot failed: {e}")))?;
    write_file(path, |f| f.write_all(svg.as_bytes()))
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = CliConfig::load(&a.scenario.config)?;
    let configs = cfg.run_configs(a.scenario.overrides())?;
    let rc = match a.alg {
        Some(alg) => configs
            .into_iter()
            .find(|c| c.vel_alg == alg)
            .ok_or_else(|| Failure::Config(format!("algorithm {alg} is not listed in run.algorithms")))?,
        None => configs[0],
    };
    let result = navigator::run(&rc)?;
    let csv_path = a.out.clone().or_else(|| cfg.output.series_csv.as_ref().map(|p| cfg.resolve(p)));

    let s = &result.summary;
    let summary = format!(
        "{}: {} epochs, max |dp_h| {:.6e} m, max |dv_h| {:.6e} m/s, final |dp_h| {:.6e} m\n",
        rc.label(),
        result.records.len(),
        s.max_horiz_pos_err,
        s.max_horiz_vel_err,
        s.final_horiz_pos_err
    );
    match &csv_path {
        Some(p) => {
            write_file(p, |f| report::write_series_csv(f, &result.records))?;
            out.write_all(summary.as_bytes())?;
        }
        None => {
            report::write_series_csv(&mut *out, &result.records)?;
            eprint!("{summary}");
        }
    }
    if a.plot || cfg.output.plot {
        let path = plot_path(&cfg, a.out.as_deref())?;
        write_plot(&path, std::slice::from_ref(&result), &rc.label())?;
    }
    Ok(())
}

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> CmdResult {
    let cfg = CliConfig::load(&a.scenario.config)?;
    let configs = cfg.run_configs(a.scenario.overrides())?;
    let cmp = match threads()? {
        Some(n) => navigator::compare_with_threads(&configs, n)?,
        None => navigator::compare(&configs)?,
    };
    out.write_all(report::format_ranking(&cmp.rows).as_bytes())?;

    let csv_path = a.out.clone().or_else(|| cfg.output.ranking_csv.as_ref().map(|p| cfg.resolve(p)));
    if let Some(p) = &csv_path {
        write_file(p, |f| report::write_ranking_csv(f, &cmp.rows))?;
    }
    if a.plot || cfg.output.plot {
        let path = plot_path(&cfg, a.out.as_deref())?;
        let title = a.scenario.config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        write_plot(&path, &cmp.results, &title)?;
    }
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_oracle_check(out: &mut dyn Write) -> CmdResult {
    writeln!(
        out,
        "{:<9} {:<8} {:<11} {:>6} {:>10} {:>7} {:>5}  result",
        "quantity", "alg", "regime", "order", "ratio", "fitted", "sign"
    )?;
    let mut failures = 0;
    for c in analysis::oracle_checks() {
        let fitted = c.fitted_order.map_or("-".to_string(), |o| format!("{o:.3}"));
        writeln!(
            out,
            "{:<9} {:<8} {:<11} {:>6} {:>10.4e} {:>7} {:>5}  {}",
            c.quantity.to_string(),
            c.algorithm.name(),
            c.regime,
            c.order.to_string(),
            c.ratio,
            fitted,
            if c.sign_ok { "ok" } else { "bad" },
            pass(c.pass)
        )?;
        failures += usize::from(!c.pass);
    }

    let motion = SmoothMotion::default();
    for (name, conv) in [
        ("sculling", analysis::sculling_convergence(&motion, &CONVERGENCE_STEPS)?),
        ("scrolling", analysis::scrolling_convergence(&motion, &CONVERGENCE_STEPS)?),
    ] {
        let ok = conv.integer_order().is_some_and(|p| p >= 3);
        let slope = match conv {
            Convergence::Order(o) => format!("{o:.4}"),
            Convergence::ZeroError => "zero error".into(),
        };
        let int = conv.integer_order().map_or("-".into(), |p| p.to_string());
        writeln!(out, "{name:<9} convergence slope {slope} order {int}  {}", pass(ok))?;
        failures += usize::from(!ok);
    }

    if failures > 0 {
        return Err(Failure::Check(format!("{failures} oracle check(s) failed")));
    }
    Ok(())
}

fn cmd_residuals(a: &ScenarioArgs, out: &mut dyn Write) -> CmdResult {
    use crate::config::ResidualName::*;

    let cfg = CliConfig::load(&a.config)?;
    let series = analysis::assumption_residuals(&cfg.scenario(a.overrides())?)?;
    writeln!(out, "{:<17} {:>12} {:>12} {:>8}  result", "residual (max)", "value", "expected", "rel_tol")?;
    let mut failures = 0;
    for name in [OmegaIn, ConstC, RampU, RateCrossForce, ForceRate] {
        let value = name.of(&series.max);
        match cfg.expect.get(&name) {
            Some(e) => {
                let ok = e.holds(value);
                failures += usize::from(!ok);
                writeln!(out, "{:<17} {value:>12.4e} {:>12.4e} {:>8.3}  {}", name.to_string(), e.value, e.rel_tol, pass(ok))?;
            }
            None => writeln!(out, "{:<17} {value:>12.4e} {:>12} {:>8}  -", name.to_string(), "-", "-")?,
        }
    }
    if failures > 0 {
        return Err(Failure::Check(format!("{failures} residual expectation(s) missed")));
    }
    Ok(())
}
