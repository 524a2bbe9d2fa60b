//! `hsenergy`: command-line runner for solves, energies and verification sweeps.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails (named on
//! stderr), 1 on configuration or I/O errors (nothing is written).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypersurface_energy::config::{ExperimentKind, IdentitySelection, RunConfig, ScenarioConfig, Tolerances};
use hypersurface_energy::experiments::acceptance::{criterion, CRITERIA};
use hypersurface_energy::experiments::{report, run, write_report, Outcome};
use hypersurface_energy::geometry::SurfaceSpec;
use hypersurface_energy::{Error, Result};

#[derive(Parser)]
#[command(name = "hsenergy", version, about = "Energies on non-timelike hypersurfaces for second-order hyperbolic problems")]
#[command(after_help = "Tolerances can be overridden with --tol.<name>=<value>, e.g. --tol.energy_rel=1e-4.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and store the field with its metadata.
    Solve(Common),
    /// Energies of a stored solution on a surface.
    Energy {
        #[command(flatten)]
        common: Common,
        /// Directory written by `solve`.
        #[arg(long)]
        solve_dir: PathBuf,
    },
    /// Refinement checks of the identities and randomized suites.
    Verify(Common),
    /// ε-sweep of the compatibility mollification.
    Compat(Common),
    /// Solver refinement study (plus conservation on the scenario's surfaces).
    Converge(Common),
    /// Boosted-field residual under a Lorentz change of frame.
    Lorentz(Common),
    /// Energies along a foliation.
    TauSweep(Common),
    /// Run a JSON configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one acceptance criterion (1 to 10), or all of them.
    Acceptance {
        #[arg(long)]
        criterion: Option<usize>,
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Catalog name or path to a scenario JSON file.
    #[arg(long, default_value = "standing")]
    scenario: String,
    /// Scenario parameter override, `name=value` (repeatable).
    #[arg(long = "param", value_parser = parse_pair)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated cells per axis.
    #[arg(long, value_delimiter = ',')]
    grids: Vec<usize>,
    #[arg(long)]
    tau_grid: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    eps_sweep: Vec<f64>,
    #[arg(long)]
    identities: Option<IdentitySelection>,
    /// Compatibility order for `compat`.
    #[arg(long)]
    order: Option<usize>,
    /// Frame velocity for `lorentz`.
    #[arg(long, allow_hyphen_values = true)]
    velocity: Option<f64>,
    /// Surface as JSON, e.g. '{"kind":"affine","offset":0.3,"slope":[0.4]}'.
    #[arg(long, value_parser = parse_surface)]
    surface: Option<SurfaceSpec>,
    /// Foliation as JSON; `{"kind":"tau"}` is the horizontal one.
    #[arg(long, value_parser = parse_surface)]
    foliation: Option<SurfaceSpec>,
}

fn parse_pair(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    Ok((k.to_string(), v.parse().map_err(|e| format!("{k}: {e}"))?))
}

fn parse_surface(s: &str) -> std::result::Result<SurfaceSpec, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

/// Pulls `--tol.<name>=<value>` and `--tol.<name> <value>` out of argv.
fn split_tolerances(args: Vec<String>) -> Result<(Vec<String>, BTreeMap<String, f64>)> {
    let mut rest = vec![];
    let mut tol = BTreeMap::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tol.") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => (spec.to_string(), it.next().ok_or_else(|| Error::Config(format!("--tol.{spec} needs a value")))?),
        };
        let value: f64 = value.parse().map_err(|_| Error::Config(format!("--tol.{name}: '{value}' is not a number")))?;
        tol.insert(name, value);
    }
    Tolerances::with_overrides(&tol)?;
    Ok((rest, tol))
}

fn config_from(kind: ExperimentKind, c: Common, tol: BTreeMap<String, f64>) -> Result<RunConfig> {
    let mut scenario = ScenarioConfig::load(&c.scenario)?;
    scenario.params.extend(c.params);
    if let Some(f) = c.foliation {
        scenario.foliation = Some(f);
    }
    let mut cfg = RunConfig::new(kind, scenario);
    cfg.out = c.out;
    cfg.seed = c.seed;
    cfg.grids = c.grids;
    cfg.tau_grid = c.tau_grid;
    cfg.eps_sweep = c.eps_sweep;
    cfg.identities = c.identities;
    cfg.order = c.order;
    cfg.velocity = c.velocity;
    cfg.surface = c.surface;
    cfg.tolerances = tol;
    cfg.validate()?;
    Ok(cfg)
}

fn finish(outcome: &Outcome) -> ExitCode {
    let failing = outcome.failing();
    if failing.is_empty() {
        return ExitCode::SUCCESS;
    }
    for c in failing {
        eprintln!("check failed: {} ({})", c.name, c.detail);
    }
    ExitCode::from(2)
}

fn run_config(cfg: RunConfig) -> Result<ExitCode> {
    let outcome = run(&cfg)?;
    match &cfg.out {
        Some(dir) => write_report(dir, &cfg, &outcome)?,
        None => println!("{}", serde_json::to_string_pretty(&report(&cfg, &outcome))?),
    }
    Ok(finish(&outcome))
}

fn acceptance(which: Option<usize>, seed: u64, out: Option<PathBuf>, tol: BTreeMap<String, f64>) -> Result<ExitCode> {
    let tol = Tolerances::with_overrides(&tol)?;
    let ids: Vec<usize> = match which {
        Some(n) if (1..=CRITERIA.len()).contains(&n) => vec![n],
        Some(n) => return Err(Error::Config(format!("no acceptance criterion {n}; expected 1 to {}", CRITERIA.len()))),
        None => (1..=CRITERIA.len()).collect(),
    };
    let mut all = Outcome::default();
    for n in ids {
        let o = criterion(n, &tol, seed)?;
        println!("{} {n:>2} {}", if o.passed() { "PASS" } else { "FAIL" }, CRITERIA[n - 1]);
        all.merge(&format!("c{n:02}"), o);
    }
    if let Some(dir) = out {
        all.write_files(&dir)?;
        let body = serde_json::json!({ "seed": seed, "tolerances": tol, "checks": all.checks, "results": all.results });
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&body)? + "\n")?;
    }
    Ok(finish(&all))
}

fn dispatch(args: Vec<String>) -> Result<ExitCode> {
    let (args, tol) = split_tolerances(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            e.print()?;
            return Ok(ExitCode::SUCCESS);
        }
        Err(e) => return Err(Error::Config(e.render().to_string().trim_end().to_string())),
    };
    let cfg = match cli.command {
        Command::Solve(c) => config_from(ExperimentKind::Solve, c, tol)?,
        Command::Energy { common, solve_dir } => {
            let mut cfg = config_from(ExperimentKind::Verify, common, tol)?;
            cfg.experiment = ExperimentKind::Energy;
            cfg.solve_dir = Some(solve_dir);
            if cfg.surface.is_none() {
                return Err(Error::Config("energy needs --surface".into()));
            }
            cfg
        }
        Command::Verify(c) => config_from(ExperimentKind::Verify, c, tol)?,
        Command::Compat(c) => config_from(ExperimentKind::Compat, c, tol)?,
        Command::Converge(c) => config_from(ExperimentKind::Converge, c, tol)?,
        Command::Lorentz(c) => config_from(ExperimentKind::Lorentz, c, tol)?,
        Command::TauSweep(c) => config_from(ExperimentKind::TauSweep, c, tol)?,
        Command::Run { config, out } => {
            let mut cfg = RunConfig::load(&config)?;
            cfg.tolerances.extend(tol);
            cfg.validate()?;
            if out.is_some() {
                cfg.out = out;
            }
            cfg
        }
        Command::Acceptance { criterion, seed, out } => return acceptance(criterion, seed, out, tol),
    };
    run_config(cfg)
}

fn main() -> ExitCode {
    match dispatch(std::env::args().collect()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
