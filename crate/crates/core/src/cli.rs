//! Command-line interface behind the `satq` binary.

use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::channel::Regime;
use crate::error::Error;
use crate::harness::{
    monte_carlo, output_file_name, run_id, sweep_density, sweep_fading, sweep_nodes, write_json,
    write_links_csv, write_routes_csv, write_sweep_csv, ScenarioConfig, SweepKind, SweepRow,
    DEFAULT_CONFIG_TOML,
};
use crate::metrics::AggregateStats;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "satq", version, about = "Entanglement routing simulator for LEO constellations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario TOML; the built-in defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed, overriding the config value.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,
    /// Override a config entry, e.g. `--set routing.f_min=0.65`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Worker threads for Monte Carlo runs.
    #[arg(long, global = true, default_value_t = 1)]
    pub parallel: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo run of the configured scenario.
    Run,
    /// Sweep network size across regimes.
    SweepNodes {
        /// Comma-separated node counts
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Comma-separated regimes (clear_sky, standard, strong_turbulence); defaults to `sweep.regimes`
        #[arg(long, value_delimiter = ',')]
        regimes: Option<Vec<Regime>>,
    },
    /// Sweep the fading deviation with regime losses held fixed.
    SweepFading {
        /// Comma-separated fading deviations; defaults to `sweep.sigmas`
        #[arg(long, value_delimiter = ',')]
        sigmas: Option<Vec<f64>>,
        /// Comma-separated node counts
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Comma-separated regimes (clear_sky, standard, strong_turbulence); defaults to `sweep.regimes`
        #[arg(long, value_delimiter = ',')]
        regimes: Option<Vec<Regime>>,
    },
    /// Sweep node count and report the resulting volumetric density.
    SweepDensity {
        /// Comma-separated node counts
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Comma-separated regimes (clear_sky, standard, strong_turbulence); defaults to `sweep.regimes`
        #[arg(long, value_delimiter = ',')]
        regimes: Option<Vec<Regime>>,
    },
    /// Parse and validate the configuration, then exit.
    ValidateConfig,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(Error),
    #[error("{0}")]
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::SpacingInfeasible { .. } => {
                CliError::Config(e)
            }
            other => CliError::Runtime(other),
        }
    }
}

/// Resolve the scenario from the global flags.
pub fn resolve_config(global: &GlobalArgs) -> Result<ScenarioConfig, CliError> {
    let text = match &global.config {
        Some(path) => fs::read_to_string(path).map_err(|e| {
            CliError::Config(Error::Config(format!("cannot read {}: {e}", path.display())))
        })?,
        None => DEFAULT_CONFIG_TOML.to_string(),
    };
    let mut overrides = global.overrides.clone();
    if let Some(seed) = global.seed {
        overrides.push(format!("seed={seed}"));
    }
    ScenarioConfig::from_toml_with_overrides(&text, &overrides).map_err(CliError::Config)
}

fn banner(cfg: &ScenarioConfig, err: &mut dyn Write) {
    let _ = writeln!(err, "satq {} | seed {}", env!("CARGO_PKG_VERSION"), cfg.seed);
    let _ = writeln!(err, "--- resolved configuration ---");
    let _ = write!(err, "{}", cfg.to_toml_string());
    let _ = writeln!(err, "------------------------------");
}

#[derive(Serialize)]
struct RunSummary<'a> {
    config: &'a ScenarioConfig,
    mean_density_per_km3: f64,
    stats: &'a AggregateStats,
    per_run: &'a [Option<AggregateStats>],
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    sweep: &'static str,
    config: &'a ScenarioConfig,
    rows: &'a [SweepRow],
}

fn print_rows(rows: &[SweepRow], out: &mut dyn Write) {
    let _ = writeln!(
        out,
        "{:>5} {:>18} {:>7} {:>10} {:>8} {:>11} {:>6} {:>11} {:>6} {:>8}",
        "N", "regime", "sigma", "rho", "F_eff", "R_eff", "L", "J", "avail", "K_norm"
    );
    for r in rows {
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{:>5} {:>18} {:>7.3} {:>10.3e} {:>8.4} {:>11.3e} {:>6.3} {:>11.3e} {:>6.3} {:>8}",
            r.n_nodes,
            r.regime.as_str(),
            r.sigma_fade,
            r.rho_per_km3,
            s.mean_f_eff,
            s.mean_r_eff_bps,
            s.mean_path_len,
            s.perf_index,
            s.availability,
            r.normalized_key_rate.map_or("-".into(), |k| format!("{k:.4}")),
        );
    }
}

fn write_sweep(
    kind: SweepKind,
    cfg: &ScenarioConfig,
    rows: &[SweepRow],
    dir: &FsPath,
) -> Result<Vec<PathBuf>, CliError> {
    let id = run_id(cfg.seed);
    let mut regimes: Vec<Regime> = rows.iter().map(|r| r.regime).collect();
    regimes.sort();
    regimes.dedup();
    let mut written = Vec::new();
    for regime in regimes {
        let path = dir.join(output_file_name(kind, regime, &id));
        write_sweep_csv(rows.iter().filter(|r| r.regime == regime), &path)?;
        written.push(path);
    }
    let json = dir.join(format!("{}_{id}.json", kind.as_str()));
    write_json(
        &SweepSummary {
            sweep: kind.as_str(),
            config: cfg,
            rows,
        },
        &json,
    )?;
    written.push(json);
    Ok(written)
}

/// Execute a parsed command line. Progress goes to `err`, results to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve_config(&cli.global)?;
    if let Command::ValidateConfig = cli.command {
        let _ = writeln!(out, "configuration ok (seed {})", cfg.seed);
        let _ = write!(out, "{}", cfg.to_toml_string());
        return Ok(());
    }
    banner(&cfg, err);
    let dir = &cli.global.out;
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(e.into()))?;
    let threads = cli.global.parallel.max(1);
    let regimes_or = |r: &Option<Vec<Regime>>| r.clone().unwrap_or_else(|| cfg.sweep.regimes.clone());

    let written = match &cli.command {
        Command::ValidateConfig => unreachable!(),
        Command::Run => {
            let mc = monte_carlo(&cfg, threads)?;
            let id = run_id(cfg.seed);
            let row = SweepRow {
                kind: SweepKind::Run,
                n_nodes: cfg.constellation.n_nodes,
                regime: cfg.channel.regime,
                sigma_fade: cfg.sigma_fade(),
                rho_per_km3: mc.mean_density_per_km3,
                stats: mc.stats,
                normalized_key_rate: None,
            };
            print_rows(std::slice::from_ref(&row), out);
            let stem = format!("run_{}_{id}", cfg.channel.regime.as_str());
            let agg = dir.join(format!("{stem}.csv"));
            write_sweep_csv([&row], &agg)?;
            let routes = dir.join(format!("{stem}_routes.csv"));
            write_routes_csv(&mc.episodes, &routes)?;
            let mut files = vec![agg, routes];
            if cfg.simulation.record_links {
                let links = dir.join(format!("{stem}_links.csv"));
                write_links_csv(&mc.episodes, &links)?;
                files.push(links);
            }
            let json = dir.join(format!("run_{id}.json"));
            write_json(
                &RunSummary {
                    config: &cfg,
                    mean_density_per_km3: mc.mean_density_per_km3,
                    stats: &mc.stats,
                    per_run: &mc.per_run,
                },
                &json,
            )?;
            files.push(json);
            files
        }
        Command::SweepNodes { sizes, regimes } => {
            let sizes = sizes.clone().unwrap_or_else(|| cfg.sweep.sizes.clone());
            let rows = sweep_nodes(&cfg, &sizes, &regimes_or(regimes), threads)?;
            print_rows(&rows, out);
            write_sweep(SweepKind::Nodes, &cfg, &rows, dir)?
        }
        Command::SweepFading {
            sigmas,
            sizes,
            regimes,
        } => {
            let sigmas = sigmas.clone().unwrap_or_else(|| cfg.sweep.sigmas.clone());
            let sizes = sizes
                .clone()
                .unwrap_or_else(|| vec![cfg.constellation.n_nodes]);
            let rows = sweep_fading(&cfg, &sizes, &sigmas, &regimes_or(regimes), threads)?;
            print_rows(&rows, out);
            write_sweep(SweepKind::Fading, &cfg, &rows, dir)?
        }
        Command::SweepDensity { sizes, regimes } => {
            let sizes = sizes
                .clone()
                .unwrap_or_else(|| cfg.sweep.density_sizes.clone());
            let rows = sweep_density(&cfg, &sizes, &regimes_or(regimes), threads)?;
            print_rows(&rows, out);
            write_sweep(SweepKind::Density, &cfg, &rows, dir)?
        }
    };
    for f in written {
        let _ = writeln!(err, "wrote {}", f.display());
    }
    Ok(())
}

/// Parse `args`, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match execute(&cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
