//! Command-line experiments on van der Waals steady states.
//!
//! Every command validates its full configuration before any computation,
//! writes exactly one JSON summary plus zero or more CSV tables into the
//! output directory, and is deterministic given the same inputs.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver found no solution,
//! 4 internal/quadrature failure.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use vdw_phase::eos::{EosParams, Landscape};
use vdw_phase::viscous::Orientation;
use vdw_phase::{energy, fmt_g17, limits, maxwell, sharp, stability, viscous, Error};

#[derive(Parser)]
#[command(
    name = "vdw-phase",
    about = "Steady liquid-vapor phase transitions of a van der Waals fluid",
    version
)]
struct Cli {
    /// Flat JSON configuration file; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Temperature (reduced units by default; critical value is 8a/(27Rb)).
    #[arg(long, global = true)]
    theta: Option<f64>,

    /// Mean specific volume; defaults to the Maxwell midpoint.
    #[arg(long, global = true)]
    vbar: Option<f64>,

    /// Artificial viscosity for single solves.
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Sweep ladder start viscosity.
    #[arg(long, global = true)]
    eps_start: Option<f64>,

    /// Sweep ladder end viscosity.
    #[arg(long, global = true)]
    eps_end: Option<f64>,

    /// Sweep ladder geometric ratio in (0, 1).
    #[arg(long, global = true)]
    eps_ratio: Option<f64>,

    /// Profile orientation.
    #[arg(long, global = true, value_enum)]
    kind: Option<KindArg>,

    /// Number of basic cells (2N monotonicity changes per period).
    #[arg(long = "N", global = true)]
    n_cells: Option<u32>,

    /// Output grid intervals per period.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed recorded in summaries (reserved for randomized suites).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the full subcritical landscape and an isotherm table.
    Landscape,
    /// Build the sharp two-phase profile for the mean volume.
    Sharp,
    /// Solve the viscous steady problem at one viscosity.
    Solve,
    /// Run a viscosity ladder toward the sharp-interface limit.
    Sweep,
    /// Fourier growth rates of the constant state.
    Stability,
    /// Compare energies of the candidate steady states.
    EnergyOrdering,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Peak,
    Valley,
}

/// Flat JSON configuration document. Unknown fields are rejected so typos
/// fail fast instead of silently falling back to defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    a: Option<f64>,
    b: Option<f64>,
    r: Option<f64>,
    theta: Option<f64>,
    vbar: Option<f64>,
    epsilon: Option<f64>,
    eps_start: Option<f64>,
    eps_end: Option<f64>,
    eps_ratio: Option<f64>,
    kind: Option<String>,
    n_cells: Option<u32>,
    grid: Option<usize>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
}

/// Fully resolved run configuration: flags over config file over defaults.
#[derive(Debug, Serialize)]
struct RunConfig {
    a: f64,
    b: f64,
    r: f64,
    theta: f64,
    vbar: Option<f64>,
    epsilon: f64,
    eps_start: f64,
    eps_end: f64,
    eps_ratio: f64,
    kind: String,
    n_cells: u32,
    grid: usize,
    #[serde(skip)]
    out: PathBuf,
    seed: u64,
}

fn resolve_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("config parse: {e}")))?
        }
        None => FileConfig::default(),
    };
    let kind = match (&cli.kind, &file.kind) {
        (Some(KindArg::Peak), _) => "peak",
        (Some(KindArg::Valley), _) => "valley",
        (None, Some(k)) => match k.as_str() {
            "peak" => "peak",
            "valley" => "valley",
            other => {
                return Err(Error::InvalidConfig(format!(
                    "kind must be peak or valley, got {other}"
                ))
                .into())
            }
        },
        (None, None) => "valley",
    };
    Ok(RunConfig {
        a: file.a.unwrap_or(3.0),
        b: file.b.unwrap_or(1.0 / 3.0),
        r: file.r.unwrap_or(8.0 / 3.0),
        theta: cli.theta.or(file.theta).unwrap_or(0.85),
        vbar: cli.vbar.or(file.vbar),
        epsilon: cli.epsilon.or(file.epsilon).unwrap_or(0.05),
        eps_start: cli.eps_start.or(file.eps_start).unwrap_or(0.065),
        eps_end: cli.eps_end.or(file.eps_end).unwrap_or(0.008),
        eps_ratio: cli.eps_ratio.or(file.eps_ratio).unwrap_or(0.8),
        kind: kind.to_string(),
        n_cells: cli.n_cells.or(file.n_cells).unwrap_or(1),
        grid: cli.grid.or(file.grid).unwrap_or(2048),
        out: cli
            .out
            .clone()
            .or(file.output_dir)
            .unwrap_or_else(|| PathBuf::from("vdw-phase-out")),
        seed: cli.seed.or(file.seed).unwrap_or(0),
    })
}

fn orientation(config: &RunConfig) -> Orientation {
    if config.kind == "peak" {
        Orientation::Peak
    } else {
        Orientation::Valley
    }
}

/// Validate everything a command needs before any computation runs.
fn validated_params(config: &RunConfig) -> Result<EosParams, Error> {
    let params = EosParams::new(config.a, config.b, config.r, config.theta)?;
    if config.grid < 64 {
        return Err(Error::InvalidConfig(format!(
            "grid must be at least 64, got {}",
            config.grid
        )));
    }
    if !(config.epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be positive, got {}",
            config.epsilon
        )));
    }
    if !(config.eps_ratio > 0.0 && config.eps_ratio < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "eps_ratio must lie in (0, 1), got {}",
            config.eps_ratio
        )));
    }
    if !(config.eps_end > 0.0 && config.eps_start > config.eps_end) {
        return Err(Error::InvalidConfig(format!(
            "need eps_start > eps_end > 0, got {} and {}",
            config.eps_start, config.eps_end
        )));
    }
    if config.n_cells == 0 {
        return Err(Error::InvalidConfig("N must be positive".into()));
    }
    Ok(params)
}

fn subcritical_landscape(params: &EosParams) -> Result<Landscape, Error> {
    maxwell::construct(params)
}

fn effective_vbar(config: &RunConfig, landscape: &Landscape) -> f64 {
    config.vbar.unwrap_or_else(|| landscape.maxwell_midpoint())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(dir, name, &text)
}

#[derive(Serialize)]
struct LandscapeSummary<'a> {
    config: &'a RunConfig,
    theta_c: f64,
    landscape: &'a Landscape,
    triviality_threshold: f64,
    ordering_ok: bool,
}

fn cmd_landscape(config: &RunConfig) -> anyhow::Result<()> {
    let params = validated_params(config)?;
    let landscape = subcritical_landscape(&params)?;
    let eps_star = viscous::triviality_threshold(&params, &landscape);
    let ordering_ok = params.b < landscape.alpha_bar
        && landscape.alpha_bar < landscape.alpha0
        && landscape.alpha0 < landscape.alpha
        && landscape.alpha < landscape.beta
        && landscape.beta < landscape.beta0
        && landscape.beta_bar.is_none_or(|bb| landscape.beta0 < bb);

    let mut isotherm = String::from("v,p\n");
    let v_max = landscape
        .beta_bar
        .unwrap_or(landscape.beta0)
        .max(3.0 * params.critical_volume())
        * 1.5;
    let v_min = params.b * 1.001;
    let n = 2000;
    for i in 0..=n {
        let v = v_min + (v_max - v_min) * i as f64 / n as f64;
        isotherm.push_str(&format!(
            "{},{}\n",
            fmt_g17(v),
            fmt_g17(params.pressure(v).map_err(anyhow::Error::from)?)
        ));
    }
    write_file(&config.out, "isotherm.csv", &isotherm)?;
    write_json(
        &config.out,
        "landscape.json",
        &LandscapeSummary {
            config,
            theta_c: params.critical_temperature(),
            landscape: &landscape,
            triviality_threshold: eps_star,
            ordering_ok,
        },
    )?;
    println!("landscape written to {}", config.out.display());
    Ok(())
}

#[derive(Serialize)]
struct SharpSummary<'a> {
    config: &'a RunConfig,
    vbar: f64,
    feasible: bool,
    verdict: &'static str,
    l1: f64,
    l2: f64,
    offset: f64,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    corner_conditions_ok: bool,
}

fn cmd_sharp(config: &RunConfig) -> anyhow::Result<()> {
    let params = validated_params(config)?;
    let landscape = subcritical_landscape(&params)?;
    let vbar = effective_vbar(config, &landscape);
    let feasible = sharp::exists_two_phase(&landscape, params.b, vbar)?;
    let (profile, verdict) = if feasible {
        let kind = match orientation(config) {
            Orientation::Peak => sharp::ProfileKind::SinglePeak,
            Orientation::Valley => sharp::ProfileKind::SingleValley,
        };
        let max_offset = match kind {
            sharp::ProfileKind::SinglePeak => {
                2.0 * (landscape.beta0 - vbar) / landscape.maxwell_width()
            }
            _ => 2.0 * (vbar - landscape.alpha0) / landscape.maxwell_width(),
        };
        (
            sharp::build_profile(&params, &landscape, vbar, kind, 0.5 * max_offset)?,
            "two-phase",
        )
    } else {
        (
            sharp::build_profile(&params, &landscape, vbar, sharp::ProfileKind::Constant, 0.0)?,
            "stable/single-phase",
        )
    };
    let corner = sharp::weierstrass_erdmann_check(&params, &landscape, &profile)?;
    write_file(&config.out, "sharp.csv", &profile.to_csv(config.grid + 1))?;
    write_json(
        &config.out,
        "sharp.json",
        &SharpSummary {
            config,
            vbar,
            feasible,
            verdict,
            l1: profile.l1,
            l2: profile.l2,
            offset: profile.offset,
            breakpoints: profile.breakpoints.clone(),
            values: profile.values.clone(),
            corner_conditions_ok: corner,
        },
    )?;
    println!("sharp profile written to {}", config.out.display());
    Ok(())
}

#[derive(Serialize)]
struct EnergyBlock {
    e_value: f64,
    leading: f64,
    slope_s: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    config: &'a RunConfig,
    vbar: f64,
    epsilon: f64,
    triviality_threshold: f64,
    solution: &'a viscous::ViscousSolution,
    energy: EnergyBlock,
}

fn cmd_solve(config: &RunConfig) -> anyhow::Result<()> {
    let params = validated_params(config)?;
    let landscape = subcritical_landscape(&params)?;
    let vbar = effective_vbar(config, &landscape);
    let eps_star = viscous::triviality_threshold(&params, &landscape);
    let solution = viscous::solve_2n(
        &params,
        &landscape,
        vbar,
        config.epsilon,
        config.n_cells,
        orientation(config),
    )?;
    let solution = viscous::reconstruct_profile(
        &params,
        vbar,
        config.epsilon,
        &solution.first_integral,
        orientation(config),
        config.n_cells,
        config.grid,
        0.0,
    )?;
    let e_value = energy::solution_energy(&params, vbar, &solution)?;
    let pot = vdw_phase::potential::Potential::new(&params, vbar)?;
    let leading = 2.0 * (-landscape.sigma0 * vbar + pot.maxwell_level(&landscape));
    let slope_s = energy::asymptotic_s(&params, &landscape)?;
    write_file(&config.out, "solution.csv", &solution.to_csv())?;
    write_json(
        &config.out,
        "solution.json",
        &SolveSummary {
            config,
            vbar,
            epsilon: config.epsilon,
            triviality_threshold: eps_star,
            solution: &solution,
            energy: EnergyBlock {
                e_value,
                leading,
                slope_s,
                residual: e_value - leading - config.epsilon * slope_s,
            },
        },
    )?;
    println!("solution written to {}", config.out.display());
    Ok(())
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    config: &'a RunConfig,
    vbar: f64,
    truncated: bool,
    warning: Option<String>,
    rungs_requested: usize,
    rungs_solved: usize,
    decay_fit: Option<limits::DecayFit>,
    predicted_decay: (f64, f64),
    final_branch: Option<viscous::LambdaBranch>,
    final_sup_distance: Option<f64>,
    final_eps_t: Option<(f64, f64)>,
    phase_lengths: (f64, f64),
}

fn cmd_sweep(config: &RunConfig) -> anyhow::Result<()> {
    let params = validated_params(config)?;
    let landscape = subcritical_landscape(&params)?;
    let vbar = effective_vbar(config, &landscape);
    let sweep = limits::run_sweep(
        &params,
        &landscape,
        vbar,
        config.eps_start,
        config.eps_end,
        config.eps_ratio,
        orientation(config),
    )?;
    let decay_fit = limits::fit_decay(&sweep).ok();
    let predicted = limits::predicted_decay_constants(&params, &landscape, vbar);
    let width = landscape.maxwell_width();
    let l1 = 2.0 * (landscape.beta0 - vbar) / width;
    write_file(&config.out, "sweep.csv", &sweep.to_csv())?;
    write_json(
        &config.out,
        "sweep.json",
        &SweepSummary {
            config,
            vbar,
            truncated: sweep.truncated,
            warning: sweep
                .truncated
                .then(|| "ladder truncated: continuation failed before eps_end".to_string()),
            rungs_requested: sweep.eps_ladder.len(),
            rungs_solved: sweep.rows.len(),
            decay_fit,
            predicted_decay: predicted,
            final_branch: limits::final_branch(&sweep, &landscape),
            final_sup_distance: sweep.rows.last().and_then(|r| r.sup_distance),
            final_eps_t: sweep.rows.last().map(|r| (r.eps_t1, r.eps_t2)),
            phase_lengths: (l1, 2.0 - l1),
        },
    )?;
    println!(
        "sweep written to {} ({} of {} rungs solved)",
        config.out.display(),
        sweep.rows.len(),
        sweep.eps_ladder.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct StabilitySummary<'a> {
    config: &'a RunConfig,
    rho0: f64,
    eps_rho: f64,
    cutoff: f64,
    largest_unstable: Option<u32>,
    n_max: u32,
}

fn cmd_stability(config: &RunConfig) -> anyhow::Result<()> {
    let params = validated_params(config)?;
    let landscape = subcritical_landscape(&params)?;
    let vbar = config
        .vbar
        .unwrap_or(0.5 * (landscape.alpha + landscape.beta));
    if !(vbar > params.b) {
        return Err(
            Error::InvalidConfig(format!("vbar must exceed the co-volume, got {vbar}")).into(),
        );
    }
    let rho0 = 1.0 / vbar;
    let eps_rho = config.epsilon;
    let n_max = 200;
    let spectrum = stability::unstable_band(&params, rho0, eps_rho, n_max)?;
    write_file(&config.out, "spectrum.csv", &spectrum.to_csv())?;
    write_json(
        &config.out,
        "stability.json",
        &StabilitySummary {
            config,
            rho0,
            eps_rho,
            cutoff: spectrum.cutoff,
            largest_unstable: spectrum.largest_unstable(),
            n_max,
        },
    )?;
    println!("spectrum written to {}", config.out.display());
    Ok(())
}

#[derive(Serialize)]
struct OrderingSummary<'a> {
    config: &'a RunConfig,
    vbar: f64,
    epsilon: f64,
    report: &'a energy::EnergyReport,
}

fn cmd_energy_ordering(config: &RunConfig) -> anyhow::Result<()> {
    let params = validated_params(config)?;
    let landscape = subcritical_landscape(&params)?;
    let vbar = effective_vbar(config, &landscape);
    let report = energy::ordering_report(
        &params,
        &landscape,
        vbar,
        config.epsilon,
        config.n_cells.max(2),
    )?;
    let mut csv = String::from("cells,energy\n");
    for (label, e) in &report.comparisons {
        let cells = label
            .strip_prefix("cells=")
            .map(|c| c.to_string())
            .unwrap_or_else(|| "0".to_string());
        csv.push_str(&format!("{cells},{}\n", fmt_g17(*e)));
    }
    write_file(&config.out, "energies.csv", &csv)?;
    write_json(
        &config.out,
        "energy-ordering.json",
        &OrderingSummary {
            config,
            vbar,
            epsilon: config.epsilon,
            report: &report,
        },
    )?;
    println!("energy ordering written to {}", config.out.display());
    Ok(())
}

fn exit_code_for(error: &anyhow::Error) -> i32 {
    match error.downcast_ref::<Error>() {
        Some(
            Error::Domain(_)
            | Error::Supercritical { .. }
            | Error::NearCritical { .. }
            | Error::OutOfBand { .. }
            | Error::CompanionUndefined { .. }
            | Error::Infeasible { .. }
            | Error::OffsetOutOfRange { .. }
            | Error::InvalidConfig(_),
        ) => 2,
        Some(Error::NoSolution { .. }) => 3,
        Some(_) => 4,
        None => 4,
    }
}

fn main() {
    let cli = Cli::parse();
    let config = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    let result = match cli.command {
        Command::Landscape => cmd_landscape(&config),
        Command::Sharp => cmd_sharp(&config),
        Command::Solve => cmd_solve(&config),
        Command::Sweep => cmd_sweep(&config),
        Command::Stability => cmd_stability(&config),
        Command::EnergyOrdering => cmd_energy_ordering(&config),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(exit_code_for(&e));
    }
}
