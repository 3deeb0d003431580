//! Batch front end for the light-storage simulator.
//!
//! `simulate` integrates one run and writes its trajectory, `sweep` maps a
//! parameter grid to a curve plus a fit summary, `figures` emits plot-ready
//! data for every built-in preset, and `validate` checks a configuration.
//! Exit codes: 0 success, 2 configuration error, 3 simulation error, 4 fit
//! error.

mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lightstore::experiments::presets::{
    fig1c_scenario, fig2a_scenario, fig3c_scenario, run_preset, Preset,
};
use lightstore::experiments::sweeps::{
    scenario_gate_scan, sweep_delay, sweep_detuning, sweep_readout_intensity,
};
use lightstore::experiments::temporal_profile;
use lightstore::pulse::PulseKind;
use lightstore::Scenario;

use config::RunConfig;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "lightstore",
    version,
    about = "Pulsed optomechanical light storage: simulate runs, sweep parameters, export figure data"
)]
struct Cli {
    /// Run configuration file; defaults apply for every omitted key.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for output files (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Worker threads for sweeps; results are identical for any count.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one run and write trajectory.csv plus a run manifest.
    Simulate {
        /// Built-in single-run scenario (fig1c, fig2a, or fig3c) used
        /// instead of the configuration file.
        #[arg(long, value_name = "NAME")]
        preset: Option<String>,
    },
    /// Sweep one parameter grid and write the curve plus a fit summary.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
    },
    /// Run every figure preset and write its plot-ready data file.
    Figures,
    /// Check the configuration and report every violated invariant.
    Validate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepKind {
    Delay,
    ReadoutIntensity,
    Detuning,
    ReadoutDuration,
}

impl SweepKind {
    fn name(self) -> &'static str {
        match self {
            SweepKind::Delay => "delay",
            SweepKind::ReadoutIntensity => "readout-intensity",
            SweepKind::Detuning => "detuning",
            SweepKind::ReadoutDuration => "readout-duration",
        }
    }
}

/// Failure carrying the process exit code its class maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn config(msg: String) -> Self {
        Failure { code: 2, msg }
    }
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        Failure::config(e.to_string())
    }
}

fn core_failure(e: lightstore::Error) -> Failure {
    use lightstore::Error;
    let code = match &e {
        Error::InvalidConfig(_) => 2,
        Error::Fit(_) | Error::Shape(_) => 4,
        Error::Domain(_) | Error::Diverged { .. } | Error::Normalization(_) => 3,
    };
    Failure { code, msg: e.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: 3, msg: format!("worker pool: {e}") })?;
    }
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    cfg.resolve();
    match cli.cmd {
        Cmd::Simulate { preset } => cmd_simulate(cfg, preset.as_deref(), &cli.out),
        Cmd::Sweep { kind } => cmd_sweep(&cfg, kind, &cli.out),
        Cmd::Figures => cmd_figures(&cli.out),
        Cmd::Validate => cmd_validate(&cfg),
    }
}

fn ensure_valid(cfg: &RunConfig) -> Result<(), Failure> {
    let violations = cfg.violations();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::config(format!(
            "invalid configuration:\n  {}",
            violations.join("\n  ")
        )))
    }
}

fn write_file(path: PathBuf, content: &str) -> Result<(), Failure> {
    fs::write(&path, content)
        .map_err(|e| Failure { code: 3, msg: format!("writing {}: {e}", path.display()) })
}

fn out_dir(out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out)
        .map_err(|e| Failure { code: 3, msg: format!("creating {}: {e}", out.display()) })
}

fn preset_scenario(name: &str) -> Result<Scenario, Failure> {
    let Some(preset) = Preset::from_name(name) else {
        let all: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
        return Err(Failure::config(format!(
            "unknown preset \"{name}\"; presets: {}",
            all.join(", ")
        )));
    };
    match preset {
        Preset::Fig1c => Ok(fig1c_scenario()),
        Preset::Fig2a => Ok(fig2a_scenario()),
        Preset::Fig3c => Ok(fig3c_scenario()),
        other => Err(Failure::config(format!(
            "preset \"{}\" is not a single run; simulate accepts fig1c, fig2a, and fig3c \
             (use `lightstore figures` for the full bundle)",
            other.name()
        ))),
    }
}

fn cmd_simulate(mut cfg: RunConfig, preset: Option<&str>, out: &Path) -> Result<(), Failure> {
    let mut command = "simulate".to_string();
    if let Some(name) = preset {
        cfg = RunConfig::from_scenario(&preset_scenario(name)?);
        cfg.resolve();
        command = format!("simulate --preset {name}");
    }
    ensure_valid(&cfg)?;
    let traj = cfg.trajectory().map_err(core_failure)?;
    out_dir(out)?;
    let notes = vec![
        ("samples".to_string(), traj.len().to_string()),
        ("dt_s".to_string(), output::num(traj.dt)),
        ("t_end_s".to_string(), output::num(cfg.t_end)),
    ];
    write_file(out.join("trajectory.csv"), &output::trajectory_csv(&traj))?;
    write_file(
        out.join("run_manifest.txt"),
        &output::manifest(VERSION, &command, &notes, &cfg.emit()),
    )?;
    println!(
        "wrote trajectory.csv ({} rows) and run_manifest.txt to {}",
        traj.len(),
        out.display()
    );
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, kind: SweepKind, out: &Path) -> Result<(), Failure> {
    ensure_valid(cfg)?;
    out_dir(out)?;
    let base = cfg.scenario();
    let mut files = Vec::new();
    let mut summary;

    match kind {
        SweepKind::Delay => {
            let res = sweep_delay(&base, &cfg.delays).map_err(core_failure)?;
            let meta =
                vec!["delay_s is writing-pulse end to readout-pulse start".to_string()];
            files.push(("sweep_delay.csv".to_string(), output::sweep_csv(&meta, &res)));
            summary = output::lifetime_summary(&res);
        }
        SweepKind::ReadoutIntensity => {
            let res = sweep_readout_intensity(&base, &cfg.readout_intensities)
                .map_err(core_failure)?;
            let meta = vec![format!(
                "relative intensity 1 is readout coupling {} Hz (coupling scales as sqrt(intensity))",
                output::num(cfg.readout.coupling)
            )];
            files.push((
                "sweep_readout_intensity.csv".to_string(),
                output::sweep_csv(&meta, &res),
            ));
            summary = output::saturation_summary(&res);
        }
        SweepKind::Detuning => {
            let mut curves: Vec<(f64, lightstore::SweepResult)> = Vec::new();
            for &i_rel in &cfg.detuning_intensities {
                let g_r = cfg.readout.coupling * i_rel.sqrt();
                let res =
                    sweep_detuning(&base, &cfg.detunings, g_r, cfg.writing.coupling)
                        .map_err(core_failure)?;
                let meta = vec![
                    format!("relative_readout_intensity: {}", config::plain(i_rel)),
                    format!("readout_coupling_hz: {}", output::num(g_r)),
                ];
                files.push((
                    format!("sweep_detuning_r{}.csv", config::plain(i_rel)),
                    output::sweep_csv(&meta, &res),
                ));
                curves.push((i_rel, res));
            }
            summary = format!("detuning sweep: {} points per curve\n", cfg.detunings.len());
            for (i_rel, res) in &curves {
                summary.push_str(&output::fwhm_line(
                    &format!("  relative intensity {}", config::plain(*i_rel)),
                    &res.values,
                    &res.normalized,
                    "MHz",
                    1.0e6,
                ));
                summary.push('\n');
            }
            if let Some((i0, first)) = curves.first() {
                for (i, res) in curves.iter().skip(1) {
                    let gap = output::normalized_gap(first, res);
                    summary.push_str(&format!(
                        "  max normalized gap between intensities {} and {}: {}\n",
                        config::plain(*i0),
                        config::plain(*i),
                        output::num(gap)
                    ));
                }
            }
        }
        SweepKind::ReadoutDuration => {
            let gate = cfg.gate();
            let ring = 5.0 / (std::f64::consts::TAU * cfg.kappa);
            let scan_end = cfg.gate_delays.iter().fold(0.0_f64, |m, d| m.max(*d)) + cfg.gate_length;
            let mut rows = Vec::new();
            let mut lines = Vec::new();
            for &dur in &cfg.readout_durations {
                let mut sc = base.clone();
                for p in &mut sc.seq.pulses {
                    if p.kind == PulseKind::Readout {
                        p.duration = dur;
                    }
                }
                sc.t_end = (cfg.readout.start + dur + ring).max(scan_end) + 5.0e-8;
                let tag = us_tag(dur);
                let fail = |e| {
                    let mut f = core_failure(e);
                    f.msg = format!("readout duration {tag} us: {}", f.msg);
                    f
                };
                let profile = temporal_profile(&sc).map_err(fail)?;
                let scan =
                    scenario_gate_scan(&sc, &gate, &cfg.gate_delays).map_err(fail)?;
                lines.push(format!(
                    "  readout {tag} us: retrieved = {} photons, {}",
                    output::num(profile.retrieved),
                    output::fwhm_line("detected peak", &scan.delays, &scan.integrated, "us", 1.0e-6)
                ));
                let meta = vec![
                    format!("readout_duration_s: {}", output::num(dur)),
                    "gate_delay_s counts from the writing-pulse start".to_string(),
                ];
                files.push((
                    format!("readout_duration_{tag}us.csv"),
                    output::gate_scan_csv(&meta, &scan),
                ));
                rows.push((dur, profile.retrieved));
            }
            let reference = rows[0].1;
            let table_rows: Vec<Vec<f64>> = rows
                .iter()
                .map(|(d, e)| vec![*d, *e, if reference > 0.0 { e / reference } else { f64::NAN }])
                .collect();
            files.push((
                "sweep_readout_duration.csv".to_string(),
                output::table(
                    &["normalized to the first listed duration".to_string()],
                    &["readout_duration_s", "retrieved_energy", "normalized_energy"],
                    &table_rows,
                ),
            ));
            summary = format!(
                "readout-duration sweep: {} durations\n{}\n",
                cfg.readout_durations.len(),
                lines.join("\n")
            );
        }
    }

    for (name, content) in &files {
        write_file(out.join(name), content)?;
    }
    write_file(out.join("fit_summary.txt"), &summary)?;
    write_file(
        out.join("run_manifest.txt"),
        &output::manifest(VERSION, &format!("sweep {}", kind.name()), &[], &cfg.emit()),
    )?;
    print!("{summary}");
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    println!("wrote {}, fit_summary.txt, run_manifest.txt to {}", names.join(", "), out.display());
    Ok(())
}

/// Readout duration as a microsecond file tag: 3.0e-7 becomes "0.3".
fn us_tag(duration_s: f64) -> String {
    let mut tag = format!("{:.4}", duration_s * 1.0e6);
    while tag.ends_with('0') {
        tag.pop();
    }
    if tag.ends_with('.') {
        tag.pop();
    }
    tag
}

fn cmd_figures(out: &Path) -> Result<(), Failure> {
    out_dir(out)?;
    for preset in Preset::ALL {
        let data = run_preset::<f64>(preset).map_err(|e| {
            let mut f = core_failure(e);
            f.msg = format!("preset {}: {}", preset.name(), f.msg);
            f
        })?;
        let (name, content) = output::figure_file(preset, &data)
            .map_err(|msg| Failure { code: 3, msg: format!("preset {}: {msg}", preset.name()) })?;
        write_file(out.join(&name), &content)?;
        println!("wrote {name}");
    }
    write_file(out.join("plot_figures.py"), output::PLOT_STUB)?;
    println!("wrote plot_figures.py");
    Ok(())
}

fn cmd_validate(cfg: &RunConfig) -> Result<(), Failure> {
    let violations = cfg.violations();
    if !violations.is_empty() {
        let noun = if violations.len() == 1 { "violation" } else { "violations" };
        return Err(Failure::config(format!(
            "invalid configuration ({} {noun}):\n  {}",
            violations.len(),
            violations.join("\n  ")
        )));
    }
    let report = cfg.params().validate();
    println!("configuration valid");
    println!("  resolved-sideband regime (f_m > kappa): {}", report.resolved_sideband);
    println!("  t_end = {} s", output::num(cfg.t_end));
    println!("  gate center = {} Hz", output::num(cfg.gate_center));
    println!(
        "  sweep grids: {} delays, {} intensities, {} detunings, {} durations, {} gate delays",
        cfg.delays.len(),
        cfg.readout_intensities.len(),
        cfg.detunings.len(),
        cfg.readout_durations.len(),
        cfg.gate_delays.len()
    );
    Ok(())
}
