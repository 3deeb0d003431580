//! End-to-end checks of the compiled binary: exit codes, file contracts,
//! determinism across reruns, and agreement between emitted fit metadata and
//! refits of the written data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightstore"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn bin_ok(args: &[&str]) -> Output {
    let out = bin(args);
    assert!(
        out.status.success(),
        "lightstore {args:?} failed (code {:?}):\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn fresh_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

/// Split a CSV into `#` metadata lines, the header, and column-major data.
fn parse_csv(content: &str) -> (Vec<String>, Vec<String>, Vec<Vec<f64>>) {
    let mut meta = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for line in content.lines() {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            meta.push(rest.trim().to_string());
        } else if header.is_none() {
            let names: Vec<String> = line.split(',').map(str::to_string).collect();
            columns = vec![Vec::new(); names.len()];
            header = Some(names);
        } else {
            for (j, cell) in line.split(',').enumerate() {
                columns[j].push(cell.parse().unwrap_or_else(|e| panic!("cell {cell:?}: {e}")));
            }
        }
    }
    (meta, header.expect("csv should have a header"), columns)
}

fn col<'a>(header: &[String], columns: &'a [Vec<f64>], name: &str) -> &'a [f64] {
    let j = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("column {name} missing from {header:?}"));
    &columns[j]
}

/// Value of a `# key: value` manifest note.
fn note(manifest: &str, key: &str) -> String {
    let prefix = format!("# {key}: ");
    manifest
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("note {key} missing from manifest"))
        .to_string()
}

/// The configuration text embedded in a manifest (first section header on).
fn config_echo(manifest: &str) -> &str {
    let at = manifest.find("\n[").expect("manifest should embed a config") + 1;
    &manifest[at..]
}

/// First whitespace-separated token after `prefix` in `text`, as a float.
fn grab(text: &str, prefix: &str) -> f64 {
    let at = text.find(prefix).unwrap_or_else(|| panic!("{prefix:?} missing from:\n{text}"));
    text[at + prefix.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn manifest_echo_reruns_byte_identically() {
    let dir = fresh_dir("echo_roundtrip");
    let cfg = write_cfg(
        &dir,
        "[model]\nkappa = 2 MHz\nkappa_ex = 1 MHz\n\n[pulses]\nwriting_duration = 1 us\n\
         readout_start = 2 us\nreadout_duration = 1 us\n\n[integrator]\ndt = 1 ns\n",
    );
    let first = dir.join("first");
    let second = dir.join("second");
    bin_ok(&["--config", cfg.to_str().unwrap(), "--out", first.to_str().unwrap(), "simulate"]);

    let manifest = read(&first.join("run_manifest.txt"));
    let echoed = dir.join("echoed.cfg");
    fs::write(&echoed, config_echo(&manifest)).unwrap();
    bin_ok(&["--config", echoed.to_str().unwrap(), "--out", second.to_str().unwrap(), "simulate"]);

    assert_eq!(
        fs::read(first.join("trajectory.csv")).unwrap(),
        fs::read(second.join("trajectory.csv")).unwrap(),
        "rerunning from the manifest's config echo should reproduce the trajectory exactly"
    );
    assert_eq!(manifest, read(&second.join("run_manifest.txt")));
}

#[test]
fn config_errors_point_at_line_and_suggest_the_nearest_name() {
    let dir = fresh_dir("config_errors");
    let cfg = write_cfg(&dir, "[model]\nkapa = 2 MHz\n");
    let out = bin(&["--config", cfg.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "no line number in: {err}");
    assert!(err.contains("kapa") && err.contains("\"kappa\""), "no suggestion in: {err}");

    let cfg = write_cfg(&dir, "[modle]\nf_m = 100 MHz\n");
    let out = bin(&["--config", cfg.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("modle") && err.contains("\"model\""), "no suggestion in: {err}");

    let out = bin(&["simulate", "--preset", "fig9z"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fig9z") && err.contains("fig3c"), "presets not listed in: {err}");
}

#[test]
fn preset_simulation_matches_its_manifest_and_reruns_bit_exactly() {
    let a = fresh_dir("preset_a");
    let b = fresh_dir("preset_b");
    bin_ok(&["--out", a.to_str().unwrap(), "simulate", "--preset", "fig3c"]);
    bin_ok(&["--out", b.to_str().unwrap(), "simulate", "--preset", "fig3c"]);

    let manifest = read(&a.join("run_manifest.txt"));
    let samples: usize = note(&manifest, "samples").parse().unwrap();
    let dt: f64 = note(&manifest, "dt_s").parse().unwrap();
    let t_end: f64 = note(&manifest, "t_end_s").parse().unwrap();
    assert_eq!(samples, (t_end / dt).round() as usize + 1);

    let traj = read(&a.join("trajectory.csv"));
    let rows = traj.lines().count() - 1;
    assert_eq!(rows, samples, "trajectory rows should match the manifest sample count");
    assert!(traj.starts_with("t_s,re_alpha,im_alpha,re_beta,im_beta,abs_sout_sq\n"));

    assert_eq!(
        fs::read(a.join("trajectory.csv")).unwrap(),
        fs::read(b.join("trajectory.csv")).unwrap(),
        "identical invocations should produce identical bytes"
    );
}

#[test]
fn delay_sweep_emits_the_grid_and_a_lifetime_near_the_mechanical_decay() {
    let dir = fresh_dir("sweep_delay");
    bin_ok(&["--out", dir.to_str().unwrap(), "sweep", "delay"]);

    let (meta, header, columns) = parse_csv(&read(&dir.join("sweep_delay.csv")));
    let delays = col(&header, &columns, "delay_s");
    assert_eq!(delays.len(), 24, "default grid is 0.5 to 12 us in 0.5 us steps");
    assert!((delays[0] - 0.5e-6).abs() < 1e-12 && (delays[23] - 12.0e-6).abs() < 1e-12);
    assert!(meta.iter().any(|m| m.contains("model=exponential-decay")));

    let summary = read(&dir.join("fit_summary.txt"));
    let lifetime = grab(&summary, "lifetime = ");
    assert!(
        (3.9e-6..4.5e-6).contains(&lifetime),
        "fitted lifetime {lifetime} s should sit near the mechanical energy decay time"
    );
}

#[test]
fn detuning_curves_at_two_intensities_share_the_normalized_lineshape() {
    let dir = fresh_dir("sweep_detuning");
    let cfg = write_cfg(&dir, "[sweep]\ndetunings = -1.5:1.5:0.25 MHz\n");
    bin_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--workers",
        "2",
        "sweep",
        "detuning",
    ]);

    let full = parse_csv(&read(&dir.join("sweep_detuning_r1.csv")));
    let weak = parse_csv(&read(&dir.join("sweep_detuning_r0.45.csv")));
    let x = col(&full.1, &full.2, "detuning_hz");
    assert_eq!(x.len(), 13);
    let n_full = col(&full.1, &full.2, "normalized_energy");
    let n_weak = col(&weak.1, &weak.2, "normalized_energy");

    let zero = x.iter().position(|v| *v == 0.0).expect("grid should contain zero detuning");
    assert_eq!(n_full[zero], 1.0);
    assert_eq!(n_weak[zero], 1.0);

    let gap = n_full
        .iter()
        .zip(n_weak)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap <= 0.02, "normalized lineshapes should overlay, max gap {gap}");

    let summary = read(&dir.join("fit_summary.txt"));
    assert!(summary.contains("fwhm"), "summary should report linewidths:\n{summary}");
}

#[test]
fn intensity_and_duration_sweeps_write_their_tables() {
    let dir = fresh_dir("sweep_intensity");
    bin_ok(&["--out", dir.to_str().unwrap(), "sweep", "readout-intensity"]);
    let (_, header, columns) = parse_csv(&read(&dir.join("sweep_readout_intensity.csv")));
    let rel = col(&header, &columns, "relative_readout_intensity");
    let norm = col(&header, &columns, "normalized_energy");
    assert_eq!(rel.len(), 11, "default grid has 11 intensities");
    let unit = rel.iter().position(|v| *v == 1.0).expect("grid should contain intensity 1");
    assert_eq!(norm[unit], 1.0);
    assert!(read(&dir.join("fit_summary.txt")).contains("peaks at relative intensity"));

    let dir = fresh_dir("sweep_duration");
    bin_ok(&["--out", dir.to_str().unwrap(), "sweep", "readout-duration"]);
    for tag in ["0.3", "0.6", "1.4"] {
        let scan = parse_csv(&read(&dir.join(format!("readout_duration_{tag}us.csv"))));
        assert_eq!(
            col(&scan.1, &scan.2, "gate_delay_s").len(),
            29,
            "default gate grid is 1.5 to 8.5 us in 0.25 us steps"
        );
    }
    let (_, header, columns) = parse_csv(&read(&dir.join("sweep_readout_duration.csv")));
    let norm = col(&header, &columns, "normalized_energy");
    assert_eq!(norm.len(), 3);
    assert_eq!(norm[0], 1.0, "energies are normalized to the first duration");
    assert!(
        norm[1] > norm[0] && norm[2] > norm[1],
        "longer readout should retrieve more energy: {norm:?}"
    );
}

#[test]
fn figures_bundle_is_complete_and_self_consistent() {
    let dir = fresh_dir("figures");
    bin_ok(&["--out", dir.to_str().unwrap(), "figures"]);

    for name in
        ["fig1c", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "supp1", "supp2a", "supp2b"]
    {
        assert!(dir.join(format!("{name}.csv")).exists(), "{name}.csv missing");
    }
    assert!(dir.join("plot_figures.py").exists());

    // The bundled lifetime fit must be reproducible from the data next to it.
    let (meta, header, columns) = parse_csv(&read(&dir.join("fig2b.csv")));
    let fit_line = meta.iter().find(|m| m.starts_with("fit:")).expect("fig2b should carry a fit");
    let written_scale = grab(fit_line, "scale=");
    let refit = lightstore::experiments::fit::fit_exponential(
        col(&header, &columns, "delay_s"),
        col(&header, &columns, "retrieved_energy"),
    )
    .expect("refit should converge");
    assert!(
        (refit.scale - written_scale).abs() <= 1e-9 * written_scale,
        "refit lifetime {} differs from bundled {written_scale}",
        refit.scale
    );

    // Normalized detuning curves at both readout couplings must overlay.
    let (_, header, columns) = parse_csv(&read(&dir.join("supp2a.csv")));
    let normalized: Vec<&[f64]> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.ends_with("_normalized"))
        .map(|(j, _)| columns[j].as_slice())
        .collect();
    assert_eq!(normalized.len(), 2, "expected two curves in {header:?}");
    let gap = normalized[0]
        .iter()
        .zip(normalized[1])
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap <= 0.02, "supp2a normalized curves should overlay, max gap {gap}");

    // The pulse-timing scan must state both ways of counting its delay axis.
    let fig2a = read(&dir.join("fig2a.csv"));
    assert!(fig2a.contains("readout_start_minus_signal_center_s:"));
    assert!(fig2a.contains("writing_end_to_readout_start_s:"));
}

#[test]
fn validate_passes_defaults_and_lists_every_violation() {
    let out = bin_ok(&["validate"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("configuration valid"), "unexpected output: {text}");
    assert!(text.contains("resolved-sideband"));

    let dir = fresh_dir("validate_bad");
    let cfg = write_cfg(&dir, "[model]\ngamma_m = -1 kHz\nkappa_ex = 60 MHz\n");
    let out = bin(&["--config", cfg.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("gamma_m") && err.contains("kappa_ex"),
        "both violations should be listed: {err}"
    );
}
