//! Plain-text emitters: CSV tables, fit summaries, run manifests, and the
//! figure data bundle. Floats are printed as shortest round-trip decimals
//! in scientific notation, so files re-parse to the exact computed bits and
//! identical runs produce identical bytes.

use std::fmt::Write as _;

use lightstore::experiments::fit::{measure_fwhm, FitModel};
use lightstore::experiments::presets::{Preset, PresetData};
use lightstore::{FitRecord, GateScan, SweepResult, TemporalProfile, Trajectory};

/// Shortest scientific decimal that reparses to the same bits.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Run manifest: tool version, invoked command, resolved run facts, and the
/// configuration echo (itself valid config text).
pub fn manifest(version: &str, command: &str, notes: &[(String, String)], config: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# lightstore {version}");
    let _ = writeln!(s, "# command: {command}");
    for (k, v) in notes {
        let _ = writeln!(s, "# {k}: {v}");
    }
    s.push('\n');
    s.push_str(config);
    s
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::with_capacity(64 + traj.len() * 96);
    s.push_str("t_s,re_alpha,im_alpha,re_beta,im_beta,abs_sout_sq\n");
    for j in 0..traj.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            num(traj.time(j)),
            num(traj.alpha[j].re),
            num(traj.alpha[j].im),
            num(traj.beta[j].re),
            num(traj.beta[j].im),
            num(traj.s_out[j].norm_sqr()),
        );
    }
    s
}

/// Generic CSV: `# `-prefixed metadata lines, a header row, then rows.
pub fn table(meta: &[String], columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for m in meta {
        let _ = writeln!(s, "# {m}");
    }
    let _ = writeln!(s, "{}", columns.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| num(*v)).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

fn fit_meta(fit: &FitRecord) -> String {
    let model = match fit.model {
        FitModel::ExponentialDecay => "exponential-decay",
        FitModel::LineshapeFwhm => "lineshape-fwhm",
    };
    format!(
        "fit: model={model} amplitude={} scale={} residual_norm={} converged={}",
        num(fit.amplitude),
        num(fit.scale),
        num(fit.residual_norm),
        fit.converged
    )
}

/// Sweep curve: swept value, retrieved energy, normalized energy, with the
/// fit (when present) recorded as a metadata line.
pub fn sweep_csv(meta: &[String], res: &SweepResult) -> String {
    let mut all = meta.to_vec();
    if let Some(fit) = &res.fit {
        all.push(fit_meta(fit));
    }
    let rows: Vec<Vec<f64>> = res
        .values
        .iter()
        .zip(&res.energies)
        .zip(&res.normalized)
        .map(|((v, e), n)| vec![*v, *e, *n])
        .collect();
    table(&all, &[&res.parameter, "retrieved_energy", "normalized_energy"], &rows)
}

/// Storage run: per-sample occupancies plus the energy bookkeeping.
pub fn profile_csv(meta: &[String], p: &TemporalProfile) -> String {
    let mut all = meta.to_vec();
    all.push(format!("incident_photons: {}", num(p.incident)));
    all.push(format!("retrieved_photons: {}", num(p.retrieved)));
    all.push(format!("efficiency: {}", num(p.efficiency)));
    all.push(format!(
        "retrieval_window_s: {} to {}",
        num(p.window.0),
        num(p.window.1)
    ));
    let mut s = String::with_capacity(64 + p.traj.len() * 72);
    for m in &all {
        let _ = writeln!(s, "# {m}");
    }
    s.push_str("t_s,cavity_photons,mech_phonons,out_flux_per_s\n");
    for j in 0..p.traj.len() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            num(p.traj.time(j)),
            num(p.traj.alpha[j].norm_sqr()),
            num(p.traj.beta[j].norm_sqr()),
            num(p.traj.s_out[j].norm_sqr()),
        );
    }
    s
}

/// Gate-delay scan of one run: integrated gated power versus gate delay.
pub fn gate_scan_csv(meta: &[String], scan: &GateScan) -> String {
    let rows: Vec<Vec<f64>> = scan
        .delays
        .iter()
        .zip(&scan.integrated)
        .map(|(d, p)| vec![*d, *p])
        .collect();
    table(meta, &["gate_delay_s", "integrated_power"], &rows)
}

/// Labelled sweep family on a shared grid, one energy and one normalized
/// column per curve. Errors if the curves were not swept over the same grid.
pub fn curves_csv(
    meta: &[String],
    curves: &[(String, SweepResult)],
) -> Result<String, String> {
    let Some((_, first)) = curves.first() else {
        return Err("no curves to write".to_string());
    };
    for (label, c) in curves {
        if c.values != first.values {
            return Err(format!("curve \"{label}\" was swept over a different grid"));
        }
    }
    let mut all = meta.to_vec();
    for (label, c) in curves {
        if let Some(fit) = &c.fit {
            all.push(format!("{label} {}", fit_meta(fit)));
        }
    }
    let mut columns: Vec<String> = vec![first.parameter.clone()];
    for (label, _) in curves {
        columns.push(format!("{label}_energy"));
        columns.push(format!("{label}_normalized"));
    }
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = first
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut row = vec![*v];
            for (_, c) in curves {
                row.push(c.energies[i]);
                row.push(c.normalized[i]);
            }
            row
        })
        .collect();
    Ok(table(&all, &column_refs, &rows))
}

/// Gate-delay scans keyed by readout duration, in long form.
pub fn family_csv(meta: &[String], family: &[(f64, GateScan)]) -> String {
    let rows: Vec<Vec<f64>> = family
        .iter()
        .flat_map(|(dur, scan)| {
            scan.delays
                .iter()
                .zip(&scan.integrated)
                .map(|(d, p)| vec![*dur, *d, *p])
                .collect::<Vec<_>>()
        })
        .collect();
    table(meta, &["readout_duration_s", "gate_delay_s", "integrated_power"], &rows)
}

/// Map one preset's output to its plot-ready data file.
pub fn figure_file(preset: Preset, data: &PresetData<f64>) -> Result<(String, String), String> {
    let name = format!("{}.csv", preset.name());
    let meta = vec![format!("preset {}: {}", preset.name(), preset.describe())];
    let content = match data {
        PresetData::Profile(p) => profile_csv(&meta, p),
        PresetData::Sweep(res) => sweep_csv(&meta, res),
        PresetData::Curves(curves) => curves_csv(&meta, curves)?,
        PresetData::GateScan { scan, readout_start_minus_signal_center, writing_end_to_readout_start } => {
            let mut all = meta;
            all.push("gate_delay_s counts from the writing-pulse start".to_string());
            all.push(format!(
                "readout_start_minus_signal_center_s: {}",
                num(*readout_start_minus_signal_center)
            ));
            all.push(format!(
                "writing_end_to_readout_start_s: {}",
                num(*writing_end_to_readout_start)
            ));
            gate_scan_csv(&all, scan)
        }
        PresetData::GateScanFamily(family) => {
            let mut all = meta;
            all.push("gate_delay_s counts from the writing-pulse start".to_string());
            family_csv(&all, family)
        }
    };
    Ok((name, content))
}

/// Human summary of a lifetime-fitted sweep.
pub fn lifetime_summary(res: &SweepResult) -> String {
    let mut s = format!("delay sweep: {} points\n", res.values.len());
    match &res.fit {
        Some(fit) if fit.model == FitModel::ExponentialDecay => {
            s.push_str("exponential fit: energy(delay) = amplitude * exp(-delay / lifetime)\n");
            let _ = writeln!(s, "  amplitude = {} photons at zero delay", num(fit.amplitude));
            let _ = writeln!(
                s,
                "  lifetime = {} s ({:.4} us)",
                num(fit.scale),
                fit.scale * 1.0e6
            );
            let _ = writeln!(s, "  residual_norm = {}", num(fit.residual_norm));
            let _ = writeln!(s, "  converged = {}", fit.converged);
        }
        _ => s.push_str("no exponential fit available\n"),
    }
    s
}

/// Human summary of an intensity-saturation sweep.
pub fn saturation_summary(res: &SweepResult) -> String {
    let mut s = format!("readout-intensity sweep: {} points\n", res.values.len());
    let mut peak = 0;
    for (i, e) in res.energies.iter().enumerate() {
        if *e > res.energies[peak] {
            peak = i;
        }
    }
    let _ = writeln!(
        s,
        "  retrieved energy peaks at relative intensity {} ({} of the unit-intensity value)",
        num(res.values[peak]),
        num(res.normalized[peak])
    );
    if let Some(fit) = &res.fit {
        let _ = writeln!(s, "  {}", fit_meta(fit));
    }
    s
}

/// One lineshape-width line: FWHM of y(x), or why it could not be measured.
pub fn fwhm_line(label: &str, x: &[f64], y: &[f64], unit: &str, factor: f64) -> String {
    match measure_fwhm(x, y) {
        Ok(w) => format!("{label}: fwhm = {} ({:.4} {unit})", num(w), w / factor),
        Err(e) => format!("{label}: fwhm not measurable: {e}"),
    }
}

/// Largest pointwise gap between two normalized curves on a shared grid.
pub fn normalized_gap(a: &SweepResult, b: &SweepResult) -> f64 {
    a.normalized
        .iter()
        .zip(&b.normalized)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Generic plotting companion for the figures bundle; written next to the
/// data so the bundle itself needs no rendering dependency.
pub const PLOT_STUB: &str = r##"#!/usr/bin/env python3
"""Plot every CSV emitted by `lightstore figures`.

Each file holds `#` metadata lines, a header row, then comma-separated
columns; the first column is the x axis. Needs matplotlib only when run.
"""
import csv
import pathlib
import sys


def load(path):
    meta, header, rows = [], None, []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec:
                continue
            if rec[0].startswith("#"):
                meta.append(",".join(rec))
            elif header is None:
                header = rec
            else:
                rows.append([float(x) for x in rec])
    return meta, header, rows


def main(out_dir):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for path in sorted(out_dir.glob("*.csv")):
        meta, header, rows = load(path)
        if not rows:
            continue
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        xs = [r[0] for r in rows]
        for j, name in enumerate(header[1:], start=1):
            ax.plot(xs, [r[j] for r in rows], marker=".", markersize=3, linewidth=1, label=name)
        ax.set_xlabel(header[0])
        ax.set_title(path.stem)
        if len(header) > 2:
            ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(path.with_suffix(".png"), dpi=150)
        plt.close(fig)
        print(f"plotted {path.stem}.png")


if __name__ == "__main__":
    target = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent
    main(target)
"##;
