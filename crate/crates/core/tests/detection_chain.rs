//! End-to-end properties of the emulated detection chain: the resolution
//! filter sets the spectral line width, the gate sets the temporal width,
//! and the detected beat sits at the mechanical frequency regardless of the
//! control detuning.

use lightstore::detection::{
    gated_power_spectrum, heterodyne_beat, BeatSeries, GateConfig, DEFAULT_GATE_LENGTH,
    DEFAULT_RBW,
};
use lightstore::dynamics::{integrate, IntegratorConfig};
use lightstore::experiments::fit::measure_fwhm;
use lightstore::experiments::sweeps::scan_gate_delays;
use lightstore::model::{DriveConfig, ResonatorParams};
use lightstore::pulse::{PulseKind, PulseSequence, PulseSpec};

fn tone_burst(
    f: f64,
    fs: f64,
    t_total: f64,
    amp: f64,
    burst: Option<(f64, f64)>,
) -> BeatSeries<f64> {
    let dt = 1.0 / fs;
    let n = (t_total / dt).round() as usize;
    let ramp = 20.0e-9;
    let power = (0..=n)
        .map(|j| {
            let t = dt * j as f64;
            let env = match burst {
                None => 1.0,
                Some((on, off)) => {
                    let up = ((t - on) / ramp).clamp(0.0, 1.0);
                    let down = ((off - t) / ramp).clamp(0.0, 1.0);
                    let edge = |u: f64| 0.5 * (1.0 - (std::f64::consts::PI * u).cos());
                    edge(up) * edge(down)
                }
            };
            env * amp * (std::f64::consts::TAU * f * t).sin()
        })
        .collect();
    BeatSeries { t0: 0.0, dt, power, t_ref: 0.0 }
}

#[test]
fn resolution_filter_sets_the_spectral_width() {
    // Long gate: the window's own broadening (~1/30 us = 33 kHz) is tiny
    // against the 1 MHz resolution bandwidth, so the detected line is the
    // filter shape.
    let beat = tone_burst(108.4e6, 1.0e9, 40.0e-6, std::f64::consts::SQRT_2, None);
    let gate = GateConfig::around(108.4e6, 2.0e-6).with_gate_length(30.0e-6);
    let spec = gated_power_spectrum(&beat, &gate).unwrap();
    let freqs: Vec<f64> = (0..spec.density.len()).map(|k| spec.f0 + spec.df * k as f64).collect();
    let fwhm = measure_fwhm(&freqs, &spec.density).unwrap();
    assert!(
        (fwhm - DEFAULT_RBW).abs() <= 0.1 * DEFAULT_RBW,
        "line width {fwhm:.3e} Hz should be the resolution bandwidth {DEFAULT_RBW:.1e} Hz"
    );
}

#[test]
fn detected_temporal_width_is_gate_limited() {
    // A 0.2 us burst, far below the 3 us gate: the gate-delay scan must
    // report a peak no narrower than the gate.
    let beat = tone_burst(108.4e6, 1.0e9, 20.0e-6, 50.0, Some((10.0e-6, 10.2e-6)));
    let template = GateConfig::around(108.4e6, 0.0);
    let delays: Vec<f64> = (0..=24).map(|k| 4.0e-6 + 0.5e-6 * k as f64).collect();
    let scan = scan_gate_delays(&beat, &template, &delays).unwrap();
    let width = measure_fwhm(&scan.delays, &scan.integrated).unwrap();
    assert!(
        width >= DEFAULT_GATE_LENGTH,
        "detected width {width:.3e} s is below the gate length"
    );
    assert!(width <= 1.3 * DEFAULT_GATE_LENGTH, "detected width {width:.3e} s is implausibly wide");
}

#[test]
fn retrieval_beats_at_the_mechanical_frequency_when_the_drive_is_detuned() {
    // Detuning moves the control carrier, not the emitted light: the stored
    // excitation re-emits at the cavity resonance, one mechanical frequency
    // away from the LO, so the detected peak stays at f_m rather than
    // following the analysis carrier f_m + delta.
    let params: ResonatorParams<f64> = ResonatorParams::experiment_defaults();
    let delta = 0.3e6;
    let drive = DriveConfig::detuned(params.f_m, delta);
    let seq = PulseSequence::new(vec![
        PulseSpec::new(PulseKind::Writing, 0.0, 2.0e-6, 50.0e-9, 0.7e6),
        PulseSpec::new(PulseKind::Readout, 2.5e-6, 3.0e-6, 50.0e-9, 0.7e6),
    ])
    .with_lo_amplitude(1.0e3)
    .with_modulation_depth(0.02);
    let traj = integrate(&params, &drive, &seq, &IntegratorConfig::to(6.0e-6)).unwrap();
    let beat = heterodyne_beat(&traj, &seq);
    let gate = GateConfig::around(params.f_m, 2.5e-6);
    let spec = gated_power_spectrum(&beat, &gate).unwrap();
    let peak = spec.peak_frequency();
    assert!(
        (peak - params.f_m).abs() < 0.1e6,
        "retrieved line at {peak:.4e} Hz, expected the mechanical frequency {:.4e} Hz",
        params.f_m
    );
    assert!(
        (peak - (params.f_m + delta)).abs() > 0.2e6,
        "retrieved line follows the detuned carrier ({peak:.4e} Hz)"
    );
}
