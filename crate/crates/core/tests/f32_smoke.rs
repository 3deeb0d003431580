//! The library is generic over the scalar; f64 is the supported precision
//! and f32 only has to compile and stay in the right ballpark.

use lightstore::detection::{gated_power_spectrum, BeatSeries, GateConfig};
use lightstore::dynamics::{integrate, lossless_evolve, IntegratorConfig, ModeState};
use lightstore::model::{DriveConfig, ResonatorParams};
use lightstore::pulse::{PulseKind, PulseSequence, PulseSpec};

#[test]
fn f32_quarter_swap_roughly_matches_the_closed_form() {
    let params = ResonatorParams::<f32> {
        f_m: 108.4e6,
        gamma_m: 0.0,
        kappa: 0.0,
        kappa_ex: 0.0,
        f_cavity_offset: 0.0,
    };
    let drive = DriveConfig::resonant(params.f_m);
    let dur = 0.125e-6_f32;
    let seq = PulseSequence::new(vec![PulseSpec::new(PulseKind::Writing, 0.0, dur, 0.0, 2.0e6)]);
    let cfg = IntegratorConfig::to(dur).with_initial(ModeState::cavity_loaded());
    let traj = integrate(&params, &drive, &seq, &cfg).unwrap();
    let (a, b) = lossless_evolve(
        std::f32::consts::FRAC_PI_2,
        num_complex::Complex::new(1.0_f32, 0.0),
        num_complex::Complex::new(0.0, 0.0),
    );
    let j = traj.len() - 1;
    let err = (traj.alpha[j] - a).norm() + (traj.beta[j] - b).norm();
    assert!(err < 1.0e-3, "f32 quarter swap drifted by {err:.3e}");
}

#[test]
fn f32_spectrum_pipeline_runs() {
    let (f, fs) = (10.0e6_f32, 100.0e6_f32);
    let dt = 1.0 / fs;
    let n = (40.0e-6 / dt) as usize;
    let power: Vec<f32> =
        (0..=n).map(|j| 2.0_f32.sqrt() * (std::f32::consts::TAU * f * dt * j as f32).sin()).collect();
    let beat = BeatSeries { t0: 0.0, dt, power, t_ref: 0.0 };
    let gate = GateConfig::around(f, 2.0e-6).with_gate_length(30.0e-6).with_span(8.0e6);
    let spec = gated_power_spectrum(&beat, &gate).unwrap();
    let total: f32 = spec.density.iter().sum::<f32>() * spec.df;
    assert!((total - 1.0).abs() < 0.05, "f32 tone power integrated to {total:.3}");
    assert!((spec.peak_frequency() - f).abs() < 0.1e6);
}
